#pragma once

#include "qdspin/model.hpp"
#include "qdspin/observables.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace qdspin::oracle {

// Brute-force reference engines over the full 2^{N+1}-dimensional space.
// Basis index = (electron down ? 2^N : 0) + nuclear mask, i.e. ordered by
// (electron bit, nuclear mask) with electron up first.

inline constexpr int kMaxFullNuclei = 12;
inline constexpr int kMaxLiouvilleNuclei = 6;

[[nodiscard]] std::size_t full_index(int n_nuclei, Electron electron, NuclearMask mask);

/// Full H, element by element from diag_energy and flip_element.
/// Throws CapacityError for N > 12.
[[nodiscard]] Eigen::MatrixXd build_full_hamiltonian(const CouplingSet& cs);

/// Diagonal of M_z = s_z + sum_k I_kz in units of 1/2.
[[nodiscard]] Eigen::VectorXd mz_diagonal(int n_nuclei);

/// Full-space amplitude vector of a sector-resolved state (weights applied).
[[nodiscard]] Eigen::VectorXcd to_full_state(const StateSpec& spec);

/// Permutation P with (P^T H P) = direct sum of sector Hamiltonians, sectors
/// ordered m = -1, 0, ..., N and [Y | X] inside each. Column k of P is the
/// full-space unit vector of the k-th sector basis state.
[[nodiscard]] std::vector<std::size_t> sector_order(int n_nuclei);

class FullPropagator {
public:
	explicit FullPropagator(const Eigen::MatrixXd& hamiltonian);

	[[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& state, double t) const;
	[[nodiscard]] const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

private:
	Eigen::VectorXd eigenvalues_;
	Eigen::MatrixXcd eigenvectors_;
};

/// Spectral evolution of `initial` to every time in `times`.
[[nodiscard]] std::vector<Eigen::VectorXcd> evolve_full(const Eigen::MatrixXd& hamiltonian,
                                                        const Eigen::VectorXcd& initial,
                                                        std::span<const double> times);

/// Electron marginal of a pure full-space state.
[[nodiscard]] Eigen::Matrix2cd partial_trace_electron(const Eigen::VectorXcd& state);

/// Electron marginal of a full-space density matrix.
[[nodiscard]] Eigen::Matrix2cd partial_trace_electron(const Eigen::MatrixXcd& density);

/// Bloch vector from a 2x2 density matrix in the (up, down) basis.
[[nodiscard]] SpinVector bloch_vector(const Eigen::Matrix2cd& rho);

/// rho_eN = |up><up| (x) A + |up><down| (x) B + |down><up| (x) B^dagger + |down><down| (x) C.
struct BlockDensity {
	Eigen::MatrixXcd a;
	Eigen::MatrixXcd b;
	Eigen::MatrixXcd c;

	[[nodiscard]] static BlockDensity from_pure_state(const Eigen::VectorXcd& state);
	[[nodiscard]] static BlockDensity from_full(const Eigen::MatrixXcd& density);
	[[nodiscard]] Eigen::MatrixXcd assemble() const;

	/// tr A + tr C.
	[[nodiscard]] double trace() const;
	/// s_z = tr A - tr C and tr B = (s_x - i s_y) / 2.
	[[nodiscard]] SpinVector spin() const;
	/// Nuclear marginal A + C.
	[[nodiscard]] Eigen::MatrixXcd nuclear_marginal() const { return a + c; }
};

/// Nuclear operators entering the block Liouville equations: g_z = sum_k A_k sigma_kz
/// (Pauli, eigenvalues +-1), g_- = (1/2) sum_k A_k I_k^- with unit-element
/// lowering (up -> down), g_+ = g_-^T, and n_z = eps_N sum_k sigma_kz.
struct NuclearFields {
	Eigen::MatrixXcd g_z;
	Eigen::MatrixXcd g_minus;
	Eigen::MatrixXcd g_plus;
	Eigen::MatrixXcd n_z;
	double epsilon_e = 0.0;

	[[nodiscard]] static NuclearFields build(const CouplingSet& cs);
};

/// i dA/dt = (1/2)[g_z, A] + (1/2)(g_- B^dag - B g_+) + [n_z, A]
/// i dB/dt = (1/2){2 eps + g_z, B} + (1/2)(g_- C - A g_-) + [n_z, B]
/// i dC/dt = -(1/2)[g_z, C] + (1/2)(g_+ B - B^dag g_-) + [n_z, C]
/// Returns the time derivatives (the right-hand sides divided by i).
[[nodiscard]] BlockDensity liouville_rhs(const BlockDensity& rho, const NuclearFields& fields);
[[nodiscard]] BlockDensity liouville_rhs(const BlockDensity& rho, const CouplingSet& cs);

enum class LiouvilleMethod {
	Taylor, ///< truncated Taylor series of the (time-independent, linear) generator
	Rk4,    ///< classical Runge-Kutta with step doubling and Richardson extrapolation
};

struct LiouvilleOptions {
	LiouvilleMethod method = LiouvilleMethod::Taylor;
	double local_tol = 1e-13;     ///< Rk4: per-step error bound from step doubling; Taylor: term cutoff
	double initial_step = 0.0;    ///< 0: pick from the operator norm
	std::size_t max_steps = 5'000'000;
};

struct LiouvilleResult {
	std::vector<BlockDensity> states; ///< one per requested time
	std::size_t steps = 0;
	double max_trace_drift = 0.0;
};

/// Integrates the block equations from t = 0. `times` must be non-decreasing
/// and non-negative. Throws NumericError if step control fails. N is limited to 6.
[[nodiscard]] LiouvilleResult liouville_evolve(const BlockDensity& initial, const CouplingSet& cs,
                                               std::span<const double> times, const LiouvilleOptions& options = {});

} // namespace qdspin::oracle
