#pragma once

#include "qdspin/basis.hpp"
#include "qdspin/evolver.hpp"
#include "qdspin/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <map>
#include <vector>

namespace qdspin {

/// Weight C(M_z(m)) and the within-sector amplitude columns of one sector.
struct SectorAmplitudes {
	std::complex<double> weight{1.0, 0.0};
	Eigen::VectorXcd y; ///< length C(N,m)
	Eigen::VectorXcd x; ///< length C(N,m+1)

	[[nodiscard]] Eigen::VectorXcd column() const;
	[[nodiscard]] double norm_squared() const { return std::norm(weight) * (y.squaredNorm() + x.squaredNorm()); }
};

/// Global state as a superposition over sectors m in [-1, N]. Only
/// populated sectors are stored. Within a sector only the product
/// weight * amplitude is physical.
struct StateSpec {
	int n_nuclei = 0;
	std::map<int, SectorAmplitudes> sectors;

	[[nodiscard]] double norm_squared() const;
	/// <M_z> = sum_m M_z(m) * |C|^2 * ||amplitudes||^2.
	[[nodiscard]] double mz_expectation() const;
};

/// Electron spin direction on the Bloch sphere.
struct BlochDirection {
	double theta = 0.0;
	double phi = 0.0;

	static BlochDirection up() { return {0.0, 0.0}; }
	static BlochDirection down();
};

/// |e(theta, phi)> (x) |mask>: the down component becomes the Y amplitude of
/// sector popcount(mask) and the up component the X amplitude of sector
/// popcount(mask)-1. Components with zero weight are not instantiated.
[[nodiscard]] StateSpec from_product_state(int n_nuclei, BlochDirection electron, NuclearMask mask);

/// Rescales every sector weight so that the global norm is one.
/// Throws DomainError for the zero state.
[[nodiscard]] StateSpec normalize(const StateSpec& spec);

/// Checks sector ids, column lengths and finiteness. Throws DomainError.
void validate(const StateSpec& spec);

[[nodiscard]] double s_z_of(const StateSpec& state);

/// s_+ = (s_x + i s_y) / 2 = sum over nuclear configurations S of
/// conj(C_{m-1} X_S) * C_m Y_S, pairing the X-branch of sector m-1 with the
/// Y-branch of sector m (both hold the configurations with m nuclear downs).
[[nodiscard]] std::complex<double> s_plus_of(const StateSpec& state);

struct SpinVector {
	double x = 0.0;
	double y = 0.0;
	double z = 0.0;

	[[nodiscard]] double length() const;
};

[[nodiscard]] SpinVector spin_of(const StateSpec& state);

/// rho_e = (I + s . sigma) / 2. Throws NumericError if |s| > 1 + 1e-8.
[[nodiscard]] Eigen::Matrix2cd reduced_density_matrix(const SpinVector& s);

/// Electron spin and global norm on a time grid.
struct SpinTrajectory {
	std::vector<double> times;
	std::vector<double> s_x;
	std::vector<double> s_y;
	std::vector<double> s_z;
	std::vector<double> norm;

	[[nodiscard]] std::size_t size() const { return times.size(); }
};

/// State at time step `step`: weights of `spec`, amplitudes from `trajectories`.
[[nodiscard]] StateSpec snapshot(const StateSpec& spec, const std::map<int, AmplitudeTrajectory>& trajectories,
                                 std::size_t step);

/// Assembles s(t) and norm(t) from per-sector trajectories on a shared grid.
[[nodiscard]] SpinTrajectory assemble_trajectory(const StateSpec& spec,
                                                 const std::map<int, AmplitudeTrajectory>& trajectories);

struct InvariantReport {
	double max_norm_deviation = 0.0;
	double max_bloch_excess = 0.0; ///< max(|s|^2 - 1, 0)

	[[nodiscard]] bool ok(double norm_tol = 1e-10, double bloch_tol = 1e-10) const
	{
		return max_norm_deviation <= norm_tol && max_bloch_excess <= bloch_tol;
	}
};

[[nodiscard]] InvariantReport check_invariants(const SpinTrajectory& traj);

/// CSV with header `t,s_x,s_y,s_z,norm`, 17 significant digits.
void write_csv(const SpinTrajectory& traj, std::ostream& out);

} // namespace qdspin
