#pragma once

#include "qdspin/basis.hpp"
#include "qdspin/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <vector>

namespace qdspin {

/// One nonzero of the coupling matrix K.
struct CouplingEntry {
	std::size_t col;
	double value;
};

/// omega-independent content of a sector: shifted energies and the
/// hyperfine coupling between the Y-branch (electron down) and the
/// X-branch (electron up).
///
/// K is stored by rows; row i holds the N-m flips out of y_configs[i],
/// sorted by column.
struct SectorBlocks {
	SectorId sector;
	std::vector<double> b_down; ///< B_m per y-config
	std::vector<double> b_up;   ///< B_{m+1} per x-config
	std::vector<std::vector<CouplingEntry>> k_rows;
	double zeeman_down = 0.0; ///< eps_N (N - 2m), added to every Y diagonal
	double zeeman_up = 0.0;   ///< eps_N (N - 2m - 2), added to every X diagonal

	[[nodiscard]] std::size_t y_dim() const { return b_down.size(); }
	[[nodiscard]] std::size_t x_dim() const { return b_up.size(); }
	[[nodiscard]] std::size_t dim() const { return y_dim() + x_dim(); }

	/// Signed diagonals of H.
	[[nodiscard]] double y_energy(std::size_t i) const { return -b_down[i] + zeeman_down; }
	[[nodiscard]] double x_energy(std::size_t j) const { return b_up[j] + zeeman_up; }

	[[nodiscard]] Eigen::MatrixXd dense_k() const;
};

[[nodiscard]] SectorBlocks build_blocks(const CouplingSet& cs, const SectorBasis& basis);

inline constexpr std::size_t kDefaultDenseCap = 4096;

/// H = [[-diag(b_down), K], [K^T, diag(b_up)]] in [Y | X] order, plus the
/// nuclear Zeeman shifts on each diagonal. Throws CapacityError above `cap`.
[[nodiscard]] Eigen::MatrixXd assemble_hamiltonian(const SectorBlocks& blocks,
                                                   std::size_t cap = kDefaultDenseCap);

/// Partitioned Laplace-domain system [A C; D B] (Ybar, Xbar)^T = i (Y(0), X(0))^T
/// with A = diag(i w + B_m), B = diag(i w - B_{m+1}), C = -K, D = -K^T.
struct LaplaceLhs {
	Eigen::VectorXcd a_diag;
	Eigen::VectorXcd b_diag;
	Eigen::MatrixXd c;
	Eigen::MatrixXd d;

	/// Dense (d x d) form of the partitioned matrix.
	[[nodiscard]] Eigen::MatrixXcd dense() const;

	/// Solves for (Ybar, Xbar) given the initial column (Y(0), X(0)).
	[[nodiscard]] Eigen::VectorXcd solve(const Eigen::VectorXcd& initial) const;
};

[[nodiscard]] LaplaceLhs laplace_lhs(const SectorBlocks& blocks, std::complex<double> laplace_var);

/// Plain-text listing of b_down, b_up and dense K, one row per line.
void dump_blocks(const SectorBlocks& blocks, std::ostream& out);

} // namespace qdspin
