#pragma once

#include "qdspin/blocks.hpp"
#include "qdspin/evolver.hpp"
#include "qdspin/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace qdspin {

// Closed-form solution of the M_z = N-1 (m = 0) sector.
//
// With x = i*w, the Laplace-domain amplitude Ybar_0 is i * dtilde(x) / D(x), where
//   D(x)      = (x - e_y) prod_i (x - c_i) - sum_i w_i prod_{j != i} (x - c_j)
//   dtilde(x) = d(x) Y_0(0) + sum_i (A_i / 4) X_i(0) prod_{j != i} (x - c_j)
//   d(x)      = prod_i (x - c_i)
// e_y is the Y diagonal (-B_0), c_i = B_0 - A_i the X diagonals and w_i = A_i^2 / 16.
// The roots of D are the sector eigenvalues.

/// Arrowhead data of the m = 0 sector: D(x) = d(x) * (x - center - sum_i weights_i / (x - poles_i)).
struct SecularProblem {
	double center = 0.0;
	std::vector<double> poles;
	std::vector<double> weights;

	[[nodiscard]] std::size_t degree() const { return poles.size() + 1; }
};

[[nodiscard]] SecularProblem m0_secular_problem(const CouplingSet& cs);

/// Ascending coefficients c_0 .. c_{N+1} of D in x = i*w; c_{N+1} = 1.
[[nodiscard]] std::vector<double> char_poly_coeffs(const CouplingSet& cs);
[[nodiscard]] std::vector<double> char_poly_coeffs(const SecularProblem& problem);

/// D evaluated directly from its product form.
[[nodiscard]] std::complex<double> char_poly_eval(const SecularProblem& problem, std::complex<double> x);

/// Real roots of a monic real polynomial (ascending coefficients) via the
/// companion matrix, polished by Newton on the coefficient form. Throws
/// NumericError if a root has |Im| > 1e-6 (relative to max(1, |root|)).
[[nodiscard]] std::vector<double> find_poles(std::span<const double> coeffs);

/// All roots of D for a secular problem, ascending, with multiplicity.
///
/// Coincident poles are merged (each merge of k poles contributes the pole
/// value k-1 times as an exact root) and zero-weight poles are exact roots.
/// The remaining roots are seeded from the companion matrix of the deflated
/// polynomial and polished on the secular form inside their interlacing bracket.
[[nodiscard]] std::vector<double> secular_roots(const SecularProblem& problem);

/// Exact m = 0 poles Omega_l, ascending.
[[nodiscard]] std::vector<double> m0_poles(const CouplingSet& cs);

/// True if two consecutive sorted values are closer than rel_tol * scale.
[[nodiscard]] bool has_degenerate_poles(std::span<const double> sorted, double rel_tol = 1e-8);

/// Residue representation of the m = 0 amplitudes for one initial state.
struct RationalSolution {
	SecularProblem problem;
	std::vector<double> poles;           ///< Omega_l, ascending
	std::vector<double> d_roots;         ///< c_i = B_0 - A_i (+ Zeeman shifts)
	std::vector<double> couplings;       ///< A_i
	std::complex<double> y0_initial;
	std::vector<std::complex<double>> x_initial;
	std::vector<std::complex<double>> y_weights;         ///< residue of Y_0 at each Omega_l
	std::vector<std::complex<double>> x_own_weights;     ///< coefficient of exp(-i c_j t) in X_j
	std::vector<std::vector<std::complex<double>>> x_weights; ///< [j][l] coefficient of exp(-i Omega_l t) in X_j
};

/// Degeneracy tolerance for residue inversion, relative to the spectral range.
inline constexpr double kPoleDegeneracyTol = 1e-8;

/// Builds the residue weights. Throws DegeneratePolesError when two poles
/// coincide or some c_j coincides with a pole; use the spectral evolver then.
[[nodiscard]] RationalSolution make_rational_solution(const CouplingSet& cs, std::complex<double> y0_initial,
                                                      std::span<const std::complex<double>> x_initial);

/// dtilde(x) = d(x) Y_0(0) + sum_i (A_i/4) X_i(0) prod_{j != i} (x - c_j).
/// The + sign follows from the +A_i/4 flip element.
[[nodiscard]] std::complex<double> residue_numerator(const RationalSolution& sol, double x);

[[nodiscard]] std::complex<double> invert_y0(const RationalSolution& sol, double t);

/// X_j(t); `nucleus` is zero-based.
[[nodiscard]] std::complex<double> invert_xj(const RationalSolution& sol, int nucleus, double t);

/// Y_0 and X_j on a time grid, packaged like the spectral evolver's output.
[[nodiscard]] AmplitudeTrajectory laplace_m0_propagate(const RationalSolution& sol, int n_nuclei,
                                                       std::span<const double> times);

enum class PoleApprox {
	PA0, ///< couplings dropped: poles at the bare diagonals
	PA1, ///< diagonal self-energy only; off-diagonal parts of C B^-1 D ignored
};

/// Approximate poles for every y-config of sector m. Entry i lists the
/// N-m+1 approximate poles seen by y_config[i], ascending.
[[nodiscard]] std::vector<std::vector<double>> approx_poles(const CouplingSet& cs, int m, PoleApprox variant);

/// Amplitude trajectory under a pole approximation. Ybar_i is solved with
/// the approximated self-energy; Xbar follows from the exact second block
/// row Xbar = B^-1 (i X(0) - D Ybar). PA1 is exact when the Y-branch has one state.
[[nodiscard]] AmplitudeTrajectory pole_approx_propagate(const SectorBlocks& blocks, PoleApprox variant,
                                                        const Eigen::VectorXcd& initial,
                                                        std::span<const double> times);

} // namespace qdspin
