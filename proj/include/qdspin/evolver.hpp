#pragma once

#include "qdspin/basis.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace qdspin {

/// Spectral decomposition H = V diag(lambda) V^T of a real symmetric sector
/// Hamiltonian. Eigenvalues ascend.
struct SectorPropagator {
	SectorId sector;
	std::size_t y_dim = 0;
	Eigen::VectorXd eigenvalues;
	Eigen::MatrixXd eigenvectors;

	[[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }

	/// exp(-i H t) applied to `state`.
	[[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& state, double t) const;
};

/// Amplitudes of one sector on a time grid; row k belongs to times[k].
struct AmplitudeTrajectory {
	SectorId sector;
	std::vector<double> times;
	Eigen::MatrixXcd y_amps; ///< times x C(N,m)
	Eigen::MatrixXcd x_amps; ///< times x C(N,m+1)

	[[nodiscard]] double norm_squared(std::size_t step) const;
};

/// Throws NumericError (naming the sector) if the eigensolver does not converge.
[[nodiscard]] SectorPropagator diagonalize(const Eigen::MatrixXd& hamiltonian, SectorId sector, std::size_t y_dim);

/// amplitudes(t) = V exp(-i diag(lambda) t) V^T initial for every t in `times`.
/// The t = 0 row is `initial` itself.
[[nodiscard]] AmplitudeTrajectory propagate(const SectorPropagator& prop, const Eigen::VectorXcd& initial,
                                            std::span<const double> times);

} // namespace qdspin
