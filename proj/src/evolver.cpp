#include "qdspin/evolver.hpp"

#include "qdspin/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>

namespace qdspin {

namespace {

using cd = std::complex<double>;

std::string sector_name(SectorId s)
{
	return "sector N=" + std::to_string(s.n_nuclei) + " m=" + std::to_string(s.m);
}

} // namespace

SectorPropagator diagonalize(const Eigen::MatrixXd& hamiltonian, SectorId sector, std::size_t y_dim)
{
	if (hamiltonian.rows() != hamiltonian.cols())
		throw DomainError("diagonalize: Hamiltonian is not square");
	if (!hamiltonian.allFinite())
		throw DomainError("diagonalize: non-finite Hamiltonian entries in " + sector_name(sector));
	if (y_dim > static_cast<std::size_t>(hamiltonian.rows()))
		throw DomainError("diagonalize: Y-branch larger than the sector");

	SectorPropagator prop;
	prop.sector = sector;
	prop.y_dim = y_dim;
	if (hamiltonian.rows() == 0)
		return prop;

	const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
	if (solver.info() != Eigen::Success)
		throw NumericError("eigensolver did not converge for " + sector_name(sector));
	prop.eigenvalues = solver.eigenvalues();
	prop.eigenvectors = solver.eigenvectors();
	return prop;
}

Eigen::VectorXcd SectorPropagator::apply(const Eigen::VectorXcd& state, double t) const
{
	if (static_cast<std::size_t>(state.size()) != dim())
		throw DomainError("propagate: state length " + std::to_string(state.size()) + " does not match sector dimension "
		                  + std::to_string(dim()));
	if (t == 0.0)
		return state;
	Eigen::VectorXcd coeffs = eigenvectors.transpose().cast<cd>() * state;
	for (Eigen::Index k = 0; k < coeffs.size(); ++k)
		coeffs(k) *= std::polar(1.0, -eigenvalues(k) * t);
	return eigenvectors.cast<cd>() * coeffs;
}

double AmplitudeTrajectory::norm_squared(std::size_t step) const
{
	const auto r = static_cast<Eigen::Index>(step);
	return y_amps.row(r).squaredNorm() + x_amps.row(r).squaredNorm();
}

AmplitudeTrajectory propagate(const SectorPropagator& prop, const Eigen::VectorXcd& initial,
                              std::span<const double> times)
{
	if (static_cast<std::size_t>(initial.size()) != prop.dim())
		throw DomainError("propagate: initial column has length " + std::to_string(initial.size())
		                  + ", sector dimension is " + std::to_string(prop.dim()));
	if (initial.squaredNorm() == 0.0)
		throw DomainError("propagate: initial column has zero norm");

	const auto ny = static_cast<Eigen::Index>(prop.y_dim);
	const auto nx = static_cast<Eigen::Index>(prop.dim()) - ny;
	const auto nt = static_cast<Eigen::Index>(times.size());

	AmplitudeTrajectory traj;
	traj.sector = prop.sector;
	traj.times.assign(times.begin(), times.end());
	traj.y_amps.resize(nt, ny);
	traj.x_amps.resize(nt, nx);

	const Eigen::MatrixXcd v = prop.eigenvectors.cast<cd>();
	const Eigen::VectorXcd coeffs = v.transpose() * initial;
	Eigen::VectorXcd rotated(coeffs.size());
	for (Eigen::Index k = 0; k < nt; ++k) {
		const double t = times[static_cast<std::size_t>(k)];
		if (t == 0.0) {
			traj.y_amps.row(k) = initial.head(ny).transpose();
			traj.x_amps.row(k) = initial.tail(nx).transpose();
			continue;
		}
		for (Eigen::Index p = 0; p < coeffs.size(); ++p)
			rotated(p) = coeffs(p) * std::polar(1.0, -prop.eigenvalues(p) * t);
		const Eigen::VectorXcd state = v * rotated;
		traj.y_amps.row(k) = state.head(ny).transpose();
		traj.x_amps.row(k) = state.tail(nx).transpose();
	}
	return traj;
}

} // namespace qdspin
