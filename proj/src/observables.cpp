#include "qdspin/observables.hpp"

#include "qdspin/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace qdspin {

namespace {

using cd = std::complex<double>;

Eigen::VectorXcd one_hot(std::size_t dim, std::size_t index)
{
	Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
	v(static_cast<Eigen::Index>(index)) = 1.0;
	return v;
}

} // namespace

Eigen::VectorXcd SectorAmplitudes::column() const
{
	Eigen::VectorXcd c(y.size() + x.size());
	c << y, x;
	return c;
}

double StateSpec::norm_squared() const
{
	double total = 0.0;
	for (const auto& [m, s] : sectors)
		total += s.norm_squared();
	return total;
}

double StateSpec::mz_expectation() const
{
	double total = 0.0;
	for (const auto& [m, s] : sectors)
		total += static_cast<double>(SectorId{n_nuclei, m}.mz()) * s.norm_squared();
	return total;
}

BlochDirection BlochDirection::down()
{
	return {std::numbers::pi, 0.0};
}

StateSpec from_product_state(int n_nuclei, BlochDirection electron, NuclearMask mask)
{
	if (n_nuclei < 1 || n_nuclei > kMaxNuclei)
		throw DomainError("from_product_state: N out of range");
	const NuclearMask full = (NuclearMask{1} << n_nuclei) - 1;
	if ((mask & ~full) != 0)
		throw DomainError("from_product_state: nuclear mask has bits beyond N=" + std::to_string(n_nuclei));

	double c_up = std::cos(electron.theta / 2.0);
	double s_down = std::sin(electron.theta / 2.0);
	// theta = pi leaves cos(theta/2) ~ 6e-17; snap so a pure down state stays in one sector
	if (std::abs(c_up) < 1e-15) {
		c_up = 0.0;
		s_down = std::copysign(1.0, s_down);
	}
	if (std::abs(s_down) < 1e-15) {
		s_down = 0.0;
		c_up = std::copysign(1.0, c_up);
	}
	const cd c_down = std::polar(s_down, electron.phi);
	const int k = std::popcount(mask);

	StateSpec spec;
	spec.n_nuclei = n_nuclei;
	if (c_down != 0.0) {
		const SectorBasis basis{n_nuclei, k};
		SectorAmplitudes s;
		s.weight = c_down;
		s.y = one_hot(basis.y_dim(), basis.rank(Branch::Y, mask));
		s.x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.x_dim()));
		spec.sectors.emplace(k, std::move(s));
	}
	if (c_up != 0.0) {
		const SectorBasis basis{n_nuclei, k - 1};
		SectorAmplitudes s;
		s.weight = c_up;
		s.y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.y_dim()));
		s.x = one_hot(basis.x_dim(), basis.rank(Branch::X, mask));
		spec.sectors.emplace(k - 1, std::move(s));
	}
	return spec;
}

void validate(const StateSpec& spec)
{
	for (const auto& [m, s] : spec.sectors) {
		const auto [ny, nx] = sector_dims(spec.n_nuclei, m);
		if (static_cast<std::uint64_t>(s.y.size()) != ny || static_cast<std::uint64_t>(s.x.size()) != nx)
			throw DomainError("sector m=" + std::to_string(m) + " expects " + std::to_string(ny) + " Y and "
			                  + std::to_string(nx) + " X amplitudes, got " + std::to_string(s.y.size()) + " and "
			                  + std::to_string(s.x.size()));
		if (!s.y.allFinite() || !s.x.allFinite() || !std::isfinite(std::abs(s.weight)))
			throw DomainError("sector m=" + std::to_string(m) + " has non-finite amplitudes");
	}
}

StateSpec normalize(const StateSpec& spec)
{
	const double n2 = spec.norm_squared();
	if (!(n2 > 0.0) || !std::isfinite(n2))
		throw DomainError("normalize: state has zero (or non-finite) norm");
	StateSpec out = spec;
	const double scale = 1.0 / std::sqrt(n2);
	for (auto& [m, s] : out.sectors)
		s.weight *= scale;
	return out;
}

double s_z_of(const StateSpec& state)
{
	double sz = 0.0;
	for (const auto& [m, s] : state.sectors)
		sz += std::norm(s.weight) * (s.x.squaredNorm() - s.y.squaredNorm());
	return sz;
}

std::complex<double> s_plus_of(const StateSpec& state)
{
	cd sp{0.0};
	for (const auto& [m, s] : state.sectors) {
		const auto lower = state.sectors.find(m - 1);
		if (lower == state.sectors.end())
			continue;
		const auto& up_part = lower->second; // X-branch of sector m-1
		if (up_part.x.size() != s.y.size())
			throw DomainError("s_plus_of: adjacent sectors disagree on configuration count");
		// Eigen's dot conjugates its first argument.
		sp += std::conj(up_part.weight) * s.weight * up_part.x.dot(s.y);
	}
	return sp;
}

double SpinVector::length() const
{
	return std::sqrt(x * x + y * y + z * z);
}

SpinVector spin_of(const StateSpec& state)
{
	const cd sp = s_plus_of(state);
	return {2.0 * sp.real(), 2.0 * sp.imag(), s_z_of(state)};
}

Eigen::Matrix2cd reduced_density_matrix(const SpinVector& s)
{
	if (s.length() > 1.0 + 1e-8)
		throw NumericError("reduced_density_matrix: |s| = " + std::to_string(s.length()) + " exceeds 1");
	Eigen::Matrix2cd rho;
	rho(0, 0) = 0.5 * (1.0 + s.z);
	rho(1, 1) = 0.5 * (1.0 - s.z);
	rho(0, 1) = cd{0.5 * s.x, -0.5 * s.y};
	rho(1, 0) = cd{0.5 * s.x, 0.5 * s.y};
	return rho;
}

StateSpec snapshot(const StateSpec& spec, const std::map<int, AmplitudeTrajectory>& trajectories, std::size_t step)
{
	StateSpec now;
	now.n_nuclei = spec.n_nuclei;
	const auto row = static_cast<Eigen::Index>(step);
	for (const auto& [m, s] : spec.sectors) {
		const auto it = trajectories.find(m);
		if (it == trajectories.end())
			throw DomainError("snapshot: no trajectory for sector m=" + std::to_string(m));
		SectorAmplitudes a;
		a.weight = s.weight;
		a.y = it->second.y_amps.row(row).transpose();
		a.x = it->second.x_amps.row(row).transpose();
		now.sectors.emplace(m, std::move(a));
	}
	return now;
}

SpinTrajectory assemble_trajectory(const StateSpec& spec, const std::map<int, AmplitudeTrajectory>& trajectories)
{
	SpinTrajectory out;
	if (trajectories.empty())
		return out;
	out.times = trajectories.begin()->second.times;
	for (const auto& [m, t] : trajectories)
		if (t.times != out.times)
			throw DomainError("assemble_trajectory: sectors use different time grids");
	const std::size_t nt = out.times.size();
	out.s_x.resize(nt);
	out.s_y.resize(nt);
	out.s_z.resize(nt);
	out.norm.resize(nt);
	for (std::size_t k = 0; k < nt; ++k) {
		const StateSpec now = snapshot(spec, trajectories, k);
		const SpinVector s = spin_of(now);
		out.s_x[k] = s.x;
		out.s_y[k] = s.y;
		out.s_z[k] = s.z;
		out.norm[k] = now.norm_squared();
	}
	return out;
}

InvariantReport check_invariants(const SpinTrajectory& traj)
{
	InvariantReport r;
	for (std::size_t k = 0; k < traj.size(); ++k) {
		r.max_norm_deviation = std::max(r.max_norm_deviation, std::abs(traj.norm[k] - 1.0));
		const double len2 = traj.s_x[k] * traj.s_x[k] + traj.s_y[k] * traj.s_y[k] + traj.s_z[k] * traj.s_z[k];
		r.max_bloch_excess = std::max(r.max_bloch_excess, len2 - 1.0);
	}
	return r;
}

void write_csv(const SpinTrajectory& traj, std::ostream& out)
{
	out << "t,s_x,s_y,s_z,norm\n";
	char line[160];
	for (std::size_t k = 0; k < traj.size(); ++k) {
		std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.times[k], traj.s_x[k], traj.s_y[k],
		              traj.s_z[k], traj.norm[k]);
		out << line;
	}
}

} // namespace qdspin
