#pragma once

#include "qdspin/config.hpp"
#include "qdspin/model.hpp"
#include "qdspin/observables.hpp"
#include "qdspin/oracle.hpp"
#include "qdspin/run.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace qdspin::testing {

// A_k uniform in (0, 1].
inline std::vector<double> random_couplings(int n, std::mt19937_64& rng)
{
	std::uniform_real_distribution<double> u(0.0, 1.0);
	std::vector<double> a(static_cast<std::size_t>(n));
	for (auto& v : a)
		v = 1.0 - u(rng);
	return a;
}

inline StateSpec random_product_state(int n, std::mt19937_64& rng)
{
	std::uniform_real_distribution<double> u(0.0, 1.0);
	const double theta = std::acos(1.0 - 2.0 * u(rng));
	const double phi = 2.0 * std::numbers::pi * u(rng);
	const NuclearMask mask = rng() & ((NuclearMask{1} << n) - 1);
	return normalize(from_product_state(n, {theta, phi}, mask));
}

inline Eigen::VectorXcd random_vector(Eigen::Index dim, std::mt19937_64& rng)
{
	std::normal_distribution<double> g;
	Eigen::VectorXcd v(dim);
	for (Eigen::Index i = 0; i < dim; ++i)
		v(i) = {g(rng), g(rng)};
	return v.normalized();
}

// Generic pure state spread over every sector.
inline StateSpec random_entangled_state(int n, std::mt19937_64& rng)
{
	StateSpec s;
	s.n_nuclei = n;
	for (int m = -1; m <= n; ++m) {
		const auto [ny, nx] = sector_dims(n, m);
		const Eigen::VectorXcd v = random_vector(static_cast<Eigen::Index>(ny + nx), rng);
		SectorAmplitudes a;
		a.weight = std::polar(1.0 + 0.5 * m, 0.3 * m);
		a.y = v.head(static_cast<Eigen::Index>(ny));
		a.x = v.tail(static_cast<Eigen::Index>(nx));
		s.sectors.emplace(m, a);
	}
	return normalize(s);
}

inline std::vector<double> linear_times(double t_max, std::size_t n)
{
	std::vector<double> t(n);
	for (std::size_t k = 0; k < n; ++k)
		t[k] = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
	return t;
}

inline SpinTrajectory sector_route(const CouplingSet& cs, const StateSpec& spec, std::span<const double> times,
                                   Solver solver = Solver::SectorEigen)
{
	std::map<int, AmplitudeTrajectory> traj;
	for (const auto& [m, amps] : spec.sectors)
		traj.emplace(m, evolve_sector(cs, m, amps.column(), times, solver));
	return assemble_trajectory(spec, traj);
}

inline SpinTrajectory oracle_route(const CouplingSet& cs, const StateSpec& spec, std::span<const double> times)
{
	const auto states = oracle::evolve_full(oracle::build_full_hamiltonian(cs), oracle::to_full_state(spec), times);
	SpinTrajectory out;
	out.times.assign(times.begin(), times.end());
	for (const auto& psi : states) {
		const SpinVector s = oracle::bloch_vector(oracle::partial_trace_electron(psi));
		out.s_x.push_back(s.x);
		out.s_y.push_back(s.y);
		out.s_z.push_back(s.z);
		out.norm.push_back(psi.squaredNorm());
	}
	return out;
}

inline double max_spin_diff(const SpinTrajectory& a, const SpinTrajectory& b)
{
	const TrajectoryDiff d = compare_trajectories(a, b);
	return std::max({d.max_abs_s_x, d.max_abs_s_y, d.max_abs_s_z});
}

} // namespace qdspin::testing
