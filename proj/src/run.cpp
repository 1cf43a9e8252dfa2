#include "qdspin/run.hpp"

#include "qdspin/basis.hpp"
#include "qdspin/blocks.hpp"
#include "qdspin/errors.hpp"
#include "qdspin/laplace_m0.hpp"
#include "qdspin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <string>

namespace qdspin {

AmplitudeTrajectory evolve_sector(const CouplingSet& cs, int m, const Eigen::VectorXcd& initial,
                                  std::span<const double> times, Solver solver, std::size_t dense_cap)
{
	const SectorBasis basis{cs.n_nuclei(), m};
	switch (solver) {
	case Solver::SectorEigen: {
		const SectorBlocks blocks = build_blocks(cs, basis);
		const SectorPropagator prop = diagonalize(assemble_hamiltonian(blocks, dense_cap), basis.sector(), basis.y_dim());
		return propagate(prop, initial, times);
	}
	case Solver::LaplaceM0: {
		if (m == -1)
			return evolve_sector(cs, m, initial, times, Solver::SectorEigen, dense_cap);
		if (m != 0)
			throw DomainError("laplace-m0 solves only the m=0 sector (M_z = N-1); sector m=" + std::to_string(m)
			                  + " needs sector-eigen");
		std::vector<std::complex<double>> x0(initial.data() + 1, initial.data() + initial.size());
		const RationalSolution sol = make_rational_solution(cs, initial(0), x0);
		return laplace_m0_propagate(sol, cs.n_nuclei(), times);
	}
	case Solver::PoleApproxPA0:
	case Solver::PoleApproxPA1:
		return pole_approx_propagate(build_blocks(cs, basis),
		                             solver == Solver::PoleApproxPA0 ? PoleApprox::PA0 : PoleApprox::PA1, initial, times);
	case Solver::Oracle:
		break;
	}
	throw DomainError("evolve_sector: the oracle evolves the full space, not single sectors");
}

namespace {

SpinTrajectory run_oracle(const CouplingSet& cs, const StateSpec& spec, std::span<const double> times)
{
	const Eigen::MatrixXd h = oracle::build_full_hamiltonian(cs);
	const oracle::FullPropagator prop(h);
	const Eigen::VectorXcd psi0 = oracle::to_full_state(spec);
	SpinTrajectory out;
	out.times.assign(times.begin(), times.end());
	for (double t : times) {
		const Eigen::VectorXcd psi = prop.apply(psi0, t);
		const SpinVector s = oracle::bloch_vector(oracle::partial_trace_electron(psi));
		out.s_x.push_back(s.x);
		out.s_y.push_back(s.y);
		out.s_z.push_back(s.z);
		out.norm.push_back(psi.squaredNorm());
	}
	return out;
}

} // namespace

RunResult run(const RunConfig& config, const RunOptions& options)
{
	const CouplingSet cs = config.couplings();
	const StateSpec spec = config.initial_state();
	const std::vector<double> times = config.time.points();

	RunResult result;
	result.solver = config.solver;
	for (const auto& [m, s] : spec.sectors)
		result.sectors.push_back(m);

	if (config.solver == Solver::LaplaceM0) {
		for (int m : result.sectors)
			if (m >= 1)
				throw DomainError("laplace-m0 is a closed form for the m=0 sector only; the initial state populates "
				                  "sector m="
				                  + std::to_string(m) + ". Use --solver sector-eigen");
	}

	if (config.solver == Solver::Oracle) {
		result.trajectory = run_oracle(cs, spec, times);
	} else {
		std::map<int, AmplitudeTrajectory> trajectories;
		const std::size_t workers = std::max<std::size_t>(1, options.workers);
		const std::vector<int>& sectors = result.sectors;
		for (std::size_t begin = 0; begin < sectors.size(); begin += workers) {
			const std::size_t end = std::min(sectors.size(), begin + workers);
			std::vector<std::future<AmplitudeTrajectory>> jobs;
			for (std::size_t k = begin; k < end; ++k) {
				const int m = sectors[k];
				const Eigen::VectorXcd column = spec.sectors.at(m).column();
				jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
				                          [&cs, m, column, &times, &config] {
					                          return evolve_sector(cs, m, column, times, config.solver,
					                                               config.dense_cap);
				                          }));
			}
			for (std::size_t k = begin; k < end; ++k)
				trajectories.emplace(sectors[k], jobs[k - begin].get());
		}
		result.trajectory = assemble_trajectory(spec, trajectories);
	}
	result.report = check_invariants(result.trajectory);
	return result;
}

TrajectoryDiff compare_trajectories(const SpinTrajectory& a, const SpinTrajectory& b)
{
	if (a.times != b.times)
		throw DomainError("compare_trajectories: time grids differ");
	TrajectoryDiff d;
	for (std::size_t k = 0; k < a.size(); ++k) {
		d.max_abs_s_x = std::max(d.max_abs_s_x, std::abs(a.s_x[k] - b.s_x[k]));
		d.max_abs_s_y = std::max(d.max_abs_s_y, std::abs(a.s_y[k] - b.s_y[k]));
		d.max_abs_s_z = std::max(d.max_abs_s_z, std::abs(a.s_z[k] - b.s_z[k]));
		d.max_abs_norm = std::max(d.max_abs_norm, std::abs(a.norm[k] - b.norm[k]));
	}
	return d;
}

} // namespace qdspin
