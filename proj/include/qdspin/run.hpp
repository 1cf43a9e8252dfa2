#pragma once

#include "qdspin/blocks.hpp"
#include "qdspin/config.hpp"
#include "qdspin/evolver.hpp"
#include "qdspin/observables.hpp"

#include <span>
#include <vector>

namespace qdspin {

struct RunOptions {
	std::size_t workers = 1;
};

struct RunResult {
	Solver solver = Solver::SectorEigen;
	std::vector<int> sectors; ///< populated sectors, ascending m
	SpinTrajectory trajectory;
	InvariantReport report;

	/// Exact solvers must satisfy the norm and Bloch-ball invariants.
	[[nodiscard]] bool ok() const { return !is_exact(solver) || report.ok(); }
};

/// Evolves one sector's amplitude column with the chosen solver.
/// LaplaceM0 accepts only m = -1 and m = 0; Oracle is not a per-sector solver.
[[nodiscard]] AmplitudeTrajectory evolve_sector(const CouplingSet& cs, int m, const Eigen::VectorXcd& initial,
                                                std::span<const double> times, Solver solver,
                                                std::size_t dense_cap = kDefaultDenseCap);

/// Full pipeline: instantiate populated sectors, evolve each (in parallel
/// when workers > 1), assemble s(t) in sector order and check invariants.
[[nodiscard]] RunResult run(const RunConfig& config, const RunOptions& options = {});

struct TrajectoryDiff {
	double max_abs_s_x = 0.0;
	double max_abs_s_y = 0.0;
	double max_abs_s_z = 0.0;
	double max_abs_norm = 0.0;
};

/// Pointwise differences; both trajectories must share the time grid.
[[nodiscard]] TrajectoryDiff compare_trajectories(const SpinTrajectory& a, const SpinTrajectory& b);

} // namespace qdspin
