#include "qdspin/basis.hpp"
#include "qdspin/blocks.hpp"
#include "qdspin/config.hpp"
#include "qdspin/errors.hpp"
#include "qdspin/evolver.hpp"
#include "qdspin/laplace_m0.hpp"
#include "qdspin/oracle.hpp"
#include "qdspin/run.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

using namespace qdspin;

namespace {

void emit_csv(const SpinTrajectory& traj, const std::string& path)
{
	if (path.empty() || path == "-") {
		write_csv(traj, std::cout);
		return;
	}
	std::ofstream out(path);
	if (!out)
		throw std::runtime_error("cannot open " + path + " for writing");
	write_csv(traj, out);
}

// foo.csv -> foo.<tag>.csv
std::string sibling_path(const std::string& path, std::string_view tag)
{
	const auto dot = path.rfind('.');
	const auto slash = path.rfind('/');
	if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
		return path + "." + std::string(tag) + ".csv";
	return path.substr(0, dot) + "." + std::string(tag) + path.substr(dot);
}

int cmd_evolve(const std::string& config_path, const std::string& solver, const std::string& out, std::size_t workers,
               const std::string& compare)
{
	RunConfig cfg = load_config(config_path);
	if (!solver.empty())
		cfg.solver = parse_solver(solver);
	if (!out.empty())
		cfg.output_path = out;

	const RunResult res = run(cfg, {workers});
	emit_csv(res.trajectory, cfg.output_path);
	int status = 0;
	if (!res.ok()) {
		std::fprintf(stderr, "invariant violation: norm deviation %.3e, Bloch excess %.3e\n",
		             res.report.max_norm_deviation, res.report.max_bloch_excess);
		status = 3;
	}

	if (!compare.empty()) {
		RunConfig other = cfg;
		other.solver = parse_solver(compare);
		const RunResult res2 = run(other, {workers});
		if (!cfg.output_path.empty() && cfg.output_path != "-")
			emit_csv(res2.trajectory, sibling_path(cfg.output_path, solver_name(other.solver)));
		const TrajectoryDiff d = compare_trajectories(res.trajectory, res2.trajectory);
		std::fprintf(stderr, "%s vs %s: max|ds_z| %.6e  max|ds_x| %.6e  max|ds_y| %.6e\n",
		             std::string(solver_name(cfg.solver)).c_str(), std::string(solver_name(other.solver)).c_str(),
		             d.max_abs_s_z, d.max_abs_s_x, d.max_abs_s_y);
		if (!res2.ok())
			status = 3;
	}
	return status;
}

int cmd_sectors(int n)
{
	std::printf("%4s %6s %14s %14s %14s\n", "m", "M_z", "electron-down", "electron-up", "dim");
	for (int m = -1; m <= n; ++m) {
		const auto [y, x] = sector_dims(n, m);
		std::printf("%4d %6d %14llu %14llu %14llu\n", m, SectorId{n, m}.mz(), static_cast<unsigned long long>(y),
		            static_cast<unsigned long long>(x), static_cast<unsigned long long>(x + y));
	}
	std::printf("total %llu\n", static_cast<unsigned long long>(total_state_count(n)));
	return 0;
}

std::string mask_string(NuclearMask mask, int n)
{
	std::string s;
	for (int k = 0; k < n; ++k)
		s += (mask >> k & 1U) ? 'd' : 'u';
	return s;
}

int cmd_poles(const std::string& config_path, int m, const std::string& format)
{
	const RunConfig cfg = load_config(config_path);
	const CouplingSet cs = cfg.couplings();
	const int n = cs.n_nuclei();
	if (m < 0 || m >= n)
		throw DomainError("poles: sector must satisfy 0 <= m < N");
	const SectorBasis basis{n, m};
	const SectorBlocks blocks = build_blocks(cs, basis);
	const Eigen::VectorXd exact =
		diagonalize(assemble_hamiltonian(blocks, cfg.dense_cap), basis.sector(), basis.y_dim()).eigenvalues;
	const auto pa0 = approx_poles(cs, m, PoleApprox::PA0);
	const auto pa1 = approx_poles(cs, m, PoleApprox::PA1);

	auto nearest = [&](double v) {
		double best = exact(0);
		for (Eigen::Index k = 1; k < exact.size(); ++k)
			if (std::abs(exact(k) - v) < std::abs(best - v))
				best = exact(k);
		return best;
	};

	const bool csv = format == "csv";
	if (csv)
		std::printf("config,index,pa0,pa1,exact_nearest,err_pa0,err_pa1\n");
	else
		std::printf("%-*s %5s %22s %22s %22s %10s %10s\n", std::max(6, n), "config", "index", "pa0", "pa1",
		            "exact_nearest", "err_pa0", "err_pa1");
	for (std::size_t i = 0; i < pa1.size(); ++i) {
		const std::string cfg_name = mask_string(basis.y_configs()[i], n);
		for (std::size_t r = 0; r < pa1[i].size(); ++r) {
			const double near = nearest(pa1[i][r]);
			const double e0 = std::abs(nearest(pa0[i][r]) - pa0[i][r]);
			const double e1 = std::abs(near - pa1[i][r]);
			if (csv)
				std::printf("%s,%zu,%.17g,%.17g,%.17g,%.3e,%.3e\n", cfg_name.c_str(), r, pa0[i][r], pa1[i][r], near, e0, e1);
			else
				std::printf("%-*s %5zu %22.15g %22.15g %22.15g %10.3e %10.3e\n", std::max(6, n), cfg_name.c_str(), r,
				            pa0[i][r], pa1[i][r], near, e0, e1);
		}
	}
	if (m == 0) {
		const std::vector<double> roots = m0_poles(cs);
		if (csv)
			std::printf("\nindex,secular_root,eigenvalue\n");
		else
			std::printf("\nexact m=0 poles (roots of D vs sector eigenvalues)\n");
		for (std::size_t l = 0; l < roots.size(); ++l)
			std::printf(csv ? "%zu,%.17g,%.17g\n" : "%5zu %22.15g %22.15g\n", l, roots[l], exact(static_cast<Eigen::Index>(l)));
	}
	return 0;
}

// Random product state: Bloch direction uniform on the sphere, mask uniform.
StateSpec random_product_state(int n, std::mt19937_64& rng)
{
	std::uniform_real_distribution<double> u(0.0, 1.0);
	const double theta = std::acos(1.0 - 2.0 * u(rng));
	const double phi = 2.0 * std::numbers::pi * u(rng);
	const NuclearMask mask = rng() & ((NuclearMask{1} << n) - 1);
	return normalize(from_product_state(n, {theta, phi}, mask));
}

SpinTrajectory oracle_trajectory(const CouplingSet& cs, const StateSpec& spec, std::span<const double> times)
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

SpinTrajectory sector_trajectory(const CouplingSet& cs, const StateSpec& spec, std::span<const double> times,
                                 std::size_t cap)
{
	std::map<int, AmplitudeTrajectory> trajectories;
	for (const auto& [m, amps] : spec.sectors)
		trajectories.emplace(m, evolve_sector(cs, m, amps.column(), times, Solver::SectorEigen, cap));
	return assemble_trajectory(spec, trajectories);
}

int cmd_oracle_check(const std::string& config_path, std::uint64_t seed, int trials, double tol)
{
	const RunConfig cfg = load_config(config_path);
	const CouplingSet cs = cfg.couplings();
	const std::vector<double> times = cfg.time.points();
	std::mt19937_64 rng(seed);

	double worst = 0.0;
	for (int trial = 0; trial <= trials; ++trial) {
		const StateSpec spec = trial == 0 ? cfg.initial_state() : random_product_state(cs.n_nuclei(), rng);
		const TrajectoryDiff d =
			compare_trajectories(sector_trajectory(cs, spec, times, cfg.dense_cap), oracle_trajectory(cs, spec, times));
		const double e = std::max({d.max_abs_s_x, d.max_abs_s_y, d.max_abs_s_z});
		worst = std::max(worst, e);
		std::printf("state %3d  max|ds| %.3e\n", trial, e);
	}
	const bool pass = worst <= tol;
	std::printf("%s oracle-check N=%d states=%d max|ds| %.3e (tol %.1e)\n", pass ? "PASS" : "FAIL", cs.n_nuclei(),
	            trials + 1, worst, tol);
	return pass ? 0 : 1;
}

int cmd_liouville_check(const std::string& config_path, double tol, double trace_tol)
{
	const RunConfig cfg = load_config(config_path);
	const CouplingSet cs = cfg.couplings();
	if (cs.n_nuclei() > oracle::kMaxLiouvilleNuclei)
		throw CapacityError("liouville-check: N=" + std::to_string(cs.n_nuclei()) + " exceeds the limit of "
		                    + std::to_string(oracle::kMaxLiouvilleNuclei));
	const StateSpec spec = cfg.initial_state();
	const std::vector<double> times = cfg.time.points();
	const SpinTrajectory ref = sector_trajectory(cs, spec, times, cfg.dense_cap);
	const auto rho0 = oracle::BlockDensity::from_pure_state(oracle::to_full_state(spec));
	const oracle::LiouvilleResult lr = oracle::liouville_evolve(rho0, cs, times);

	double err = 0.0;
	double trace_err = 0.0;
	for (std::size_t k = 0; k < times.size(); ++k) {
		const SpinVector s = lr.states[k].spin();
		err = std::max({err, std::abs(s.z - ref.s_z[k]), std::abs(s.x - ref.s_x[k]), std::abs(s.y - ref.s_y[k])});
		trace_err = std::max(trace_err, std::abs(lr.states[k].trace() - 1.0));
	}
	const bool pass = err <= tol && trace_err <= trace_tol;
	std::printf("%s liouville-check N=%d steps=%zu max|ds| %.3e (tol %.1e) max|tr-1| %.3e (tol %.1e)\n",
	            pass ? "PASS" : "FAIL", cs.n_nuclei(), lr.steps, err, tol, trace_err, trace_tol);
	return pass ? 0 : 1;
}

int cmd_blocks(const std::string& config_path, int m)
{
	const RunConfig cfg = load_config(config_path);
	const CouplingSet cs = cfg.couplings();
	dump_blocks(build_blocks(cs, SectorBasis{cs.n_nuclei(), m}), std::cout);
	return 0;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Exact sector-resolved dynamics of a central spin coupled to spin-1/2 nuclei"};
	app.require_subcommand(1);

	std::string config_path;
	std::string solver;
	std::string out;
	std::string compare;
	std::size_t workers = 1;
	auto* evolve = app.add_subcommand("evolve", "evolve a configuration and write t,s_x,s_y,s_z,norm as CSV");
	evolve->add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
	evolve->add_option("--solver", solver, "sector-eigen | laplace-m0 | pole-approx-pa0 | pole-approx-pa1 | oracle");
	evolve->add_option("--out", out, "CSV output path (default: config output.path, else stdout)");
	evolve->add_option("--workers", workers, "sector jobs run concurrently")->check(CLI::PositiveNumber);
	evolve->add_option("--compare", compare, "second solver; writes a sibling CSV and prints max differences");

	int n_sectors = 0;
	auto* sectors = app.add_subcommand("sectors", "print sector dimensions for N nuclei");
	sectors->add_option("N", n_sectors, "number of nuclei")->required()->check(CLI::Range(1, kMaxNuclei));

	int sector = 0;
	std::string format = "text";
	auto* poles = app.add_subcommand("poles", "exact sector eigenvalues vs PA0 / PA1 pole approximations");
	poles->add_option("config", config_path)->required()->check(CLI::ExistingFile);
	poles->add_option("--sector", sector, "sector m (0 <= m < N)");
	poles->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));

	std::uint64_t seed = 1;
	int trials = 10;
	double tol = 1e-9;
	auto* ocheck = app.add_subcommand("oracle-check", "sector route vs full-space brute force");
	ocheck->add_option("config", config_path)->required()->check(CLI::ExistingFile);
	ocheck->add_option("--seed", seed, "seed for the random product states");
	ocheck->add_option("--trials", trials, "random product states in addition to the configured one");
	ocheck->add_option("--tol", tol, "max allowed spin deviation");

	double ltol = 1e-8;
	double trace_tol = 1e-9;
	auto* lcheck = app.add_subcommand("liouville-check", "block Liouville equations vs the sector route (N <= 6)");
	lcheck->add_option("config", config_path)->required()->check(CLI::ExistingFile);
	lcheck->add_option("--tol", ltol, "max allowed spin deviation");
	lcheck->add_option("--trace-tol", trace_tol, "max allowed trace drift");

	auto* blocks = app.add_subcommand("blocks", "dump the energies and coupling matrix of one sector");
	blocks->add_option("config", config_path)->required()->check(CLI::ExistingFile);
	blocks->add_option("--sector", sector)->required();

	CLI11_PARSE(app, argc, argv);

	try {
		if (*evolve)
			return cmd_evolve(config_path, solver, out, workers, compare);
		if (*sectors)
			return cmd_sectors(n_sectors);
		if (*poles)
			return cmd_poles(config_path, sector, format);
		if (*ocheck)
			return cmd_oracle_check(config_path, seed, trials, tol);
		if (*lcheck)
			return cmd_liouville_check(config_path, ltol, trace_tol);
		if (*blocks)
			return cmd_blocks(config_path, sector);
	} catch (const ConfigError& e) {
		std::fprintf(stderr, "config error: %s\n", e.what());
		return 2;
	} catch (const std::exception& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 1;
	}
	return 0;
}
