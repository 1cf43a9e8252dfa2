// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "qdspin/basis.hpp"
#include "qdspin/blocks.hpp"
#include "qdspin/errors.hpp"
#include "qdspin/evolver.hpp"
#include "qdspin/laplace_m0.hpp"
#include "qdspin/oracle.hpp"

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>

using namespace qdspin;
using namespace qdspin::testing;

namespace {

struct Outcome {
	bool pass;
	std::string detail;
};

std::string fmt(const char* f, auto... args)
{
	char buf[512];
	std::snprintf(buf, sizeof buf, f, args...);
	return buf;
}

double max_coupling(const CouplingSet& cs)
{
	return *std::max_element(cs.couplings().begin(), cs.couplings().end());
}

Outcome sector_oracle_equivalence()
{
	std::mt19937_64 rng(20240101);
	double worst = 0.0;
	int runs = 0;
	for (int n = 1; n <= 8; ++n)
		for (double eps : {0.0, 1.0, 10.0})
			for (int k = 0; k < 20; ++k) {
				const CouplingSet cs(random_couplings(n, rng), eps);
				const StateSpec spec = random_product_state(n, rng);
				const std::vector<double> times = linear_times(50.0 / max_coupling(cs), 100);
				worst = std::max(worst, max_spin_diff(sector_route(cs, spec, times), oracle_route(cs, spec, times)));
				++runs;
			}
	return {worst <= 1e-9, fmt("max|s_sector - s_oracle| = %.2e over %d runs, N=1..8 (tol 1e-9)", worst, runs)};
}

Outcome route_equivalence_m0()
{
	std::mt19937_64 rng(7);
	double worst = 0.0;
	int runs = 0, resampled = 0;
	for (int n : {3, 4})
		for (double eps : {0.0, 1.0, 10.0})
			for (int k = 0; k < 20;) {
				const CouplingSet cs(random_couplings(n, rng), eps);
				const SectorBasis basis(n, 0);
				const Eigen::VectorXcd psi0 = random_vector(n + 1, rng);
				const std::vector<std::complex<double>> x0(psi0.data() + 1, psi0.data() + psi0.size());
				std::optional<RationalSolution> sol;
				try {
					sol = make_rational_solution(cs, psi0(0), x0);
				} catch (const DegeneratePolesError&) {
					++resampled; // nearly coincident couplings: outside the closed form's domain
					continue;
				}
				const std::vector<double> times = linear_times(50.0 / max_coupling(cs), 200);
				const AmplitudeTrajectory closed = laplace_m0_propagate(*sol, n, times);
				const AmplitudeTrajectory exact = propagate(
					diagonalize(assemble_hamiltonian(build_blocks(cs, basis)), basis.sector(), basis.y_dim()), psi0, times);
				worst = std::max({worst, (closed.y_amps - exact.y_amps).cwiseAbs().maxCoeff(),
				                  (closed.x_amps - exact.x_amps).cwiseAbs().maxCoeff()});
				++runs;
				++k;
			}
	return {worst <= 1e-8, fmt("max amplitude deviation = %.2e over %d runs, N in {3,4}, %d degenerate draws resampled "
	                           "(tol 1e-8)",
	                           worst, runs, resampled)};
}

NuclearMask downs(std::initializer_list<int> labels)
{
	NuclearMask m = 0;
	for (int l : labels)
		m |= NuclearMask{1} << (l - 1);
	return m;
}

Outcome golden_structures()
{
	int mismatches = 0;
	auto expect = [&](double got, double want) {
		if (std::abs(got - want) > 1e-15 * std::max(1.0, std::abs(want)))
			++mismatches;
	};

	{ // N = 3, m = 1
		const double a[] = {0.0, 0.31, 0.57, 0.89};
		const double eps = 0.4;
		const CouplingSet cs({a[1], a[2], a[3]}, eps);
		const SectorBasis basis(3, 1);
		const SectorBlocks blk = build_blocks(cs, basis);
		const Eigen::MatrixXd k = blk.dense_k();
		const double b0 = eps + (a[1] + a[2] + a[3]) / 2;
		const int pair[4][2] = {{0, 0}, {2, 3}, {1, 3}, {1, 2}};
		const double c[3][3] = {{0, a[3], a[2]}, {a[3], 0, a[1]}, {a[2], a[1], 0}};
		for (int r = 1; r <= 3; ++r) {
			const std::size_t i = basis.rank(Branch::Y, downs({r}));
			// A diagonal: i w + B_0 - A_k; B diagonal: i w - B_0 + A_l + A_m
			expect(-blk.y_energy(i), b0 - a[r]);
			const std::size_t j = basis.rank(Branch::X, downs({pair[r][0], pair[r][1]}));
			expect(-blk.x_energy(j), -b0 + a[pair[r][0]] + a[pair[r][1]]);
			for (int col = 1; col <= 3; ++col) {
				const std::size_t jj = basis.rank(Branch::X, downs({pair[col][0], pair[col][1]}));
				expect(-k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj)), -c[r - 1][col - 1] / 4);
			}
		}
	}
	{ // N = 4, m = 1: 6x4 pattern of K^T
		const double a[] = {0.0, 0.13, 0.37, 0.61, 0.97};
		const CouplingSet cs({a[1], a[2], a[3], a[4]}, 0.0);
		const SectorBasis basis(4, 1);
		const Eigen::MatrixXd k = build_blocks(cs, basis).dense_k();
		const int pairs[6][2] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
		const double c[6][4] = {{a[2], a[1], 0, 0}, {a[3], 0, a[1], 0}, {a[4], 0, 0, a[1]},
		                        {0, a[3], a[2], 0}, {0, a[4], 0, a[2]}, {0, 0, a[4], a[3]}};
		if (k.rows() != 4 || k.cols() != 6)
			++mismatches;
		else
			for (int p = 0; p < 6; ++p)
				for (int y = 1; y <= 4; ++y)
					expect(-k(static_cast<Eigen::Index>(basis.rank(Branch::Y, downs({y}))),
					          static_cast<Eigen::Index>(basis.rank(Branch::X, downs({pairs[p][0], pairs[p][1]})))),
					       -c[p][y - 1] / 4);
	}
	// sector table
	const std::pair<std::uint64_t, std::uint64_t> n3[] = {{0, 1}, {1, 3}, {3, 3}, {3, 1}, {1, 0}};
	const std::pair<std::uint64_t, std::uint64_t> n4[] = {{0, 1}, {1, 4}, {4, 6}, {6, 4}, {4, 1}, {1, 0}};
	for (int m = -1; m <= 3; ++m)
		mismatches += sector_dims(3, m) != n3[m + 1];
	for (int m = -1; m <= 4; ++m)
		mismatches += sector_dims(4, m) != n4[m + 1];
	const auto t3 = total_state_count(3), t4 = total_state_count(4);
	mismatches += (t3 != 16) + (t4 != 32);
	return {mismatches == 0, fmt("N=3 m=1 blocks, N=4 m=1 coupling pattern, sector table; totals %llu and %llu; "
	                             "%d mismatches",
	                             static_cast<unsigned long long>(t3), static_cast<unsigned long long>(t4), mismatches)};
}

Outcome pole_identity()
{
	std::mt19937_64 rng(99);
	double worst = 0.0;
	int runs = 0;
	for (int n = 1; n <= 10; ++n)
		for (double eps : {0.0, 1.0, 10.0})
			for (int k = 0; k < 10; ++k) {
				std::vector<double> a = random_couplings(n, rng);
				if (k == 0)
					std::fill(a.begin(), a.end(), a[0]); // fully degenerate
				const CouplingSet cs(a, eps);
				const std::vector<double> roots = m0_poles(cs);
				const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
												assemble_hamiltonian(build_blocks(cs, SectorBasis(n, 0))))
												.eigenvalues();
				const double scale = std::max(1.0, eig.cwiseAbs().maxCoeff());
				for (Eigen::Index l = 0; l < eig.size(); ++l)
					worst = std::max(worst, std::abs(roots[static_cast<std::size_t>(l)] - eig(l)) / scale);
				++runs;
			}
	return {worst <= 1e-9, fmt("max relative |root - eigenvalue| = %.2e over %d coupling sets, N=1..10 (tol 1e-9)",
	                           worst, runs)};
}

Outcome conservation()
{
	std::mt19937_64 rng(4242);
	double norm_drift = 0.0, mz_drift = 0.0;
	for (int run = 0; run < 50; ++run) {
		const int n = 2 + run % 6;
		const CouplingSet cs(random_couplings(n, rng), run % 3 == 0 ? 0.0 : 2.5, run % 2 ? 0.05 : 0.0);
		const StateSpec spec = run % 2 ? random_product_state(n, rng) : random_entangled_state(n, rng);
		const std::vector<double> times = linear_times(500.0 / max_coupling(cs), 10000);
		std::map<int, AmplitudeTrajectory> traj;
		for (const auto& [m, amps] : spec.sectors)
			traj.emplace(m, evolve_sector(cs, m, amps.column(), times, Solver::SectorEigen));
		const double norm0 = spec.norm_squared();
		const double mz0 = spec.mz_expectation();
		for (std::size_t k = 0; k < times.size(); ++k) {
			const StateSpec s = snapshot(spec, traj, k);
			norm_drift = std::max(norm_drift, std::abs(s.norm_squared() - norm0));
			mz_drift = std::max(mz_drift, std::abs(s.mz_expectation() - mz0));
		}
	}
	return {norm_drift <= 1e-12 && mz_drift <= 1e-12,
	        fmt("norm drift %.2e, <M_z> drift %.2e over 50 runs x 1e4 points (tol 1e-12)", norm_drift, mz_drift)};
}

Outcome rabi_closed_form()
{
	double worst = 0.0;
	for (double a : {1.0, 0.37, 2.9}) {
		const CouplingSet cs({a}, 0.0, 0.0);
		const StateSpec spec = from_product_state(1, BlochDirection::down(), 0);
		const std::vector<double> times = linear_times(200.0 / a, 2001);
		const SpinTrajectory tr = sector_route(cs, spec, times);
		for (std::size_t k = 0; k < times.size(); ++k)
			worst = std::max(worst, std::abs(tr.s_z[k] + std::cos(a * times[k] / 2)));
	}
	return {worst <= 1e-12, fmt("max|s_z + cos(A t / 2)| = %.2e (tol 1e-12)", worst)};
}

Outcome liouville_consistency()
{
	std::mt19937_64 rng(31337);
	double worst = 0.0, trace = 0.0;
	int runs = 0;
	for (int n = 1; n <= 4; ++n)
		for (double eps : {0.0, 1.0, 10.0})
			for (int k = 0; k < 2; ++k) {
				const CouplingSet cs(random_couplings(n, rng), eps, k == 1 ? 0.1 : 0.0);
				const StateSpec spec = k == 0 ? random_product_state(n, rng) : random_entangled_state(n, rng);
				const std::vector<double> times = linear_times(50.0 / max_coupling(cs), 51);
				const auto lr = oracle::liouville_evolve(
					oracle::BlockDensity::from_pure_state(oracle::to_full_state(spec)), cs, times);
				const SpinTrajectory ref = sector_route(cs, spec, times);
				for (std::size_t t = 0; t < times.size(); ++t) {
					worst = std::max(worst, std::abs(lr.states[t].spin().z - ref.s_z[t]));
					trace = std::max(trace, std::abs(lr.states[t].trace() - 1.0));
				}
				trace = std::max(trace, lr.max_trace_drift);
				++runs;
			}
	return {worst <= 1e-8 && trace <= 1e-9,
	        fmt("max|s_z(Liouville) - s_z(Schroedinger)| = %.2e (tol 1e-8), max|tr A + tr C - 1| = %.2e (tol 1e-9), "
	            "%d runs, N=1..4",
	            worst, trace, runs)};
}

// Largest distance from a PA1 pole to the nearest exact eigenvalue of its sector, m = 1 .. N-1.
double pa1_pole_error(const CouplingSet& cs)
{
	const int n = cs.n_nuclei();
	double err = 0.0;
	for (int m = 1; m < n; ++m) {
		const SectorBasis basis(n, m);
		const Eigen::VectorXd exact =
			Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(assemble_hamiltonian(build_blocks(cs, basis))).eigenvalues();
		for (const auto& list : approx_poles(cs, m, PoleApprox::PA1))
			for (double p : list)
				err = std::max(err, (exact.array() - p).abs().minCoeff());
	}
	return err;
}

Outcome pole_approx_convergence()
{
	const double a = 1.0;
	std::vector<double> errs;
	for (double ratio : {10.0, 100.0, 1000.0})
		errs.push_back(pa1_pole_error(CouplingSet(std::vector<double>(6, a), ratio * a)));
	const bool monotone = errs[1] < errs[0] && errs[2] < errs[1];
	return {monotone, fmt("N=6 uniform, eps/a = 10, 100, 1000: max PA1 pole error %.3e, %.3e, %.3e", errs[0], errs[1],
	                      errs[2])};
}

} // namespace

int main()
{
	const std::pair<const char*, std::function<Outcome()>> criteria[] = {
		{"sector-oracle equivalence", sector_oracle_equivalence},
		{"m=0 route equivalence", route_equivalence_m0},
		{"golden structures", golden_structures},
		{"pole identity", pole_identity},
		{"conservation", conservation},
		{"single-nucleus closed form", rabi_closed_form},
		{"Liouville consistency", liouville_consistency},
		{"pole-approximation convergence", pole_approx_convergence},
	};
	int failures = 0;
	for (const auto& [name, check] : criteria) {
		const auto start = std::chrono::steady_clock::now();
		Outcome o;
		try {
			o = check();
		} catch (const std::exception& e) {
			o = {false, std::string("exception: ") + e.what()};
		}
		const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
		std::printf("%s  %-32s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
		std::fflush(stdout);
		failures += !o.pass;
	}
	std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
	return failures == 0 ? 0 : 1;
}
