#include "qdspin/config.hpp"
#include "qdspin/errors.hpp"
#include "qdspin/run.hpp"

#include <doctest.h>

#include <sstream>

using namespace qdspin;

namespace {

RunConfig make_config(int n, NuclearMask mask, BlochDirection dir, Solver solver)
{
	RunConfig c;
	c.n_nuclei = n;
	c.coupling = ExponentialProfile{1.0, 0.25};
	c.epsilon_e = 0.6;
	c.epsilon_n = 0.01;
	c.initial = ProductInitial{dir, mask};
	c.time = {40.0, 201, TimeSpacing::Linear, 0.0};
	c.solver = solver;
	return c;
}

} // namespace

TEST_CASE("electron down on polarized nuclei starts at s_z = -1 in one sector")
{
	const RunResult r = run(make_config(3, 0, BlochDirection::down(), Solver::SectorEigen));
	CHECK(r.sectors == std::vector<int>{0});
	CHECK(r.trajectory.s_z.front() == -1.0);
	CHECK(r.ok());
}

TEST_CASE("laplace-m0 refuses states outside m=0")
{
	CHECK_THROWS_AS((void)run(make_config(3, 0b010, BlochDirection::down(), Solver::LaplaceM0)), DomainError);
	const RunResult r = run(make_config(4, 0, {1.2, 0.3}, Solver::LaplaceM0));
	CHECK(r.sectors == std::vector<int>{-1, 0});
	const RunResult e = run(make_config(4, 0, {1.2, 0.3}, Solver::SectorEigen));
	CHECK(compare_trajectories(r.trajectory, e.trajectory).max_abs_s_x < 1e-10);
}

TEST_CASE("all exact solvers agree")
{
	const RunConfig base = make_config(5, 0b10100, {2.1, -0.8}, Solver::SectorEigen);
	const RunResult eig = run(base);
	RunConfig oc = base;
	oc.solver = Solver::Oracle;
	const RunResult orc = run(oc);
	const TrajectoryDiff d = compare_trajectories(eig.trajectory, orc.trajectory);
	CHECK(d.max_abs_s_x < 1e-10);
	CHECK(d.max_abs_s_y < 1e-10);
	CHECK(d.max_abs_s_z < 1e-10);
	CHECK(d.max_abs_norm < 1e-12);
}

TEST_CASE("pole approximation comparison harness")
{
	RunConfig c = make_config(4, 0b0001, BlochDirection::down(), Solver::PoleApproxPA1);
	c.epsilon_e = 20.0;
	const RunResult pa = run(c);
	c.solver = Solver::SectorEigen;
	const RunResult ex = run(c);
	CHECK(pa.ok()); // approximate solvers are exempt from the invariants
	const TrajectoryDiff d = compare_trajectories(pa.trajectory, ex.trajectory);
	CHECK(d.max_abs_s_z > 0.0);
	CHECK(d.max_abs_s_z < 0.05);
}

TEST_CASE("output is bit-identical across worker counts")
{
	RunConfig c = make_config(6, 0, BlochDirection::down(), Solver::SectorEigen);
	c.initial = SectorInitial{};
	auto& sectors = std::get<SectorInitial>(c.initial).sectors;
	for (int m = -1; m <= 6; ++m) {
		const auto [ny, nx] = sector_dims(6, m);
		SectorAmplitudes a;
		a.weight = {1.0 + 0.1 * m, 0.05 * m};
		a.y = Eigen::VectorXcd::LinSpaced(static_cast<Eigen::Index>(ny), 0.1, 1.0);
		a.x = Eigen::VectorXcd::LinSpaced(static_cast<Eigen::Index>(nx), -0.5, 0.3);
		sectors.emplace(m, a);
	}
	std::ostringstream one, four;
	write_csv(run(c, {1}).trajectory, one);
	write_csv(run(c, {4}).trajectory, four);
	CHECK(one.str() == four.str());
}

TEST_CASE("capacity errors surface from run")
{
	RunConfig c = make_config(12, 0b111111, BlochDirection::down(), Solver::SectorEigen);
	c.dense_cap = 500;
	CHECK_THROWS_AS((void)run(c), CapacityError);
}

TEST_CASE("oracle evolve_sector misuse")
{
	const CouplingSet cs({0.5}, 0.0);
	const std::vector<double> t{0.0};
	CHECK_THROWS_AS((void)evolve_sector(cs, 0, Eigen::VectorXcd::Ones(2), t, Solver::Oracle), DomainError);
}
