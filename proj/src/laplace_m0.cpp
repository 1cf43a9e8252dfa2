#include "qdspin/laplace_m0.hpp"

#include "qdspin/basis.hpp"
#include "qdspin/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qdspin {

namespace {

using cd = std::complex<double>;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// p(x) * (x - r), ascending coefficients
std::vector<double> times_linear(const std::vector<double>& p, double r)
{
	std::vector<double> out(p.size() + 1, 0.0);
	for (std::size_t k = 0; k < p.size(); ++k) {
		out[k + 1] += p[k];
		out[k] -= r * p[k];
	}
	return out;
}

std::vector<double> product_of_linears(std::span<const double> roots, std::size_t skip = std::string::npos)
{
	std::vector<double> p{1.0};
	for (std::size_t k = 0; k < roots.size(); ++k)
		if (k != skip)
			p = times_linear(p, roots[k]);
	return p;
}

template <typename T>
T horner(std::span<const double> coeffs, T x)
{
	T acc{0.0};
	for (std::size_t k = coeffs.size(); k-- > 0;)
		acc = acc * x + coeffs[k];
	return acc;
}

double horner_derivative(std::span<const double> coeffs, double x)
{
	double acc = 0.0;
	for (std::size_t k = coeffs.size(); k-- > 1;)
		acc = acc * x + static_cast<double>(k) * coeffs[k];
	return acc;
}

Eigen::VectorXcd companion_eigenvalues(std::span<const double> coeffs)
{
	const auto n = static_cast<Eigen::Index>(coeffs.size()) - 1;
	const double lead = coeffs.back();
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
	for (Eigen::Index i = 1; i < n; ++i)
		companion(i, i - 1) = 1.0;
	for (Eigen::Index i = 0; i < n; ++i)
		companion(i, n - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
	const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
	if (solver.info() != Eigen::Success)
		throw NumericError("companion-matrix eigensolver did not converge");
	return solver.eigenvalues();
}

double secular_slope(const SecularProblem& p, double x)
{
	double d = 1.0;
	for (std::size_t k = 0; k < p.poles.size(); ++k) {
		const double r = x - p.poles[k];
		d += p.weights[k] / (r * r);
	}
	return d;
}

double problem_scale(const SecularProblem& p)
{
	double s = std::abs(p.center);
	double w = 0.0;
	for (std::size_t k = 0; k < p.poles.size(); ++k) {
		s = std::max(s, std::abs(p.poles[k]));
		w += p.weights[k];
	}
	return std::max({s, std::sqrt(w), std::numeric_limits<double>::min()});
}

// A secular root written as poles[origin] + tau, with tau known to high
// relative accuracy even when the root hugs its pole.
struct ShiftedRoot {
	std::size_t origin;
	double tau;
};

// f(p_o + tau) with pole offsets delta_j = p_j - p_o, exact for nearby poles.
struct ShiftedSecular {
	const SecularProblem& p;
	double base; ///< p_o - center
	std::vector<double> delta;

	ShiftedSecular(const SecularProblem& problem, std::size_t origin) : p{problem}, base{problem.poles[origin] - problem.center}
	{
		delta.reserve(p.poles.size());
		for (double pole : p.poles)
			delta.push_back(pole - p.poles[origin]);
	}

	[[nodiscard]] double value(double tau) const
	{
		double f = base + tau;
		for (std::size_t k = 0; k < delta.size(); ++k)
			f -= p.weights[k] / (tau - delta[k]);
		return f;
	}

	[[nodiscard]] double slope(double tau) const
	{
		double d = 1.0;
		for (std::size_t k = 0; k < delta.size(); ++k) {
			const double r = tau - delta[k];
			d += p.weights[k] / (r * r);
		}
		return d;
	}
};

// Root of the increasing shifted secular function inside (lo, hi), in tau.
double solve_in_bracket(const ShiftedSecular& f, double lo, double hi, double guess)
{
	double a = lo;
	double b = hi;
	double x = (guess > a && guess < b) ? guess : 0.5 * (a + b);
	for (int iter = 0; iter < 400; ++iter) {
		const double fx = f.value(x);
		if (fx == 0.0)
			return x;
		if (fx > 0.0)
			b = x;
		else
			a = x;
		double next = x - fx / f.slope(x);
		if (!(next > a && next < b))
			next = 0.5 * (a + b);
		const double tol = 2.0 * kEps * std::max(std::abs(x), std::abs(next));
		if (std::abs(next - x) <= tol || (b - a) <= 4.0 * kEps * std::max(std::abs(a), std::abs(b)))
			return next;
		x = next;
	}
	throw NumericError("secular root search did not converge");
}

struct Deflated {
	SecularProblem reduced;
	std::vector<double> exact_roots;
};

Deflated deflate(const SecularProblem& p)
{
	const double scale = problem_scale(p);
	const double merge_tol = 64.0 * kEps * scale;

	std::vector<std::size_t> order(p.poles.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p.poles[a] < p.poles[b]; });

	Deflated out;
	out.reduced.center = p.center;
	for (std::size_t idx : order) {
		const double pole = p.poles[idx];
		const double w = p.weights[idx];
		if (w == 0.0) {
			out.exact_roots.push_back(pole);
			continue;
		}
		if (w < 0.0)
			throw DomainError("secular problem: negative weight");
		if (!out.reduced.poles.empty() && pole - out.reduced.poles.back() <= merge_tol) {
			// a merged pair keeps one pole in the secular equation and one exact root
			out.reduced.weights.back() += w;
			out.exact_roots.push_back(out.reduced.poles.back());
			continue;
		}
		out.reduced.poles.push_back(pole);
		out.reduced.weights.push_back(w);
	}
	return out;
}

// Distinct ascending poles with positive weights; roots strictly interlace.
std::vector<ShiftedRoot> interlaced_shifted_roots(const SecularProblem& p)
{
	const std::size_t g = p.poles.size();
	const std::vector<double> coeffs = char_poly_coeffs(p);
	const Eigen::VectorXcd seeds_c = companion_eigenvalues(coeffs);
	std::vector<double> seeds(static_cast<std::size_t>(seeds_c.size()));
	for (Eigen::Index k = 0; k < seeds_c.size(); ++k)
		seeds[static_cast<std::size_t>(k)] = seeds_c(k).real();
	std::sort(seeds.begin(), seeds.end());

	double radius = 0.0;
	for (double w : p.weights)
		radius += std::sqrt(w);
	const double scale = problem_scale(p);
	const double margin = radius + scale * 1e-12 + std::numeric_limits<double>::min();
	const double lo = std::min(p.center, p.poles.front()) - margin;
	const double hi = std::max(p.center, p.poles.back()) + margin;

	std::vector<ShiftedRoot> roots(g + 1);
	for (std::size_t k = 0; k <= g; ++k) {
		std::size_t origin = k == 0 ? 0 : k - 1;
		if (k > 0 && k < g) {
			// pick the nearer bracketing pole: f > 0 at the midpoint puts the root in the left half
			const ShiftedSecular left(p, k - 1);
			if (left.value(0.5 * left.delta[k]) < 0.0)
				origin = k;
		}
		const ShiftedSecular f(p, origin);
		const double a = k == 0 ? lo - p.poles[origin] : f.delta[k - 1];
		const double b = k == g ? hi - p.poles[origin] : f.delta[k];
		roots[k] = {origin, solve_in_bracket(f, a, b, seeds[k] - p.poles[origin])};
	}
	return roots;
}

std::vector<double> interlaced_roots(const SecularProblem& p)
{
	if (p.poles.empty())
		return {p.center};
	std::vector<double> out;
	for (const ShiftedRoot& r : interlaced_shifted_roots(p))
		out.push_back(p.poles[r.origin] + r.tau);
	return out;
}

} // namespace

SecularProblem m0_secular_problem(const CouplingSet& cs)
{
	const SectorBasis basis{cs.n_nuclei(), 0};
	const SectorBlocks blocks = build_blocks(cs, basis);
	SecularProblem p;
	p.center = blocks.y_energy(0);
	p.poles.resize(blocks.x_dim());
	p.weights.assign(blocks.x_dim(), 0.0);
	for (std::size_t j = 0; j < blocks.x_dim(); ++j)
		p.poles[j] = blocks.x_energy(j);
	for (const auto& e : blocks.k_rows[0])
		p.weights[e.col] = e.value * e.value;
	return p;
}

std::vector<double> char_poly_coeffs(const SecularProblem& p)
{
	std::vector<double> d = times_linear(product_of_linears(p.poles), p.center);
	for (std::size_t i = 0; i < p.poles.size(); ++i) {
		const std::vector<double> partial = product_of_linears(p.poles, i);
		for (std::size_t k = 0; k < partial.size(); ++k)
			d[k] -= p.weights[i] * partial[k];
	}
	return d;
}

std::vector<double> char_poly_coeffs(const CouplingSet& cs)
{
	return char_poly_coeffs(m0_secular_problem(cs));
}

std::complex<double> char_poly_eval(const SecularProblem& p, std::complex<double> x)
{
	cd full{1.0};
	for (double c : p.poles)
		full *= x - c;
	cd value = (x - p.center) * full;
	for (std::size_t i = 0; i < p.poles.size(); ++i) {
		cd partial{1.0};
		for (std::size_t j = 0; j < p.poles.size(); ++j)
			if (j != i)
				partial *= x - p.poles[j];
		value -= p.weights[i] * partial;
	}
	return value;
}

std::vector<double> find_poles(std::span<const double> coeffs)
{
	if (coeffs.size() < 2)
		throw DomainError("find_poles: polynomial must have degree >= 1");
	if (coeffs.back() == 0.0)
		throw DomainError("find_poles: leading coefficient is zero");
	if (coeffs.back() != 1.0)
		throw DomainError("find_poles: polynomial must be monic");

	const Eigen::VectorXcd raw = companion_eigenvalues(coeffs);
	std::vector<double> roots;
	roots.reserve(static_cast<std::size_t>(raw.size()));
	for (Eigen::Index k = 0; k < raw.size(); ++k) {
		const cd z = raw(k);
		if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z)))
			throw NumericError("find_poles: root " + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+")
			                   + std::to_string(z.imag()) + "i is not real");
		double x = z.real();
		double px = std::abs(horner<double>(coeffs, x));
		for (int iter = 0; iter < 8 && px > 0.0; ++iter) {
			const double slope = horner_derivative(coeffs, x);
			if (slope == 0.0)
				break;
			const double next = x - horner<double>(coeffs, x) / slope;
			const double pn = std::abs(horner<double>(coeffs, next));
			if (!(pn < px))
				break;
			x = next;
			px = pn;
		}
		roots.push_back(x);
	}
	std::sort(roots.begin(), roots.end());
	return roots;
}

std::vector<double> secular_roots(const SecularProblem& problem)
{
	if (problem.poles.size() != problem.weights.size())
		throw DomainError("secular problem: poles and weights differ in length");
	const Deflated deflated = deflate(problem);
	std::vector<double> roots = interlaced_roots(deflated.reduced);
	roots.insert(roots.end(), deflated.exact_roots.begin(), deflated.exact_roots.end());
	std::sort(roots.begin(), roots.end());
	return roots;
}

std::vector<double> m0_poles(const CouplingSet& cs)
{
	return secular_roots(m0_secular_problem(cs));
}

bool has_degenerate_poles(std::span<const double> sorted, double rel_tol)
{
	if (sorted.size() < 2)
		return false;
	const double range = sorted.back() - sorted.front();
	for (std::size_t k = 1; k < sorted.size(); ++k)
		if (sorted[k] - sorted[k - 1] <= rel_tol * range)
			return true;
	return false;
}

std::complex<double> residue_numerator(const RationalSolution& sol, double x)
{
	const auto& c = sol.d_roots;
	cd full{1.0};
	for (double r : c)
		full *= x - r;
	cd value = full * sol.y0_initial;
	for (std::size_t i = 0; i < c.size(); ++i) {
		double partial = 1.0;
		for (std::size_t j = 0; j < c.size(); ++j)
			if (j != i)
				partial *= x - c[j];
		value += (sol.couplings[i] / 4.0) * sol.x_initial[i] * partial;
	}
	return value;
}

RationalSolution make_rational_solution(const CouplingSet& cs, std::complex<double> y0_initial,
                                        std::span<const std::complex<double>> x_initial)
{
	const int n = cs.n_nuclei();
	if (x_initial.size() != static_cast<std::size_t>(n))
		throw DomainError("make_rational_solution: expected " + std::to_string(n) + " X amplitudes, got "
		                  + std::to_string(x_initial.size()));

	RationalSolution sol;
	sol.problem = m0_secular_problem(cs);
	sol.poles = secular_roots(sol.problem);
	sol.d_roots = sol.problem.poles;
	sol.couplings.assign(cs.couplings().begin(), cs.couplings().end());
	sol.y0_initial = y0_initial;
	sol.x_initial.assign(x_initial.begin(), x_initial.end());

	const auto& poles = sol.poles;
	const double range = poles.back() - poles.front();
	if (has_degenerate_poles(poles, kPoleDegeneracyTol))
		throw DegeneratePolesError("m=0 poles are degenerate; use the spectral sector evolver");
	for (double c : sol.d_roots)
		for (double p : poles)
			if (std::abs(c - p) <= kPoleDegeneracyTol * range)
				throw DegeneratePolesError("a zero of d_N coincides with a pole of D_{N+1}; use the spectral sector evolver");

	// Re-solve on the nucleus-ordered poles keeping each root as (nearest c_o, tau), so that
	// delta[l][j] = Omega_l - c_j carries full relative accuracy when a root hugs c_j.
	SecularProblem sorted = sol.problem;
	std::vector<std::size_t> order(static_cast<std::size_t>(n));
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sol.d_roots[a] < sol.d_roots[b]; });
	for (std::size_t k = 0; k < order.size(); ++k) {
		sorted.poles[k] = sol.problem.poles[order[k]];
		sorted.weights[k] = sol.problem.weights[order[k]];
	}
	const std::vector<ShiftedRoot> shifted = interlaced_shifted_roots(sorted);
	const std::size_t np = shifted.size();
	std::vector<std::vector<double>> delta(np, std::vector<double>(static_cast<std::size_t>(n)));
	for (std::size_t l = 0; l < np; ++l) {
		const std::size_t o = order[shifted[l].origin];
		sol.poles[l] = sol.d_roots[o] + shifted[l].tau;
		for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j)
			delta[l][j] = j == o ? shifted[l].tau : shifted[l].tau - (sol.d_roots[j] - sol.d_roots[o]);
	}

	// Res_{Omega_l} dtilde / D = dtilde(Omega_l) / (d(Omega_l) f'(Omega_l))
	//                         = [Y_0(0) + sum_j k_j X_j(0) / delta_lj] / (1 + sum_j k_j^2 / delta_lj^2)
	sol.y_weights.resize(np);
	for (std::size_t l = 0; l < np; ++l) {
		cd num = sol.y0_initial;
		double slope = 1.0;
		for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
			const double kj = sol.couplings[j] / 4.0;
			num += kj * sol.x_initial[j] / delta[l][j];
			slope += kj * kj / (delta[l][j] * delta[l][j]);
		}
		sol.y_weights[l] = num / slope;
	}

	sol.x_own_weights.resize(static_cast<std::size_t>(n));
	sol.x_weights.assign(static_cast<std::size_t>(n), std::vector<cd>(np));
	for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
		const double cj = sol.d_roots[j];
		const double kj = sol.couplings[j] / 4.0;
		// vanishes analytically: dtilde(c_j) / D(c_j) = -X_j(0) / k_j
		const cd ybar_at_cj = residue_numerator(sol, cj) / char_poly_eval(sol.problem, cd{cj});
		sol.x_own_weights[j] = sol.x_initial[j] + kj * ybar_at_cj;
		for (std::size_t l = 0; l < np; ++l)
			sol.x_weights[j][l] = kj * sol.y_weights[l] / delta[l][j];
	}
	return sol;
}

std::complex<double> invert_y0(const RationalSolution& sol, double t)
{
	cd y{0.0};
	for (std::size_t l = 0; l < sol.poles.size(); ++l)
		y += sol.y_weights[l] * std::polar(1.0, -sol.poles[l] * t);
	return y;
}

std::complex<double> invert_xj(const RationalSolution& sol, int nucleus, double t)
{
	if (nucleus < 0 || static_cast<std::size_t>(nucleus) >= sol.d_roots.size())
		throw DomainError("invert_xj: nucleus index out of range");
	const auto j = static_cast<std::size_t>(nucleus);
	cd x = sol.x_own_weights[j] * std::polar(1.0, -sol.d_roots[j] * t);
	for (std::size_t l = 0; l < sol.poles.size(); ++l)
		x += sol.x_weights[j][l] * std::polar(1.0, -sol.poles[l] * t);
	return x;
}

AmplitudeTrajectory laplace_m0_propagate(const RationalSolution& sol, int n_nuclei, std::span<const double> times)
{
	AmplitudeTrajectory traj;
	traj.sector = SectorId{n_nuclei, 0};
	traj.times.assign(times.begin(), times.end());
	const auto nt = static_cast<Eigen::Index>(times.size());
	traj.y_amps.resize(nt, 1);
	traj.x_amps.resize(nt, n_nuclei);
	for (Eigen::Index k = 0; k < nt; ++k) {
		const double t = times[static_cast<std::size_t>(k)];
		traj.y_amps(k, 0) = invert_y0(sol, t);
		for (int j = 0; j < n_nuclei; ++j)
			traj.x_amps(k, j) = invert_xj(sol, j, t);
	}
	return traj;
}

std::vector<std::vector<double>> approx_poles(const CouplingSet& cs, int m, PoleApprox variant)
{
	const SectorBasis basis{cs.n_nuclei(), m};
	const SectorBlocks blocks = build_blocks(cs, basis);
	std::vector<std::vector<double>> out(blocks.y_dim());
	for (std::size_t i = 0; i < blocks.y_dim(); ++i) {
		SecularProblem p;
		p.center = blocks.y_energy(i);
		for (const auto& e : blocks.k_rows[i]) {
			p.poles.push_back(blocks.x_energy(e.col));
			p.weights.push_back(e.value * e.value);
		}
		if (variant == PoleApprox::PA0) {
			out[i] = p.poles;
			out[i].push_back(p.center);
			std::sort(out[i].begin(), out[i].end());
		} else {
			out[i] = secular_roots(p);
		}
	}
	return out;
}

namespace {

struct ExpTerm {
	double freq;
	cd weight;
};

// Residue expansion of Ybar_i under PA1 for one y-config.
std::vector<ExpTerm> pa1_y_terms(const SectorBlocks& blocks, std::size_t i, const Eigen::VectorXcd& initial)
{
	const auto ny = static_cast<Eigen::Index>(blocks.y_dim());
	struct Group {
		double pole;
		double weight;
		cd drive;
	};
	std::vector<Group> groups;
	for (const auto& e : blocks.k_rows[i]) {
		if (e.value == 0.0)
			continue;
		groups.push_back({blocks.x_energy(e.col), e.value * e.value,
		                  e.value * initial(ny + static_cast<Eigen::Index>(e.col))});
	}
	std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.pole < b.pole; });

	SecularProblem p;
	p.center = blocks.y_energy(i);
	std::vector<cd> drive;
	const double merge_tol = 64.0 * kEps * std::max(1.0, std::abs(p.center));
	for (const auto& g : groups) {
		if (!p.poles.empty() && g.pole - p.poles.back() <= merge_tol * std::max(1.0, std::abs(g.pole))) {
			p.weights.back() += g.weight;
			drive.back() += g.drive;
			continue;
		}
		p.poles.push_back(g.pole);
		p.weights.push_back(g.weight);
		drive.push_back(g.drive);
	}

	const cd y0 = initial(static_cast<Eigen::Index>(i));
	const std::vector<double> roots = interlaced_roots(p);
	std::vector<ExpTerm> terms;
	terms.reserve(roots.size());
	for (double r : roots) {
		cd num = y0;
		for (std::size_t g = 0; g < p.poles.size(); ++g)
			num += drive[g] / (r - p.poles[g]);
		terms.push_back({r, num / secular_slope(p, r)});
	}
	return terms;
}

} // namespace

AmplitudeTrajectory pole_approx_propagate(const SectorBlocks& blocks, PoleApprox variant,
                                          const Eigen::VectorXcd& initial, std::span<const double> times)
{
	const std::size_t ny = blocks.y_dim();
	const std::size_t nx = blocks.x_dim();
	if (static_cast<std::size_t>(initial.size()) != ny + nx)
		throw DomainError("pole_approx_propagate: initial column has wrong length");

	std::vector<std::vector<ExpTerm>> y_terms(ny);
	std::vector<std::vector<ExpTerm>> x_terms(nx);
	for (std::size_t i = 0; i < ny; ++i) {
		if (variant == PoleApprox::PA0 || blocks.k_rows[i].empty())
			y_terms[i] = {{blocks.y_energy(i), initial(static_cast<Eigen::Index>(i))}};
		else
			y_terms[i] = pa1_y_terms(blocks, i, initial);
	}
	for (std::size_t j = 0; j < nx; ++j)
		x_terms[j] = {{blocks.x_energy(j), initial(static_cast<Eigen::Index>(ny + j))}};

	if (variant == PoleApprox::PA1) {
		// Xbar_j = [i X_j(0) + sum_i K_ij Ybar_i] / (x - c_j), split into partial fractions
		for (std::size_t i = 0; i < ny; ++i) {
			for (const auto& e : blocks.k_rows[i]) {
				const double cj = blocks.x_energy(e.col);
				auto& xt = x_terms[e.col];
				for (const auto& term : y_terms[i]) {
					const cd a = e.value * term.weight / (term.freq - cj);
					xt.front().weight -= a;
					xt.push_back({term.freq, a});
				}
			}
		}
	}

	AmplitudeTrajectory traj;
	traj.sector = blocks.sector;
	traj.times.assign(times.begin(), times.end());
	const auto nt = static_cast<Eigen::Index>(times.size());
	traj.y_amps.resize(nt, static_cast<Eigen::Index>(ny));
	traj.x_amps.resize(nt, static_cast<Eigen::Index>(nx));
	auto evaluate = [](const std::vector<ExpTerm>& terms, double t) {
		cd v{0.0};
		for (const auto& term : terms)
			v += term.weight * std::polar(1.0, -term.freq * t);
		return v;
	};
	for (Eigen::Index k = 0; k < nt; ++k) {
		const double t = times[static_cast<std::size_t>(k)];
		for (std::size_t i = 0; i < ny; ++i)
			traj.y_amps(k, static_cast<Eigen::Index>(i)) = evaluate(y_terms[i], t);
		for (std::size_t j = 0; j < nx; ++j)
			traj.x_amps(k, static_cast<Eigen::Index>(j)) = evaluate(x_terms[j], t);
	}
	return traj;
}

} // namespace qdspin
