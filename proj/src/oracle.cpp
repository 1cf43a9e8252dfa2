#include "qdspin/oracle.hpp"

#include "qdspin/basis.hpp"
#include "qdspin/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace qdspin::oracle {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

void check_full_cap(int n)
{
	if (n > kMaxFullNuclei)
		throw CapacityError("full-space oracle is limited to N <= " + std::to_string(kMaxFullNuclei) + ", got N="
		                    + std::to_string(n));
}

int nuclei_from_dim(Eigen::Index full_dim)
{
	const auto d = static_cast<std::uint64_t>(full_dim);
	if (d < 4 || !std::has_single_bit(d))
		throw DomainError("full-space dimension must be 2^{N+1} with N >= 1");
	return std::countr_zero(d) - 1;
}

} // namespace

std::size_t full_index(int n_nuclei, Electron electron, NuclearMask mask)
{
	return (electron == Electron::Down ? (std::size_t{1} << n_nuclei) : 0) + static_cast<std::size_t>(mask);
}

Eigen::MatrixXd build_full_hamiltonian(const CouplingSet& cs)
{
	const int n = cs.n_nuclei();
	check_full_cap(n);
	const std::size_t half = std::size_t{1} << n;
	const auto dim = static_cast<Eigen::Index>(2 * half);
	Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
	for (NuclearMask s = 0; s < half; ++s) {
		const auto up = static_cast<Eigen::Index>(full_index(n, Electron::Up, s));
		const auto down = static_cast<Eigen::Index>(full_index(n, Electron::Down, s));
		h(up, up) = diag_energy(cs, Electron::Up, s);
		h(down, down) = diag_energy(cs, Electron::Down, s);
		for (int l = 0; l < n; ++l) {
			const NuclearMask bit = NuclearMask{1} << l;
			if ((s & bit) != 0)
				continue;
			// |down; S> <-> |up; S + {l}>
			const auto partner = static_cast<Eigen::Index>(full_index(n, Electron::Up, s | bit));
			h(down, partner) = flip_element(cs, l);
			h(partner, down) = flip_element(cs, l);
		}
	}
	return h;
}

Eigen::VectorXd mz_diagonal(int n_nuclei)
{
	check_full_cap(n_nuclei);
	const std::size_t half = std::size_t{1} << n_nuclei;
	Eigen::VectorXd mz(static_cast<Eigen::Index>(2 * half));
	for (NuclearMask s = 0; s < half; ++s) {
		const int nuclear = n_nuclei - 2 * std::popcount(s);
		mz(static_cast<Eigen::Index>(full_index(n_nuclei, Electron::Up, s))) = nuclear + 1;
		mz(static_cast<Eigen::Index>(full_index(n_nuclei, Electron::Down, s))) = nuclear - 1;
	}
	return mz;
}

Eigen::VectorXcd to_full_state(const StateSpec& spec)
{
	const int n = spec.n_nuclei;
	check_full_cap(n);
	validate(spec);
	Eigen::VectorXcd full = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{2} << n));
	for (const auto& [m, s] : spec.sectors) {
		const SectorBasis basis{n, m};
		for (std::size_t i = 0; i < basis.y_dim(); ++i)
			full(static_cast<Eigen::Index>(full_index(n, Electron::Down, basis.y_configs()[i])))
			    += s.weight * s.y(static_cast<Eigen::Index>(i));
		for (std::size_t j = 0; j < basis.x_dim(); ++j)
			full(static_cast<Eigen::Index>(full_index(n, Electron::Up, basis.x_configs()[j])))
			    += s.weight * s.x(static_cast<Eigen::Index>(j));
	}
	return full;
}

std::vector<std::size_t> sector_order(int n_nuclei)
{
	check_full_cap(n_nuclei);
	std::vector<std::size_t> order;
	order.reserve(std::size_t{2} << n_nuclei);
	for (int m = -1; m <= n_nuclei; ++m) {
		const SectorBasis basis{n_nuclei, m};
		for (NuclearMask s : basis.y_configs())
			order.push_back(full_index(n_nuclei, Electron::Down, s));
		for (NuclearMask s : basis.x_configs())
			order.push_back(full_index(n_nuclei, Electron::Up, s));
	}
	return order;
}

FullPropagator::FullPropagator(const Eigen::MatrixXd& hamiltonian)
{
	const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
	if (solver.info() != Eigen::Success)
		throw NumericError("full-space eigensolver did not converge");
	eigenvalues_ = solver.eigenvalues();
	eigenvectors_ = solver.eigenvectors().cast<cd>();
}

Eigen::VectorXcd FullPropagator::apply(const Eigen::VectorXcd& state, double t) const
{
	if (state.size() != eigenvalues_.size())
		throw DomainError("FullPropagator: state has wrong dimension");
	if (t == 0.0)
		return state;
	Eigen::VectorXcd coeffs = eigenvectors_.adjoint() * state;
	for (Eigen::Index k = 0; k < coeffs.size(); ++k)
		coeffs(k) *= std::polar(1.0, -eigenvalues_(k) * t);
	return eigenvectors_ * coeffs;
}

std::vector<Eigen::VectorXcd> evolve_full(const Eigen::MatrixXd& hamiltonian, const Eigen::VectorXcd& initial,
                                          std::span<const double> times)
{
	const FullPropagator prop(hamiltonian);
	std::vector<Eigen::VectorXcd> out;
	out.reserve(times.size());
	for (double t : times)
		out.push_back(prop.apply(initial, t));
	return out;
}

Eigen::Matrix2cd partial_trace_electron(const Eigen::VectorXcd& state)
{
	const int n = nuclei_from_dim(state.size());
	const auto half = static_cast<Eigen::Index>(std::size_t{1} << n);
	const auto up = state.head(half);
	const auto down = state.tail(half);
	Eigen::Matrix2cd rho;
	rho(0, 0) = up.squaredNorm();
	rho(1, 1) = down.squaredNorm();
	rho(0, 1) = down.dot(up); // sum_S psi_up(S) conj(psi_down(S))
	rho(1, 0) = std::conj(rho(0, 1));
	return rho;
}

Eigen::Matrix2cd partial_trace_electron(const Eigen::MatrixXcd& density)
{
	if (density.rows() != density.cols())
		throw DomainError("partial_trace_electron: density matrix is not square");
	const int n = nuclei_from_dim(density.rows());
	const auto half = static_cast<Eigen::Index>(std::size_t{1} << n);
	Eigen::Matrix2cd rho;
	for (int r = 0; r < 2; ++r)
		for (int c = 0; c < 2; ++c)
			rho(r, c) = density.block(r * half, c * half, half, half).trace();
	return rho;
}

SpinVector bloch_vector(const Eigen::Matrix2cd& rho)
{
	return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

BlockDensity BlockDensity::from_pure_state(const Eigen::VectorXcd& state)
{
	return from_full(state * state.adjoint());
}

BlockDensity BlockDensity::from_full(const Eigen::MatrixXcd& density)
{
	const int n = nuclei_from_dim(density.rows());
	const auto half = static_cast<Eigen::Index>(std::size_t{1} << n);
	BlockDensity blocks;
	blocks.a = density.topLeftCorner(half, half);
	blocks.b = density.topRightCorner(half, half);
	blocks.c = density.bottomRightCorner(half, half);
	return blocks;
}

Eigen::MatrixXcd BlockDensity::assemble() const
{
	const Eigen::Index half = a.rows();
	Eigen::MatrixXcd rho(2 * half, 2 * half);
	rho.topLeftCorner(half, half) = a;
	rho.topRightCorner(half, half) = b;
	rho.bottomLeftCorner(half, half) = b.adjoint();
	rho.bottomRightCorner(half, half) = c;
	return rho;
}

double BlockDensity::trace() const
{
	return (a.trace() + c.trace()).real();
}

SpinVector BlockDensity::spin() const
{
	const cd tb = b.trace();
	return {2.0 * tb.real(), -2.0 * tb.imag(), (a.trace() - c.trace()).real()};
}

NuclearFields NuclearFields::build(const CouplingSet& cs)
{
	const int n = cs.n_nuclei();
	if (n > kMaxLiouvilleNuclei)
		throw CapacityError("Liouville route is limited to N <= " + std::to_string(kMaxLiouvilleNuclei));
	const std::size_t half = std::size_t{1} << n;
	const auto dim = static_cast<Eigen::Index>(half);
	NuclearFields f;
	f.epsilon_e = cs.epsilon_e();
	f.g_z = Eigen::MatrixXcd::Zero(dim, dim);
	f.g_minus = Eigen::MatrixXcd::Zero(dim, dim);
	f.n_z = Eigen::MatrixXcd::Zero(dim, dim);
	// one Kronecker-placed site operator per nucleus
	for (int k = 0; k < n; ++k) {
		const NuclearMask bit = NuclearMask{1} << k;
		for (NuclearMask s = 0; s < half; ++s) {
			const auto idx = static_cast<Eigen::Index>(s);
			const double sigma_z = (s & bit) != 0 ? -1.0 : 1.0;
			f.g_z(idx, idx) += cs.coupling(k) * sigma_z;
			f.n_z(idx, idx) += cs.epsilon_n() * sigma_z;
			if ((s & bit) == 0)
				f.g_minus(static_cast<Eigen::Index>(s | bit), idx) += 0.5 * cs.coupling(k);
		}
	}
	f.g_plus = f.g_minus.transpose();
	return f;
}

BlockDensity liouville_rhs(const BlockDensity& rho, const NuclearFields& f)
{
	const Eigen::MatrixXcd b_dag = rho.b.adjoint();
	const Eigen::MatrixXcd shifted = f.g_z + 2.0 * f.epsilon_e * Eigen::MatrixXcd::Identity(f.g_z.rows(), f.g_z.cols());

	BlockDensity i_dt;
	i_dt.a = 0.5 * (f.g_z * rho.a - rho.a * f.g_z) + 0.5 * (f.g_minus * b_dag - rho.b * f.g_plus)
	         + (f.n_z * rho.a - rho.a * f.n_z);
	i_dt.b = 0.5 * (shifted * rho.b + rho.b * shifted) + 0.5 * (f.g_minus * rho.c - rho.a * f.g_minus)
	         + (f.n_z * rho.b - rho.b * f.n_z);
	i_dt.c = -0.5 * (f.g_z * rho.c - rho.c * f.g_z) + 0.5 * (f.g_plus * rho.b - b_dag * f.g_minus)
	         + (f.n_z * rho.c - rho.c * f.n_z);

	// d/dt = -i * (i d/dt)
	i_dt.a *= -kI;
	i_dt.b *= -kI;
	i_dt.c *= -kI;
	return i_dt;
}

BlockDensity liouville_rhs(const BlockDensity& rho, const CouplingSet& cs)
{
	return liouville_rhs(rho, NuclearFields::build(cs));
}

namespace {

BlockDensity axpy(const BlockDensity& x, double h, const BlockDensity& k)
{
	return {x.a + h * k.a, x.b + h * k.b, x.c + h * k.c};
}

BlockDensity rk4_step(const BlockDensity& y, double h, const NuclearFields& f)
{
	const BlockDensity k1 = liouville_rhs(y, f);
	const BlockDensity k2 = liouville_rhs(axpy(y, h / 2.0, k1), f);
	const BlockDensity k3 = liouville_rhs(axpy(y, h / 2.0, k2), f);
	const BlockDensity k4 = liouville_rhs(axpy(y, h, k3), f);
	return {y.a + (h / 6.0) * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
	        y.b + (h / 6.0) * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b),
	        y.c + (h / 6.0) * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c)};
}

double max_abs_diff(const BlockDensity& x, const BlockDensity& y)
{
	return std::max({(x.a - y.a).cwiseAbs().maxCoeff(), (x.b - y.b).cwiseAbs().maxCoeff(),
	                 (x.c - y.c).cwiseAbs().maxCoeff()});
}

double max_abs(const BlockDensity& x)
{
	return std::max({x.a.cwiseAbs().maxCoeff(), x.b.cwiseAbs().maxCoeff(), x.c.cwiseAbs().maxCoeff()});
}

double operator_scale(const NuclearFields& f)
{
	auto inf_norm = [](const Eigen::MatrixXcd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); };
	return std::abs(f.epsilon_e) + inf_norm(f.g_z) + inf_norm(f.g_minus) + inf_norm(f.n_z);
}


// Steps of h = 1/|L| keep the Taylor terms decaying like 1/k!.
void taylor_advance(BlockDensity& y, double& t, double target, const NuclearFields& f, double scale,
                    const LiouvilleOptions& options, std::size_t& steps)
{
	const double h_max = options.initial_step > 0.0 ? options.initial_step : 1.0 / scale;
	while (t < target) {
		if (++steps > options.max_steps)
			throw NumericError("liouville_evolve: step budget exhausted");
		const double h = std::min(h_max, target - t);
		BlockDensity term = y;
		BlockDensity sum = y;
		const double ref = std::max(1.0, max_abs(y));
		int k = 1;
		for (; k <= 80; ++k) {
			term = liouville_rhs(term, f);
			const double c = h / k;
			term = {c * term.a, c * term.b, c * term.c};
			sum = axpy(sum, 1.0, term);
			if (max_abs(term) <= 1e-3 * options.local_tol * ref && k >= 4)
				break;
		}
		if (k > 80 || !std::isfinite(max_abs(sum)))
			throw NumericError("liouville_evolve: Taylor series did not converge");
		y = std::move(sum);
		t += h;
	}
	t = target;
}

// `h` carries the accepted step size across calls.
void rk4_advance(BlockDensity& y, double& t, double target, const NuclearFields& f, double scale,
                 const LiouvilleOptions& options, double& h, std::size_t& steps)
{
	const double h_min = 1e-9 / scale;
	while (t < target) {
		if (++steps > options.max_steps)
			throw NumericError("liouville_evolve: step budget exhausted");
		const double step = std::min(h, target - t);
		const BlockDensity full = rk4_step(y, step, f);
		const BlockDensity half_step = rk4_step(rk4_step(y, step / 2.0, f), step / 2.0, f);
		const double err = max_abs_diff(full, half_step) / 15.0;
		if (!std::isfinite(err))
			throw NumericError("liouville_evolve: non-finite state");
		if (err > options.local_tol && step > h_min) {
			h = std::max(step * std::max(0.2, 0.9 * std::pow(options.local_tol / err, 0.2)), h_min);
			continue;
		}
		// Richardson: the two-half-step result plus its error estimate
		y = {half_step.a + (half_step.a - full.a) / 15.0, half_step.b + (half_step.b - full.b) / 15.0,
		     half_step.c + (half_step.c - full.c) / 15.0};
		t += step;
		if (step == h) {
			const double grow = err > 0.0 ? 0.9 * std::pow(options.local_tol / err, 0.2) : 2.0;
			h = step * std::clamp(grow, 0.2, 2.0);
		}
	}
}

} // namespace

LiouvilleResult liouville_evolve(const BlockDensity& initial, const CouplingSet& cs, std::span<const double> times,
                                 const LiouvilleOptions& options)
{
	const NuclearFields fields = NuclearFields::build(cs);
	const Eigen::Index half = fields.g_z.rows();
	if (initial.a.rows() != half || initial.b.rows() != half || initial.c.rows() != half)
		throw DomainError("liouville_evolve: density blocks do not match 2^N for N=" + std::to_string(cs.n_nuclei()));

	const double scale = std::max(operator_scale(fields), 1e-12);
	const double trace0 = initial.trace();

	LiouvilleResult result;
	result.states.reserve(times.size());
	BlockDensity y = initial;
	double t = 0.0;
	double h = options.initial_step > 0.0 ? options.initial_step : 0.05 / scale;
	auto advance = [&](double target) {
		if (options.method == LiouvilleMethod::Taylor)
			taylor_advance(y, t, target, fields, scale, options, result.steps);
		else
			rk4_advance(y, t, target, fields, scale, options, h, result.steps);
	};
	for (double target : times) {
		if (target < t)
			throw DomainError("liouville_evolve: times must be non-decreasing and non-negative");
		advance(target);
		result.max_trace_drift = std::max(result.max_trace_drift, std::abs(y.trace() - trace0));
		result.states.push_back(y);
	}
	return result;
}

} // namespace qdspin::oracle
