#include "qdspin/blocks.hpp"

#include "qdspin/errors.hpp"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <ostream>
#include <string>

namespace qdspin {

SectorBlocks build_blocks(const CouplingSet& cs, const SectorBasis& basis)
{
	const int n = cs.n_nuclei();
	if (basis.n_nuclei() != n)
		throw DomainError("build_blocks: basis has N=" + std::to_string(basis.n_nuclei())
		                  + " but couplings have N=" + std::to_string(n));

	SectorBlocks blocks;
	blocks.sector = basis.sector();
	const int m = basis.m();
	blocks.zeeman_down = cs.epsilon_n() * static_cast<double>(n - 2 * m);
	blocks.zeeman_up = cs.epsilon_n() * static_cast<double>(n - 2 * (m + 1));

	blocks.b_down.reserve(basis.y_dim());
	for (NuclearMask s : basis.y_configs())
		blocks.b_down.push_back(shifted_energy(cs, s));
	blocks.b_up.reserve(basis.x_dim());
	for (NuclearMask s : basis.x_configs())
		blocks.b_up.push_back(shifted_energy(cs, s));

	blocks.k_rows.resize(basis.y_dim());
	const NuclearMask full = cs.full_mask();
	for (std::size_t i = 0; i < basis.y_dim(); ++i) {
		const NuclearMask s = basis.y_configs()[i];
		auto& row = blocks.k_rows[i];
		row.reserve(static_cast<std::size_t>(n - m));
		NuclearMask free = full & ~s;
		while (free != 0) {
			const int l = std::countr_zero(free);
			free &= free - 1;
			const std::size_t j = basis.rank(Branch::X, s | (NuclearMask{1} << l));
			row.push_back({j, flip_element(cs, l)});
		}
		std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.col < b.col; });
	}
	return blocks;
}

Eigen::MatrixXd SectorBlocks::dense_k() const
{
	Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(y_dim()), static_cast<Eigen::Index>(x_dim()));
	for (std::size_t i = 0; i < k_rows.size(); ++i)
		for (const auto& e : k_rows[i])
			k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.col)) = e.value;
	return k;
}

Eigen::MatrixXd assemble_hamiltonian(const SectorBlocks& blocks, std::size_t cap)
{
	const std::size_t d = blocks.dim();
	if (d > cap)
		throw CapacityError("sector N=" + std::to_string(blocks.sector.n_nuclei) + " m="
		                    + std::to_string(blocks.sector.m) + " has dimension " + std::to_string(d)
		                    + " above the dense cap " + std::to_string(cap));
	const auto ny = static_cast<Eigen::Index>(blocks.y_dim());
	Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
	for (Eigen::Index i = 0; i < ny; ++i)
		h(i, i) = blocks.y_energy(static_cast<std::size_t>(i));
	for (std::size_t j = 0; j < blocks.x_dim(); ++j) {
		const auto jj = ny + static_cast<Eigen::Index>(j);
		h(jj, jj) = blocks.x_energy(j);
	}
	for (std::size_t i = 0; i < blocks.k_rows.size(); ++i) {
		for (const auto& e : blocks.k_rows[i]) {
			const auto r = static_cast<Eigen::Index>(i);
			const auto c = ny + static_cast<Eigen::Index>(e.col);
			h(r, c) = e.value;
			h(c, r) = e.value;
		}
	}
	return h;
}

LaplaceLhs laplace_lhs(const SectorBlocks& blocks, std::complex<double> laplace_var)
{
	const std::complex<double> iw = std::complex<double>{0.0, 1.0} * laplace_var;
	LaplaceLhs lhs;
	lhs.a_diag.resize(static_cast<Eigen::Index>(blocks.y_dim()));
	for (std::size_t i = 0; i < blocks.y_dim(); ++i)
		lhs.a_diag(static_cast<Eigen::Index>(i)) = iw - blocks.y_energy(i);
	lhs.b_diag.resize(static_cast<Eigen::Index>(blocks.x_dim()));
	for (std::size_t j = 0; j < blocks.x_dim(); ++j)
		lhs.b_diag(static_cast<Eigen::Index>(j)) = iw - blocks.x_energy(j);
	lhs.c = -blocks.dense_k();
	lhs.d = lhs.c.transpose();
	return lhs;
}

Eigen::MatrixXcd LaplaceLhs::dense() const
{
	const Eigen::Index ny = a_diag.size();
	const Eigen::Index nx = b_diag.size();
	Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ny + nx, ny + nx);
	m.topLeftCorner(ny, ny) = a_diag.asDiagonal();
	m.bottomRightCorner(nx, nx) = b_diag.asDiagonal();
	m.topRightCorner(ny, nx) = c.cast<std::complex<double>>();
	m.bottomLeftCorner(nx, ny) = d.cast<std::complex<double>>();
	return m;
}

Eigen::VectorXcd LaplaceLhs::solve(const Eigen::VectorXcd& initial) const
{
	if (initial.size() != a_diag.size() + b_diag.size())
		throw DomainError("LaplaceLhs::solve: initial column has wrong length");
	const Eigen::VectorXcd rhs = std::complex<double>{0.0, 1.0} * initial;
	return dense().partialPivLu().solve(rhs);
}

void dump_blocks(const SectorBlocks& blocks, std::ostream& out)
{
	const auto flags = out.flags();
	const auto precision = out.precision();
	out << std::setprecision(17);
	out << "# sector N=" << blocks.sector.n_nuclei << " m=" << blocks.sector.m << " M_z=" << blocks.sector.mz()
	    << '\n';
	out << "b_down";
	for (double b : blocks.b_down)
		out << ' ' << b;
	out << "\nb_up";
	for (double b : blocks.b_up)
		out << ' ' << b;
	out << "\nK " << blocks.y_dim() << 'x' << blocks.x_dim() << '\n';
	const Eigen::MatrixXd k = blocks.dense_k();
	for (Eigen::Index i = 0; i < k.rows(); ++i) {
		for (Eigen::Index j = 0; j < k.cols(); ++j)
			out << (j == 0 ? "" : " ") << k(i, j);
		out << '\n';
	}
	out.flags(flags);
	out.precision(precision);
}

} // namespace qdspin
