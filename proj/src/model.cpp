#include "qdspin/model.hpp"

#include "qdspin/errors.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace qdspin {

CouplingSet::CouplingSet(std::vector<double> couplings, double epsilon_e, double epsilon_n)
	: couplings_{std::move(couplings)}, epsilon_e_{epsilon_e}, epsilon_n_{epsilon_n}
{
	if (couplings_.empty())
		throw DomainError("CouplingSet: at least one nucleus is required");
	if (couplings_.size() > static_cast<std::size_t>(kMaxNuclei))
		throw DomainError("CouplingSet: at most " + std::to_string(kMaxNuclei) + " nuclei supported");
	for (double a : couplings_)
		if (!std::isfinite(a))
			throw DomainError("CouplingSet: non-finite hyperfine constant");
	if (!std::isfinite(epsilon_e_) || !std::isfinite(epsilon_n_))
		throw DomainError("CouplingSet: non-finite Zeeman energy");
}

NuclearMask CouplingSet::full_mask() const
{
	return (NuclearMask{1} << n_nuclei()) - 1;
}

double CouplingSet::coupling_sum(NuclearMask mask) const
{
	double sum = 0.0;
	while (mask != 0) {
		const int k = std::countr_zero(mask);
		sum += couplings_[static_cast<std::size_t>(k)];
		mask &= mask - 1;
	}
	return sum;
}

double total_coupling(const CouplingSet& cs)
{
	const auto a = cs.couplings();
	return std::accumulate(a.begin(), a.end(), 0.0) / 2.0;
}

double omega(const CouplingSet& cs)
{
	return cs.epsilon_e() + total_coupling(cs);
}

double shifted_energy(const CouplingSet& cs, NuclearMask down_set)
{
	return omega(cs) - cs.coupling_sum(down_set);
}

double diag_energy(const CouplingSet& cs, Electron electron, NuclearMask down_set)
{
	if ((down_set & ~cs.full_mask()) != 0)
		throw DomainError("diag_energy: nuclear mask has bits beyond N=" + std::to_string(cs.n_nuclei()));
	const double b = shifted_energy(cs, down_set);
	const int n_down = std::popcount(down_set);
	const double nuclear_zeeman = cs.epsilon_n() * static_cast<double>(cs.n_nuclei() - 2 * n_down);
	return (electron == Electron::Up ? b : -b) + nuclear_zeeman;
}

double flip_element(const CouplingSet& cs, int nucleus)
{
	if (nucleus < 0 || nucleus >= cs.n_nuclei())
		throw DomainError("flip_element: nucleus index out of range");
	return cs.coupling(nucleus) / 4.0;
}

} // namespace qdspin
