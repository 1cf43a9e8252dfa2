#include "qdspin/basis.hpp"

#include "qdspin/errors.hpp"

#include <array>
#include <bit>
#include <string>

namespace qdspin {

namespace {

constexpr int kTableSize = kMaxNuclei + 1;

constexpr auto make_pascal()
{
	std::array<std::array<std::uint64_t, kTableSize>, kTableSize> c{};
	for (int n = 0; n < kTableSize; ++n) {
		c[n][0] = 1;
		for (int k = 1; k <= n; ++k)
			c[n][k] = c[n - 1][k - 1] + (k < n ? c[n - 1][k] : 0);
	}
	return c;
}

constexpr auto kPascal = make_pascal();

void check_n(int n_nuclei)
{
	if (n_nuclei < 1 || n_nuclei > kMaxNuclei)
		throw DomainError("number of nuclei must be in [1, " + std::to_string(kMaxNuclei) + "], got "
		                  + std::to_string(n_nuclei));
}

} // namespace

std::uint64_t binomial(int n, int k)
{
	if (n < 0 || n >= kTableSize || k < 0 || k > n)
		return 0;
	return kPascal[n][k];
}

std::pair<std::uint64_t, std::uint64_t> sector_dims(int n_nuclei, int m)
{
	check_n(n_nuclei);
	if (m < -1 || m > n_nuclei)
		throw DomainError("sector index m=" + std::to_string(m) + " outside [-1, " + std::to_string(n_nuclei)
		                  + "] for N=" + std::to_string(n_nuclei));
	return {binomial(n_nuclei, m), binomial(n_nuclei, m + 1)};
}

std::uint64_t total_state_count(int n_nuclei)
{
	check_n(n_nuclei);
	std::uint64_t total = 2;
	for (int m = 0; m < n_nuclei; ++m) {
		const auto [ny, nx] = sector_dims(n_nuclei, m);
		total += ny + nx;
	}
	if (n_nuclei < 63 && total != (std::uint64_t{1} << (n_nuclei + 1)))
		throw NumericError("sector enumeration does not cover 2^{N+1} states");
	return total;
}

std::uint64_t combinadic_rank(NuclearMask mask)
{
	std::uint64_t rank = 0;
	int i = 1;
	while (mask != 0) {
		const int pos = std::countr_zero(mask);
		rank += binomial(pos, i);
		++i;
		mask &= mask - 1;
	}
	return rank;
}

NuclearMask combinadic_unrank(std::uint64_t rank, int popcount)
{
	NuclearMask mask = 0;
	for (int i = popcount; i >= 1; --i) {
		// largest pos with C(pos, i) <= rank
		int pos = i - 1;
		while (pos + 1 < kTableSize && binomial(pos + 1, i) <= rank)
			++pos;
		rank -= binomial(pos, i);
		mask |= NuclearMask{1} << pos;
	}
	return mask;
}

std::vector<NuclearMask> fixed_popcount_masks(int width, int popcount)
{
	std::vector<NuclearMask> out;
	if (popcount < 0 || popcount > width)
		return out;
	out.reserve(binomial(width, popcount));
	if (popcount == 0) {
		out.push_back(0);
		return out;
	}
	const NuclearMask limit = width >= 64 ? ~NuclearMask{0} : (NuclearMask{1} << width);
	NuclearMask v = (NuclearMask{1} << popcount) - 1;
	while (v < limit) {
		out.push_back(v);
		// next mask with the same popcount (Gosper)
		const NuclearMask t = v | (v - 1);
		const NuclearMask next = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
		if (next <= v)
			break;
		v = next;
	}
	return out;
}

SectorBasis::SectorBasis(int n_nuclei, int m) : sector_{n_nuclei, m}
{
	const auto [ny, nx] = sector_dims(n_nuclei, m);
	if (ny > kMaxBranchSize || nx > kMaxBranchSize)
		throw CapacityError("sector N=" + std::to_string(n_nuclei) + " m=" + std::to_string(m)
		                    + " is too large to enumerate");
	y_configs_ = fixed_popcount_masks(n_nuclei, m);
	x_configs_ = fixed_popcount_masks(n_nuclei, m + 1);
}

std::size_t SectorBasis::rank(Branch branch, NuclearMask config) const
{
	const int want = branch == Branch::Y ? m() : m() + 1;
	const NuclearMask full = (NuclearMask{1} << n_nuclei()) - 1;
	if ((config & ~full) != 0 || std::popcount(config) != want)
		throw NotFoundError("configuration " + std::to_string(config) + " is not in the "
		                    + (branch == Branch::Y ? "Y" : "X") + " branch of sector m=" + std::to_string(m()));
	return static_cast<std::size_t>(combinadic_rank(config));
}

NuclearMask SectorBasis::unrank(Branch branch, std::size_t index) const
{
	const auto& list = branch == Branch::Y ? y_configs_ : x_configs_;
	if (index >= list.size())
		throw NotFoundError("branch index " + std::to_string(index) + " out of range");
	return list[index];
}

} // namespace qdspin
