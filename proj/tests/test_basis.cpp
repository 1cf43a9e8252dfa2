#include "qdspin/basis.hpp"
#include "qdspin/errors.hpp"

#include <doctest.h>

#include <bit>

using namespace qdspin;

TEST_CASE("sector table for N=3 and N=4")
{
	CHECK(sector_dims(3, 0) == std::pair<std::uint64_t, std::uint64_t>{1, 3});
	CHECK(sector_dims(3, 1) == std::pair<std::uint64_t, std::uint64_t>{3, 3});
	CHECK(sector_dims(3, 2) == std::pair<std::uint64_t, std::uint64_t>{3, 1});
	CHECK(sector_dims(3, -1) == std::pair<std::uint64_t, std::uint64_t>{0, 1});
	CHECK(sector_dims(3, 3) == std::pair<std::uint64_t, std::uint64_t>{1, 0});
	CHECK(sector_dims(4, 1) == std::pair<std::uint64_t, std::uint64_t>{4, 6});
	CHECK(total_state_count(3) == 16);
	CHECK(total_state_count(4) == 32);
	CHECK_THROWS_AS((void)sector_dims(3, 4), DomainError);
	CHECK_THROWS_AS((void)sector_dims(3, -2), DomainError);
}

TEST_CASE("sector M_z labels")
{
	CHECK(SectorId{3, 0}.mz() == 2);
	CHECK(SectorId{3, 1}.mz() == 0);
	CHECK(SectorId{3, -1}.mz() == 4);
	CHECK(SectorId{3, 3}.mz() == -4);
	CHECK(SectorId{3, 3}.extremal());
	CHECK_FALSE(SectorId{3, 2}.extremal());
}

TEST_CASE("combinadic rank examples")
{
	// popcount 2 in colex order: 0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100
	CHECK(combinadic_rank(0b0011) == 0);
	CHECK(combinadic_rank(0b0101) == 1);
	CHECK(combinadic_rank(0b0110) == 2);
	CHECK(combinadic_rank(0b1001) == 3);
	CHECK(combinadic_rank(0b1100) == 5);
	CHECK(combinadic_rank(0) == 0);
	CHECK(combinadic_unrank(4, 2) == 0b1010);
}

TEST_CASE("rank and unrank are inverse bijections")
{
	for (int width = 1; width <= 12; ++width)
		for (int pc = 0; pc <= width; ++pc) {
			const auto masks = fixed_popcount_masks(width, pc);
			REQUIRE(masks.size() == binomial(width, pc));
			for (std::size_t r = 0; r < masks.size(); ++r) {
				CHECK(std::popcount(masks[r]) == pc);
				CHECK(combinadic_rank(masks[r]) == r);
				CHECK(combinadic_unrank(r, pc) == masks[r]);
				if (r > 0)
					CHECK(masks[r - 1] < masks[r]);
			}
		}
}

TEST_CASE("binomial table")
{
	CHECK(binomial(62, 31) == 465428353255261088ULL);
	CHECK(binomial(5, -1) == 0);
	CHECK(binomial(5, 6) == 0);
	std::uint64_t sum = 0;
	for (int k = 0; k <= 20; ++k)
		sum += binomial(20, k);
	CHECK(sum == (1ULL << 20));
}

TEST_CASE("sector basis membership")
{
	const SectorBasis b(4, 1);
	CHECK(b.y_dim() == 4);
	CHECK(b.x_dim() == 6);
	CHECK(b.rank(Branch::X, 0b1010) == 4);
	CHECK(b.unrank(Branch::Y, 2) == 0b0100);
	CHECK_THROWS_AS((void)b.rank(Branch::X, 0b0001), NotFoundError);
	CHECK_THROWS_AS((void)b.rank(Branch::Y, 0b10000), NotFoundError);

	const SectorBasis top(4, -1);
	CHECK(top.y_dim() == 0);
	CHECK(top.x_configs() == std::vector<NuclearMask>{0});
	const SectorBasis bottom(4, 4);
	CHECK(bottom.y_configs() == std::vector<NuclearMask>{0b1111});
	CHECK(bottom.x_dim() == 0);
}

TEST_CASE("every full-space state lands in exactly one sector")
{
	for (int n = 1; n <= 8; ++n) {
		std::uint64_t seen = 0;
		for (int m = -1; m <= n; ++m) {
			const SectorBasis b(n, m);
			for (NuclearMask s : b.y_configs())
				CHECK(std::popcount(s) == m);
			for (NuclearMask s : b.x_configs())
				CHECK(std::popcount(s) == m + 1);
			seen += b.dim();
		}
		CHECK(seen == (1ULL << (n + 1)));
	}
}

TEST_CASE("oversized sectors are refused")
{
	CHECK_THROWS_AS(SectorBasis(40, 20), CapacityError);
}
