#pragma once

#include "qdspin/model.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace qdspin {

/// Binomial coefficient C(n, k); zero outside 0 <= k <= n. Exact for n <= 62.
[[nodiscard]] std::uint64_t binomial(int n, int k);

/// Conserved total-spin sector label.
///
/// Paired sectors have 0 <= m <= N-1: C(N,m) electron-down states with m
/// nuclear downs and C(N,m+1) electron-up states with m+1 nuclear downs.
/// m = -1 is the single top state |up; up...up> (no Y-branch) and m = N
/// is the single bottom state |down; down...down> (no X-branch).
struct SectorId {
	int n_nuclei;
	int m;

	/// Total M_z = N - 2m - 1 in units of 1/2; N+1 and -(N+1) for the extremal sectors.
	[[nodiscard]] int mz() const { return n_nuclei - 2 * m - 1; }
	[[nodiscard]] bool extremal() const { return m == -1 || m == n_nuclei; }

	friend bool operator==(const SectorId&, const SectorId&) = default;
};

enum class Branch { Y, X };

/// (C(N,m), C(N,m+1)). Accepts the extremal labels -1 and N, which give
/// (0,1) and (1,0). Throws DomainError for any other m.
[[nodiscard]] std::pair<std::uint64_t, std::uint64_t> sector_dims(int n_nuclei, int m);

/// 2 + sum over paired sectors of C(N,m)+C(N,m+1); checked against 2^{N+1}.
[[nodiscard]] std::uint64_t total_state_count(int n_nuclei);

/// Colexicographic rank of `mask` among masks with the same popcount.
[[nodiscard]] std::uint64_t combinadic_rank(NuclearMask mask);

/// Inverse of combinadic_rank for masks with `popcount` bits set.
[[nodiscard]] NuclearMask combinadic_unrank(std::uint64_t rank, int popcount);

/// Ordered configurations of one sector. Both lists ascend in bitmask value
/// (colexicographic order), so position == combinadic rank.
class SectorBasis {
public:
	/// Largest branch size that will be materialized.
	static constexpr std::uint64_t kMaxBranchSize = std::uint64_t{1} << 24;

	SectorBasis(int n_nuclei, int m);

	[[nodiscard]] SectorId sector() const { return sector_; }
	[[nodiscard]] int n_nuclei() const { return sector_.n_nuclei; }
	[[nodiscard]] int m() const { return sector_.m; }

	[[nodiscard]] const std::vector<NuclearMask>& y_configs() const { return y_configs_; }
	[[nodiscard]] const std::vector<NuclearMask>& x_configs() const { return x_configs_; }
	[[nodiscard]] std::size_t y_dim() const { return y_configs_.size(); }
	[[nodiscard]] std::size_t x_dim() const { return x_configs_.size(); }
	[[nodiscard]] std::size_t dim() const { return y_dim() + x_dim(); }

	/// Index of `config` within a branch. Throws NotFoundError if absent.
	[[nodiscard]] std::size_t rank(Branch branch, NuclearMask config) const;
	[[nodiscard]] NuclearMask unrank(Branch branch, std::size_t index) const;

private:
	SectorId sector_;
	std::vector<NuclearMask> y_configs_;
	std::vector<NuclearMask> x_configs_;
};

[[nodiscard]] inline SectorBasis enumerate_sector(int n_nuclei, int m)
{
	return SectorBasis{n_nuclei, m};
}

/// All masks of `width` bits with `popcount` bits set, ascending.
[[nodiscard]] std::vector<NuclearMask> fixed_popcount_masks(int width, int popcount);

} // namespace qdspin
