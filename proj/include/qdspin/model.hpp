#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qdspin {

/// Nuclear configuration: bit k set means nucleus k+1 points down.
using NuclearMask = std::uint64_t;

inline constexpr int kMaxNuclei = 62;

enum class Electron { Up, Down };

/// Physical parameters of the central-spin problem (hbar = 1).
///
/// Energies share one arbitrary unit and times are in its inverse. The
/// derived totals A = sum(A_k)/2 and Omega = epsilon_e + A are computed on
/// demand, never cached.
class CouplingSet {
public:
	CouplingSet(std::vector<double> couplings, double epsilon_e, double epsilon_n = 0.0);

	[[nodiscard]] int n_nuclei() const { return static_cast<int>(couplings_.size()); }
	[[nodiscard]] std::span<const double> couplings() const { return couplings_; }
	[[nodiscard]] double coupling(int k) const { return couplings_[static_cast<std::size_t>(k)]; }
	[[nodiscard]] double epsilon_e() const { return epsilon_e_; }
	[[nodiscard]] double epsilon_n() const { return epsilon_n_; }

	/// Mask with the low n_nuclei bits set.
	[[nodiscard]] NuclearMask full_mask() const;

	/// Sum of A_l over the nuclei in `mask`.
	[[nodiscard]] double coupling_sum(NuclearMask mask) const;

private:
	std::vector<double> couplings_;
	double epsilon_e_;
	double epsilon_n_;
};

/// A = sum_k A_k / 2.
[[nodiscard]] double total_coupling(const CouplingSet& cs);

/// Omega = epsilon_e + A; equals B_0.
[[nodiscard]] double omega(const CouplingSet& cs);

/// Shifted configuration energy B = epsilon_e + A - sum_{l in down_set} A_l.
[[nodiscard]] double shifted_energy(const CouplingSet& cs, NuclearMask down_set);

/// Diagonal matrix element of H for |electron; down_set>.
///
/// Electron down: -(Omega - sum_{S} A_l) + eps_N (N - 2|S|).
/// Electron up:   +(Omega - sum_{S} A_l) + eps_N (N - 2|S|).
/// Throws DomainError when down_set has bits at or above N.
[[nodiscard]] double diag_energy(const CouplingSet& cs, Electron electron, NuclearMask down_set);

/// Off-diagonal element between |down; S> and |up; S + {l}>: A_l / 4.
/// Every other off-diagonal element of H is zero.
[[nodiscard]] double flip_element(const CouplingSet& cs, int nucleus);

} // namespace qdspin
