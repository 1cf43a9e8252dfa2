#pragma once

#include "qdspin/model.hpp"
#include "qdspin/observables.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qdspin {

/// Structured configuration error naming the offending field.
class ConfigError : public std::runtime_error {
public:
	ConfigError(std::string field, const std::string& message)
		: std::runtime_error(field + ": " + message), field_{std::move(field)}
	{
	}

	[[nodiscard]] const std::string& field() const { return field_; }

private:
	std::string field_;
};

struct ExplicitCouplings {
	std::vector<double> values;
};

struct UniformCoupling {
	double value = 0.0;
};

/// A_k = a_max * exp(-k * gamma), k = 0 .. N-1.
struct ExponentialProfile {
	double a_max = 0.0;
	double gamma = 0.0;
};

using CouplingSpec = std::variant<ExplicitCouplings, UniformCoupling, ExponentialProfile>;

[[nodiscard]] std::vector<double> generate_couplings(const CouplingSpec& spec, int n_nuclei);

struct ProductInitial {
	BlochDirection electron;
	NuclearMask nuclear_mask = 0;
};

/// Explicit per-sector weights and amplitudes.
struct SectorInitial {
	std::map<int, SectorAmplitudes> sectors;
};

using InitialSpec = std::variant<ProductInitial, SectorInitial>;

enum class TimeSpacing { Linear, Log };

struct TimeGrid {
	double t_max = 0.0;
	std::size_t n_points = 0;
	TimeSpacing spacing = TimeSpacing::Linear;
	double t_min = 0.0; ///< first nonzero time on a log grid; 0 means t_max * 1e-3

	/// Linear: n_points evenly spaced in [0, t_max]. Log: 0 followed by
	/// n_points-1 log-spaced points in [t_min, t_max].
	[[nodiscard]] std::vector<double> points() const;
};

enum class Solver { SectorEigen, LaplaceM0, PoleApproxPA0, PoleApproxPA1, Oracle };

[[nodiscard]] std::string_view solver_name(Solver solver);
[[nodiscard]] Solver parse_solver(std::string_view name);

/// Approximate solvers are not held to the norm and Bloch-ball invariants.
[[nodiscard]] bool is_exact(Solver solver);

struct RunConfig {
	int n_nuclei = 0;
	CouplingSpec coupling;
	double epsilon_e = 0.0;
	double epsilon_n = 0.0;
	InitialSpec initial;
	TimeGrid time;
	Solver solver = Solver::SectorEigen;
	std::string output_path; ///< empty: stdout
	std::string output_format = "csv";
	std::size_t dense_cap = 4096;

	[[nodiscard]] CouplingSet couplings() const;
	/// Normalized sector-resolved initial state.
	[[nodiscard]] StateSpec initial_state() const;
};

/// Parses a JSON run configuration. Throws ConfigError naming the field.
[[nodiscard]] RunConfig parse_config(std::string_view text);

[[nodiscard]] RunConfig load_config(const std::string& path);

} // namespace qdspin
