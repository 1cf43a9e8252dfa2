#include "qdspin/config.hpp"

#include "qdspin/basis.hpp"
#include "qdspin/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qdspin {

namespace {

using json = nlohmann::json;
using cd = std::complex<double>;

const json& require(const json& obj, const char* key, const std::string& path)
{
	if (!obj.is_object() || !obj.contains(key))
		throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
	return obj.at(key);
}

double as_number(const json& v, const std::string& field)
{
	if (!v.is_number())
		throw ConfigError(field, "expected a number");
	const double d = v.get<double>();
	if (!std::isfinite(d))
		throw ConfigError(field, "must be finite");
	return d;
}

cd as_complex(const json& v, const std::string& field)
{
	if (v.is_number())
		return {as_number(v, field), 0.0};
	if (v.is_array() && v.size() == 2)
		return {as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]")};
	throw ConfigError(field, "expected a number or a [re, im] pair");
}

Eigen::VectorXcd as_complex_vector(const json& v, const std::string& field)
{
	if (!v.is_array())
		throw ConfigError(field, "expected an array of amplitudes");
	Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
	for (std::size_t k = 0; k < v.size(); ++k)
		out(static_cast<Eigen::Index>(k)) = as_complex(v[k], field + "[" + std::to_string(k) + "]");
	return out;
}

CouplingSpec parse_coupling(const json& c, int n)
{
	if (!c.is_object())
		throw ConfigError("coupling", "expected an object with one of explicit | uniform | exponential");
	const int forms = static_cast<int>(c.contains("explicit")) + static_cast<int>(c.contains("uniform"))
	                  + static_cast<int>(c.contains("exponential"));
	if (forms != 1)
		throw ConfigError("coupling", "exactly one of explicit | uniform | exponential must be given");
	if (c.contains("explicit")) {
		const json& list = c.at("explicit");
		if (!list.is_array())
			throw ConfigError("coupling.explicit", "expected an array");
		if (list.size() != static_cast<std::size_t>(n))
			throw ConfigError("coupling.explicit", "expected " + std::to_string(n) + " values, got "
			                                           + std::to_string(list.size()));
		ExplicitCouplings e;
		for (std::size_t k = 0; k < list.size(); ++k)
			e.values.push_back(as_number(list[k], "coupling.explicit[" + std::to_string(k) + "]"));
		return e;
	}
	if (c.contains("uniform"))
		return UniformCoupling{as_number(c.at("uniform"), "coupling.uniform")};
	const json& p = c.at("exponential");
	ExponentialProfile e;
	e.a_max = as_number(require(p, "a_max", "coupling.exponential"), "coupling.exponential.a_max");
	e.gamma = as_number(require(p, "gamma", "coupling.exponential"), "coupling.exponential.gamma");
	return e;
}

BlochDirection parse_electron(const json& e)
{
	if (e.is_string()) {
		const auto s = e.get<std::string>();
		if (s == "up")
			return BlochDirection::up();
		if (s == "down")
			return BlochDirection::down();
		if (s == "+x")
			return {std::numbers::pi / 2.0, 0.0};
		if (s == "-x")
			return {std::numbers::pi / 2.0, std::numbers::pi};
		if (s == "+y")
			return {std::numbers::pi / 2.0, std::numbers::pi / 2.0};
		if (s == "-y")
			return {std::numbers::pi / 2.0, 3.0 * std::numbers::pi / 2.0};
		throw ConfigError("initial.electron", "unknown direction '" + s + "' (up|down|+x|-x|+y|-y)");
	}
	if (e.is_object()) {
		BlochDirection d;
		d.theta = as_number(require(e, "theta", "initial.electron"), "initial.electron.theta");
		d.phi = e.contains("phi") ? as_number(e.at("phi"), "initial.electron.phi") : 0.0;
		return d;
	}
	throw ConfigError("initial.electron", "expected a direction name or {theta, phi}");
}

InitialSpec parse_initial(const json& init, int n)
{
	if (!init.is_object())
		throw ConfigError("initial", "expected an object");
	if (init.contains("sectors")) {
		if (init.contains("electron") || init.contains("nuclear_mask"))
			throw ConfigError("initial", "give either a product state or explicit sectors, not both");
		const json& list = init.at("sectors");
		if (!list.is_array() || list.empty())
			throw ConfigError("initial.sectors", "expected a non-empty array");
		SectorInitial out;
		for (std::size_t k = 0; k < list.size(); ++k) {
			const std::string path = "initial.sectors[" + std::to_string(k) + "]";
			const json& s = list[k];
			const json& mv = require(s, "m", path);
			if (!mv.is_number_integer())
				throw ConfigError(path + ".m", "expected an integer");
			const int m = mv.get<int>();
			if (m < -1 || m > n)
				throw ConfigError(path + ".m", "must lie in [-1, N]");
			const auto [ny, nx] = sector_dims(n, m);
			SectorAmplitudes a;
			a.weight = s.contains("weight") ? as_complex(s.at("weight"), path + ".weight") : cd{1.0};
			a.y = s.contains("y") ? as_complex_vector(s.at("y"), path + ".y")
			                      : Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ny));
			a.x = s.contains("x") ? as_complex_vector(s.at("x"), path + ".x")
			                      : Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(nx));
			if (static_cast<std::uint64_t>(a.y.size()) != ny)
				throw ConfigError(path + ".y", "expected " + std::to_string(ny) + " amplitudes");
			if (static_cast<std::uint64_t>(a.x.size()) != nx)
				throw ConfigError(path + ".x", "expected " + std::to_string(nx) + " amplitudes");
			if (!out.sectors.emplace(m, std::move(a)).second)
				throw ConfigError(path + ".m", "sector listed twice");
		}
		return out;
	}
	ProductInitial p;
	p.electron = parse_electron(require(init, "electron", "initial"));
	if (init.contains("nuclear_mask")) {
		const json& mv = init.at("nuclear_mask");
		if (!mv.is_number_unsigned() && !(mv.is_number_integer() && mv.get<long long>() >= 0))
			throw ConfigError("initial.nuclear_mask", "expected a non-negative integer");
		p.nuclear_mask = mv.get<NuclearMask>();
		if (n < 64 && (p.nuclear_mask >> n) != 0)
			throw ConfigError("initial.nuclear_mask", "mask has bits beyond N=" + std::to_string(n));
	}
	return p;
}

TimeGrid parse_time(const json& t)
{
	TimeGrid g;
	g.t_max = as_number(require(t, "t_max", "time"), "time.t_max");
	if (!(g.t_max > 0.0))
		throw ConfigError("time.t_max", "must be > 0");
	const json& np = require(t, "n_points", "time");
	if (!np.is_number_integer() || np.get<long long>() < 2)
		throw ConfigError("time.n_points", "must be an integer >= 2");
	g.n_points = np.get<std::size_t>();
	if (t.contains("spacing")) {
		const json& s = t.at("spacing");
		if (s == "linear")
			g.spacing = TimeSpacing::Linear;
		else if (s == "log")
			g.spacing = TimeSpacing::Log;
		else
			throw ConfigError("time.spacing", "expected linear | log");
	}
	if (t.contains("t_min")) {
		g.t_min = as_number(t.at("t_min"), "time.t_min");
		if (!(g.t_min > 0.0 && g.t_min < g.t_max))
			throw ConfigError("time.t_min", "must satisfy 0 < t_min < t_max");
	}
	return g;
}

} // namespace

std::vector<double> generate_couplings(const CouplingSpec& spec, int n_nuclei)
{
	return std::visit(
	    [n_nuclei](const auto& s) -> std::vector<double> {
		    using T = std::decay_t<decltype(s)>;
		    if constexpr (std::is_same_v<T, ExplicitCouplings>) {
			    if (s.values.size() != static_cast<std::size_t>(n_nuclei))
				    throw ConfigError("coupling.explicit", "length does not match n_nuclei");
			    return s.values;
		    } else if constexpr (std::is_same_v<T, UniformCoupling>) {
			    return std::vector<double>(static_cast<std::size_t>(n_nuclei), s.value);
		    } else {
			    std::vector<double> a(static_cast<std::size_t>(n_nuclei));
			    for (int k = 0; k < n_nuclei; ++k)
				    a[static_cast<std::size_t>(k)] = s.a_max * std::exp(-static_cast<double>(k) * s.gamma);
			    return a;
		    }
	    },
	    spec);
}

std::vector<double> TimeGrid::points() const
{
	std::vector<double> t(n_points, 0.0);
	if (n_points < 2)
		return t;
	if (spacing == TimeSpacing::Linear) {
		const double dt = t_max / static_cast<double>(n_points - 1);
		for (std::size_t k = 0; k < n_points; ++k)
			t[k] = dt * static_cast<double>(k);
		t.back() = t_max;
		return t;
	}
	const double lo = t_min > 0.0 ? t_min : t_max * 1e-3;
	if (n_points == 2) {
		t[1] = t_max;
		return t;
	}
	const double ratio = std::log(t_max / lo);
	for (std::size_t k = 1; k < n_points; ++k)
		t[k] = lo * std::exp(ratio * static_cast<double>(k - 1) / static_cast<double>(n_points - 2));
	t.back() = t_max;
	return t;
}

std::string_view solver_name(Solver solver)
{
	switch (solver) {
	case Solver::SectorEigen: return "sector-eigen";
	case Solver::LaplaceM0: return "laplace-m0";
	case Solver::PoleApproxPA0: return "pole-approx-pa0";
	case Solver::PoleApproxPA1: return "pole-approx-pa1";
	case Solver::Oracle: return "oracle";
	}
	return "unknown";
}

Solver parse_solver(std::string_view name)
{
	if (name == "sector-eigen")
		return Solver::SectorEigen;
	if (name == "laplace-m0")
		return Solver::LaplaceM0;
	if (name == "pole-approx" || name == "pole-approx-pa1" || name == "pa1")
		return Solver::PoleApproxPA1;
	if (name == "pole-approx-pa0" || name == "pa0")
		return Solver::PoleApproxPA0;
	if (name == "oracle")
		return Solver::Oracle;
	throw ConfigError("solver", "unknown solver '" + std::string(name)
	                                + "' (sector-eigen | laplace-m0 | pole-approx-pa0 | pole-approx-pa1 | oracle)");
}

bool is_exact(Solver solver)
{
	return solver != Solver::PoleApproxPA0 && solver != Solver::PoleApproxPA1;
}

CouplingSet RunConfig::couplings() const
{
	return CouplingSet{generate_couplings(coupling, n_nuclei), epsilon_e, epsilon_n};
}

StateSpec RunConfig::initial_state() const
{
	StateSpec spec;
	if (const auto* p = std::get_if<ProductInitial>(&initial)) {
		spec = from_product_state(n_nuclei, p->electron, p->nuclear_mask);
	} else {
		spec.n_nuclei = n_nuclei;
		for (const auto& [m, s] : std::get<SectorInitial>(initial).sectors)
			if (s.norm_squared() > 0.0)
				spec.sectors.emplace(m, s);
	}
	validate(spec);
	return normalize(spec);
}

RunConfig parse_config(std::string_view text)
{
	json doc;
	try {
		doc = json::parse(text.begin(), text.end());
	} catch (const json::parse_error& e) {
		throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
	}
	if (!doc.is_object())
		throw ConfigError("<document>", "expected a JSON object");

	RunConfig cfg;
	const json& nv = require(doc, "n_nuclei", "");
	if (!nv.is_number_integer() || nv.get<long long>() < 1 || nv.get<long long>() > kMaxNuclei)
		throw ConfigError("n_nuclei", "must be an integer in [1, " + std::to_string(kMaxNuclei) + "]");
	cfg.n_nuclei = nv.get<int>();
	cfg.coupling = parse_coupling(require(doc, "coupling", ""), cfg.n_nuclei);
	cfg.epsilon_e = as_number(require(doc, "epsilon_e", ""), "epsilon_e");
	if (doc.contains("epsilon_n"))
		cfg.epsilon_n = as_number(doc.at("epsilon_n"), "epsilon_n");
	cfg.initial = parse_initial(require(doc, "initial", ""), cfg.n_nuclei);
	cfg.time = parse_time(require(doc, "time", ""));
	if (doc.contains("solver")) {
		if (!doc.at("solver").is_string())
			throw ConfigError("solver", "expected a string");
		cfg.solver = parse_solver(doc.at("solver").get<std::string>());
	}
	if (doc.contains("output")) {
		const json& o = doc.at("output");
		if (!o.is_object())
			throw ConfigError("output", "expected an object");
		if (o.contains("path")) {
			if (!o.at("path").is_string())
				throw ConfigError("output.path", "expected a string");
			cfg.output_path = o.at("path").get<std::string>();
		}
		if (o.contains("format")) {
			if (o.at("format") != "csv")
				throw ConfigError("output.format", "only csv is supported");
			cfg.output_format = "csv";
		}
	}
	if (doc.contains("dense_cap")) {
		const json& c = doc.at("dense_cap");
		if (!c.is_number_integer() || c.get<long long>() < 1)
			throw ConfigError("dense_cap", "must be a positive integer");
		cfg.dense_cap = c.get<std::size_t>();
	}

	// surface coupling problems (non-finite profile values) at parse time
	try {
		(void)cfg.couplings();
	} catch (const DomainError& e) {
		throw ConfigError("coupling", e.what());
	}
	if (const auto* s = std::get_if<SectorInitial>(&cfg.initial)) {
		double total = 0.0;
		for (const auto& [m, a] : s->sectors)
			total += a.norm_squared();
		if (!(total > 0.0))
			throw ConfigError("initial.sectors", "initial state has zero norm");
	}
	return cfg;
}

RunConfig load_config(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw ConfigError("<file>", "cannot open " + path);
	std::ostringstream text;
	text << in.rdbuf();
	return parse_config(text.str());
}

} // namespace qdspin
