#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ewalk/diagnostics.hpp"
#include "ewalk/scenario.hpp"

namespace ewalk {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& msg) {
    throw Error(Errc::schema_violation, "field '" + field + "': " + msg);
}

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) schema_error(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& get(const std::string& key) {
        seen_.insert(key);
        if (!obj_.contains(key)) schema_error(field(key), "required field missing");
        return obj_.at(key);
    }

    double number(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number()) schema_error(field(key), "expected a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::size_t count(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) schema_error(field(key), "expected a nonnegative integer");
        return v.get<std::size_t>();
    }

    std::string string(const std::string& key) {
        const json& v = get(key);
        if (!v.is_string()) schema_error(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = get(key);
        if (!v.is_array() || v.empty()) schema_error(field(key), "expected a nonempty array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) schema_error(field(key), "expected a nonempty array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void forbid(const std::string& key, const std::string& why) {
        if (has(key)) schema_error(field(key), why);
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) throw Error(Errc::unknown_field, "unknown field '" + field(key) + "'");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

ScenarioKind parse_kind(const std::string& s) {
    if (s == "classical") return ScenarioKind::classical;
    if (s == "quantum") return ScenarioKind::quantum;
    if (s == "mu_sweep") return ScenarioKind::mu_sweep;
    if (s == "bias_sweep") return ScenarioKind::bias_sweep;
    schema_error("kind", "unknown scenario kind '" + s + "'");
}

LevelFormula parse_formula(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    LevelFormula f{r.number("a"), r.number("b"), r.number("c")};
    r.finish();
    return f;
}

RateSpec parse_rates(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    RateSpec spec;
    const std::string type = r.string("type");
    if (r.has("label")) spec.label = r.string("label");
    if (type == "constant") {
        spec.type = RateSpec::Type::constant;
        spec.p_plus = r.number("p_plus");
        spec.p_minus = r.number("p_minus");
        spec.p_zero = r.number_or("p_zero", 0.1);
    } else if (type == "level_dependent") {
        spec.type = RateSpec::Type::level_dependent;
        spec.plus_formula = parse_formula(r.get("p_plus"), r.field("p_plus"));
        spec.minus_formula = parse_formula(r.get("p_minus"), r.field("p_minus"));
    } else if (type == "bias") {
        spec.type = RateSpec::Type::bias;
        spec.p_zero = r.number_or("p_zero", 0.1);
        spec.bias = r.numbers("bias");
    } else {
        schema_error(r.field("type"), "unknown rate type '" + type + "'");
    }
    r.finish();
    return spec;
}

InitialSpec parse_initial(const json& j) {
    ObjectReader r(j, "initial");
    InitialSpec init;
    const std::string type = r.string("type");
    if (type == "gaussian") {
        init.type = InitialSpec::Type::gaussian;
        init.center = r.number("center");
        init.width = r.number("width");
    } else if (type == "delta") {
        init.type = InitialSpec::Type::delta;
        init.level = r.count("level");
    } else if (type == "gibbs") {
        init.type = InitialSpec::Type::gibbs;
        init.beta = r.number("beta");
    } else {
        schema_error("initial.type", "unknown initial state '" + type + "'");
    }
    r.finish();
    return init;
}

const std::set<std::string>& allowed_outputs(ScenarioKind kind) {
    static const std::set<std::string> classical{"d_inf", "d_th", "mean_n", "beta_t", "boundary_occ",
                                                 "boundary_cumsum"};
    static const std::set<std::string> quantum{"d_inf",  "d_th",         "d_th_diag",       "d_cl", "mean_n",
                                               "beta_t", "boundary_occ", "boundary_cumsum", "bound"};
    static const std::set<std::string> sweep{"d_inf",        "d_th",           "d_th_diag", "d_cl",      "mean_n", "beta_t",
                                             "boundary_occ", "boundary_cumsum", "bound",     "d_infinity"};
    switch (kind) {
    case ScenarioKind::classical:
    case ScenarioKind::bias_sweep: return classical;
    case ScenarioKind::quantum: return quantum;
    case ScenarioKind::mu_sweep: return sweep;
    }
    return classical;
}

std::vector<std::string> default_outputs(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::classical: return {"d_th"};
    case ScenarioKind::bias_sweep: return {"d_inf"};
    case ScenarioKind::quantum: return {"d_th", "d_th_diag"};
    case ScenarioKind::mu_sweep: return {"d_th", "d_infinity"};
    }
    return {};
}

// Materialize everything once so invalid values fail at load time.
void validate(const ScenarioConfig& cfg) {
    if (cfg.name.empty() ||
        !std::all_of(cfg.name.begin(), cfg.name.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }))
        schema_error("name", "must be nonempty and use only [A-Za-z0-9_-]");
    if (cfg.levels < 2) schema_error("levels", "need at least 2 levels");
    if (!(cfg.gap > 0.0)) schema_error("gap", "must be positive");
    if (cfg.steps < 1) schema_error("steps", "must be at least 1");

    try {
        scenario_initial(cfg);
    } catch (const Error& e) {
        schema_error("initial", e.what());
    }

    std::set<std::string> labels;
    for (std::size_t i = 0; i < cfg.rates.size(); ++i) {
        const RateSpec& spec = cfg.rates[i];
        if (!labels.insert(spec.label).second) schema_error("rates", "duplicate rate label '" + spec.label + "'");
        try {
            if (spec.type == RateSpec::Type::bias) {
                for (double b : spec.bias) {
                    if (!(b > 0.0)) schema_error("rates.bias", "bias values must be positive");
                    bias_rates(b, spec.p_zero);
                }
            } else {
                scenario_rates(spec, cfg.levels);
            }
        } catch (const Error& e) {
            if (e.code() == Errc::schema_violation) throw;
            schema_error("rates", e.what());
        }
    }

    const bool needs_constant = cfg.kind == ScenarioKind::quantum || cfg.kind == ScenarioKind::mu_sweep;
    if (needs_constant && cfg.rates.front().type != RateSpec::Type::constant)
        schema_error("rates.type", "quantum scenarios take constant rates");
    if (cfg.kind == ScenarioKind::bias_sweep && cfg.rates.front().type != RateSpec::Type::bias)
        schema_error("rates.type", "bias_sweep takes rates of type 'bias'");
    if (cfg.kind == ScenarioKind::classical) {
        for (const auto& spec : cfg.rates)
            if (spec.type == RateSpec::Type::bias) schema_error("rates.type", "use kind 'bias_sweep' for bias lists");
    }

    for (double m : cfg.mu)
        if (!(m >= 0.0 && m <= 1.0)) schema_error("mu", "values must lie in [0,1]");

    const auto& allowed = allowed_outputs(cfg.kind);
    for (const auto& o : cfg.outputs)
        if (!allowed.count(o)) schema_error("outputs", "series '" + o + "' not available for kind " + to_string(cfg.kind));
}

json formula_json(const LevelFormula& f) { return json{{"a", f.a}, {"b", f.b}, {"c", f.c}}; }

json rates_json(const RateSpec& spec) {
    json j;
    switch (spec.type) {
    case RateSpec::Type::constant:
        j = json{{"type", "constant"}, {"p_plus", spec.p_plus}, {"p_zero", spec.p_zero}, {"p_minus", spec.p_minus}};
        break;
    case RateSpec::Type::level_dependent:
        j = json{{"type", "level_dependent"},
                 {"p_plus", formula_json(spec.plus_formula)},
                 {"p_minus", formula_json(spec.minus_formula)}};
        break;
    case RateSpec::Type::bias: j = json{{"type", "bias"}, {"p_zero", spec.p_zero}, {"bias", spec.bias}}; break;
    }
    if (!spec.label.empty()) j["label"] = spec.label;
    return j;
}

json initial_json(const InitialSpec& init) {
    switch (init.type) {
    case InitialSpec::Type::gaussian:
        return json{{"type", "gaussian"}, {"center", init.center}, {"width", init.width}};
    case InitialSpec::Type::delta: return json{{"type", "delta"}, {"level", init.level}};
    case InitialSpec::Type::gibbs: return json{{"type", "gibbs"}, {"beta", init.beta}};
    }
    return {};
}

}  // namespace

const char* to_string(ScenarioKind kind) noexcept {
    switch (kind) {
    case ScenarioKind::classical: return "classical";
    case ScenarioKind::quantum: return "quantum";
    case ScenarioKind::mu_sweep: return "mu_sweep";
    case ScenarioKind::bias_sweep: return "bias_sweep";
    }
    return "unknown";
}

ScenarioConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse_error, e.what());
    }

    ObjectReader r(doc, "");
    ScenarioConfig cfg;
    cfg.name = r.string("name");
    if (r.has("description")) cfg.description = r.string("description");
    cfg.kind = parse_kind(r.string("kind"));
    cfg.levels = r.count("levels");
    cfg.gap = r.number_or("gap", 1.0);
    cfg.steps = r.count("steps");
    cfg.initial = parse_initial(r.get("initial"));
    if (r.has("seed")) cfg.seed = r.count("seed");

    const json& rates = r.get("rates");
    if (rates.is_array()) {
        if (cfg.kind != ScenarioKind::classical) schema_error("rates", "only classical scenarios accept a list of rates");
        if (rates.empty()) schema_error("rates", "empty rate list");
        for (std::size_t i = 0; i < rates.size(); ++i)
            cfg.rates.push_back(parse_rates(rates[i], "rates[" + std::to_string(i) + "]"));
    } else {
        cfg.rates.push_back(parse_rates(rates, "rates"));
    }

    switch (cfg.kind) {
    case ScenarioKind::quantum: {
        const json& mu = r.get("mu");
        if (!mu.is_number()) schema_error("mu", "quantum scenarios take a single number");
        cfg.mu.push_back(mu.get<double>());
        break;
    }
    case ScenarioKind::mu_sweep: cfg.mu = r.numbers("mu"); break;
    case ScenarioKind::classical:
    case ScenarioKind::bias_sweep: r.forbid("mu", "not used by this scenario kind"); break;
    }

    if (r.has("outputs")) {
        const json& outs = r.get("outputs");
        if (!outs.is_array()) schema_error("outputs", "expected an array of series names");
        for (const auto& o : outs) {
            if (!o.is_string()) schema_error("outputs", "expected an array of series names");
            cfg.outputs.push_back(o.get<std::string>());
        }
    } else {
        cfg.outputs = default_outputs(cfg.kind);
    }

    r.finish();
    validate(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    if (!cfg.description.empty()) j["description"] = cfg.description;
    j["kind"] = to_string(cfg.kind);
    j["levels"] = cfg.levels;
    j["gap"] = cfg.gap;
    if (cfg.rates.size() == 1 && cfg.kind != ScenarioKind::classical) {
        j["rates"] = rates_json(cfg.rates.front());
    } else {
        json arr = json::array();
        for (const auto& r : cfg.rates) arr.push_back(rates_json(r));
        j["rates"] = arr;
    }
    if (cfg.kind == ScenarioKind::quantum) j["mu"] = cfg.mu.front();
    if (cfg.kind == ScenarioKind::mu_sweep) j["mu"] = cfg.mu;
    j["initial"] = initial_json(cfg.initial);
    j["steps"] = cfg.steps;
    j["outputs"] = cfg.outputs;
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

EnergySpectrum scenario_spectrum(const ScenarioConfig& cfg) { return make_uniform_spectrum(cfg.gap, cfg.levels); }

PopulationVector scenario_initial(const ScenarioConfig& cfg) {
    const InitialSpec& init = cfg.initial;
    switch (init.type) {
    case InitialSpec::Type::gaussian: return gaussian_population(init.center, init.width, cfg.levels);
    case InitialSpec::Type::delta: return PopulationVector::delta(cfg.levels, init.level);
    case InitialSpec::Type::gibbs:
        if (!(init.beta > 0.0)) throw Error(Errc::schema_violation, "field 'initial.beta': must be positive");
        return gibbs_populations(init.beta, scenario_spectrum(cfg));
    }
    throw Error(Errc::schema_violation, "field 'initial': unsupported type");
}

TransitionRates bias_rates(double bias, double p_zero) {
    const double moving = 1.0 - p_zero;
    return TransitionRates::constant(moving / (1.0 + bias), p_zero, moving * bias / (1.0 + bias));
}

TransitionRates scenario_rates(const RateSpec& spec, std::size_t levels) {
    switch (spec.type) {
    case RateSpec::Type::constant: return TransitionRates::constant(spec.p_plus, spec.p_zero, spec.p_minus);
    case RateSpec::Type::level_dependent: {
        std::vector<RateTriple> triples(levels);
        for (std::size_t n = 0; n < levels; ++n) {
            const double up = spec.plus_formula.at(n);
            const double down = spec.minus_formula.at(n);
            triples[n] = RateTriple{up, 1.0 - up - down, down};
        }
        return TransitionRates::level_dependent(std::move(triples));
    }
    case RateSpec::Type::bias:
        throw Error(Errc::schema_violation, "field 'rates': a bias list describes several rate sets");
    }
    throw Error(Errc::schema_violation, "field 'rates': unsupported type");
}

int exit_code_for(Errc code) noexcept {
    switch (code) {
    case Errc::parse_error:
    case Errc::schema_violation:
    case Errc::unknown_field: return 2;
    case Errc::no_convergence:
    case Errc::no_unit_eigenvalue:
    case Errc::non_unique_fixed_point: return 3;
    case Errc::invariant_violation: return 4;
    default: return 1;
    }
}

}  // namespace ewalk
