#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "ewalk/diagnostics.hpp"
#include "ewalk/scenario.hpp"
#include "plot.hpp"

namespace ewalk {

namespace {

constexpr double kRangeSlack = 1e-12;

struct Member {
    std::string suffix;
    std::string legend;
    std::function<DiagnosticsSeries()> run;
};

struct SummaryRow {
    double mu = 0.0;
    double d_infinity = 0.0;
    double bound_first_order = 0.0;
};

template <class T>
std::vector<T> run_parallel(const std::vector<std::function<T()>>& jobs, std::size_t workers) {
    std::vector<T> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = jobs[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::min(workers, jobs.size());
    if (n <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

bool is_trajectory_series(const std::string& s) { return s != "d_infinity"; }

double DiagnosticsRecord::*series_field(const std::string& name) {
    if (name == "d_inf") return &DiagnosticsRecord::d_inf;
    if (name == "d_th") return &DiagnosticsRecord::d_th;
    if (name == "d_th_diag") return &DiagnosticsRecord::d_th_diag;
    if (name == "d_cl") return &DiagnosticsRecord::d_cl;
    if (name == "mean_n") return &DiagnosticsRecord::mean_n;
    if (name == "beta_t") return &DiagnosticsRecord::beta_t;
    if (name == "boundary_occ") return &DiagnosticsRecord::boundary_occ;
    if (name == "boundary_cumsum") return &DiagnosticsRecord::boundary_cumsum;
    if (name == "bound") return &DiagnosticsRecord::bound;
    throw Error(Errc::schema_violation, "field 'outputs': unknown series '" + name + "'");
}

bool log_scaled(const std::string& name) {
    return name == "d_inf" || name == "d_th" || name == "d_th_diag" || name == "d_cl";
}

void check_unit_interval(double v, const char* what, std::size_t t, const std::string& where) {
    if (!(v >= -kRangeSlack && v <= 1.0 + kRangeSlack)) {
        std::ostringstream os;
        os << what << " = " << format_double(v) << " outside [0,1] at step " << t << " of " << where;
        throw Error(Errc::invariant_violation, os.str());
    }
}

void check_series(const DiagnosticsSeries& s, const std::string& where) {
    for (const auto& r : s.records) {
        check_unit_interval(r.d_inf, "d_inf", r.t, where);
        check_unit_interval(r.d_th, "d_th", r.t, where);
        check_unit_interval(r.boundary_occ, "boundary_occ", r.t, where);
        check_unit_interval(r.top_occ, "top_occ", r.t, where);
        if (s.quantum) {
            check_unit_interval(r.d_th_diag, "d_th_diag", r.t, where);
            check_unit_interval(r.d_cl, "d_cl", r.t, where);
        }
    }
}

std::string trajectory_csv(const DiagnosticsSeries& s) {
    const bool flag = s.top_guard_tripped();
    std::string out = s.quantum ? "t,d_inf,d_th,d_th_diag,d_cl,mean_n,beta_t,boundary_occ,boundary_cumsum,bound"
                                : "t,d_inf,d_th,mean_n,beta_t,boundary_occ,boundary_cumsum";
    if (flag) out += ",top_guard";
    out += '\n';
    for (const auto& r : s.records) {
        out += std::to_string(r.t);
        auto put = [&](double v) {
            out += ',';
            out += format_double(v);
        };
        put(r.d_inf);
        put(r.d_th);
        if (s.quantum) {
            put(r.d_th_diag);
            put(r.d_cl);
        }
        put(r.mean_n);
        put(r.beta_t);
        put(r.boundary_occ);
        put(r.boundary_cumsum);
        if (s.quantum) put(r.bound);
        if (flag) out += r.top_occ >= tol::top_guard ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "mu,d_infinity,bound_first_order\n";
    for (const auto& r : rows)
        out += format_double(r.mu) + ',' + format_double(r.d_infinity) + ',' + format_double(r.bound_first_order) + '\n';
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content, RunReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
    report.files.push_back(path);
}

std::vector<Member> build_members(const ScenarioConfig& cfg, const EnergySpectrum& spectrum,
                                  const PopulationVector& pop0) {
    std::vector<Member> members;
    const std::size_t steps = cfg.steps;
    switch (cfg.kind) {
    case ScenarioKind::classical:
        for (std::size_t i = 0; i < cfg.rates.size(); ++i) {
            const RateSpec& spec = cfg.rates[i];
            const std::string tag = spec.label.empty() ? "r" + std::to_string(i) : spec.label;
            TransitionRates rates = scenario_rates(spec, cfg.levels);
            members.push_back({cfg.rates.size() == 1 ? "" : "_" + tag, tag,
                               [=] { return run_classical_trajectory(pop0, rates, spectrum, steps); }});
        }
        break;
    case ScenarioKind::bias_sweep:
        for (double b : cfg.rates.front().bias) {
            TransitionRates rates = bias_rates(b, cfg.rates.front().p_zero);
            members.push_back({"_b" + format_double(b), "b = " + format_double(b),
                               [=] { return run_classical_trajectory(pop0, rates, spectrum, steps); }});
        }
        break;
    case ScenarioKind::quantum:
    case ScenarioKind::mu_sweep: {
        const TransitionRates rates = scenario_rates(cfg.rates.front(), cfg.levels);
        for (double mu : cfg.mu) {
            ChannelConfig ch(rates, mu, cfg.levels);
            members.push_back({cfg.kind == ScenarioKind::quantum ? "" : "_mu" + format_double(mu),
                               "mu = " + format_double(mu),
                               [=] { return run_quantum_trajectory(pop0, ch, spectrum, steps); }});
        }
        break;
    }
    }
    return members;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::size_t default_worker_count() {
    if (const char* env = std::getenv("EWALK_WORKERS")) {
        std::size_t n = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto res = std::from_chars(env, end, n);
        if (res.ec == std::errc{} && res.ptr == end && n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
    const EnergySpectrum spectrum = scenario_spectrum(cfg);
    const PopulationVector pop0 = scenario_initial(cfg);
    const std::size_t workers = opts.workers > 0 ? opts.workers : default_worker_count();

    bool want_trajectories = false;
    bool want_summary = false;
    for (const auto& o : cfg.outputs) (is_trajectory_series(o) ? want_trajectories : want_summary) = true;
    if (cfg.kind != ScenarioKind::mu_sweep) want_trajectories = true;

    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + opts.out_dir.string() + ": " + ec.message());

    RunReport report;
    const std::vector<Member> members = build_members(cfg, spectrum, pop0);

    std::vector<DiagnosticsSeries> trajectories;
    if (want_trajectories) {
        std::vector<std::function<DiagnosticsSeries()>> jobs;
        for (const auto& m : members) jobs.push_back(m.run);
        trajectories = run_parallel(jobs, workers);
    }

    std::vector<SummaryRow> summary;
    if (want_summary) {
        const TransitionRates rates = scenario_rates(cfg.rates.front(), cfg.levels);
        const double slope = first_order_slope(ChannelConfig(rates, 0.0, cfg.levels));
        std::vector<std::function<SummaryRow()>> jobs;
        for (double mu : cfg.mu) {
            jobs.push_back([=, &spectrum, &pop0] {
                const ChannelConfig ch(rates, mu, cfg.levels);
                return SummaryRow{mu, asymptotic_deviation(ch, pop0, spectrum), mu * slope};
            });
        }
        summary = run_parallel(jobs, workers);
    }

    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const std::string file = cfg.name + members[i].suffix + ".csv";
        check_series(trajectories[i], file);
        write_file(opts.out_dir / file, trajectory_csv(trajectories[i]), report);
        if (trajectories[i].top_guard_tripped()) {
            report.warnings.push_back("boundary guard: max_t p_t(N) = " +
                                      format_double(trajectories[i].max_top_occupation) + " >= 1e-8 in " + file);
        }
    }
    if (want_summary) {
        for (const auto& row : summary) {
            if (!(row.d_infinity >= -kRangeSlack && row.d_infinity <= 1.0 + kRangeSlack))
                throw Error(Errc::invariant_violation,
                            "d_infinity = " + format_double(row.d_infinity) + " outside [0,1] at mu = " + format_double(row.mu));
        }
        write_file(opts.out_dir / (cfg.name + "_summary.csv"), summary_csv(summary), report);
    }

    if (!opts.svg) return report;

    for (const auto& name : cfg.outputs) {
        plot::Figure fig;
        fig.y_label = name;
        if (is_trajectory_series(name)) {
            if (trajectories.empty()) continue;
            fig.title = cfg.name + ": " + name + "(t)";
            fig.x_label = "t";
            fig.log_y = log_scaled(name);
            const auto field = series_field(name);
            for (std::size_t i = 0; i < trajectories.size(); ++i) {
                plot::Series s;
                s.label = members[i].legend;
                s.y = trajectories[i].column(field);
                for (const auto& r : trajectories[i].records) s.x.push_back(static_cast<double>(r.t));
                fig.series.push_back(std::move(s));
            }
        } else {
            fig.title = cfg.name + ": asymptotic deviation";
            fig.x_label = "mu";
            fig.markers = true;
            plot::Series s{"d_infinity", {}, {}};
            plot::Series b{"first order", {}, {}};
            for (const auto& row : summary) {
                s.x.push_back(row.mu);
                s.y.push_back(row.d_infinity);
                b.x.push_back(row.mu);
                b.y.push_back(row.bound_first_order);
            }
            fig.series.push_back(std::move(s));
            fig.series.push_back(std::move(b));
        }
        write_file(opts.out_dir / (cfg.name + "_" + name + ".svg"), plot::render_svg(fig), report);
    }
    return report;
}

}  // namespace ewalk
