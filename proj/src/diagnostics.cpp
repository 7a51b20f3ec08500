#include "ewalk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace ewalk {

namespace {

constexpr double kBetaLow = 1e-8;
constexpr double kBetaHigh = 1e3;
constexpr double kMeanTolerance = 1e-12;
constexpr double kFitUpper = 0.1;
constexpr double kFitLower = 1e-10;
constexpr std::size_t kFitMinSamples = 20;

double hermitian_trace_norm(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double tv_raw(const RealVector& a, const RealVector& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

double mean_energy_at(double beta, const EnergySpectrum& spectrum) {
    const PopulationVector p = gibbs_populations(beta, spectrum);
    return p.mean_energy(spectrum);
}

}  // namespace

double trace_norm(const ComplexMatrix& m) {
    if (m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol::hermiticity)
        return hermitian_trace_norm(0.5 * (m + m.adjoint()));
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    if (a.dimension() != b.dimension()) throw Error(Errc::dimension_mismatch, "trace distance of unequal dimensions");
    return 0.5 * hermitian_trace_norm(a.matrix() - b.matrix());
}

double total_variation(const PopulationVector& p, const PopulationVector& q) {
    if (p.levels() != q.levels()) throw Error(Errc::length_mismatch, "total variation of unequal lengths");
    return tv_raw(p.values(), q.values());
}

PopulationVector gibbs_populations(double beta, const EnergySpectrum& spectrum) {
    const auto d = static_cast<Eigen::Index>(spectrum.levels());
    RealVector p(d);
    if (std::isinf(beta)) {
        p.setZero();
        p[0] = 1.0;
        return PopulationVector(std::move(p));
    }
    // E_0 = 0 is the largest weight, so no overflow.
    for (Eigen::Index n = 0; n < d; ++n) p[n] = std::exp(-beta * spectrum[static_cast<std::size_t>(n)]);
    p /= p.sum();
    return PopulationVector(std::move(p));
}

GibbsMatch gibbs_match(double mean_n, const EnergySpectrum& spectrum) {
    const auto gap = spectrum.uniform_gap();
    if (!gap) throw Error(Errc::invalid_spectrum, "closed-form Gibbs matching needs a uniform spectrum");
    if (!(mean_n >= 0.0)) throw Error(Errc::invalid_population, "negative mean occupation");
    const auto d = static_cast<Eigen::Index>(spectrum.levels());
    if (mean_n == 0.0) {
        return GibbsMatch{std::numeric_limits<double>::infinity(), 0.0, PopulationVector::delta(spectrum.levels(), 0)};
    }
    const double q = mean_n / (1.0 + mean_n);
    const double beta = std::log1p(1.0 / mean_n) / *gap;
    RealVector p(d);
    double w = 1.0;
    for (Eigen::Index n = 0; n < d; ++n) {
        p[n] = w;
        w *= q;
    }
    p /= p.sum();
    return GibbsMatch{beta, q, PopulationVector(std::move(p))};
}

GibbsMatch gibbs_match_energy(double mean_energy, const EnergySpectrum& spectrum) {
    if (!(mean_energy >= 0.0)) throw Error(Errc::invalid_population, "negative mean energy");
    const double e1 = spectrum.levels() > 1 ? spectrum[1] : 1.0;
    auto make = [&](double beta) {
        return GibbsMatch{beta, std::isinf(beta) ? 0.0 : std::exp(-beta * e1), gibbs_populations(beta, spectrum)};
    };
    if (mean_energy == 0.0) return make(std::numeric_limits<double>::infinity());

    double lo = kBetaLow;
    double hi = kBetaHigh;
    // Clamp states hotter than beta_min or colder than beta_max to the bracket.
    if (mean_energy >= mean_energy_at(lo, spectrum)) return make(lo);
    if (mean_energy <= mean_energy_at(hi, spectrum)) return make(hi);
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        const double m = mean_energy_at(mid, spectrum);
        if (std::abs(m - mean_energy) <= kMeanTolerance) break;
        if (m > mean_energy)
            lo = mid;
        else
            hi = mid;
        if (!(hi > lo)) break;
    }
    return make(mid);
}

GibbsMatch match_gibbs(const PopulationVector& pop, const EnergySpectrum& spectrum) {
    if (pop.levels() != spectrum.levels()) throw Error(Errc::length_mismatch, "population vs spectrum size");
    if (spectrum.uniform_gap()) return gibbs_match(pop.mean_occupation(), spectrum);
    return gibbs_match_energy(pop.mean_energy(spectrum), spectrum);
}

double thermal_distance(const DensityOperator& rho, const EnergySpectrum& spectrum) {
    const GibbsMatch g = match_gibbs(extract_populations(rho), spectrum);
    return 0.5 * hermitian_trace_norm(rho.matrix() - diagonal_matrix(g.populations.values()));
}

std::vector<double> DiagnosticsSeries::column(double DiagnosticsRecord::*field) const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.*field);
    return out;
}

DiagnosticsSeries run_classical_trajectory(const PopulationVector& pop0, const TransitionRates& rates,
                                           const EnergySpectrum& spectrum, std::size_t steps) {
    if (pop0.levels() != spectrum.levels()) throw Error(Errc::length_mismatch, "population vs spectrum size");
    rates.check_levels(pop0.levels());
    const PopulationVector stationary = stationary_closed_form(rates, spectrum);
    const auto top = static_cast<Eigen::Index>(pop0.levels() - 1);

    DiagnosticsSeries series;
    series.records.reserve(steps + 1);
    PopulationVector pop = pop0;
    double cumsum = 0.0;
    for (std::size_t t = 0; t <= steps; ++t) {
        if (t > 0) pop = PopulationVector(classical_step_raw(pop.values(), rates));
        const GibbsMatch g = match_gibbs(pop, spectrum);
        DiagnosticsRecord rec;
        rec.t = t;
        rec.d_inf = total_variation(pop, stationary);
        rec.d_th = total_variation(pop, g.populations);
        rec.d_th_diag = rec.d_th;
        rec.d_cl = rec.d_th;
        rec.mean_n = pop.mean_occupation();
        rec.beta_t = g.beta;
        rec.boundary_occ = pop[0];
        rec.boundary_cumsum = cumsum;
        rec.bound = rec.d_cl;
        rec.top_occ = pop.values()[top];
        series.max_top_occupation = std::max(series.max_top_occupation, rec.top_occ);
        series.records.push_back(rec);
        cumsum += pop[0];
    }
    return series;
}

DiagnosticsSeries run_quantum_trajectory(const PopulationVector& pop0, const ChannelConfig& cfg,
                                         const EnergySpectrum& spectrum, std::size_t steps) {
    if (pop0.levels() != cfg.levels() || spectrum.levels() != cfg.levels())
        throw Error(Errc::dimension_mismatch, "population, spectrum and channel sizes differ");
    const RateTriple& r = cfg.triple();
    const PopulationVector stationary = stationary_closed_form(cfg.rates(), spectrum);
    const double injection = cfg.mu() * std::sqrt(r.plus * r.minus);
    const auto top = static_cast<Eigen::Index>(cfg.levels() - 1);

    DiagnosticsSeries series;
    series.quantum = true;
    series.mu = cfg.mu();
    series.records.reserve(steps + 1);

    ComplexMatrix rho = diagonal_matrix(pop0.values());
    RealVector classical = pop0.values();
    double cumsum = 0.0;
    for (std::size_t t = 0; t <= steps; ++t) {
        if (t > 0) {
            rho = detail::apply_closed(rho, r, cfg.mu());
            classical = classical_step_raw(classical, cfg.rates());
        }
        const PopulationVector pop(real_diagonal(rho));
        const GibbsMatch g = match_gibbs(pop, spectrum);
        const ComplexMatrix gibbs = diagonal_matrix(g.populations.values());

        DiagnosticsRecord rec;
        rec.t = t;
        rec.d_inf = total_variation(pop, stationary);
        rec.d_th = 0.5 * hermitian_trace_norm(rho - gibbs);
        rec.d_th_diag = total_variation(pop, g.populations);
        rec.d_cl = tv_raw(classical, g.populations.values());
        rec.mean_n = pop.mean_occupation();
        rec.beta_t = g.beta;
        rec.boundary_occ = pop[0];
        rec.boundary_cumsum = cumsum;
        rec.bound = rec.d_cl + injection * cumsum;
        rec.top_occ = pop.values()[top];
        series.max_top_occupation = std::max(series.max_top_occupation, rec.top_occ);
        series.records.push_back(rec);
        cumsum += pop[0];
    }
    return series;
}

double asymptotic_deviation_fixed_point(const ChannelConfig& cfg, const EnergySpectrum& spectrum) {
    const DensityOperator fixed = channel_fixed_point(cfg);
    return thermal_distance(fixed, spectrum);
}

PlateauResult asymptotic_deviation_plateau(const ChannelConfig& cfg, const PopulationVector& pop0,
                                           const EnergySpectrum& spectrum, const PlateauOptions& opts) {
    if (pop0.levels() != cfg.levels()) throw Error(Errc::dimension_mismatch, "population vs channel levels");
    const RateTriple& r = cfg.triple();
    if (!(r.minus > r.plus)) throw Error(Errc::unbiased_rates, "plateau detection requires p- > p+");

    ComplexMatrix rho = diagonal_matrix(pop0.values());
    std::deque<double> window;
    for (std::size_t t = 0; t <= opts.max_steps; ++t) {
        if (t > 0) rho = detail::apply_closed(rho, r, cfg.mu());
        const GibbsMatch g = match_gibbs(PopulationVector(real_diagonal(rho)), spectrum);
        window.push_back(0.5 * hermitian_trace_norm(rho - diagonal_matrix(g.populations.values())));
        if (window.size() > opts.window) window.pop_front();
        if (window.size() == opts.window) {
            const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
            if (*hi - *lo < opts.spread) {
                double mean = 0.0;
                for (double v : window) mean += v;
                return PlateauResult{mean / static_cast<double>(window.size()), t};
            }
        }
    }
    std::ostringstream os;
    os << "thermal distance did not plateau within " << opts.max_steps << " steps";
    throw Error(Errc::no_convergence, os.str());
}

double asymptotic_deviation(const ChannelConfig& cfg, const PopulationVector& pop0, const EnergySpectrum& spectrum) {
    if (cfg.levels() <= kFixedPointMaxLevels) return asymptotic_deviation_fixed_point(cfg, spectrum);
    return asymptotic_deviation_plateau(cfg, pop0, spectrum).value;
}

double first_order_slope(const ChannelConfig& cfg) {
    const RateTriple& r = cfg.triple();
    if (!(r.minus > r.plus)) throw Error(Errc::unbiased_rates, "first-order slope requires p- > p+");
    const EnergySpectrum spectrum = make_uniform_spectrum(1.0, cfg.levels());
    const ComplexMatrix stationary = diagonal_matrix(stationary_closed_form(cfg.rates(), spectrum).values());
    const ComplexMatrix source = detail::coherence_injection(stationary, r);

    ComplexMatrix x = source;
    for (std::size_t it = 0; it < 1'000'000; ++it) {
        ComplexMatrix next = detail::apply_closed(x, r, 0.0) + source;
        const double change = (next - x).cwiseAbs().maxCoeff();
        x = std::move(next);
        if (change < 1e-15) return 0.5 * hermitian_trace_norm(x);
    }
    throw Error(Errc::no_convergence, "first-order coherence did not converge");
}

double fit_decay_rate(std::span<const double> values) {
    std::size_t start = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] >= kFitUpper) start = i + 1;
    std::size_t end = start;
    while (end < values.size() && values[end] > kFitLower) ++end;
    const std::size_t count = end - start;
    if (count < kFitMinSamples) {
        std::ostringstream os;
        os << count << " samples in (1e-10, 0.1), need " << kFitMinSamples;
        throw Error(Errc::insufficient_tail, os.str());
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < end; ++i) {
        const double x = static_cast<double>(i);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(count);
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return -slope;
}

double fit_decay_rate(const DiagnosticsSeries& series) {
    const std::vector<double> d = series.column(&DiagnosticsRecord::d_inf);
    return fit_decay_rate(std::span<const double>(d));
}

}  // namespace ewalk
