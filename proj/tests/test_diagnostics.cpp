#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "ewalk/diagnostics.hpp"

using namespace ewalk;

namespace {

const TransitionRates kRates = TransitionRates::constant(0.2, 0.1, 0.7);

template <class F>
Errc error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ewalk::Error");
    return Errc::io_error;
}

double svd_norm(const ComplexMatrix& m) { return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues().sum(); }

}  // namespace

TEST_CASE("trace distance") {
    const DensityOperator a = embed_diagonal(PopulationVector::delta(3, 0));
    const DensityOperator b = embed_diagonal(PopulationVector::delta(3, 1));
    CHECK(trace_distance(a, a) == 0.0);
    CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-15));

    const PopulationVector p = gaussian_population(1.0, 1.0, 5), q = gaussian_population(3.0, 0.7, 5);
    CHECK(trace_distance(embed_diagonal(p), embed_diagonal(q)) == doctest::Approx(total_variation(p, q)).epsilon(1e-14));

    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        const DensityOperator x = random_density_operator(6, rng), y = random_density_operator(6, rng);
        CHECK(trace_distance(x, y) == doctest::Approx(0.5 * svd_norm(x.matrix() - y.matrix())).epsilon(1e-13));
    }
    // non-Hermitian input goes through singular values
    ComplexMatrix nh = ComplexMatrix::Zero(2, 2);
    nh(0, 1) = 1.0;
    CHECK(trace_norm(nh) == doctest::Approx(1.0));

    CHECK(error_of([&] { trace_distance(a, embed_diagonal(PopulationVector::delta(4, 0))); }) == Errc::dimension_mismatch);
}

TEST_CASE("total variation") {
    const PopulationVector d0 = PopulationVector::delta(4, 0), d1 = PopulationVector::delta(4, 1);
    CHECK(total_variation(d0, d0) == 0.0);
    CHECK(total_variation(d0, d1) == 1.0);
    CHECK(error_of([&] { total_variation(d0, PopulationVector::delta(5, 0)); }) == Errc::length_mismatch);
}

TEST_CASE("Gibbs matching for uniform spectra") {
    const EnergySpectrum spec = make_uniform_spectrum(1.0, 60);
    const GibbsMatch m = gibbs_match(1.0, spec);
    CHECK(m.q == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.beta == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(m.populations[1] / m.populations[0] == doctest::Approx(0.5).epsilon(1e-14));

    const GibbsMatch g = gibbs_match(0.0, spec);
    CHECK(g.beta == std::numeric_limits<double>::infinity());
    CHECK(g.populations[0] == 1.0);

    // gap scales beta but not q
    const GibbsMatch h = gibbs_match(1.0, make_uniform_spectrum(2.0, 60));
    CHECK(h.beta == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("Gibbs matching by bisection") {
    std::vector<double> e;
    for (int n = 0; n < 20; ++n) e.push_back(n + 0.3 * n * n);
    const EnergySpectrum spec(e);
    const PopulationVector target = gibbs_populations(0.6, spec);
    const GibbsMatch m = gibbs_match_energy(target.mean_energy(spec), spec);
    CHECK(m.beta == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(total_variation(m.populations, target) < 1e-10);
    CHECK(match_gibbs(target, spec).beta == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("thermal distance") {
    const EnergySpectrum spec = make_uniform_spectrum(1.0, 40);
    const PopulationVector g = gibbs_populations(std::log(3.5), spec);
    CHECK(thermal_distance(embed_diagonal(g), spec) < 1e-12);

    const PopulationVector p = gaussian_population(4.0, 2.0, 40);
    CHECK(thermal_distance(embed_diagonal(p), spec) ==
          doctest::Approx(total_variation(p, gibbs_match(p.mean_occupation(), spec).populations)).epsilon(1e-13));

    // small real coherence on top of a Gibbs state: eigenvalues of the
    // perturbation are +-c, so the distance is c
    const double c = 1e-3;
    ComplexMatrix rho = embed_diagonal(g).matrix();
    rho(0, 1) += c;
    rho(1, 0) += c;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho - embed_diagonal(g).matrix());
    CHECK(0.5 * es.eigenvalues().cwiseAbs().sum() == doctest::Approx(c));
    CHECK(std::abs(thermal_distance(DensityOperator(rho), spec) - c) < 1e-10);
}

TEST_CASE("classical trajectory diagnostics") {
    const EnergySpectrum spec = make_uniform_spectrum(1.0, 51);
    const PopulationVector pop0 = gaussian_population(2.0, 2.0, 51);
    const DiagnosticsSeries s = run_classical_trajectory(pop0, TransitionRates::constant(0.18, 0.1, 0.72), spec, 2000);
    REQUIRE(s.records.size() == 2001);
    CHECK(s.records.back().d_th < 1e-6);
    CHECK(s.records[0].boundary_cumsum == 0.0);
    CHECK(s.records[1].boundary_cumsum == s.records[0].boundary_occ);
    CHECK_FALSE(s.top_guard_tripped());
    // monotone after the transient
    for (std::size_t t = 200; t < 1000; ++t) CHECK(s.records[t + 1].d_th <= s.records[t].d_th + 1e-15);

    std::vector<RateTriple> triples;
    for (std::size_t n = 0; n < 51; ++n) {
        const double up = 0.15 + 0.05 / (1.0 + n), down = 0.55 - 0.10 / (2.0 + n);
        triples.push_back({up, 1.0 - up - down, down});
    }
    const DiagnosticsSeries ld = run_classical_trajectory(pop0, TransitionRates::level_dependent(triples), spec, 2000);
    CHECK(ld.records.back().d_th > 1e-3);
    CHECK(ld.records.back().d_inf < 1e-10);
}

TEST_CASE("quantum trajectory diagnostics") {
    const EnergySpectrum spec = make_uniform_spectrum(1.0, 21);
    const PopulationVector pop0 = gaussian_population(2.0, 2.0, 21);

    const DiagnosticsSeries zero = run_quantum_trajectory(pop0, ChannelConfig(kRates, 0.0, 21), spec, 300);
    for (const auto& r : zero.records) {
        CHECK(r.d_th == doctest::Approx(r.d_th_diag).epsilon(1e-12));
        CHECK(r.d_cl == doctest::Approx(r.d_th_diag).epsilon(1e-12));
    }

    const ChannelConfig cfg(kRates, 0.5, 21);
    const DiagnosticsSeries s = run_quantum_trajectory(pop0, cfg, spec, 1000);
    CHECK(s.quantum);
    CHECK(s.records.back().d_th_diag < 1e-6);
    CHECK(s.records.back().d_th > 0.1);
    for (const auto& r : s.records)
        CHECK(r.bound == doctest::Approx(r.d_cl + 0.5 * std::sqrt(0.14) * r.boundary_cumsum).epsilon(1e-14));

    // the same numbers straight from the closed-form channel
    DensityOperator rho = embed_diagonal(pop0);
    for (int t = 0; t < 50; ++t) rho = collision_step_closed(rho, cfg);
    CHECK(s.records[50].d_th == doctest::Approx(thermal_distance(rho, spec)).epsilon(1e-12));
}

TEST_CASE("asymptotic deviation") {
    const EnergySpectrum spec = make_uniform_spectrum(1.0, 21);
    const PopulationVector pop0 = gaussian_population(2.0, 2.0, 21);
    CHECK(asymptotic_deviation(ChannelConfig(kRates, 0.0, 21), pop0, spec) < 1e-8);

    const ChannelConfig cfg(kRates, 0.3, 21);
    const double fp = asymptotic_deviation_fixed_point(cfg, spec);
    const PlateauResult pl = asymptotic_deviation_plateau(cfg, pop0, spec);
    CHECK(std::abs(fp - pl.value) < 1e-6);
    CHECK(fp > 0.0);

    PlateauOptions tight;
    tight.max_steps = 10;
    CHECK(error_of([&] { asymptotic_deviation_plateau(cfg, pop0, spec, tight); }) == Errc::no_convergence);

    // leading-order slope predicts small-mu behaviour
    const double a = first_order_slope(cfg.with_mu(0.0));
    const double small = asymptotic_deviation_fixed_point(cfg.with_mu(0.01), spec);
    CHECK(std::abs(small / 0.01 - a) / a < 1e-2);
}

TEST_CASE("decay fits") {
    std::vector<double> synth;
    for (int t = 0; t < 400; ++t) synth.push_back(std::exp(-0.1 * t));
    CHECK(std::abs(fit_decay_rate(synth) - 0.1) < 1e-6);

    std::vector<double> short_tail{0.5, 0.2, 0.05, 0.01, 1e-11};
    CHECK(error_of([&] { fit_decay_rate(short_tail); }) == Errc::insufficient_tail);

    // Strong bias: the tolerance window closes before the slowest mode takes
    // over, so the fit sits above -ln|lambda2| (band-edge t^-3/2 prefactor).
    // Weak bias: the window reaches the asymptotic regime.
    const std::size_t levels = 51;
    const EnergySpectrum spec = make_uniform_spectrum(1.0, levels);
    auto relative_error = [&](double minus_over_plus) {
        const TransitionRates r = TransitionRates::constant(0.9 / (1 + minus_over_plus), 0.1,
                                                            0.9 * minus_over_plus / (1 + minus_over_plus));
        const DiagnosticsSeries s = run_classical_trajectory(gaussian_population(2.0, 2.0, levels), r, spec, 20'000);
        const double predicted = -std::log(second_eigenvalue_modulus(build_transition_matrix(r, levels)));
        return (fit_decay_rate(s) - predicted) / predicted;
    };
    CHECK(std::abs(relative_error(1.1)) < 0.05);
    const double strong = relative_error(4.0);
    CHECK(strong > 0.0);
    CHECK(strong < 0.2);
}
