#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ewalk/classical.hpp"

using namespace ewalk;

namespace {

const TransitionRates kBiased = TransitionRates::constant(0.2, 0.1, 0.7);

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

// Dense transition matrix assembled entry by entry from the step rules.
RealMatrix oracle_matrix(const TransitionRates& r, std::size_t levels) {
    const auto d = static_cast<Eigen::Index>(levels);
    RealMatrix t = RealMatrix::Zero(d, d);
    for (Eigen::Index n = 0; n < d; ++n) {
        const RateTriple& p = r.at(static_cast<std::size_t>(n));
        t(n, n) += p.zero;
        t(n == 0 ? 0 : n - 1, n) += p.minus;
        t(n == d - 1 ? n : n + 1, n) += p.plus;
    }
    return t;
}

// Perron vector of the oracle matrix by full eigendecomposition.
RealVector eigen_stationary(const RealMatrix& t) {
    Eigen::EigenSolver<RealMatrix> es(t);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < t.rows(); ++i)
        if (std::abs(es.eigenvalues()[i] - 1.0) < std::abs(es.eigenvalues()[best] - 1.0)) best = i;
    RealVector v = es.eigenvectors().col(best).real();
    return v / v.sum();
}

}  // namespace

TEST_CASE("single step from the ground level") {
    const PopulationVector p = classical_step(PopulationVector::delta(5, 0), kBiased);
    CHECK(p[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(p[2] == 0.0);
}

TEST_CASE("lazy-only rates leave populations unchanged") {
    const TransitionRates lazy = TransitionRates::constant(0.0, 1.0, 0.0);
    const PopulationVector g = gaussian_population(3.0, 1.5, 10);
    CHECK(classical_step(g, lazy).values() == g.values());
}

TEST_CASE("stationary populations are fixed by a step") {
    const EnergySpectrum spec = make_uniform_spectrum(1.0, 30);
    const PopulationVector s = stationary_closed_form(kBiased, spec);
    CHECK((classical_step(s, kBiased).values() - s.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-level transition matrix") {
    const TransitionMatrix t = build_transition_matrix(kBiased, 2);
    RealMatrix expect(2, 2);
    expect << 0.8, 0.7, 0.2, 0.3;
    CHECK((t.matrix() - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("transition matrix matches the entrywise oracle and the recurrence") {
    const std::size_t levels = 12;
    std::vector<RateTriple> triples;
    for (std::size_t n = 0; n < levels; ++n) {
        const double up = 0.15 + 0.05 / (1.0 + n), down = 0.55 - 0.10 / (2.0 + n);
        triples.push_back({up, 1.0 - up - down, down});
    }
    const TransitionRates ld = TransitionRates::level_dependent(triples);
    for (const TransitionRates& r : {kBiased, ld}) {
        const TransitionMatrix t = build_transition_matrix(r, levels);
        CHECK((t.matrix() - oracle_matrix(r, levels)).cwiseAbs().maxCoeff() < 1e-15);
        PopulationVector a = gaussian_population(2.0, 2.0, levels);
        RealVector b = a.values();
        for (int s = 0; s < 100; ++s) {
            a = classical_step(a, r);
            b = t.matrix() * b;
        }
        CHECK((a.values() - b).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("transition matrix validation") {
    RealMatrix bad(2, 2);
    bad << 0.8, 0.7, 0.1, 0.3;
    CHECK(error_of([&] { TransitionMatrix{bad}; }) == Errc::invalid_rates);
    RealMatrix wide = RealMatrix::Zero(3, 3);
    wide(2, 0) = 1.0;
    wide(1, 1) = 1.0;
    wide(2, 2) = 1.0;
    CHECK(error_of([&] { TransitionMatrix{wide}; }) == Errc::invalid_rates);
    CHECK(error_of([] {
              classical_step(PopulationVector::delta(3, 0), TransitionRates::level_dependent({{0.2, 0.1, 0.7}}));
          }) == Errc::rate_shape_mismatch);
}

TEST_CASE("Kraus operators") {
    const std::size_t levels = 8;
    const KrausSet k = kraus_operators(kBiased, levels);
    CHECK(k.operators.size() == 5);
    CHECK((k.completeness() - ComplexMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-15);

    // brute-force sum K rho K^dagger on a diagonal state equals the matrix action
    const PopulationVector g = gaussian_population(2.0, 2.0, levels);
    ComplexMatrix rho = diagonal_matrix(g.values());
    ComplexMatrix out = ComplexMatrix::Zero(8, 8);
    for (const auto& op : k.operators) out += op * rho * op.adjoint();
    const RealVector expect = oracle_matrix(kBiased, levels) * g.values();
    CHECK((real_diagonal(out) - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((out - k.apply(rho)).cwiseAbs().maxCoeff() < 1e-15);
    // diagonal in, diagonal out
    CHECK((out - diagonal_matrix(real_diagonal(out))).cwiseAbs().maxCoeff() == 0.0);

    const KrausSet id = kraus_operators(TransitionRates::constant(0.0, 1.0, 0.0), 4);
    REQUIRE(id.operators.size() == 1);
    CHECK(id.operators[0] == ComplexMatrix::Identity(4, 4));
}

TEST_CASE("unitality defect") {
    const ComplexMatrix d = unitality_defect(kBiased, 6);
    CHECK(d(0, 0).real() == doctest::Approx(0.5));
    CHECK(d(5, 5).real() == doctest::Approx(-0.5));
    CHECK(d.cwiseAbs().sum() == doctest::Approx(1.0));

    const KrausSet k = kraus_operators(kBiased, 6);
    CHECK((k.apply(ComplexMatrix::Identity(6, 6)) - ComplexMatrix::Identity(6, 6) - d).cwiseAbs().maxCoeff() < 1e-15);

    const ComplexMatrix zero = unitality_defect(TransitionRates::constant(0.4, 0.2, 0.4), 6);
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stationary closed form") {
    const EnergySpectrum big = make_uniform_spectrum(1.0, 200);
    const PopulationVector inf = stationary_closed_form(kBiased, big, StationaryForm::infinite_ladder);
    CHECK(inf[0] == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
    CHECK(inf[4] / inf[3] == doctest::Approx(2.0 / 7.0).epsilon(1e-13));

    const PopulationVector num = stationary_numeric(build_transition_matrix(kBiased, 200)).population;
    CHECK((num.values() - inf.values()).cwiseAbs().maxCoeff() < 1e-10);

    CHECK(error_of([&] {
              stationary_closed_form(TransitionRates::constant(0.45, 0.1, 0.45), big, StationaryForm::infinite_ladder);
          }) == Errc::not_normalizable);
    CHECK(error_of([] {
              stationary_closed_form(TransitionRates::constant(0.5, 0.5, 0.0), make_uniform_spectrum(1.0, 4));
          }) == Errc::not_normalizable);

    // truncated form against the eigen-decomposition Perron vector
    const EnergySpectrum small = make_uniform_spectrum(1.0, 15);
    const RealVector perron = eigen_stationary(oracle_matrix(kBiased, 15));
    CHECK((stationary_closed_form(kBiased, small).values() - perron).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stationary numeric") {
    const StationaryResult r = stationary_numeric(build_transition_matrix(kBiased, 50));
    CHECK(r.unique);
    const PopulationVector closed = stationary_closed_form(kBiased, make_uniform_spectrum(1.0, 50));
    CHECK((r.population.values() - closed.values()).cwiseAbs().sum() / 2 < 1e-10);

    const StationaryResult id = stationary_numeric(build_transition_matrix(TransitionRates::constant(0, 1, 0), 6));
    CHECK_FALSE(id.unique);
    CHECK((id.population.values().array() - 1.0 / 6.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("spectral gap") {
    const TransitionMatrix t = build_transition_matrix(kBiased, 50);
    Eigen::EigenSolver<RealMatrix> es(oracle_matrix(kBiased, 50), false);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) moduli.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(moduli.rbegin(), moduli.rend());
    CHECK(second_eigenvalue_modulus(t) == doctest::Approx(moduli[1]).epsilon(1e-12));
    CHECK(spectral_gap(t) > 0.0);
    CHECK(spectral_gap(t) == doctest::Approx(1.0 - moduli[1]).epsilon(1e-12));
    CHECK(spectral_gap(build_transition_matrix(TransitionRates::constant(0, 1, 0), 5)) == doctest::Approx(0.0));
}

TEST_CASE("Cesaro averages") {
    const PopulationVector g = gaussian_population(1.0, 1.0, 4);
    const std::vector<PopulationVector> same(5, g);
    CHECK((cesaro_average(same).values() - g.values()).cwiseAbs().maxCoeff() < 1e-15);

    const std::vector<PopulationVector> two{PopulationVector::delta(3, 0), PopulationVector::delta(3, 1)};
    const PopulationVector half = cesaro_average(two);
    CHECK(half[0] == 0.5);
    CHECK(half[1] == 0.5);
    CHECK(half[2] == 0.0);

    CHECK(error_of([] { cesaro_average({}); }) == Errc::empty_trajectory);

    const auto traj = classical_trajectory(gaussian_population(2.0, 2.0, 20), kBiased, 10'000);
    CHECK(traj.size() == 10'001);
    const PopulationVector avg = cesaro_average(traj);
    const PopulationVector st = stationary_numeric(build_transition_matrix(kBiased, 20)).population;
    CHECK((avg.values() - st.values()).cwiseAbs().sum() / 2 < 1e-3);
}

TEST_CASE("boundary cumulative sums") {
    const std::vector<PopulationVector> ground(7, PopulationVector::delta(4, 0));
    const std::vector<double> c = boundary_cumsum(ground);
    REQUIRE(c.size() == 7);
    CHECK(c.back() == 7.0);
    CHECK(c.front() == 1.0);
}

TEST_CASE("detailed balance rates") {
    const EnergySpectrum uni = make_uniform_spectrum(1.5, 10);
    const TransitionRates r = detailed_balance_rates(0.7, uni, 0.1);
    REQUIRE(r.is_constant());
    const RateTriple& t = r.constant_triple();
    CHECK(t.plus / t.minus == doctest::Approx(std::exp(-0.7 * 1.5)).epsilon(1e-14));
    CHECK(t.zero == doctest::Approx(0.1).epsilon(1e-14));

    const TransitionRates hot = detailed_balance_rates(0.0, uni, 0.1);
    CHECK(hot.constant_triple().plus == hot.constant_triple().minus);

    std::vector<double> e;
    for (int n = 0; n < 12; ++n) e.push_back(n + 0.3 * n * n);
    const EnergySpectrum spec(e);
    const TransitionRates ld = detailed_balance_rates(0.8, spec, 0.1);
    for (std::size_t n = 0; n + 1 < spec.levels(); ++n) {
        CHECK(ld.at(n).plus / ld.at(n + 1).minus == doctest::Approx(std::exp(-0.8 * (e[n + 1] - e[n]))).epsilon(1e-13));
        CHECK(ld.at(n).zero >= 0.1 - 1e-15);
    }
    RealVector gibbs(spec.levels());
    for (std::size_t n = 0; n < spec.levels(); ++n) gibbs[static_cast<Eigen::Index>(n)] = std::exp(-0.8 * e[n]);
    gibbs /= gibbs.sum();
    CHECK((stationary_closed_form(ld, spec).values() - gibbs).cwiseAbs().maxCoeff() < 1e-12);

    CHECK(error_of([&] { detailed_balance_rates(0.8, spec, 1.0); }) == Errc::infeasible_rates);
}

TEST_CASE("effective temperature") {
    const double e = std::exp(1.0);
    const EffectiveTemperature unit = effective_temperature(TransitionRates::constant(0.9 / (1 + e), 0.1, 0.9 * e / (1 + e)), 1.0);
    CHECK(unit.temperature == doctest::Approx(1.0).epsilon(1e-13));

    const EffectiveTemperature t = effective_temperature(kBiased, 1.0);
    CHECK(t.temperature == doctest::Approx(1.0 / std::log(3.5)).epsilon(1e-14));
    CHECK(t.beta == doctest::Approx(std::log(3.5)).epsilon(1e-14));

    CHECK(error_of([] { effective_temperature(TransitionRates::constant(0.45, 0.1, 0.45), 1.0); }) ==
          Errc::unbiased_rates);
    CHECK(error_of([] { effective_temperature(TransitionRates::constant(0.0, 0.3, 0.7), 1.0); }) == Errc::zero_up_rate);
    CHECK(error_of([] { effective_temperature(kBiased, 0.0); }) == Errc::non_positive_gap);
}
