#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ewalk/ladder.hpp"

using namespace ewalk;

namespace {

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

}  // namespace

TEST_CASE("uniform spectrum") {
    const EnergySpectrum s = make_uniform_spectrum(1.0, 3);
    CHECK(s.energies() == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(s.uniform_gap().value() == 1.0);

    const EnergySpectrum h = make_uniform_spectrum(0.5, 2);
    CHECK(h.energies() == std::vector<double>{0.0, 0.5});

    CHECK(error_of([] { make_uniform_spectrum(-1.0, 3); }) == Errc::non_positive_gap);
    CHECK(error_of([] { make_uniform_spectrum(0.0, 3); }) == Errc::non_positive_gap);
}

TEST_CASE("general spectra must start at zero and increase") {
    const EnergySpectrum s({0.0, 1.3, 3.2});
    CHECK_FALSE(s.uniform_gap().has_value());
    CHECK(error_of([] { EnergySpectrum({0.5, 1.0}); }) == Errc::invalid_spectrum);
    CHECK(error_of([] { EnergySpectrum({0.0, 1.0, 1.0}); }) == Errc::invalid_spectrum);
    CHECK(error_of([] { EnergySpectrum({}); }) == Errc::invalid_spectrum);
}

TEST_CASE("transition rates validate each triple") {
    const TransitionRates r = TransitionRates::constant(0.2, 0.1, 0.7);
    CHECK(r.is_constant());
    CHECK(r.at(0) == r.at(1000));
    CHECK(r.constant_triple().minus == 0.7);

    CHECK(error_of([] { TransitionRates::constant(0.2, 0.1, 0.6); }) == Errc::invalid_rates);
    CHECK(error_of([] { TransitionRates::constant(-0.1, 0.4, 0.7); }) == Errc::invalid_rates);
    CHECK(error_of([] { TransitionRates::constant(0.2, 0.1, std::nan("")); }) == Errc::invalid_rates);

    const TransitionRates ld = TransitionRates::level_dependent({{0.1, 0.4, 0.5}, {0.2, 0.3, 0.5}});
    CHECK_FALSE(ld.is_constant());
    CHECK(ld.size() == 2);
    CHECK(error_of([&] { ld.constant_triple(); }) == Errc::level_dependent_unsupported);
    CHECK(error_of([&] { ld.check_levels(3); }) == Errc::rate_shape_mismatch);
    CHECK_NOTHROW(ld.check_levels(2));
    CHECK(error_of([] { TransitionRates::level_dependent({{0.1, 0.4, 0.6}}); }) == Errc::invalid_rates);
}

TEST_CASE("population vectors are validated, not repaired") {
    CHECK_NOTHROW(PopulationVector(std::vector<double>{0.25, 0.75}));
    CHECK(error_of([] { PopulationVector(std::vector<double>{0.3, 0.3}); }) == Errc::invalid_population);
    CHECK(error_of([] { PopulationVector(std::vector<double>{-0.1, 1.1}); }) == Errc::invalid_population);
    CHECK(error_of([] { PopulationVector(std::vector<double>{}); }) == Errc::invalid_population);

    const PopulationVector d = PopulationVector::delta(5, 3);
    CHECK(d[3] == 1.0);
    CHECK(d.mean_occupation() == 3.0);
    CHECK(d.mean_energy(make_uniform_spectrum(0.5, 5)) == doctest::Approx(1.5));
    CHECK(error_of([] { PopulationVector::delta(5, 5); }) == Errc::invalid_population);
}

TEST_CASE("gaussian initial populations") {
    const PopulationVector g = gaussian_population(2.0, 2.0, 51);
    CHECK(g.values().sum() == doctest::Approx(1.0).epsilon(1e-14));
    Eigen::Index arg = 0;
    g.values().maxCoeff(&arg);
    CHECK(arg == 2);

    // independent direct summation
    double z = 0.0, m = 0.0;
    for (int n = 0; n < 51; ++n) {
        const double w = std::exp(-(n - 25.0) * (n - 25.0) / 18.0);
        z += w;
        m += n * w;
    }
    const PopulationVector c = gaussian_population(25.0, 3.0, 51);
    CHECK(std::abs(c.mean_occupation() - 25.0) < 0.01);
    CHECK(c.mean_occupation() == doctest::Approx(m / z).epsilon(1e-13));

    const PopulationVector narrow = gaussian_population(0.0, 0.05, 10);
    CHECK(narrow[0] > 1.0 - 1e-12);

    CHECK(error_of([] { gaussian_population(2.0, 0.0, 10); }) == Errc::degenerate_width);
    CHECK(error_of([] { gaussian_population(2.0, -1.0, 10); }) == Errc::degenerate_width);
}

TEST_CASE("density operators") {
    ComplexMatrix m(2, 2);
    m << 0.5, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.5;
    const DensityOperator rho(m);
    CHECK(rho.min_eigenvalue() == doctest::Approx(0.5 - std::sqrt(0.05)));

    ComplexMatrix not_herm = m;
    not_herm(0, 1) = 0.3;
    CHECK(error_of([&] { DensityOperator{not_herm}; }) == Errc::invalid_density);

    ComplexMatrix bad_trace = m * 1.1;
    CHECK(error_of([&] { DensityOperator{bad_trace}; }) == Errc::invalid_density);

    ComplexMatrix negative(2, 2);
    negative << 1.2, 0.0, 0.0, -0.2;
    CHECK(error_of([&] { DensityOperator{negative}; }) == Errc::invalid_density);
    CHECK(error_of([&] { DensityOperator(ComplexMatrix(2, 3)); }) == Errc::invalid_density);
}

TEST_CASE("embed, dephase and extract") {
    const DensityOperator ground = embed_diagonal(PopulationVector::delta(4, 0));
    CHECK(ground(0, 0) == Complex(1.0));
    CHECK(ground.matrix().cwiseAbs().sum() == 1.0);

    const DensityOperator half = embed_diagonal(PopulationVector(std::vector<double>{0.5, 0.5}));
    CHECK(half.matrix().isApprox(0.5 * ComplexMatrix::Identity(2, 2)));

    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 1) = 0.3;
    m(2, 2) = 0.2;
    m(0, 1) = 0.1;
    m(1, 0) = 0.1;
    const DensityOperator rho(m);
    const DensityOperator d = dephase(rho);
    CHECK(d(0, 1) == Complex(0.0));
    CHECK(d.matrix().trace().real() == doctest::Approx(1.0));
    CHECK(dephase(d).matrix() == d.matrix());

    const PopulationVector g = gaussian_population(1.0, 1.0, 6);
    CHECK(extract_populations(embed_diagonal(g)).values() == g.values());
    CHECK(extract_populations(ground).values() == PopulationVector::delta(4, 0).values());
}

TEST_CASE("extraction rejects clearly negative diagonals") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0 + 1e-9;
    m(1, 1) = -1e-9;
    // a perturbative state, accepted with a relaxed floor
    const DensityOperator rho(m, -1e-6);
    CHECK(error_of([&] { extract_populations(rho); }) == Errc::negative_population);
}

TEST_CASE("ladder operators") {
    const LadderOperators ops = make_ladder_operators(4);
    CHECK(ops.raise(1, 0) == Complex(1.0));
    CHECK(ops.raise(0, 3) == Complex(0.0));
    CHECK(ops.lower == ops.raise.adjoint());
    CHECK(ops.ground(0, 0) == Complex(1.0));
    CHECK(ops.top(3, 3) == Complex(1.0));
    // S- S+ = 1 - P_N and S+ S- = 1 - P_0
    const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
    CHECK((ops.lower * ops.raise).isApprox(id - ops.top));
    CHECK((ops.raise * ops.lower).isApprox(id - ops.ground));
}

TEST_CASE("random density operators are valid and seeded") {
    std::mt19937_64 a(7), b(7);
    const DensityOperator x = random_density_operator(6, a);
    const DensityOperator y = random_density_operator(6, b);
    CHECK(x.matrix() == y.matrix());
    CHECK(x.min_eigenvalue() > 0.0);
    CHECK(x.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("error messages carry the error name") {
    try {
        make_uniform_spectrum(-1.0, 3);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).rfind("NonPositiveGap", 0) == 0);
    }
}
