#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "ewalk/diagnostics.hpp"
#include "ewalk/scenario.hpp"

namespace ewalk {

namespace {

// A check returns the worst observed error; it passes when that is below tol.
struct Check {
    std::string name;
    double tol;
    std::function<double()> run;
};

std::vector<Check> battery() {
    const TransitionRates fig2 = TransitionRates::constant(0.2, 0.1, 0.7);
    std::vector<Check> checks;

    checks.push_back({"channel closed form equals dilation", 1e-12, [=] {
                          std::mt19937_64 rng(12345);
                          double worst = 0.0;
                          for (std::size_t levels : {4u, 8u}) {
                              for (double mu : {0.0, 0.3, 1.0}) {
                                  const ChannelConfig cfg(fig2, mu, levels);
                                  for (int k = 0; k < 10; ++k) {
                                      const DensityOperator rho = random_density_operator(levels, rng);
                                      worst = std::max(worst, trace_norm(collision_step_closed(rho, cfg).matrix() -
                                                                         collision_step_dilated(rho, cfg).matrix()));
                                  }
                              }
                          }
                          return worst;
                      }});

    checks.push_back({"collision unitary is unitary", 1e-14, [] {
                          const CollisionUnitary u = build_collision_unitary(10);
                          const auto d = u.matrix.rows();
                          return (u.matrix.adjoint() * u.matrix - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
                      }});

    checks.push_back({"Kraus set is complete", 1e-14, [=] {
                          const KrausSet k = kraus_operators(fig2, 20);
                          return (k.completeness() - ComplexMatrix::Identity(20, 20)).cwiseAbs().maxCoeff();
                      }});

    checks.push_back({"recurrence, matrix and Kraus evolutions agree", 1e-12, [=] {
                          const std::size_t levels = 20;
                          const TransitionMatrix t = build_transition_matrix(fig2, levels);
                          const KrausSet k = kraus_operators(fig2, levels);
                          PopulationVector a = gaussian_population(2.0, 2.0, levels);
                          RealVector b = a.values();
                          ComplexMatrix c = diagonal_matrix(a.values());
                          double worst = 0.0;
                          for (int s = 0; s < 50; ++s) {
                              a = classical_step(a, fig2);
                              b = t.matrix() * b;
                              c = k.apply(c);
                              worst = std::max(worst, (a.values() - b).cwiseAbs().maxCoeff());
                              worst = std::max(worst, (a.values() - real_diagonal(c)).cwiseAbs().maxCoeff());
                          }
                          return worst;
                      }});

    checks.push_back({"stationary closed form matches power iteration", 1e-10, [=] {
                          const EnergySpectrum spec = make_uniform_spectrum(1.0, 30);
                          const StationaryResult num = stationary_numeric(build_transition_matrix(fig2, 30));
                          return total_variation(num.population, stationary_closed_form(fig2, spec));
                      }});

    checks.push_back({"detailed balance rates fix the Gibbs state", 1e-10, [] {
                          std::vector<double> e;
                          for (int n = 0; n < 15; ++n) e.push_back(n + 0.3 * n * n);
                          const EnergySpectrum spec(e);
                          const TransitionRates r = detailed_balance_rates(0.8, spec, 0.1);
                          const StationaryResult num = stationary_numeric(build_transition_matrix(r, spec.levels()));
                          return total_variation(num.population, gibbs_populations(0.8, spec));
                      }});

    checks.push_back({"populations decouple from coherence", 1e-12, [=] {
                          const std::size_t levels = 21;
                          const ComplexMatrix rho0 = diagonal_matrix(gaussian_population(2.0, 2.0, levels).values());
                          ComplexMatrix a = rho0, b = rho0;
                          double worst = 0.0;
                          for (int s = 0; s < 200; ++s) {
                              a = detail::apply_closed(a, fig2.constant_triple(), 0.0);
                              b = detail::apply_closed(b, fig2.constant_triple(), 1.0);
                              worst = std::max(worst, (real_diagonal(a) - real_diagonal(b)).cwiseAbs().maxCoeff());
                          }
                          return worst;
                      }});

    checks.push_back({"Gibbs state is moved by coherent collisions", 1e-12, [=] {
                          const std::size_t levels = 40;
                          const EnergySpectrum spec = make_uniform_spectrum(1.0, levels);
                          const double beta = std::log(3.5);
                          const PopulationVector g = gibbs_populations(beta, spec);
                          const DensityOperator rho = embed_diagonal(g);
                          double worst = 0.0;
                          for (double mu : {0.1, 0.5, 1.0}) {
                              const ChannelConfig cfg(fig2, mu, levels);
                              const double lhs = trace_norm(collision_step_closed(rho, cfg).matrix() - rho.matrix());
                              const double rhs = 2.0 * mu * std::sqrt(0.2 * 0.7) * g[0];
                              worst = std::max(worst, std::abs(lhs - rhs));
                          }
                          return worst;
                      }});

    checks.push_back({"incoherent fixed point is the classical stationary state", 1e-10, [=] {
                          const EnergySpectrum spec = make_uniform_spectrum(1.0, 12);
                          const DensityOperator fp = channel_fixed_point(ChannelConfig(fig2, 0.0, 12));
                          return trace_norm(fp.matrix() - embed_diagonal(stationary_closed_form(fig2, spec)).matrix());
                      }});

    for (const auto& p : list_presets()) {
        checks.push_back({"preset " + p.name + " survives a config round trip", 0.5, [name = p.name] {
                              const ScenarioConfig cfg = preset_config(name);
                              return parse_config(serialize_config(cfg)) == cfg ? 0.0 : 1.0;
                          }});
    }
    return checks;
}

}  // namespace

SelftestSummary run_selftest(std::ostream& log) {
    SelftestSummary summary;
    for (const auto& check : battery()) {
        std::string detail;
        bool ok = false;
        try {
            const double err = check.run();
            ok = err < check.tol;
            std::ostringstream os;
            os << "error " << err << ", tolerance " << check.tol;
            detail = os.str();
        } catch (const std::exception& e) {
            detail = e.what();
        }
        (ok ? summary.passed : summary.failed) += 1;
        log << (ok ? "PASS " : "FAIL ") << check.name << " (" << detail << ")\n";
    }
    log << summary.passed << " passed, " << summary.failed << " failed\n";
    return summary;
}

}  // namespace ewalk
