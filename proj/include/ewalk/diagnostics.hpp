#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ewalk/classical.hpp"
#include "ewalk/collision.hpp"
#include "ewalk/ladder.hpp"

namespace ewalk {

// Sum of singular values; Hermitian inputs go through the eigenvalues.
double trace_norm(const ComplexMatrix& m);

// (1/2) || a - b ||_1
double trace_distance(const DensityOperator& a, const DensityOperator& b);
double total_variation(const PopulationVector& p, const PopulationVector& q);

struct GibbsMatch {
    double beta = 0.0;  // +inf when the matched state is the ground state
    double q = 0.0;     // exp(-beta E_1)
    PopulationVector populations;
};

// Gibbs populations exp(-beta E_n) / Z on the truncated ladder.
PopulationVector gibbs_populations(double beta, const EnergySpectrum& spectrum);

// Closed-form inversion q = <n> / (1 + <n>) for a uniform spectrum.
GibbsMatch gibbs_match(double mean_n, const EnergySpectrum& spectrum);

// Bisection on beta in [1e-8, 1e3] matching Tr(H rho_beta) to mean_energy.
GibbsMatch gibbs_match_energy(double mean_energy, const EnergySpectrum& spectrum);

// Dispatches to the closed form when the spectrum is uniform.
GibbsMatch match_gibbs(const PopulationVector& pop, const EnergySpectrum& spectrum);

// d_1(rho, rho_beta) with rho_beta matched to the mean energy of rho.
double thermal_distance(const DensityOperator& rho, const EnergySpectrum& spectrum);

struct DiagnosticsRecord {
    std::size_t t = 0;
    double d_inf = 0.0;      // distance to the stationary populations
    double d_th = 0.0;       // thermal distance of the full state
    double d_th_diag = 0.0;  // thermal distance of the dephased state
    double d_cl = 0.0;       // thermal distance of the incoherent evolution
    double mean_n = 0.0;
    double beta_t = 0.0;
    double boundary_occ = 0.0;     // p_t(0)
    double boundary_cumsum = 0.0;  // sum_{j<t} p_j(0)
    double bound = 0.0;            // d_cl + mu sqrt(p+ p-) boundary_cumsum
    double top_occ = 0.0;          // p_t(N)
};

struct DiagnosticsSeries {
    std::vector<DiagnosticsRecord> records;
    bool quantum = false;
    double mu = 0.0;
    double max_top_occupation = 0.0;

    bool top_guard_tripped() const noexcept { return max_top_occupation >= tol::top_guard; }
    std::vector<double> column(double DiagnosticsRecord::*field) const;
};

// Records t = 0..steps.
DiagnosticsSeries run_classical_trajectory(const PopulationVector& pop0, const TransitionRates& rates,
                                           const EnergySpectrum& spectrum, std::size_t steps);

// Quantum trajectory from the diagonal state pop0, with the incoherent
// evolution carried alongside for d_cl.
DiagnosticsSeries run_quantum_trajectory(const PopulationVector& pop0, const ChannelConfig& cfg,
                                         const EnergySpectrum& spectrum, std::size_t steps);

// d_1 of the channel fixed point to its matched Gibbs state.
double asymptotic_deviation_fixed_point(const ChannelConfig& cfg, const EnergySpectrum& spectrum);

struct PlateauOptions {
    std::size_t window = 200;
    double spread = 1e-9;
    std::size_t max_steps = 100'000;
};

struct PlateauResult {
    double value = 0.0;
    std::size_t steps = 0;
};

PlateauResult asymptotic_deviation_plateau(const ChannelConfig& cfg, const PopulationVector& pop0,
                                           const EnergySpectrum& spectrum, const PlateauOptions& opts = {});

// Fixed-point route for N <= 40, plateau detection otherwise.
double asymptotic_deviation(const ChannelConfig& cfg, const PopulationVector& pop0, const EnergySpectrum& spectrum);

inline constexpr std::size_t kFixedPointMaxLevels = 41;

// Leading-order coefficient a in d_inf(mu) = a mu + O(mu^2): half the trace
// norm of the stationary solution of X = Phi_0(X) + Xi(rho_inf).
double first_order_slope(const ChannelConfig& cfg);

// Least-squares decay rate of log(value) over the tail 1e-10 < value < 0.1.
double fit_decay_rate(std::span<const double> values);
double fit_decay_rate(const DiagnosticsSeries& series);

}  // namespace ewalk
