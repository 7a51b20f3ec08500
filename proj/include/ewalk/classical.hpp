#pragma once

// Incoherent birth-death-lazy transport on the truncated ladder. At the top
// level the upward channel reflects (becomes lazy) so every map stays
// exactly stochastic.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ewalk/ladder.hpp"

namespace ewalk {

// Column-stochastic tridiagonal matrix, T(m, n) = probability of n -> m.
class TransitionMatrix {
public:
    explicit TransitionMatrix(RealMatrix matrix);

    std::size_t levels() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    const RealMatrix& matrix() const noexcept { return matrix_; }

    PopulationVector apply(const PopulationVector& pop) const;

private:
    RealMatrix matrix_;
};

struct KrausSet {
    std::vector<ComplexMatrix> operators;
    std::vector<std::string> labels;

    ComplexMatrix apply(const ComplexMatrix& rho) const;
    // sum_k K_k^dagger K_k
    ComplexMatrix completeness() const;
};

PopulationVector classical_step(const PopulationVector& pop, const TransitionRates& rates);

// Same recurrence without validation, for trajectory loops.
RealVector classical_step_raw(const RealVector& pop, const TransitionRates& rates);

TransitionMatrix build_transition_matrix(const TransitionRates& rates, std::size_t levels);

// {K-b, K-, K0, K+, K+b}; operators with vanishing weight are omitted.
KrausSet kraus_operators(const TransitionRates& rates, std::size_t levels);

// Phi(1) - 1 for the constant-rate channel on the truncated ladder.
ComplexMatrix unitality_defect(const TransitionRates& rates, std::size_t levels);

enum class StationaryForm {
    truncated,       // exact fixed point of the truncated chain
    infinite_ladder  // (1 - r) r^n, the semi-infinite solution restricted to 0..N
};

PopulationVector stationary_closed_form(const TransitionRates& rates, const EnergySpectrum& spectrum,
                                        StationaryForm form = StationaryForm::truncated);

struct StationaryResult {
    PopulationVector population;
    std::size_t iterations = 0;
    bool unique = true;
};

// Power iteration from the uniform vector; stops once the total-variation
// change per sweep drops below 1e-13.
StationaryResult stationary_numeric(const TransitionMatrix& t);

// Second-largest eigenvalue modulus of T.
double second_eigenvalue_modulus(const TransitionMatrix& t);
double spectral_gap(const TransitionMatrix& t);

PopulationVector cesaro_average(std::span<const PopulationVector> trajectory);

// Rates obeying p+(n) / p-(n+1) = exp(-beta (E_{n+1} - E_n)). p-(n) = c for
// all n and p+(n) = c exp(-beta gap_n), with c the largest scale such that
// p0(n) >= lazy_floor[n] everywhere. The top level reuses the last gap.
TransitionRates detailed_balance_rates(double beta, const EnergySpectrum& spectrum,
                                       std::span<const double> lazy_floor);
TransitionRates detailed_balance_rates(double beta, const EnergySpectrum& spectrum, double lazy_floor);

struct EffectiveTemperature {
    double temperature = 0.0;
    double beta = 0.0;
};

EffectiveTemperature effective_temperature(const TransitionRates& rates, double gap);

// out[i] = sum_{j <= i} p_j(0)
std::vector<double> boundary_cumsum(std::span<const PopulationVector> trajectory);

// p_0, p_1, ..., p_steps
std::vector<PopulationVector> classical_trajectory(const PopulationVector& pop0, const TransitionRates& rates,
                                                   std::size_t steps);

}  // namespace ewalk
