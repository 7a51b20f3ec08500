#pragma once

// Truncated energy ladder |0>, ..., |N> and the value types shared by every
// other module: spectra, transition rates, population vectors and density
// operators. All types validate on construction and are immutable afterwards.

#include <complex>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ewalk/error.hpp"

namespace ewalk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double rate_sum = 1e-12;
inline constexpr double population_floor = -1e-14;
inline constexpr double normalization = 1e-12;
inline constexpr double hermiticity = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd_floor = -1e-10;
inline constexpr double extract_floor = -1e-10;
// Upper-edge occupation above which the truncation is considered visible.
inline constexpr double top_guard = 1e-8;
}  // namespace tol

class EnergySpectrum {
public:
    // Requires E_0 = 0 and strictly increasing energies.
    explicit EnergySpectrum(std::vector<double> energies);

    std::size_t levels() const noexcept { return energies_.size(); }
    double operator[](std::size_t n) const { return energies_[n]; }
    const std::vector<double>& energies() const noexcept { return energies_; }
    std::optional<double> uniform_gap() const noexcept { return uniform_gap_; }

    bool operator==(const EnergySpectrum&) const = default;

private:
    std::vector<double> energies_;
    std::optional<double> uniform_gap_;
};

EnergySpectrum make_uniform_spectrum(double gap, std::size_t levels);

struct RateTriple {
    double plus = 0.0;
    double zero = 0.0;
    double minus = 0.0;

    bool operator==(const RateTriple&) const = default;
};

class TransitionRates {
public:
    enum class Mode { constant, level_dependent };

    static TransitionRates constant(double p_plus, double p_zero, double p_minus);
    static TransitionRates level_dependent(std::vector<RateTriple> per_level);

    Mode mode() const noexcept { return mode_; }
    bool is_constant() const noexcept { return mode_ == Mode::constant; }

    // Rates at level n. For constant rates every n maps to the same triple.
    const RateTriple& at(std::size_t n) const;

    // Throws level_dependent_unsupported unless the rates are constant.
    const RateTriple& constant_triple() const;

    // Throws rate_shape_mismatch unless the rates cover exactly `levels` levels.
    void check_levels(std::size_t levels) const;

    // Number of stored triples (1 for constant rates).
    std::size_t size() const noexcept { return triples_.size(); }

    bool operator==(const TransitionRates&) const = default;

private:
    TransitionRates(Mode mode, std::vector<RateTriple> triples);

    Mode mode_;
    std::vector<RateTriple> triples_;
};

class PopulationVector {
public:
    explicit PopulationVector(RealVector probs);
    explicit PopulationVector(const std::vector<double>& probs);

    std::size_t levels() const noexcept { return static_cast<std::size_t>(probs_.size()); }
    double operator[](std::size_t n) const { return probs_[static_cast<Eigen::Index>(n)]; }
    const RealVector& values() const noexcept { return probs_; }

    double mean_occupation() const;
    double mean_energy(const EnergySpectrum& spectrum) const;

    static PopulationVector delta(std::size_t levels, std::size_t n);

private:
    RealVector probs_;
};

class DensityOperator {
public:
    // Validates Hermiticity, unit trace and positivity. `psd_floor` may be
    // relaxed by callers that produce perturbative (not strictly positive)
    // states.
    explicit DensityOperator(ComplexMatrix matrix, double psd_floor = tol::psd_floor);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    Complex operator()(std::size_t m, std::size_t n) const {
        return matrix_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    }

    double min_eigenvalue() const;

private:
    ComplexMatrix matrix_;
};

struct LadderOperators {
    ComplexMatrix raise;   // S+ = sum_{n<N} |n+1><n|
    ComplexMatrix lower;   // S- = S+^dagger
    ComplexMatrix ground;  // P0
    ComplexMatrix top;     // PN
};

LadderOperators make_ladder_operators(std::size_t levels);

// p(n) proportional to exp(-(n - center)^2 / (2 width^2)) on 0..levels-1.
PopulationVector gaussian_population(double center, double width, std::size_t levels);

DensityOperator embed_diagonal(const PopulationVector& pop);
DensityOperator dephase(const DensityOperator& rho);
PopulationVector extract_populations(const DensityOperator& rho);

// G G^dagger / Tr with G complex Ginibre; full rank almost surely.
DensityOperator random_density_operator(std::size_t levels, std::mt19937_64& rng);

// Unvalidated helpers for inner loops.
ComplexMatrix diagonal_matrix(const RealVector& diag);
RealVector real_diagonal(const ComplexMatrix& m);

}  // namespace ewalk
