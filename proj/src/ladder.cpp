#include "ewalk/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ewalk {

const char* to_string(Errc code) noexcept {
    switch (code) {
    case Errc::non_positive_gap: return "NonPositiveGap";
    case Errc::degenerate_width: return "DegenerateWidth";
    case Errc::invalid_spectrum: return "InvalidSpectrum";
    case Errc::invalid_rates: return "InvalidRates";
    case Errc::invalid_population: return "InvalidPopulation";
    case Errc::invalid_density: return "InvalidDensity";
    case Errc::negative_population: return "NegativePopulation";
    case Errc::rate_shape_mismatch: return "RateShapeMismatch";
    case Errc::level_dependent_unsupported: return "LevelDependentUnsupported";
    case Errc::not_normalizable: return "NotNormalizable";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::non_unique_fixed_point: return "NonUniqueFixedPoint";
    case Errc::empty_trajectory: return "EmptyTrajectory";
    case Errc::infeasible_rates: return "InfeasibleRates";
    case Errc::unbiased_rates: return "UnbiasedRates";
    case Errc::zero_up_rate: return "ZeroUpRate";
    case Errc::mu_out_of_range: return "MuOutOfRange";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::no_unit_eigenvalue: return "NoUnitEigenvalue";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::insufficient_tail: return "InsufficientTail";
    case Errc::parse_error: return "ParseError";
    case Errc::schema_violation: return "SchemaViolation";
    case Errc::unknown_field: return "UnknownField";
    case Errc::io_error: return "IoError";
    case Errc::invariant_violation: return "InvariantViolation";
    }
    return "Unknown";
}

namespace {

// Sum that does not depend on element order, so mirrored vectors normalize
// to bit-identical values.
double sorted_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

void validate_triple(const RateTriple& r, std::size_t level) {
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0 && std::isfinite(p); };
    if (!in_unit(r.plus) || !in_unit(r.zero) || !in_unit(r.minus)) {
        std::ostringstream os;
        os << "probabilities at level " << level << " outside [0,1]: (" << r.plus << ", " << r.zero
           << ", " << r.minus << ")";
        throw Error(Errc::invalid_rates, os.str());
    }
    double s = r.plus + r.zero + r.minus;
    if (std::abs(s - 1.0) > tol::rate_sum) {
        std::ostringstream os;
        os << "p+ + p0 + p- = " << s << " at level " << level;
        throw Error(Errc::invalid_rates, os.str());
    }
}

}  // namespace

EnergySpectrum::EnergySpectrum(std::vector<double> energies) : energies_(std::move(energies)) {
    if (energies_.empty()) throw Error(Errc::invalid_spectrum, "spectrum has no levels");
    if (energies_.front() != 0.0)
        throw Error(Errc::invalid_spectrum, "ground energy must be 0");
    for (std::size_t n = 1; n < energies_.size(); ++n) {
        if (!(energies_[n] > energies_[n - 1]) || !std::isfinite(energies_[n])) {
            std::ostringstream os;
            os << "energies must be strictly increasing (level " << n << ")";
            throw Error(Errc::invalid_spectrum, os.str());
        }
    }
    if (energies_.size() >= 2) {
        const double gap = energies_[1];
        const double scale = energies_.back();
        bool uniform = true;
        for (std::size_t n = 0; n < energies_.size() && uniform; ++n)
            uniform = std::abs(energies_[n] - static_cast<double>(n) * gap) <= 1e-12 * scale;
        if (uniform) uniform_gap_ = gap;
    }
}

EnergySpectrum make_uniform_spectrum(double gap, std::size_t levels) {
    if (!(gap > 0.0)) throw Error(Errc::non_positive_gap, "gap must be positive");
    if (levels < 2) throw Error(Errc::invalid_spectrum, "a ladder needs at least 2 levels");
    std::vector<double> e(levels);
    for (std::size_t n = 0; n < levels; ++n) e[n] = static_cast<double>(n) * gap;
    return EnergySpectrum(std::move(e));
}

TransitionRates::TransitionRates(Mode mode, std::vector<RateTriple> triples)
    : mode_(mode), triples_(std::move(triples)) {
    for (std::size_t n = 0; n < triples_.size(); ++n) validate_triple(triples_[n], n);
}

TransitionRates TransitionRates::constant(double p_plus, double p_zero, double p_minus) {
    return TransitionRates(Mode::constant, {RateTriple{p_plus, p_zero, p_minus}});
}

TransitionRates TransitionRates::level_dependent(std::vector<RateTriple> per_level) {
    if (per_level.empty()) throw Error(Errc::rate_shape_mismatch, "no levels given");
    return TransitionRates(Mode::level_dependent, std::move(per_level));
}

const RateTriple& TransitionRates::at(std::size_t n) const {
    if (mode_ == Mode::constant) return triples_.front();
    if (n >= triples_.size()) {
        std::ostringstream os;
        os << "level " << n << " beyond rate table of size " << triples_.size();
        throw Error(Errc::rate_shape_mismatch, os.str());
    }
    return triples_[n];
}

const RateTriple& TransitionRates::constant_triple() const {
    if (mode_ != Mode::constant)
        throw Error(Errc::level_dependent_unsupported, "operation requires constant rates");
    return triples_.front();
}

void TransitionRates::check_levels(std::size_t levels) const {
    if (mode_ == Mode::level_dependent && triples_.size() != levels) {
        std::ostringstream os;
        os << "rates cover " << triples_.size() << " levels, ladder has " << levels;
        throw Error(Errc::rate_shape_mismatch, os.str());
    }
}

PopulationVector::PopulationVector(RealVector probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0) throw Error(Errc::invalid_population, "empty population vector");
    for (Eigen::Index n = 0; n < probs_.size(); ++n) {
        if (!std::isfinite(probs_[n]) || probs_[n] < tol::population_floor) {
            std::ostringstream os;
            os << "population " << probs_[n] << " at level " << n;
            throw Error(Errc::invalid_population, os.str());
        }
    }
    const double s = probs_.sum();
    if (std::abs(s - 1.0) > tol::normalization) {
        std::ostringstream os;
        os.precision(17);
        os << "populations sum to " << s;
        throw Error(Errc::invalid_population, os.str());
    }
}

PopulationVector::PopulationVector(const std::vector<double>& probs)
    : PopulationVector(RealVector(Eigen::Map<const RealVector>(probs.data(),
                                                               static_cast<Eigen::Index>(probs.size())))) {}

double PopulationVector::mean_occupation() const {
    double m = 0.0;
    for (Eigen::Index n = 0; n < probs_.size(); ++n) m += static_cast<double>(n) * probs_[n];
    return m;
}

double PopulationVector::mean_energy(const EnergySpectrum& spectrum) const {
    if (spectrum.levels() != levels())
        throw Error(Errc::length_mismatch, "spectrum and population sizes differ");
    double m = 0.0;
    for (std::size_t n = 0; n < levels(); ++n) m += spectrum[n] * (*this)[n];
    return m;
}

PopulationVector PopulationVector::delta(std::size_t levels, std::size_t n) {
    if (n >= levels) throw Error(Errc::invalid_population, "delta level outside ladder");
    RealVector v = RealVector::Zero(static_cast<Eigen::Index>(levels));
    v[static_cast<Eigen::Index>(n)] = 1.0;
    return PopulationVector(std::move(v));
}

DensityOperator::DensityOperator(ComplexMatrix matrix, double psd_floor) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
        throw Error(Errc::invalid_density, "density operator must be a nonempty square matrix");
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol::hermiticity) {
        std::ostringstream os;
        os << "not Hermitian (max deviation " << herm << ")";
        throw Error(Errc::invalid_density, os.str());
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > tol::trace) {
        std::ostringstream os;
        os.precision(17);
        os << "trace " << tr.real() << " + " << tr.imag() << "i";
        throw Error(Errc::invalid_density, os.str());
    }
    const double lo = min_eigenvalue();
    if (lo < psd_floor) {
        std::ostringstream os;
        os << "smallest eigenvalue " << lo << " below " << psd_floor;
        throw Error(Errc::invalid_density, os.str());
    }
}

double DensityOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

LadderOperators make_ladder_operators(std::size_t levels) {
    const auto d = static_cast<Eigen::Index>(levels);
    LadderOperators ops{ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d),
                        ComplexMatrix::Zero(d, d)};
    for (Eigen::Index n = 0; n + 1 < d; ++n) ops.raise(n + 1, n) = 1.0;
    ops.lower = ops.raise.adjoint();
    ops.ground(0, 0) = 1.0;
    ops.top(d - 1, d - 1) = 1.0;
    return ops;
}

PopulationVector gaussian_population(double center, double width, std::size_t levels) {
    if (!(width > 0.0)) throw Error(Errc::degenerate_width, "width must be positive");
    if (levels < 1) throw Error(Errc::invalid_population, "need at least one level");
    std::vector<double> expo(levels);
    for (std::size_t n = 0; n < levels; ++n) {
        const double x = static_cast<double>(n) - center;
        expo[n] = -(x * x) / (2.0 * width * width);
    }
    // Shift by the maximum so very narrow widths do not underflow to zero.
    const double top = *std::max_element(expo.begin(), expo.end());
    std::vector<double> w(levels);
    for (std::size_t n = 0; n < levels; ++n) w[n] = std::exp(expo[n] - top);
    const double z = sorted_sum(w);
    RealVector p(static_cast<Eigen::Index>(levels));
    for (std::size_t n = 0; n < levels; ++n) p[static_cast<Eigen::Index>(n)] = w[n] / z;
    return PopulationVector(std::move(p));
}

ComplexMatrix diagonal_matrix(const RealVector& diag) {
    ComplexMatrix m = ComplexMatrix::Zero(diag.size(), diag.size());
    for (Eigen::Index n = 0; n < diag.size(); ++n) m(n, n) = diag[n];
    return m;
}

RealVector real_diagonal(const ComplexMatrix& m) { return m.diagonal().real(); }

DensityOperator embed_diagonal(const PopulationVector& pop) {
    return DensityOperator(diagonal_matrix(pop.values()));
}

DensityOperator dephase(const DensityOperator& rho) {
    return DensityOperator(diagonal_matrix(real_diagonal(rho.matrix())));
}

PopulationVector extract_populations(const DensityOperator& rho) {
    RealVector p = real_diagonal(rho.matrix());
    for (Eigen::Index n = 0; n < p.size(); ++n) {
        if (p[n] < tol::extract_floor) {
            std::ostringstream os;
            os << "diagonal entry " << p[n] << " at level " << n;
            throw Error(Errc::negative_population, os.str());
        }
    }
    return PopulationVector(std::move(p));
}

}  // namespace ewalk

namespace ewalk {

DensityOperator random_density_operator(std::size_t levels, std::mt19937_64& rng) {
    if (levels < 1) throw Error(Errc::invalid_density, "empty random state requested");
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto d = static_cast<Eigen::Index>(levels);
    ComplexMatrix g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = Complex(gauss(rng), gauss(rng));
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityOperator(std::move(rho));
}

}  // namespace ewalk
