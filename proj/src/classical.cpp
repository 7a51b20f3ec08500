#include "ewalk/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ewalk {

namespace {

constexpr double kPowerIterationThreshold = 1e-13;
constexpr std::size_t kPowerIterationMax = 1'000'000;

double total_variation_raw(const RealVector& a, const RealVector& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

}  // namespace

TransitionMatrix::TransitionMatrix(RealMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
        throw Error(Errc::dimension_mismatch, "transition matrix must be square");
    const Eigen::Index d = matrix_.rows();
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            const double v = matrix_(m, n);
            if (!(v >= 0.0 && v <= 1.0))
                throw Error(Errc::invalid_rates, "transition matrix entry outside [0,1]");
            if (std::abs(m - n) > 1 && v != 0.0)
                throw Error(Errc::invalid_rates, "transition matrix is not tridiagonal");
        }
        if (std::abs(matrix_.col(n).sum() - 1.0) > tol::rate_sum) {
            std::ostringstream os;
            os << "column " << n << " sums to " << matrix_.col(n).sum();
            throw Error(Errc::invalid_rates, os.str());
        }
    }
}

PopulationVector TransitionMatrix::apply(const PopulationVector& pop) const {
    if (pop.levels() != levels()) throw Error(Errc::dimension_mismatch, "population size differs from matrix");
    return PopulationVector(RealVector(matrix_ * pop.values()));
}

RealVector classical_step_raw(const RealVector& pop, const TransitionRates& rates) {
    const Eigen::Index d = pop.size();
    RealVector out(d);
    if (d == 1) {
        out[0] = pop[0];
        return out;
    }
    const Eigen::Index top = d - 1;
    {
        const RateTriple& r0 = rates.at(0);
        out[0] = (r0.minus + r0.zero) * pop[0] + rates.at(1).minus * pop[1];
    }
    for (Eigen::Index n = 1; n < top; ++n) {
        const auto un = static_cast<std::size_t>(n);
        out[n] = rates.at(un - 1).plus * pop[n - 1] + rates.at(un).zero * pop[n] + rates.at(un + 1).minus * pop[n + 1];
    }
    {
        const auto ut = static_cast<std::size_t>(top);
        const RateTriple& rt = rates.at(ut);
        out[top] = rates.at(ut - 1).plus * pop[top - 1] + (rt.zero + rt.plus) * pop[top];
    }
    return out;
}

PopulationVector classical_step(const PopulationVector& pop, const TransitionRates& rates) {
    rates.check_levels(pop.levels());
    return PopulationVector(classical_step_raw(pop.values(), rates));
}

TransitionMatrix build_transition_matrix(const TransitionRates& rates, std::size_t levels) {
    rates.check_levels(levels);
    const auto d = static_cast<Eigen::Index>(levels);
    RealMatrix t = RealMatrix::Zero(d, d);
    for (Eigen::Index n = 0; n < d; ++n) {
        const RateTriple& r = rates.at(static_cast<std::size_t>(n));
        t(std::max<Eigen::Index>(n - 1, 0), n) += r.minus;
        t(n, n) += r.zero;
        t(std::min<Eigen::Index>(n + 1, d - 1), n) += r.plus;
    }
    return TransitionMatrix(std::move(t));
}

ComplexMatrix KrausSet::apply(const ComplexMatrix& rho) const {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : operators) out += k * rho * k.adjoint();
    return out;
}

ComplexMatrix KrausSet::completeness() const {
    if (operators.empty()) return {};
    const Eigen::Index d = operators.front().rows();
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (const auto& k : operators) s += k.adjoint() * k;
    return s;
}

KrausSet kraus_operators(const TransitionRates& rates, std::size_t levels) {
    const RateTriple& r = rates.constant_triple();
    if (levels < 2) throw Error(Errc::dimension_mismatch, "Kraus set needs at least 2 levels");
    const LadderOperators ops = make_ladder_operators(levels);
    const auto d = static_cast<Eigen::Index>(levels);

    KrausSet set;
    auto push = [&](double weight, ComplexMatrix m, const char* label) {
        if (weight == 0.0) return;
        set.operators.push_back(std::sqrt(weight) * m);
        set.labels.emplace_back(label);
    };
    push(r.minus, ops.ground, "K-b");
    push(r.minus, ops.lower, "K-");
    push(r.zero, ComplexMatrix::Identity(d, d), "K0");
    push(r.plus, ops.raise, "K+");
    push(r.plus, ops.top, "K+b");
    return set;
}

ComplexMatrix unitality_defect(const TransitionRates& rates, std::size_t levels) {
    const KrausSet set = kraus_operators(rates, levels);
    const auto d = static_cast<Eigen::Index>(levels);
    ComplexMatrix image = ComplexMatrix::Zero(d, d);
    for (const auto& k : set.operators) image += k * k.adjoint();
    return image - ComplexMatrix::Identity(d, d);
}

PopulationVector stationary_closed_form(const TransitionRates& rates, const EnergySpectrum& spectrum,
                                        StationaryForm form) {
    const std::size_t levels = spectrum.levels();
    rates.check_levels(levels);
    const auto d = static_cast<Eigen::Index>(levels);
    RealVector p(d);

    if (rates.is_constant()) {
        const RateTriple& r = rates.constant_triple();
        if (form == StationaryForm::infinite_ladder) {
            if (!(r.minus > r.plus))
                throw Error(Errc::not_normalizable, "infinite-ladder solution requires p- > p+");
            const double ratio = r.plus / r.minus;
            for (Eigen::Index n = 0; n < d; ++n) p[n] = (1.0 - ratio) * std::pow(ratio, static_cast<double>(n));
            return PopulationVector(std::move(p));
        }
        if (r.minus == 0.0) throw Error(Errc::not_normalizable, "p- = 0 leaves no downward transport");
    }

    // Product form p(n) ~ prod_{k<n} p+(k) / p-(k+1), accumulated in logs.
    std::vector<double> logw(levels, 0.0);
    for (std::size_t n = 1; n < levels; ++n) {
        const double up = rates.at(n - 1).plus;
        const double down = rates.at(n).minus;
        if (down == 0.0) {
            std::ostringstream os;
            os << "p-(" << n << ") = 0";
            throw Error(Errc::not_normalizable, os.str());
        }
        logw[n] = up == 0.0 ? -INFINITY : logw[n - 1] + std::log(up) - std::log(down);
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (std::size_t n = 0; n < levels; ++n) {
        p[static_cast<Eigen::Index>(n)] = std::exp(logw[n] - top);
        z += p[static_cast<Eigen::Index>(n)];
    }
    p /= z;
    return PopulationVector(std::move(p));
}

StationaryResult stationary_numeric(const TransitionMatrix& t) {
    const auto d = static_cast<Eigen::Index>(t.levels());
    RealVector v = RealVector::Constant(d, 1.0 / static_cast<double>(d));
    std::size_t it = 0;
    for (;;) {
        RealVector next = t.matrix() * v;
        const double change = total_variation_raw(next, v);
        v = std::move(next);
        ++it;
        if (change < kPowerIterationThreshold) break;
        if (it >= kPowerIterationMax)
            throw Error(Errc::no_convergence, "power iteration did not reach 1e-13 per sweep");
    }
    const bool unique = spectral_gap(t) >= 1e-12;
    return StationaryResult{PopulationVector(std::move(v)), it, unique};
}

double second_eigenvalue_modulus(const TransitionMatrix& t) {
    if (t.levels() < 2) return 0.0;
    Eigen::EigenSolver<RealMatrix> es(t.matrix(), false);
    std::vector<double> moduli;
    moduli.reserve(t.levels());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) moduli.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    return moduli[1];
}

double spectral_gap(const TransitionMatrix& t) { return 1.0 - second_eigenvalue_modulus(t); }

PopulationVector cesaro_average(std::span<const PopulationVector> trajectory) {
    if (trajectory.empty()) throw Error(Errc::empty_trajectory, "Cesaro average of an empty trajectory");
    const auto d = static_cast<Eigen::Index>(trajectory.front().levels());
    RealVector acc = RealVector::Zero(d);
    for (const auto& p : trajectory) {
        if (p.values().size() != d) throw Error(Errc::length_mismatch, "trajectory entries differ in size");
        acc += p.values();
    }
    acc /= static_cast<double>(trajectory.size());
    return PopulationVector(std::move(acc));
}

TransitionRates detailed_balance_rates(double beta, const EnergySpectrum& spectrum,
                                       std::span<const double> lazy_floor) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(Errc::infeasible_rates, "beta must be finite and nonnegative");
    const std::size_t levels = spectrum.levels();
    if (levels < 2) throw Error(Errc::infeasible_rates, "need at least 2 levels");
    if (lazy_floor.size() != levels) throw Error(Errc::rate_shape_mismatch, "lazy profile length differs from ladder");

    std::vector<double> boltzmann(levels);
    for (std::size_t n = 0; n < levels; ++n) {
        double gap = n + 1 < levels ? spectrum[n + 1] - spectrum[n] : spectrum[n] - spectrum[n - 1];
        if (spectrum.uniform_gap()) gap = *spectrum.uniform_gap();
        boltzmann[n] = std::exp(-beta * gap);
    }

    double c = INFINITY;
    for (std::size_t n = 0; n < levels; ++n) {
        if (!(lazy_floor[n] >= 0.0 && lazy_floor[n] <= 1.0))
            throw Error(Errc::infeasible_rates, "lazy profile outside [0,1]");
        c = std::min(c, (1.0 - lazy_floor[n]) / (1.0 + boltzmann[n]));
    }
    if (!(c > 0.0)) throw Error(Errc::infeasible_rates, "no positive transport scale fits the lazy profile");

    std::vector<RateTriple> triples(levels);
    for (std::size_t n = 0; n < levels; ++n) {
        const double up = c * boltzmann[n];
        triples[n] = RateTriple{up, 1.0 - up - c, c};
    }
    if (std::all_of(triples.begin(), triples.end(), [&](const RateTriple& r) { return r == triples.front(); }))
        return TransitionRates::constant(triples.front().plus, triples.front().zero, triples.front().minus);
    return TransitionRates::level_dependent(std::move(triples));
}

TransitionRates detailed_balance_rates(double beta, const EnergySpectrum& spectrum, double lazy_floor) {
    const std::vector<double> profile(spectrum.levels(), lazy_floor);
    return detailed_balance_rates(beta, spectrum, profile);
}

EffectiveTemperature effective_temperature(const TransitionRates& rates, double gap) {
    const RateTriple& r = rates.constant_triple();
    if (!(gap > 0.0)) throw Error(Errc::non_positive_gap, "gap must be positive");
    if (r.plus == 0.0) throw Error(Errc::zero_up_rate, "p+ = 0 corresponds to zero temperature");
    if (r.plus >= r.minus) throw Error(Errc::unbiased_rates, "effective temperature requires p- > p+");
    const double t = gap / std::log(r.minus / r.plus);
    return EffectiveTemperature{t, 1.0 / t};
}

std::vector<double> boundary_cumsum(std::span<const PopulationVector> trajectory) {
    if (trajectory.empty()) throw Error(Errc::empty_trajectory, "boundary sum of an empty trajectory");
    std::vector<double> out;
    out.reserve(trajectory.size());
    double s = 0.0;
    for (const auto& p : trajectory) {
        s += p[0];
        out.push_back(s);
    }
    return out;
}

std::vector<PopulationVector> classical_trajectory(const PopulationVector& pop0, const TransitionRates& rates,
                                                   std::size_t steps) {
    rates.check_levels(pop0.levels());
    std::vector<PopulationVector> out;
    out.reserve(steps + 1);
    out.push_back(pop0);
    for (std::size_t t = 0; t < steps; ++t) out.push_back(PopulationVector(classical_step_raw(out.back().values(), rates)));
    return out;
}

}  // namespace ewalk
