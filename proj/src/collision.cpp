#include "ewalk/collision.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "ewalk/classical.hpp"

namespace ewalk {

namespace {

constexpr double kUnitEigenvalueWindow = 1e-10;
constexpr double kFixedPointResidual = 1e-12;
constexpr double kFirstOrderFloor = -1e-6;

void check_dimension(const DensityOperator& rho, const ChannelConfig& cfg) {
    if (rho.dimension() != cfg.levels()) {
        std::ostringstream os;
        os << "state dimension " << rho.dimension() << " vs channel levels " << cfg.levels();
        throw Error(Errc::dimension_mismatch, os.str());
    }
}

// Strongly connected components of the directed graph j -> i for s(i, j) != 0.
// Ordering the indices by component puts s in block-triangular form, so its
// spectrum is the union of the spectra of the diagonal blocks.
std::vector<std::vector<Eigen::Index>> strong_components(const RealMatrix& s) {
    const Eigen::Index n = s.rows();
    std::vector<std::vector<Eigen::Index>> out_edges(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != j && s(i, j) != 0.0) out_edges[static_cast<std::size_t>(j)].push_back(i);

    // iterative Tarjan
    std::vector<Eigen::Index> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack;
    std::vector<std::pair<Eigen::Index, std::size_t>> calls;
    std::vector<std::vector<Eigen::Index>> components;
    Eigen::Index counter = 0;
    for (Eigen::Index root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] >= 0) continue;
        calls.push_back({root, 0});
        while (!calls.empty()) {
            auto& [v, next] = calls.back();
            const auto vi = static_cast<std::size_t>(v);
            if (next == 0 && index[vi] < 0) {
                index[vi] = low[vi] = counter++;
                stack.push_back(v);
                on_stack[vi] = true;
            }
            if (next < out_edges[vi].size()) {
                const Eigen::Index w = out_edges[vi][next++];
                const auto wi = static_cast<std::size_t>(w);
                if (index[wi] < 0) {
                    calls.push_back({w, 0});
                } else if (on_stack[wi]) {
                    low[vi] = std::min(low[vi], index[wi]);
                }
                continue;
            }
            if (low[vi] == index[vi]) {
                std::vector<Eigen::Index> comp;
                Eigen::Index w = -1;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = false;
                    comp.push_back(w);
                } while (w != v);
                components.push_back(std::move(comp));
            }
            const Eigen::Index finished = v;
            calls.pop_back();
            if (!calls.empty()) {
                const auto pi = static_cast<std::size_t>(calls.back().first);
                low[pi] = std::min(low[pi], low[static_cast<std::size_t>(finished)]);
            }
        }
    }
    return components;
}

}  // namespace

int unit_eigenvalue_count(const RealMatrix& s) {
    int unit = 0;
    for (const auto& comp : strong_components(s)) {
        const auto k = static_cast<Eigen::Index>(comp.size());
        RealMatrix block(k, k);
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b) block(a, b) = s(comp[a], comp[b]);
        Eigen::EigenSolver<RealMatrix> es(block, false);
        for (Eigen::Index i = 0; i < k; ++i)
            if (std::abs(es.eigenvalues()[i] - Complex(1.0, 0.0)) < kUnitEigenvalueWindow) ++unit;
    }
    return unit;
}

namespace {

double hermitian_trace_norm(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

double AncillaState::purity() const { return (matrix * matrix).trace().real(); }

AncillaState ancilla_state(const TransitionRates& rates, double mu) {
    const RateTriple& r = rates.constant_triple();
    if (!(mu >= 0.0 && mu <= 1.0)) {
        std::ostringstream os;
        os << "mu = " << mu << " outside [0,1]";
        throw Error(Errc::mu_out_of_range, os.str());
    }
    const double p[3] = {r.plus, r.zero, r.minus};
    ComplexMatrix m(3, 3);
    for (int c = 0; c < 3; ++c) {
        for (int cp = 0; cp < 3; ++cp) {
            const double coherent = mu * std::sqrt(p[c] * p[cp]);
            m(c, cp) = c == cp ? (1.0 - mu) * p[c] + coherent : coherent;
        }
    }
    return AncillaState{std::move(m), r, mu};
}

CollisionUnitary build_collision_unitary(std::size_t levels) {
    if (levels < 2) throw Error(Errc::dimension_mismatch, "collision unitary needs at least 2 levels");
    const std::size_t top = levels - 1;
    const auto dim = static_cast<Eigen::Index>(3 * levels);
    ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
    auto map = [&](std::size_t from, std::size_t to) {
        u(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) = 1.0;
    };
    for (std::size_t n = 0; n < levels; ++n) {
        map(joint_index(n, Channel::plus),
            n < top ? joint_index(n + 1, Channel::minus) : joint_index(n, Channel::plus));
        map(joint_index(n, Channel::zero), joint_index(n, Channel::zero));
        map(joint_index(n, Channel::minus),
            n >= 1 ? joint_index(n - 1, Channel::plus) : joint_index(n, Channel::minus));
    }
    return CollisionUnitary{std::move(u), levels};
}

ChannelConfig::ChannelConfig(TransitionRates rates, double mu, std::size_t levels)
    : rates_(std::move(rates)), mu_(mu), levels_(levels) {
    rates_.constant_triple();
    if (!(mu >= 0.0 && mu <= 1.0)) {
        std::ostringstream os;
        os << "mu = " << mu << " outside [0,1]";
        throw Error(Errc::mu_out_of_range, os.str());
    }
    if (levels < 2) throw Error(Errc::dimension_mismatch, "channel needs at least 2 levels");
}

namespace detail {

ComplexMatrix apply_closed(const ComplexMatrix& rho, const RateTriple& r, double mu) {
    const Eigen::Index d = rho.rows();
    const Eigen::Index n = d - 1;
    ComplexMatrix out = r.zero * rho;
    out.bottomRightCorner(n, n) += r.plus * rho.topLeftCorner(n, n);
    out.topLeftCorner(n, n) += r.minus * rho.bottomRightCorner(n, n);
    out(0, 0) += r.minus * rho(0, 0);
    out(n, n) += r.plus * rho(n, n);
    if (mu != 0.0) {
        const double c = mu * std::sqrt(r.plus * r.minus);
        out.col(0).tail(n) += c * rho.col(0).head(n);
        out.row(0).tail(n) += c * rho.row(0).head(n);
        out.col(n).head(n) += c * rho.col(n).tail(n);
        out.row(n).head(n) += c * rho.row(n).tail(n);
    }
    return out;
}

ComplexMatrix coherence_injection(const ComplexMatrix& rho, const RateTriple& r) {
    const Eigen::Index d = rho.rows();
    const Eigen::Index n = d - 1;
    const double c = std::sqrt(r.plus * r.minus);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    out.col(0).tail(n) += c * rho.col(0).head(n);
    out.row(0).tail(n) += c * rho.row(0).head(n);
    out.col(n).head(n) += c * rho.col(n).tail(n);
    out.row(n).head(n) += c * rho.row(n).tail(n);
    return out;
}

}  // namespace detail

DensityOperator collision_step_dilated(const DensityOperator& rho, const ChannelConfig& cfg) {
    check_dimension(rho, cfg);
    const auto d = static_cast<Eigen::Index>(cfg.levels());
    const AncillaState anc = ancilla_state(cfg.rates(), cfg.mu());
    const CollisionUnitary u = build_collision_unitary(cfg.levels());

    ComplexMatrix joint(3 * d, 3 * d);
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n) joint.block(3 * m, 3 * n, 3, 3) = rho.matrix()(m, n) * anc.matrix;

    const ComplexMatrix evolved = u.matrix * joint * u.matrix.adjoint();

    ComplexMatrix reduced = ComplexMatrix::Zero(d, d);
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n)
            for (Eigen::Index c = 0; c < 3; ++c) reduced(m, n) += evolved(3 * m + c, 3 * n + c);
    return DensityOperator(std::move(reduced));
}

DensityOperator collision_step_closed(const DensityOperator& rho, const ChannelConfig& cfg) {
    check_dimension(rho, cfg);
    return DensityOperator(detail::apply_closed(rho.matrix(), cfg.triple(), cfg.mu()));
}

ComplexMatrix coherent_part(const DensityOperator& rho, const ChannelConfig& cfg) {
    check_dimension(rho, cfg);
    return cfg.mu() * detail::coherence_injection(rho.matrix(), cfg.triple());
}

ComplexMatrix first_order_correction(const PopulationVector& pop0, const ChannelConfig& cfg, std::size_t steps) {
    if (pop0.levels() != cfg.levels()) throw Error(Errc::dimension_mismatch, "population size vs channel levels");
    const RateTriple& r = cfg.triple();
    const auto d = static_cast<Eigen::Index>(cfg.levels());
    ComplexMatrix classical = diagonal_matrix(pop0.values());
    ComplexMatrix sigma = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < steps; ++j) {
        sigma = detail::apply_closed(sigma, r, 0.0) + detail::coherence_injection(classical, r);
        classical = detail::apply_closed(classical, r, 0.0);
    }
    return sigma;
}

DensityOperator first_order_state(const PopulationVector& pop0, const ChannelConfig& cfg, std::size_t steps) {
    if (pop0.levels() != cfg.levels()) throw Error(Errc::dimension_mismatch, "population size vs channel levels");
    const RateTriple& r = cfg.triple();
    ComplexMatrix classical = diagonal_matrix(pop0.values());
    for (std::size_t j = 0; j < steps; ++j) classical = detail::apply_closed(classical, r, 0.0);
    ComplexMatrix state = classical;
    if (cfg.mu() != 0.0) state += cfg.mu() * first_order_correction(pop0, cfg, steps);
    return DensityOperator(std::move(state), kFirstOrderFloor);
}

RealMatrix superoperator(const ChannelConfig& cfg) {
    const auto d = static_cast<Eigen::Index>(cfg.levels());
    const RateTriple& r = cfg.triple();
    RealMatrix s(d * d, d * d);
    ComplexMatrix basis = ComplexMatrix::Zero(d, d);
    for (Eigen::Index n = 0; n < d; ++n) {
        for (Eigen::Index m = 0; m < d; ++m) {
            basis(m, n) = 1.0;
            const ComplexMatrix image = detail::apply_closed(basis, r, cfg.mu());
            basis(m, n) = 0.0;
            s.col(m + n * d) = Eigen::Map<const Eigen::VectorXcd>(image.data(), d * d).real();
        }
    }
    return s;
}

DensityOperator channel_fixed_point(const ChannelConfig& cfg) {
    const RateTriple& r = cfg.triple();
    if (!(r.minus > r.plus)) throw Error(Errc::unbiased_rates, "fixed point extraction requires p- > p+");
    const auto d = static_cast<Eigen::Index>(cfg.levels());
    const RealMatrix s = superoperator(cfg);

    const int unit = unit_eigenvalue_count(s);
    if (unit == 0) throw Error(Errc::no_unit_eigenvalue, "superoperator has no eigenvalue at 1");
    if (unit > 1) {
        std::ostringstream os;
        os << unit << " eigenvalues within 1e-10 of 1";
        throw Error(Errc::non_unique_fixed_point, os.str());
    }

    // Null vector of (S - 1) normalized to unit trace: the first diagonal
    // row is redundant under trace preservation and is replaced by the trace.
    RealMatrix a = s - RealMatrix::Identity(d * d, d * d);
    a.row(0).setZero();
    for (Eigen::Index m = 0; m < d; ++m) a(0, m + m * d) = 1.0;
    RealVector b = RealVector::Zero(d * d);
    b[0] = 1.0;
    const RealVector x = a.fullPivLu().solve(b);

    RealMatrix fixed = Eigen::Map<const RealMatrix>(x.data(), d, d);
    fixed = 0.5 * (fixed + fixed.transpose()).eval();
    ComplexMatrix rho = fixed.cast<Complex>();

    const double residual = hermitian_trace_norm(detail::apply_closed(rho, r, cfg.mu()) - rho);
    if (residual >= kFixedPointResidual) {
        std::ostringstream os;
        os << "fixed point residual " << residual;
        throw Error(Errc::no_convergence, os.str());
    }
    return DensityOperator(std::move(rho));
}

}  // namespace ewalk
