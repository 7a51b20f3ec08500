#pragma once

// Collision-model embedding of the ladder walk. Each step couples the system
// to a fresh three-level ancilla (basis order +, 0, -) through a conditional
// shift and traces the ancilla out. Joint basis ordering is |n> (x) |c>, i.e.
// joint index 3 n + c.

#include <cstddef>

#include "ewalk/ladder.hpp"

namespace ewalk {

enum class Channel : std::size_t { plus = 0, zero = 1, minus = 2 };

constexpr std::size_t joint_index(std::size_t level, Channel c) noexcept {
    return 3 * level + static_cast<std::size_t>(c);
}

struct AncillaState {
    ComplexMatrix matrix;  // 3x3
    RateTriple rates;
    double mu = 0.0;

    double purity() const;
};

// r_{cc'} = (1 - mu) p_c delta_{cc'} + mu sqrt(p_c p_c')
AncillaState ancilla_state(const TransitionRates& rates, double mu);

struct CollisionUnitary {
    ComplexMatrix matrix;
    std::size_t levels = 0;
};

// Flip-flop shift |n,+> -> |n+1,->, |n,-> -> |n-1,+>, |n,0> -> |n,0>, closed
// by |0,-> -> |0,-> at the ground level and |N,+> -> |N,+> at the top.
CollisionUnitary build_collision_unitary(std::size_t levels);

class ChannelConfig {
public:
    ChannelConfig(TransitionRates rates, double mu, std::size_t levels);

    const TransitionRates& rates() const noexcept { return rates_; }
    const RateTriple& triple() const noexcept { return rates_.constant_triple(); }
    double mu() const noexcept { return mu_; }
    std::size_t levels() const noexcept { return levels_; }

    ChannelConfig with_mu(double mu) const { return ChannelConfig(rates_, mu, levels_); }

private:
    TransitionRates rates_;
    double mu_;
    std::size_t levels_;
};

// Partial trace over the ancilla of U (rho (x) rho_mu) U^dagger.
DensityOperator collision_step_dilated(const DensityOperator& rho, const ChannelConfig& cfg);

// Closed-form reduced map.
DensityOperator collision_step_closed(const DensityOperator& rho, const ChannelConfig& cfg);

// Phi_mu(rho) - Phi_0(rho).
ComplexMatrix coherent_part(const DensityOperator& rho, const ChannelConfig& cfg);

// rho_t ~ Phi_0^t(rho_0) + mu Sigma_t for a diagonal rho_0. The result may
// dip below zero at O(mu^2); anything under -1e-6 is rejected.
DensityOperator first_order_state(const PopulationVector& pop0, const ChannelConfig& cfg, std::size_t steps);

// Sigma_t = sum_{j<t} Phi_0^{t-1-j} Xi Phi_0^j (rho_0).
ComplexMatrix first_order_correction(const PopulationVector& pop0, const ChannelConfig& cfg, std::size_t steps);

// Matrix of Phi_mu on column-major vectorized operators, dimension (N+1)^2.
RealMatrix superoperator(const ChannelConfig& cfg);

// Eigenvalues within 1e-10 of 1, counted block by block over the strongly
// connected components of the sparsity graph of s.
int unit_eigenvalue_count(const RealMatrix& s);

// Unique trace-one fixed point of Phi_mu from the unit eigenvector of the
// superoperator.
DensityOperator channel_fixed_point(const ChannelConfig& cfg);

namespace detail {

// Unvalidated kernels used in trajectory loops.
ComplexMatrix apply_closed(const ComplexMatrix& rho, const RateTriple& r, double mu);
// Xi(rho) = sqrt(p+ p-) (S+ rho P0 + P0 rho S- + S- rho PN + PN rho S+)
ComplexMatrix coherence_injection(const ComplexMatrix& rho, const RateTriple& r);

}  // namespace detail

}  // namespace ewalk
