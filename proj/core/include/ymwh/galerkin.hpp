#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ymwh/chebyshev.hpp"
#include "ymwh/params.hpp"

namespace ymwh {

/// Phase-space point of the truncated coefficient system: a_n(tau) and
/// their tau-derivatives, both of order N.
struct EvolState {
    ChebSeries a;
    ChebSeries a_dot;
    double tau = 0.0;
    PhysParams params;

    EvolState(ChebSeries a_, ChebSeries a_dot_, double tau_, PhysParams p);

    /// Rest state (a_dot = 0) with the given coefficients, padded to order N.
    static EvolState at_rest(const ChebSeries& a, std::size_t N, PhysParams p);

    std::size_t order() const noexcept { return a.order(); }
};

/// Second derivatives of the coefficients,
///   a''_n = -a'_n - (n^2 - l(l+1)) a_n - z_n(a) - 2 z_n(a') - l(l+1) w_n(a),
/// with every product truncated at n = N.
ChebSeries rhs(const EvolState& state);

/// Raw kernel: a, a_dot and the output all have length N+1.
void rhs_into(std::span<const double> a, std::span<const double> a_dot, double coupling, std::span<double> out);

/// rhs_into with preallocated scratch space for a fixed order, for use
/// inside time integrators. Not safe for concurrent use of one instance.
class GalerkinRhs {
public:
    GalerkinRhs(std::size_t order, double coupling);
    void operator()(std::span<const double> a, std::span<const double> a_dot, std::span<double> out);
    std::size_t order() const noexcept { return z_a_.size() - 1; }

private:
    double coupling_;
    std::vector<double> z_a_;
    std::vector<double> z_ad_;
    std::vector<double> w_;
};

struct BondiEnergy {
    double energy = 0.0;
    double flux_left = 0.0;   // (dW/dtau)^2 at x = -1
    double flux_right = 0.0;  // (dW/dtau)^2 at x = +1
    double kinetic = 0.0;     // (1/2) int (dW/dtau)^2 dx
};

/// Energy on a hyperboloidal slice and the two boundary fluxes, so that
/// dE/dtau = -(flux_left + flux_right). `quad_points` = 0 selects 2N+2
/// Gauss-Legendre nodes, exact for the integrand.
BondiEnergy bondi_energy(const EvolState& state, std::size_t quad_points = 0);

/// Reusable evaluator: caches the quadrature rule and the T_n table at the
/// nodes for a fixed truncation order.
class EnergyEvaluator {
public:
    EnergyEvaluator(std::size_t order, double coupling, std::size_t quad_points = 0);
    BondiEnergy operator()(std::span<const double> a, std::span<const double> a_dot) const;

private:
    std::size_t order_;
    double coupling_;
    QuadratureRule rule_;
    std::vector<double> t_table_;   // T_n(x_q), row-major by node
    std::vector<double> dt_table_;  // T_n'(x_q)
};

}  // namespace ymwh
