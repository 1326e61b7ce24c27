#include "ymwh/galerkin.hpp"

#include <algorithm>

#include "ymwh/errors.hpp"

namespace ymwh {

EvolState::EvolState(ChebSeries a_, ChebSeries a_dot_, double tau_, PhysParams p)
    : a(std::move(a_)), a_dot(std::move(a_dot_)), tau(tau_), params(p)
{
    const std::size_t N = std::max(a.order(), a_dot.order());
    a = a.resized(N);
    a_dot = a_dot.resized(N);
}

EvolState EvolState::at_rest(const ChebSeries& a, std::size_t N, PhysParams p)
{
    return EvolState(a.resized(N), ChebSeries(N), 0.0, p);
}

GalerkinRhs::GalerkinRhs(std::size_t order, double coupling)
    : coupling_(coupling), z_a_(order + 1), z_ad_(order + 1), w_(order + 1)
{
}

void GalerkinRhs::operator()(std::span<const double> a, std::span<const double> a_dot, std::span<double> out)
{
    const std::size_t n = z_a_.size();
    if (a.size() != n || a_dot.size() != n || out.size() != n) {
        throw PreconditionError("GalerkinRhs: coefficient vectors must have length N+1");
    }
    x_deriv_z_into(a, z_a_);
    x_deriv_z_into(a_dot, z_ad_);
    nonlinear_w_into(a, w_);
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k * k);
        out[k] = -a_dot[k] - (kk - coupling_) * a[k] - z_a_[k] - 2.0 * z_ad_[k] - coupling_ * w_[k];
    }
}

void rhs_into(std::span<const double> a, std::span<const double> a_dot, double coupling, std::span<double> out)
{
    GalerkinRhs f(a.size() - 1, coupling);
    f(a, a_dot, out);
}

ChebSeries rhs(const EvolState& state)
{
    ChebSeries out(state.order());
    rhs_into(state.a.coeffs(), state.a_dot.coeffs(), state.params.coupling(), out.coeffs());
    return out;
}

EnergyEvaluator::EnergyEvaluator(std::size_t order, double coupling, std::size_t quad_points)
    : order_(order), coupling_(coupling), rule_(gauss_legendre(quad_points == 0 ? 2 * order + 2 : quad_points))
{
    const std::size_t n = order_ + 1;
    const std::size_t q = rule_.nodes.size();
    t_table_.assign(q * n, 0.0);
    dt_table_.assign(q * n, 0.0);
    for (std::size_t i = 0; i < q; ++i) {
        const double x = rule_.nodes[i];
        double t_prev = 1.0, t_cur = x;      // T_0, T_1
        double u_prev = 1.0, u_cur = 2 * x;  // U_0, U_1
        for (std::size_t k = 0; k < n; ++k) {
            double tk, dtk;
            if (k == 0) {
                tk = 1.0;
                dtk = 0.0;
            } else if (k == 1) {
                tk = x;
                dtk = 1.0;
            } else {
                const double t_next = 2 * x * t_cur - t_prev;
                t_prev = t_cur;
                t_cur = t_next;
                tk = t_cur;
                // T_k' = k U_{k-1}
                if (k >= 3) {
                    const double u_next = 2 * x * u_cur - u_prev;
                    u_prev = u_cur;
                    u_cur = u_next;
                }
                dtk = static_cast<double>(k) * u_cur;
            }
            t_table_[i * n + k] = tk;
            dt_table_[i * n + k] = dtk;
        }
    }
}

BondiEnergy EnergyEvaluator::operator()(std::span<const double> a, std::span<const double> a_dot) const
{
    const std::size_t n = order_ + 1;
    const std::size_t m = std::min({n, a.size(), a_dot.size()});
    BondiEnergy out;
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
        const double x = rule_.nodes[i];
        const double* t = &t_table_[i * n];
        const double* dt = &dt_table_[i * n];
        double w = 0.0, wx = 0.0, wt = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            w += a[k] * t[k];
            wx += a[k] * dt[k];
            wt += a_dot[k] * t[k];
        }
        const double g = 1.0 - w * w;
        const double rho = 0.5 * (wt * wt + (1.0 - x * x) * wx * wx + 0.5 * coupling_ * g * g);
        out.energy += rule_.weights[i] * rho;
        out.kinetic += rule_.weights[i] * 0.5 * wt * wt;
    }
    const double left = eval_left(a_dot);
    const double right = eval_right(a_dot);
    out.flux_left = left * left;
    out.flux_right = right * right;
    return out;
}

BondiEnergy bondi_energy(const EvolState& state, std::size_t quad_points)
{
    const EnergyEvaluator eval(state.order(), state.params.coupling(), quad_points);
    return eval(state.a.coeffs(), state.a_dot.coeffs());
}

}  // namespace ymwh
