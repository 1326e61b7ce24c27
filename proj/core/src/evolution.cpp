#include "ymwh/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "ode_support.hpp"
#include "ymwh/errors.hpp"
#include "ymwh/spectra.hpp"

namespace ymwh {

namespace {

using State = std::vector<double>;

class NonlinearSystem {
public:
    NonlinearSystem(std::size_t N, double coupling) : n1_(N + 1), f_(N, coupling) {}

    void operator()(const State& y, State& dydt, double /*t*/)
    {
        const std::span<const double> a(y.data(), n1_);
        const std::span<const double> a_dot(y.data() + n1_, n1_);
        std::copy(a_dot.begin(), a_dot.end(), dydt.begin());
        f_(a, a_dot, std::span<double>(dydt.data() + n1_, n1_));
        const double left = eval_left(a_dot);
        const double right = eval_right(a_dot);
        dydt[2 * n1_] = left * left + right * right;
    }

private:
    std::size_t n1_;
    GalerkinRhs f_;
};

class LinearSystem {
public:
    LinearSystem(PencilMatrices m) : m_(std::move(m)), n1_(static_cast<std::size_t>(m_.A.rows())) {}

    void operator()(const State& y, State& dydt, double /*t*/) const
    {
        const auto n = static_cast<Eigen::Index>(n1_);
        Eigen::Map<const Eigen::VectorXd> u(y.data(), n);
        Eigen::Map<const Eigen::VectorXd> u_dot(y.data() + n, n);
        Eigen::Map<Eigen::VectorXd>(dydt.data(), n) = u_dot;
        Eigen::Map<Eigen::VectorXd>(dydt.data() + n, n).noalias() = -m_.A * u - m_.B * u_dot;
    }

private:
    PencilMatrices m_;
    std::size_t n1_;
};

/// Collects samples and checkpoints while the integrator runs.
class Recorder {
public:
    Recorder(const EvolConfig& config, PhysParams params, bool linearized, double tau0)
        : config_(config), params_(params), n1_(config.N + 1), tau0_(tau0)
    {
        traj_.params = params;
        traj_.N = config.N;
        traj_.linearized = linearized;
        traj_.observation_points = config.observation_points;
        if (config.coefficients.empty()) {
            for (std::size_t i = 0; i < n1_; ++i) traj_.coefficient_index.push_back(i);
        } else {
            traj_.coefficient_index = config.coefficients;
        }
        if (!linearized && config.record_energy) energy_.emplace(config.N, params.coupling());
    }

    /// Stores the sample at time t; returns true when the stop predicate fired.
    bool record(const State& y, double t)
    {
        const std::span<const double> a(y.data(), n1_);
        const std::span<const double> a_dot(y.data() + n1_, n1_);
        traj_.times.push_back(t);

        std::vector<double> c;
        c.reserve(traj_.coefficient_index.size());
        for (std::size_t idx : traj_.coefficient_index) c.push_back(a[idx]);
        traj_.coefficients.push_back(std::move(c));

        std::vector<double> f;
        std::vector<double> fd;
        for (double x : traj_.observation_points) {
            f.push_back(eval_series(a, x));
            fd.push_back(eval_series(a_dot, x));
        }
        traj_.field.push_back(std::move(f));
        traj_.field_dot.push_back(std::move(fd));

        if (energy_) {
            const BondiEnergy e = (*energy_)(a, a_dot);
            traj_.energy.push_back(e.energy);
            traj_.flux_left.push_back(e.flux_left);
            traj_.flux_right.push_back(e.flux_right);
            traj_.kinetic.push_back(e.kinetic);
            traj_.radiated.push_back(y[2 * n1_]);
        }

        const bool want_checkpoint = config_.checkpoint_interval > 0.0 &&
                                     t - tau0_ >= next_checkpoint_ * config_.checkpoint_interval - 1e-9;
        if (want_checkpoint || config_.stop) {
            EvolState s = to_state(y, t);
            if (want_checkpoint) {
                traj_.checkpoints.push_back(s);
                ++next_checkpoint_;
            }
            if (config_.stop && config_.stop(s)) {
                traj_.stopped_early = true;
                return true;
            }
        }
        return false;
    }

    EvolState to_state(const State& y, double t) const
    {
        ChebSeries a(std::vector<double>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n1_)));
        ChebSeries a_dot(std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(n1_),
                                             y.begin() + static_cast<std::ptrdiff_t>(2 * n1_)));
        return EvolState(std::move(a), std::move(a_dot), t, params_);
    }

    Trajectory finish(const State& y, double t)
    {
        traj_.final_state = to_state(y, t);
        return std::move(traj_);
    }

private:
    const EvolConfig& config_;
    PhysParams params_;
    std::size_t n1_;
    double tau0_;
    std::size_t next_checkpoint_ = 0;
    std::optional<EnergyEvaluator> energy_;
    Trajectory traj_;
};

std::vector<double> sample_times(double tau0, const EvolConfig& config)
{
    std::vector<double> times;
    const double span = config.tau_end - tau0;
    const auto K = static_cast<std::size_t>(std::floor(span / config.stride + 1e-9));
    times.reserve(K + 2);
    for (std::size_t k = 0; k <= K; ++k) times.push_back(tau0 + static_cast<double>(k) * config.stride);
    if (config.tau_end - times.back() > 1e-9 * config.stride) times.push_back(config.tau_end);
    return times;
}

template <class System>
Trajectory integrate(System& sys, State y, double tau0, const EvolConfig& config, Recorder& rec)
{
    const detail::FlushDenormals ftz;
    const auto times = sample_times(tau0, config);
    double t = tau0;
    if (rec.record(y, t)) return rec.finish(y, t);

    if (config.stepping == Stepping::adaptive) {
        detail::Rkf78Driver<State> driver(config.atol, config.rtol, std::min(1e-3, config.stride));
        for (std::size_t k = 1; k < times.size(); ++k) {
            const double dt_min = 1e-12 * std::max(1.0, std::abs(times[k]));
            driver.advance(sys, y, t, times[k], dt_min, "evolve");
            if (rec.record(y, t)) break;
        }
    } else {
        boost::numeric::odeint::runge_kutta4<State> stepper;
        const double n2 = static_cast<double>(config.N * config.N);
        const double dt_nominal = config.dt > 0.0 ? config.dt : 0.5 / std::max(1.0, n2);
        for (std::size_t k = 1; k < times.size(); ++k) {
            const double interval = times[k] - t;
            const auto sub = static_cast<std::size_t>(std::ceil(interval / dt_nominal - 1e-9));
            const double h = interval / static_cast<double>(std::max<std::size_t>(sub, 1));
            for (std::size_t s = 0; s < std::max<std::size_t>(sub, 1); ++s) {
                stepper.do_step(sys, y, t, h);
                t += h;
            }
            t = times[k];
            if (!detail::all_finite(y)) throw BlowupError("evolve: nonfinite state", times[k - 1]);
            if (rec.record(y, t)) break;
        }
    }
    return rec.finish(y, t);
}

void check_initial(const EvolState& s, std::size_t N)
{
    const double tail = std::max(s.a.resized(N).tail_ratio(), s.a_dot.resized(N).tail_ratio());
    const bool dropped = s.order() > N && (s.a.resized(N).resized(s.order()) != s.a ||
                                           s.a_dot.resized(N).resized(s.order()) != s.a_dot);
    if (tail > 1e-8 || dropped) {
        std::ostringstream msg;
        msg << "evolve: initial data not resolved at N = " << N << " (tail ratio " << tail << ")";
        warn(msg.str());
    }
}

}  // namespace

void EvolConfig::validate(double tau_start) const
{
    if (N < 1) throw PreconditionError("evolve: truncation order N must be at least 1");
    if (!(tau_end > 0.0) || !(tau_end > tau_start)) throw PreconditionError("evolve: tau_end must exceed the start time");
    if (!(stride > 0.0)) throw PreconditionError("evolve: stride must be positive");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw PreconditionError("evolve: tolerances must be positive");
    if (dt < 0.0) throw PreconditionError("evolve: dt must be nonnegative");
    for (double x : observation_points) {
        if (!(std::abs(x) <= 1.0)) throw DomainError("evolve: observation points must lie in [-1, 1]");
    }
    for (std::size_t n : coefficients) {
        if (n > N) throw PreconditionError("evolve: recorded coefficient index exceeds N");
    }
}

std::vector<double> Trajectory::coefficient_series(std::size_t n) const
{
    const auto it = std::find(coefficient_index.begin(), coefficient_index.end(), n);
    if (it == coefficient_index.end()) throw PreconditionError("trajectory: coefficient was not recorded");
    const auto i = static_cast<std::size_t>(it - coefficient_index.begin());
    std::vector<double> out;
    out.reserve(coefficients.size());
    for (const auto& row : coefficients) out.push_back(row[i]);
    return out;
}

std::vector<double> Trajectory::field_series(std::size_t j) const
{
    if (j >= observation_points.size()) throw PreconditionError("trajectory: no such observation point");
    std::vector<double> out;
    out.reserve(field.size());
    for (const auto& row : field) out.push_back(row[j]);
    return out;
}

std::vector<double> Trajectory::field_dot_series(std::size_t j) const
{
    if (j >= observation_points.size()) throw PreconditionError("trajectory: no such observation point");
    std::vector<double> out;
    out.reserve(field_dot.size());
    for (const auto& row : field_dot) out.push_back(row[j]);
    return out;
}

std::size_t Trajectory::observation_index(double x) const
{
    if (observation_points.empty()) throw PreconditionError("trajectory: no observation points");
    std::size_t best = 0;
    for (std::size_t j = 1; j < observation_points.size(); ++j) {
        if (std::abs(observation_points[j] - x) < std::abs(observation_points[best] - x)) best = j;
    }
    return best;
}

Trajectory evolve(const EvolState& initial, const EvolConfig& config)
{
    config.validate(initial.tau);
    check_initial(initial, config.N);
    const std::size_t n1 = config.N + 1;
    State y(2 * n1 + 1, 0.0);
    const ChebSeries a = initial.a.resized(config.N);
    const ChebSeries a_dot = initial.a_dot.resized(config.N);
    std::copy(a.coeffs().begin(), a.coeffs().end(), y.begin());
    std::copy(a_dot.coeffs().begin(), a_dot.coeffs().end(), y.begin() + static_cast<std::ptrdiff_t>(n1));

    NonlinearSystem sys(config.N, initial.params.coupling());
    Recorder rec(config, initial.params, false, initial.tau);
    return integrate(sys, std::move(y), initial.tau, config, rec);
}

Trajectory linearized_evolve(const ChebSeries& background, const EvolState& perturbation, const EvolConfig& config)
{
    config.validate(perturbation.tau);
    check_initial(perturbation, config.N);
    const std::size_t n1 = config.N + 1;
    State y(2 * n1, 0.0);
    const ChebSeries u = perturbation.a.resized(config.N);
    const ChebSeries u_dot = perturbation.a_dot.resized(config.N);
    std::copy(u.coeffs().begin(), u.coeffs().end(), y.begin());
    std::copy(u_dot.coeffs().begin(), u_dot.coeffs().end(), y.begin() + static_cast<std::ptrdiff_t>(n1));

    LinearSystem sys(pencil_matrices(background, perturbation.params, config.N));
    Recorder rec(config, perturbation.params, true, perturbation.tau);
    return integrate(sys, std::move(y), perturbation.tau, config, rec);
}

double energy_balance_residual(const Trajectory& traj, BalanceMethod method)
{
    const auto& e = traj.energy;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        double flux = 0.0;
        if (method == BalanceMethod::integrated) {
            flux = traj.radiated[k + 1] - traj.radiated[k];
        } else {
            const double h = traj.times[k + 1] - traj.times[k];
            flux = 0.5 * h *
                   (traj.flux_left[k] + traj.flux_right[k] + traj.flux_left[k + 1] + traj.flux_right[k + 1]);
        }
        worst = std::max(worst, std::abs(e[k + 1] - e[k] + flux));
    }
    return worst;
}

double max_energy_increase(const Trajectory& traj)
{
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < traj.energy.size(); ++k) {
        worst = std::max(worst, traj.energy[k + 1] - traj.energy[k]);
    }
    return worst;
}

}  // namespace ymwh
