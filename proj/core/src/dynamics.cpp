#include "ymwh/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ymwh/errors.hpp"
#include "ymwh/galerkin.hpp"

namespace ymwh {

namespace {

ChebSeries constant_series(double value, std::size_t N) { return ChebSeries::unit(0, N, value); }

/// Series of a profile at order N, computed at a higher order first so the
/// truncated coefficients are not aliased.
ChebSeries profile_series(const StaticProfile& profile, std::size_t N)
{
    if (profile.kind == StaticKind::ground) return constant_series(profile.w_inf, N);
    if (profile.kind == StaticKind::star) return ChebSeries(N);
    return to_cheb(profile, std::max<std::size_t>(N, 80)).resized(N);
}

ChebSeries row_series(const Trajectory& traj, std::size_t k)
{
    if (traj.coefficient_index.size() != traj.N + 1) {
        throw PreconditionError("trajectory: all coefficients must be recorded for distances");
    }
    return ChebSeries(traj.coefficients[k]);
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

std::vector<double> slice(const std::vector<double>& v, std::size_t begin, std::size_t end)
{
    return {v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end)};
}

}  // namespace

std::vector<CatalogueEntry> static_catalogue(PhysParams params, std::size_t N, const StaticOptions& options)
{
    std::vector<CatalogueEntry> out;
    out.push_back({"W0", constant_series(1.0, N), 0.0});
    out.push_back({"-W0", constant_series(-1.0, N), 0.0});
    out.push_back({"W*", ChebSeries(N), 0.5 * params.coupling()});
    const int n_max = params.is_integer() ? static_cast<int>(std::lround(params.ell())) - 1 : params.floor_strict();
    std::optional<double> upper_even;
    std::optional<double> upper_odd;
    for (int n = 1; n <= n_max; ++n) {
        auto& upper = (n % 2 == 0) ? upper_even : upper_odd;
        const StaticProfile p = find_static(params, n, options, upper);
        upper = p.shoot;
        const ChebSeries s = profile_series(p, N);
        out.push_back({p.label(), s, p.energy});
        out.push_back({p.negated().label(), -s, p.energy});
    }
    return out;
}

Endstate classify_endstate(const EvolState& state, const std::vector<CatalogueEntry>& catalogue, double tol)
{
    Endstate best;
    best.distance = std::numeric_limits<double>::infinity();
    std::string label;
    for (const auto& entry : catalogue) {
        const double d = std::sqrt(std::max(0.0, l2_distance_squared(state.a, entry.series)));
        if (d < best.distance) {
            best.distance = d;
            label = entry.label;
        }
    }
    best.kinetic = bondi_energy(state).kinetic;
    best.label = best.distance <= tol ? label : "undecided";
    return best;
}

Endstate classify_endstate(const Trajectory& trajectory, const std::vector<CatalogueEntry>& catalogue, double tol)
{
    if (!trajectory.final_state) throw PreconditionError("classify_endstate: trajectory has no final state");
    return classify_endstate(*trajectory.final_state, catalogue, tol);
}

std::vector<double> distance_series(const Trajectory& trajectory, const ChebSeries& target)
{
    std::vector<double> d;
    d.reserve(trajectory.times.size());
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        d.push_back(std::sqrt(std::max(0.0, l2_distance_squared(row_series(trajectory, k), target))));
    }
    return d;
}

Family even_c_family()
{
    return {"even-c", Parity::even, [](double c, std::size_t N, PhysParams p) {
                ChebSeries a(std::max<std::size_t>(N, 2));
                a.at(0) = -1.0;
                a.at(2) = c;
                return EvolState::at_rest(a, N, p);
            }};
}

Family symmetric_even_family()
{
    return {"symmetric-even", Parity::even, [](double c, std::size_t N, PhysParams p) {
                return EvolState::at_rest(ChebSeries::unit(2, std::max<std::size_t>(N, 2), c), N, p);
            }};
}

Family odd_c_family()
{
    return {"odd-c", Parity::odd, [](double c, std::size_t N, PhysParams p) {
                ChebSeries a(std::max<std::size_t>(N, 3));
                a.at(1) = c;
                a.at(3) = 1.0;
                return EvolState::at_rest(a, N, p);
            }};
}

Family scaled_family(std::string name, std::vector<std::pair<std::size_t, double>> coefficients)
{
    bool odd = true;
    for (const auto& [n, v] : coefficients) {
        if (v != 0.0 && n % 2 == 0) odd = false;
    }
    return {std::move(name), odd ? Parity::odd : Parity::even,
            [coefficients](double c, std::size_t N, PhysParams p) {
                std::size_t order = N;
                for (const auto& entry : coefficients) order = std::max(order, entry.first);
                ChebSeries a(order);
                for (const auto& [n, v] : coefficients) a.at(n) += c * v;
                return EvolState::at_rest(a, N, p);
            }};
}

double lowest_static_energy(PhysParams params, const StaticOptions& options)
{
    double e = 0.5 * params.coupling();
    const int n_max = params.is_integer() ? static_cast<int>(std::lround(params.ell())) - 1 : params.floor_strict();
    std::optional<double> upper_even;
    std::optional<double> upper_odd;
    for (int n = 1; n <= n_max; ++n) {
        auto& upper = (n % 2 == 0) ? upper_even : upper_odd;
        const StaticProfile p = find_static(params, n, options, upper);
        upper = p.shoot;
        e = std::min(e, p.energy);
    }
    return e;
}

namespace {

/// Probe configuration: light recording, decision by the energy barrier.
struct ProbeRun {
    Probe probe;
    Trajectory trajectory;
};

ProbeRun run_probe(const Family& family, double c, PhysParams params, const BisectConfig& config, double barrier,
                   bool full, double extra_time)
{
    EvolConfig ec = config.evol;
    ec.tau_end = config.tau_max;
    if (!full) {
        ec.coefficients = {0};
        ec.observation_points = {};
        ec.record_energy = false;
        ec.checkpoint_interval = 0.0;
    }
    const EnergyEvaluator energy(ec.N, params.coupling());
    Probe probe{c, 0, 0.0};
    ec.stop = [&](const EvolState& s) {
        if (probe.sign == 0) {
            const double a0 = s.a[0];
            if (std::abs(a0) > config.sign_threshold && energy(s.a.coeffs(), s.a_dot.coeffs()).energy < barrier) {
                probe.sign = sign_of(a0);
                probe.decided_at = s.tau;
            }
            return probe.sign != 0 && extra_time <= 0.0;
        }
        return s.tau >= probe.decided_at + extra_time;
    };
    Trajectory traj = evolve(family.make(c, ec.N, params), ec);
    if (probe.sign == 0) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "bisect: endstate for c = " << c << " undecided at tau = " << config.tau_max;
        throw ResolutionError(msg.str());
    }
    return {probe, std::move(traj)};
}

double barrier_of(PhysParams params, const BisectConfig& config)
{
    return config.energy_barrier ? *config.energy_barrier : lowest_static_energy(params);
}

}  // namespace

Probe endstate_sign(const Family& family, double c, PhysParams params, const BisectConfig& config)
{
    return run_probe(family, c, params, config, barrier_of(params, config), false, 0.0).probe;
}

std::vector<CatalogueEntry> intermediate_candidates(Parity parity, PhysParams params, std::size_t N)
{
    std::vector<CatalogueEntry> out;
    out.push_back({"W*", ChebSeries(N), 0.5 * params.coupling()});
    const int n = parity == Parity::even ? 2 : 3;
    const bool exists = params.is_integer() ? std::lround(params.ell()) > n : params.ell() > n;
    if (exists) {
        std::optional<double> upper;
        if (n == 3) upper = find_static(params, 1).shoot;
        const StaticProfile p = find_static(params, n, {}, upper);
        const ChebSeries s = profile_series(p, N);
        out.push_back({p.label(), s, p.energy});
        out.push_back({p.negated().label(), -s, p.energy});
    }
    return out;
}

std::pair<std::string, double> closest_approach(const Trajectory& trajectory,
                                                const std::vector<CatalogueEntry>& candidates)
{
    std::pair<std::string, double> best{"undecided", std::numeric_limits<double>::infinity()};
    for (const auto& c : candidates) {
        const auto d = distance_series(trajectory, c.series);
        const double m = *std::min_element(d.begin(), d.end());
        if (m < best.second) best = {c.label, m};
    }
    return best;
}

CriticalResult bisect_critical(const Family& family, PhysParams params, double c_lo, double c_hi, int digits,
                               const BisectConfig& config)
{
    if (!(c_hi > c_lo)) throw PreconditionError("bisect: empty parameter range");
    if (digits < 1) throw PreconditionError("bisect: digits must be positive");
    const double barrier = barrier_of(params, config);

    CriticalResult r;
    r.family = family.name;
    r.params = params;
    const Probe lo = run_probe(family, c_lo, params, config, barrier, false, 0.0).probe;
    const Probe hi = run_probe(family, c_hi, params, config, barrier, false, 0.0).probe;
    r.probes = {lo, hi};
    if (lo.sign == hi.sign) {
        throw NotSeparatingError("bisect: both ends of the range reach the same endstate");
    }
    r.c_lo = c_lo;
    r.c_hi = c_hi;
    r.sign_lo = lo.sign;
    r.sign_hi = hi.sign;

    const double target = std::pow(10.0, -digits);
    while (r.halvings < config.max_halvings) {
        const double scale = std::max(std::abs(r.c_lo), std::abs(r.c_hi));
        if (r.c_hi - r.c_lo <= target * (scale > 0.0 ? scale : 1.0)) break;
        const double mid = r.c_lo + 0.5 * (r.c_hi - r.c_lo);
        if (mid <= r.c_lo || mid >= r.c_hi) break;
        const Probe p = run_probe(family, mid, params, config, barrier, false, 0.0).probe;
        r.probes.push_back(p);
        if (p.sign == r.sign_lo) {
            r.c_lo = mid;
        } else {
            r.c_hi = mid;
        }
        ++r.halvings;
    }

    if (config.run_final_pair) {
        r.run_lo = run_probe(family, r.c_lo, params, config, barrier, true, config.tail_time).trajectory;
        r.run_hi = run_probe(family, r.c_hi, params, config, barrier, true, config.tail_time).trajectory;
        const auto candidates = intermediate_candidates(family.parity, params, config.evol.N);
        const auto a = closest_approach(*r.run_lo, candidates);
        const auto b = closest_approach(*r.run_hi, candidates);
        const auto& best = a.second <= b.second ? a : b;
        r.intermediate = best.first;
        r.intermediate_distance = best.second;
    }
    return r;
}

ScalingResult fit_lifetime_scaling(const std::vector<std::pair<double, double>>& samples, double gamma)
{
    if (samples.size() < 3) throw InsufficientDataError("lifetime scaling: fewer than 3 samples");
    double xm = 0.0;
    double ym = 0.0;
    for (const auto& [o, t] : samples) {
        if (!(o > 0.0)) throw PreconditionError("lifetime scaling: offsets must be nonzero");
        xm += -std::log(o);
        ym += t;
    }
    const auto n = static_cast<double>(samples.size());
    xm /= n;
    ym /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [o, t] : samples) {
        const double x = -std::log(o) - xm;
        sxx += x * x;
        sxy += x * (t - ym);
    }
    if (!(sxx > 0.0)) throw InsufficientDataError("lifetime scaling: offsets do not vary");
    ScalingResult r;
    r.slope = sxy / sxx;
    r.intercept = ym - r.slope * xm;
    r.predicted = 1.0 / gamma;
    r.samples = samples;
    return r;
}

ScalingResult lifetime_scaling(const Family& family, PhysParams params, double c_star,
                               const std::vector<double>& offsets, const ChebSeries& attractor, double gamma,
                               double delta, const BisectConfig& config)
{
    if (offsets.size() < 3) throw PreconditionError("lifetime scaling: need at least 3 offsets");
    double omin = std::numeric_limits<double>::infinity();
    double omax = 0.0;
    for (double o : offsets) {
        if (o == 0.0) throw PreconditionError("lifetime scaling: offsets must be nonzero");
        omin = std::min(omin, std::abs(o));
        omax = std::max(omax, std::abs(o));
    }
    if (omax / omin < 1e3 * (1.0 - 1e-9)) throw PreconditionError("lifetime scaling: offsets span fewer than 3 decades");

    const double barrier = barrier_of(params, config);
    const ChebSeries target = attractor.resized(config.evol.N);
    std::vector<std::pair<double, double>> samples;
    for (double o : offsets) {
        EvolConfig ec = config.evol;
        ec.tau_end = config.tau_max;
        ec.stride = config.evol.stride;
        ec.coefficients = {0};
        ec.observation_points = {};
        ec.record_energy = false;
        ec.checkpoint_interval = 0.0;
        const EnergyEvaluator energy(ec.N, params.coupling());
        double inside = 0.0;
        double last = std::numeric_limits<double>::quiet_NaN();
        bool was_inside = false;
        bool decided = false;
        ec.stop = [&](const EvolState& s) {
            const bool in = l2_distance_squared(s.a, target) < delta * delta;
            if (!std::isnan(last) && in && was_inside) inside += s.tau - last;
            last = s.tau;
            was_inside = in;
            if (std::abs(s.a[0]) > config.sign_threshold &&
                energy(s.a.coeffs(), s.a_dot.coeffs()).energy < barrier) {
                decided = true;
            }
            return decided;
        };
        evolve(family.make(c_star + o, ec.N, params), ec);
        if (!(inside > 0.0)) {
            std::ostringstream msg;
            msg << "lifetime scaling: run with offset " << o << " never entered the neighbourhood";
            throw ScalingUndefinedError(msg.str());
        }
        if (!decided) throw ResolutionError("lifetime scaling: run did not leave the attractor by tau_max");
        samples.emplace_back(std::abs(o), inside);
    }
    return fit_lifetime_scaling(samples, gamma);
}

PhaseAnalysis three_phase_analysis(const Trajectory& traj, const ChebSeries& attractor, const PhaseOptions& options,
                                   const Trajectory* partner)
{
    if (traj.times.size() < 30) throw InsufficientDataError("three-phase analysis: trajectory too short");
    const ChebSeries target = attractor.resized(traj.N);
    const auto d = distance_series(traj, target);
    const auto& t = traj.times;

    PhaseAnalysis r;
    std::size_t k_min = 0;
    for (std::size_t k = 1; k < d.size(); ++k) {
        if (d[k] < d[k_min]) k_min = k;
    }
    r.closest_time = t[k_min];
    r.closest_distance = d[k_min];
    std::size_t k_exit = k_min;
    while (k_exit < d.size() && d[k_exit] < options.exit_distance) ++k_exit;
    if (k_exit >= d.size()) throw InsufficientDataError("three-phase analysis: run never left the attractor");
    r.exit_time = t[k_exit];
    r.final_sign = sign_of(traj.final_state->a[0]);

    const std::size_t jx = traj.observation_index(options.x);
    const auto field = traj.field_series(jx);

    // Approach: decay of the distance from the time the run stays within
    // enter_distance until a margin before the closest point, where the
    // growing unstable mode starts to matter. The L^2 distance averages over
    // the oscillation phase; the frequency comes from a ringdown fit of
    // dW/dtau at the observation point on the same window.
    {
        std::size_t k_enter = k_min;
        while (k_enter > 0 && d[k_enter - 1] < options.enter_distance) --k_enter;
        const double t_hi = r.closest_time - options.approach_margin;
        if (!(t_hi > t[k_enter])) throw InsufficientDataError("three-phase analysis: approach phase too short");
        const FitWindow w{t[k_enter], t_hi};
        r.approach = fit_exponential(t, d, w);
        try {
            r.approach_oscillation = fit_ringdown(t, traj.field_dot_series(jx), w);
        } catch (const PreconditionError&) {
            r.approach_oscillation.reset();
        }
    }

    // Escape: exponential growth of the unstable mode. With a partner run
    // from the other side of the bracket the shared approach cancels in the
    // difference, which isolates the growth over many e-folds.
    {
        std::vector<double> y;
        std::vector<double> tt;
        if (partner != nullptr) {
            const auto other = partner->field_series(partner->observation_index(options.x));
            const std::size_t n = std::min(other.size(), field.size());
            for (std::size_t k = 0; k < n && t[k] <= r.exit_time; ++k) {
                tt.push_back(t[k]);
                y.push_back(std::abs(field[k] - other[k]));
            }
        } else {
            tt = slice(t, k_min, k_exit + 1);
            y = slice(d, k_min, k_exit + 1);
        }
        std::size_t lo = 0;
        std::size_t hi = y.size();
        if (partner != nullptr) {
            // Last decades of growth: above the noise floor of the difference
            // and below the nonlinear regime near the exit.
            double ymax = 0.0;
            for (double v : y) ymax = std::max(ymax, v);
            hi = 0;
            while (hi < y.size() && y[hi] <= 0.1 * ymax) ++hi;
            lo = hi;
            while (lo > 0 && y[lo - 1] >= 1e-5 * ymax) --lo;
        }
        if (hi < lo + 10) throw InsufficientDataError("three-phase analysis: escape phase too short to fit");
        r.escape = fit_exponential(tt, y, {tt[lo], tt[hi - 1]});
    }

    // Final ringdown towards +-W_0.
    {
        std::vector<double> y = slice(field, k_exit, field.size());
        for (double& v : y) v -= static_cast<double>(r.final_sign);
        const std::vector<double> tt = slice(t, k_exit, t.size());
        WindowSearch ws;
        ws.width = options.ringdown_width;
        ws.step_fraction = 0.05;
        ws.floor = 1e-9;
        ws.stationarity = 0.02;
        const FitWindow w = select_window(FitModel::ringdown, tt, y, ws);
        r.ringdown = fit_ringdown(tt, y, w);
    }
    return r;
}

std::vector<ConvergenceRow> convergence_experiment(const EvolState& initial, const std::vector<std::size_t>& orders,
                                                   std::size_t N_ref, double tau, double rtol)
{
    auto run = [&](std::size_t N) {
        EvolConfig c;
        c.N = N;
        c.tau_end = initial.tau + tau;
        c.rtol = rtol;
        c.atol = 1e-18;
        c.stride = tau;
        c.coefficients = {0};
        c.observation_points = {};
        c.record_energy = false;
        c.checkpoint_interval = 0.0;
        return evolve(initial, c).final_state->a;
    };
    const ChebSeries ref = run(N_ref);
    std::vector<ConvergenceRow> rows;
    for (std::size_t N : orders) rows.push_back({N, l2_distance_squared(run(N), ref)});
    return rows;
}

}  // namespace ymwh
