#include "ymwh/static_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "ode_support.hpp"
#include "ymwh/errors.hpp"

namespace ymwh {

namespace {

using State2 = std::array<double, 2>;
using State4 = std::array<double, 4>;

struct StaticSystem {
    double coupling;
    void operator()(const State2& y, State2& dy, double r) const
    {
        dy[0] = y[1];
        dy[1] = -coupling * sech2(r) * y[0] * (1.0 - y[0] * y[0]);
    }
};

// Static field together with a zero-energy (or sigma) Schroedinger solution
// u'' = (V - sigma) u, V = l(l+1) sech^2 (3 W^2 - 1).
struct SturmSystem {
    double coupling;
    double sigma;
    void operator()(const State4& y, State4& dy, double r) const
    {
        const double s = sech2(r);
        dy[0] = y[1];
        dy[1] = -coupling * s * y[0] * (1.0 - y[0] * y[0]);
        dy[2] = y[3];
        dy[3] = (coupling * s * (3.0 * y[0] * y[0] - 1.0) - sigma) * y[2];
    }
};

State2 initial_state(Parity parity, double shoot)
{
    return parity == Parity::odd ? State2{0.0, shoot} : State2{shoot, 0.0};
}

double hermite(double f0, double d0, double f1, double d1, double h, double t)
{
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
}

constexpr int kHermiteSubpoints = 32;

// Tracks sign changes of a function sampled with its derivative.
class SignCounter {
public:
    explicit SignCounter(double floor = 0.0) : floor_(floor) {}

    void start(double f) { push(f); }

    void advance(double f0, double d0, double f1, double d1, double h)
    {
        for (int i = 1; i < kHermiteSubpoints; ++i) {
            push(hermite(f0, d0, f1, d1, h, static_cast<double>(i) / kHermiteSubpoints));
        }
        push(f1);
    }

    int count() const noexcept { return count_; }

private:
    void push(double f)
    {
        if (std::abs(f) <= floor_) return;
        const int s = f > 0 ? 1 : -1;
        if (sign_ != 0 && s != sign_) ++count_;
        sign_ = s;
    }

    double floor_;
    int sign_ = 0;
    int count_ = 0;
};

void check_shot_args(double shoot, double r_max)
{
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw PreconditionError("r_max must be positive and finite");
    if (!std::isfinite(shoot)) throw PreconditionError("shooting parameter must be finite");
}

double initial_step(double r_max) { return std::min(1e-3, r_max); }

}  // namespace

std::string to_string(ShotClass c)
{
    switch (c) {
    case ShotClass::crossed_plus_one: return "crossed_plus_one";
    case ShotClass::crossed_minus_one: return "crossed_minus_one";
    case ShotClass::confined: return "confined";
    }
    return "unknown";
}

ShotResult integrate_static(PhysParams params, Parity parity, double shoot, double r_max,
                            const StaticOptions& options)
{
    check_shot_args(shoot, r_max);
    const StaticSystem sys{params.coupling()};
    auto stepper = detail::make_rkf78<State2>(options.atol, options.rtol);

    ShotResult result;
    State2 y = initial_state(parity, shoot);
    double r = 0.0;
    double dt = initial_step(r_max);
    result.r.push_back(r);
    result.w.push_back(y[0]);
    result.w_prime.push_back(y[1]);

    auto classify_exit = [&](double w) {
        result.outcome.classification = w > 0 ? ShotClass::crossed_plus_one : ShotClass::crossed_minus_one;
    };

    if (std::abs(y[0]) > 1.0) {
        classify_exit(y[0]);
        result.outcome.exit_radius = 0.0;
        return result;
    }

    SignCounter extrema;
    extrema.start(y[1]);
    int fails = 0;
    while (r < r_max) {
        double h = std::min(dt, r_max - r);
        const State2 prev = y;
        const double r_prev = r;
        if (stepper.try_step(sys, y, r, h) != detail::odeint::success) {
            dt = h;
            if (++fails > 200 || dt < 1e-14) throw StiffnessError("static integration: step size collapsed");
            continue;
        }
        fails = 0;
        dt = h;
        if (!detail::all_finite(y)) throw BlowupError("static integration: nonfinite state", r_prev);
        if (r_max - r < 1e-13 * std::max(1.0, r_max)) r = r_max;

        State2 dprev, dcur;
        sys(prev, dprev, r_prev);
        sys(y, dcur, r);
        extrema.advance(prev[1], dprev[1], y[1], dcur[1], r - r_prev);

        result.r.push_back(r);
        result.w.push_back(y[0]);
        result.w_prime.push_back(y[1]);

        if (std::abs(y[0]) > 1.0) {
            classify_exit(y[0]);
            // locate |W| = 1 on the last step by the Hermite interpolant
            const double target = y[0] > 0 ? 1.0 : -1.0;
            double a = 0.0, b = 1.0;
            const double step = r - r_prev;
            for (int i = 0; i < 60; ++i) {
                const double m = 0.5 * (a + b);
                const double v = hermite(prev[0], prev[1], y[0], y[1], step, m) - target;
                if ((v > 0) == (target > 0)) b = m; else a = m;
            }
            result.outcome.exit_radius = r_prev + 0.5 * (a + b) * step;
            break;
        }
    }
    result.outcome.extrema_count = extrema.count();
    return result;
}

int predicted_zero_count(PhysParams params, Parity parity, double shoot, const StaticOptions& options)
{
    check_shot_args(shoot, options.r_max);
    const double L = params.coupling();
    const StaticSystem sys{L};
    auto stepper = detail::make_rkf78<State2>(options.atol, options.rtol);

    State2 y = initial_state(parity, shoot);
    if (std::abs(y[0]) > 1.0) return 0;
    double r = 0.0;
    double dt = initial_step(options.r_max);
    SignCounter zeros;
    zeros.start(y[0]);
    int fails = 0;
    auto q_of = [&](const State2& s, double rr) {
        const double c = std::cosh(rr);
        const double d = 1.0 - s[0] * s[0];
        return c * c * s[1] * s[1] - 0.5 * L * d * d;
    };
    while (r < options.r_max) {
        double h = std::min(dt, options.r_max - r);
        const State2 prev = y;
        const double r_prev = r;
        if (stepper.try_step(sys, y, r, h) != detail::odeint::success) {
            dt = h;
            if (++fails > 200 || dt < 1e-14) throw StiffnessError("static integration: step size collapsed");
            continue;
        }
        fails = 0;
        dt = h;
        if (!detail::all_finite(y)) throw BlowupError("static integration: nonfinite state", r_prev);
        zeros.advance(prev[0], prev[1], y[0], y[1], r - r_prev);
        if (std::abs(y[0]) > 1.0 || q_of(y, r) > 0.0) break;
    }
    return zeros.count() + ((y[0] * y[1] < 0.0) ? 1 : 0);
}

std::vector<double> static_values(PhysParams params, Parity parity, double shoot, const std::vector<double>& radii,
                                  const StaticOptions& options)
{
    const StaticSystem sys{params.coupling()};
    auto stepper = detail::make_rkf78<State2>(options.profile_atol, options.rtol);
    State2 y = initial_state(parity, shoot);
    double r = 0.0;
    double dt = 1e-3;
    std::vector<double> out;
    out.reserve(radii.size());
    for (double target : radii) {
        if (target < r) throw PreconditionError("static_values: radii must be nonnegative and ascending");
        detail::advance_to(stepper, sys, y, r, target, dt, 1e-14, "static integration");
        out.push_back(y[0]);
    }
    return out;
}

std::string StaticProfile::label() const
{
    switch (kind) {
    case StaticKind::ground: return w_inf < 0 ? "-W0" : "W0";
    case StaticKind::star: return "W*";
    case StaticKind::nonconstant: return (shoot < 0 ? "-W" : "W") + std::to_string(zero_count);
    }
    return "?";
}

double StaticProfile::min_gap() const
{
    return gap.empty() ? 0.0 : *std::min_element(gap.begin(), gap.end());
}

StaticProfile StaticProfile::negated() const
{
    StaticProfile p = *this;
    p.shoot = -shoot;
    p.w_inf = (kind == StaticKind::star) ? 0.0 : -w_inf;
    for (double& v : p.w) v = -v;
    for (double& v : p.w_prime) v = -v;
    if (kind == StaticKind::star) {
        for (double& v : p.w) v = 0.0;
        for (double& v : p.w_prime) v = 0.0;
    }
    return p;
}

namespace {

std::vector<double> full_grid(const StaticOptions& o)
{
    const auto half = static_cast<std::size_t>(std::llround(o.r_max / o.grid_step));
    std::vector<double> r(2 * half + 1);
    for (std::size_t i = 0; i <= 2 * half; ++i) {
        r[i] = (static_cast<double>(i) - static_cast<double>(half)) * o.grid_step;
    }
    return r;
}

StaticProfile constant_profile(PhysParams params, StaticKind kind, double value, const StaticOptions& options)
{
    if (!(options.grid_step > 0.0) || !(options.r_max > options.grid_step)) {
        throw PreconditionError("static grid needs 0 < grid_step < r_max");
    }
    StaticProfile p;
    p.params = params;
    p.kind = kind;
    p.parity = Parity::even;
    p.zero_count = 0;
    p.shoot = value;
    p.options = options;
    p.r = full_grid(options);
    p.w.assign(p.r.size(), value);
    p.w_prime.assign(p.r.size(), 0.0);
    p.gap.assign(p.r.size(), 1.0 - std::abs(value));
    p.w_inf = value;
    p.energy = static_energy(p);
    return p;
}

}  // namespace

StaticProfile ground_profile(PhysParams params, const StaticOptions& options)
{
    return constant_profile(params, StaticKind::ground, 1.0, options);
}

StaticProfile star_profile(PhysParams params, const StaticOptions& options)
{
    return constant_profile(params, StaticKind::star, 0.0, options);
}

StaticProfile profile_from_shoot(PhysParams params, Parity parity, double shoot, const StaticOptions& options)
{
    if (!std::isfinite(shoot)) throw PreconditionError("shooting parameter must be finite");
    if (!(options.grid_step > 0.0) || !(options.r_max > options.grid_step)) {
        throw PreconditionError("static grid needs 0 < grid_step < r_max");
    }
    if (!(options.r_max >= 15.0)) throw PreconditionError("static profiles need r_max >= 15");
    const auto half = static_cast<std::size_t>(std::llround(options.r_max / options.grid_step));
    const StaticSystem sys{params.coupling()};
    auto stepper = detail::make_rkf78<State2>(options.profile_atol, options.rtol);

    std::vector<double> w(half + 1), wp(half + 1);
    State2 y = initial_state(parity, shoot);
    double r = 0.0;
    double dt = 1e-3;
    w[0] = y[0];
    wp[0] = y[1];
    for (std::size_t i = 1; i <= half; ++i) {
        detail::advance_to(stepper, sys, y, r, static_cast<double>(i) * options.grid_step, dt, 1e-14,
                           "static integration");
        w[i] = y[0];
        wp[i] = y[1];
    }

    StaticProfile p;
    p.params = params;
    p.kind = StaticKind::nonconstant;
    p.parity = parity;
    p.shoot = shoot;
    p.options = options;
    p.r = full_grid(options);
    p.w.resize(2 * half + 1);
    p.w_prime.resize(2 * half + 1);
    const double sign_w = parity == Parity::odd ? -1.0 : 1.0;
    for (std::size_t i = 0; i <= half; ++i) {
        p.w[half + i] = w[i];
        p.w_prime[half + i] = wp[i];
        p.w[half - i] = sign_w * w[i];
        p.w_prime[half - i] = -sign_w * wp[i];
    }
    p.gap.resize(p.w.size());
    for (std::size_t i = 0; i < p.w.size(); ++i) p.gap[i] = 1.0 - std::abs(p.w[i]);
    // W = W_inf + c exp(-2r): remove the exponential from the last two samples
    const double h = options.grid_step;
    const double c_term = (w[half] - w[half - 1]) / (1.0 - std::exp(2.0 * h));
    p.w_inf = w[half] - c_term;
    p.zero_count = count_sign_changes(p.r, p.w, p.w_prime);
    p.energy = static_energy_forms(p).direct;
    return p;
}

namespace {

// Static field with its derivative with respect to the shooting parameter.
struct VariationalSystem {
    double coupling;
    void operator()(const State4& y, State4& dy, double r) const
    {
        const double s = sech2(r);
        dy[0] = y[1];
        dy[1] = -coupling * s * y[0] * (1.0 - y[0] * y[0]);
        dy[2] = y[3];
        dy[3] = -coupling * s * (1.0 - 3.0 * y[0] * y[0]) * y[2];
    }
};

State4 outward_at(PhysParams params, Parity parity, double shoot, double r_match, const StaticOptions& o)
{
    const VariationalSystem sys{params.coupling()};
    auto stepper = detail::make_rkf78<State4>(o.profile_atol, o.profile_rtol);
    State4 y = parity == Parity::odd ? State4{0.0, shoot, 0.0, 1.0} : State4{shoot, 0.0, 1.0, 0.0};
    double t = 0.0;
    double dt = 1e-3;
    detail::advance_to(stepper, sys, y, t, r_match, dt, 1e-15, "static integration");
    return y;
}

// Inward integration near the tail uses u = 1 - sigma W (sigma the sign of
// W_inf), so that 1 - |W| keeps full relative precision when W sits
// exponentially close to the vacuum:
//   u'' = l(l+1) sech^2(r) g(u),  g(u) = u (1 - u) (2 - u).
// The state is (u, du/dr, du/ds, d(du/dr)/ds) with s = log u_inf, stepped in
// t = -r.
struct InwardSystem {
    double coupling;
    void operator()(const State4& y, State4& dy, double t) const
    {
        const double s = sech2(t);
        const double u = y[0];
        const double g = u * (1.0 - u) * (2.0 - u);
        const double dg = 2.0 - 6.0 * u + 3.0 * u * u;
        dy[0] = -y[1];
        dy[1] = -coupling * s * g;
        dy[2] = -y[3];
        dy[3] = -coupling * s * dg * y[2];
    }
};

// u = u_inf + l(l+1) g(u_inf) e^{-2r} and its s-derivatives.
State4 asymptotic_state(double coupling, double log_u_inf, double r)
{
    const double u = std::exp(log_u_inf);
    const double e = std::exp(-2.0 * r);
    const double g = u * (1.0 - u) * (2.0 - u);
    const double dg = 2.0 - 6.0 * u + 3.0 * u * u;
    return State4{u + coupling * g * e, -2.0 * coupling * g * e, u * (1.0 + coupling * dg * e),
                  -2.0 * coupling * dg * e * u};
}

constexpr double kTinyAtol = 1e-300;

State4 inward_at(PhysParams params, double log_u_inf, double r_match, const StaticOptions& o)
{
    const InwardSystem sys{params.coupling()};
    auto stepper = detail::make_rkf78<State4>(kTinyAtol, o.profile_rtol);
    State4 y = asymptotic_state(params.coupling(), log_u_inf, o.r_max);
    double t = -o.r_max;
    double dt = 1e-3;
    detail::advance_to(stepper, sys, y, t, -r_match, dt, 1e-15, "static integration");
    return y;
}

struct MatchResult {
    double shoot;
    double sigma;
    double log_u_inf;
    double r_match;
};

MatchResult match_regular(PhysParams params, Parity parity, double shoot, int zeros_r_positive,
                          const StaticOptions& o)
{
    const ShotResult shot = integrate_static(params, parity, shoot, o.r_max, o);
    // match where the potential stops dominating, but no later than the
    // first point after the last zero (the k-th one in r > 0) where |W|
    // comes within 0.05 of the vacuum, so that u is well represented on
    // both sides; the tail of the shot beyond that point is not trusted
    double r_match = std::min(std::acosh(std::sqrt(std::max(params.coupling(), 2.0))), 0.5 * o.r_max);
    {
        std::size_t i = 1;
        int seen = 0;
        while (seen < zeros_r_positive && i < shot.r.size()) {
            if ((shot.w[i - 1] < 0.0) != (shot.w[i] < 0.0) && shot.r[i - 1] > 0.0) ++seen;
            else if (shot.w[i - 1] == 0.0 && shot.r[i - 1] > 0.0) ++seen;
            ++i;
        }
        while (i < shot.r.size() && std::abs(shot.w[i]) < 0.95) ++i;
        if (i < shot.r.size()) r_match = std::min(r_match, shot.r[i]);
    }
    if (!(r_match > 0.0)) throw ResolutionError("find_static: no matching radius for the tail");

    double b = shoot;
    auto outward = [&](double bb) {
        State4 y = outward_at(params, parity, bb, r_match, o);
        return y;
    };
    State4 out = outward(b);
    const double sigma = out[0] >= 0.0 ? 1.0 : -1.0;
    auto out_u = [&](const State4& y) { return State4{1.0 - sigma * y[0], -sigma * y[1], -sigma * y[2], -sigma * y[3]}; };

    // 1-D solve for s = log u_inf with the shoot frozen
    double s_lo = std::log(1e-300), s_hi = 0.0;
    const double target = out_u(out)[0];
    auto f_of = [&](double s) { return inward_at(params, s, r_match, o)[0] - target; };
    double f_lo = f_of(s_lo), f_hi = f_of(s_hi);
    if (!((f_lo < 0.0) != (f_hi < 0.0))) {
        throw ResolutionError("find_static: cannot bracket the tail parameter");
    }
    for (int it = 0; it < 200 && s_hi - s_lo > 1e-12; ++it) {
        const double m = 0.5 * (s_lo + s_hi);
        const double fm = f_of(m);
        if ((fm < 0.0) == (f_lo < 0.0)) { s_lo = m; f_lo = fm; } else { s_hi = m; }
    }
    double s = 0.5 * (s_lo + s_hi);

    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
        const State4 uo = out_u(outward(b));
        const State4 ui = inward_at(params, s, r_match, o);
        const double f0 = uo[0] - ui[0];
        const double f1 = uo[1] - ui[1];
        residual = std::hypot(f0, f1) / std::max(1e-300, std::hypot(uo[0], uo[1]));
        const double j00 = uo[2], j01 = -ui[2];
        const double j10 = uo[3], j11 = -ui[3];
        const double det = j00 * j11 - j01 * j10;
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
        const double db = (f0 * j11 - f1 * j01) / det;
        const double ds = (j00 * f1 - j10 * f0) / det;
        b -= db;
        s -= ds;
        if (residual < 1e-15 || (std::abs(db) < 1e-16 * std::abs(b) && std::abs(ds) < 1e-14)) break;
    }
    if (!(residual < 1e-10)) {
        std::ostringstream msg;
        msg << "find_static: matching of the tail failed (relative residual " << residual << ")";
        throw ResolutionError(msg.str());
    }
    return {b, sigma, s, r_match};
}

StaticProfile matched_profile(PhysParams params, Parity parity, const MatchResult& m, const StaticOptions& o)
{
    const auto half = static_cast<std::size_t>(std::llround(o.r_max / o.grid_step));
    const double h = o.grid_step;
    std::vector<double> w(half + 1), wp(half + 1), gap(half + 1);

    const auto split = static_cast<std::size_t>(std::floor(m.r_match / h));
    {
        const StaticSystem sys{params.coupling()};
        auto stepper = detail::make_rkf78<State2>(o.profile_atol, o.profile_rtol);
        State2 y = initial_state(parity, m.shoot);
        double r = 0.0;
        double dt = 1e-3;
        w[0] = y[0];
        wp[0] = y[1];
        for (std::size_t i = 1; i <= split; ++i) {
            detail::advance_to(stepper, sys, y, r, static_cast<double>(i) * h, dt, 1e-15, "static integration");
            w[i] = y[0];
            wp[i] = y[1];
        }
        for (std::size_t i = 0; i <= split; ++i) gap[i] = 1.0 - std::abs(w[i]);
    }
    {
        const InwardSystem sys{params.coupling()};
        auto stepper = detail::make_rkf78<State4>(kTinyAtol, o.profile_rtol);
        State4 y = asymptotic_state(params.coupling(), m.log_u_inf, o.r_max);
        double t = -o.r_max;
        double dt = 1e-3;
        w[half] = m.sigma * (1.0 - y[0]);
        wp[half] = -m.sigma * y[1];
        gap[half] = y[0];
        for (std::size_t i = half; i-- > split + 1;) {
            detail::advance_to(stepper, sys, y, t, -static_cast<double>(i) * h, dt, 1e-15, "static integration");
            w[i] = m.sigma * (1.0 - y[0]);
            wp[i] = -m.sigma * y[1];
            // u leaves [0, 1] only if W changes sign, which it cannot after the match point
            gap[i] = y[0];
        }
    }

    StaticProfile p;
    p.params = params;
    p.kind = StaticKind::nonconstant;
    p.parity = parity;
    p.shoot = m.shoot;
    p.options = o;
    p.r = full_grid(o);
    p.w.resize(2 * half + 1);
    p.w_prime.resize(2 * half + 1);
    const double sign_w = parity == Parity::odd ? -1.0 : 1.0;
    for (std::size_t i = 0; i <= half; ++i) {
        p.w[half + i] = w[i];
        p.w_prime[half + i] = wp[i];
        p.w[half - i] = sign_w * w[i];
        p.w_prime[half - i] = -sign_w * wp[i];
    }
    p.gap.resize(2 * half + 1);
    for (std::size_t i = 0; i <= half; ++i) {
        p.gap[half + i] = gap[i];
        p.gap[half - i] = gap[i];
    }
    p.w_inf = m.sigma * (1.0 - std::exp(m.log_u_inf));
    p.match_radius = m.r_match;
    p.tail_sign = m.sigma;
    p.tail_log_gap = m.log_u_inf;
    p.zero_count = count_sign_changes(p.r, p.w, p.w_prime);
    p.energy = static_energy(p);
    return p;
}

}  // namespace

StaticProfile find_static(PhysParams params, int n, const StaticOptions& options, std::optional<double> upper)
{
    if (n < 1) throw PreconditionError("find_static: n must be a positive integer");
    if (!(static_cast<double>(n) < params.ell())) {
        std::ostringstream msg;
        msg << "no regular static solution with " << n << " zeros exists for ell = " << params.ell()
            << " (requires n < ell)";
        throw NoSuchSolutionError(msg.str());
    }
    const Parity parity = parity_of(n);
    const int target = n / 2 + 1;
    auto above = [&](double b) { return predicted_zero_count(params, parity, b, options) >= target; };

    double hi = upper.value_or(parity == Parity::odd ? std::sqrt(0.5 * params.coupling()) : 1.0);
    if (above(hi)) {
        throw BracketFailureError("find_static: upper shooting bracket already shows too many zeros");
    }
    double lo = hi;
    bool found = false;
    for (int m = 0; m < 100; ++m) {
        lo *= 0.5;
        if (above(lo)) {
            found = true;
            break;
        }
        hi = lo;
    }
    if (!found) throw BracketFailureError("find_static: no lower shooting bracket found");

    for (int it = 0; it < options.bisect_iterations; ++it) {
        if (hi - lo <= options.bisect_width) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (above(mid)) lo = mid; else hi = mid;
    }
    if (!(options.r_max >= 15.0)) throw PreconditionError("static profiles need r_max >= 15");
    const MatchResult m = match_regular(params, parity, 0.5 * (lo + hi), n / 2, options);
    if (std::abs(m.shoot - 0.5 * (lo + hi)) > 1e-6 * std::max(1.0, std::abs(m.shoot))) {
        throw ResolutionError("find_static: tail matching moved the shooting parameter off the bisected bracket");
    }
    StaticProfile p = matched_profile(params, parity, m, options);
    if (p.zero_count != n || !(p.min_gap() > 0.0)) {
        std::ostringstream msg;
        msg << "find_static: bisected profile for n = " << n << " has " << p.zero_count
            << " zeros and min(1 - |W|) = " << p.min_gap();
        throw ResolutionError(msg.str());
    }
    return p;
}

std::vector<StaticProfile> enumerate_statics(PhysParams params, const StaticOptions& options)
{
    if (params.is_integer()) {
        throw PreconditionError("enumerate_statics: integer ell is a bifurcation point and is not supported");
    }
    std::vector<StaticProfile> out;
    out.push_back(ground_profile(params, options));
    out.push_back(star_profile(params, options));
    std::optional<double> prev_odd, prev_even;
    for (int n = 1; n <= params.floor_strict(); ++n) {
        auto& prev = (n % 2 == 1) ? prev_odd : prev_even;
        out.push_back(find_static(params, n, options, prev));
        prev = out.back().shoot;
    }
    return out;
}

double trapezoid(const std::vector<double>& r, const std::vector<double>& f)
{
    if (r.size() != f.size()) throw PreconditionError("trapezoid: size mismatch");
    double s = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) s += 0.5 * (r[i] - r[i - 1]) * (f[i] + f[i - 1]);
    return s;
}

namespace {

double one_minus_w2(const StaticProfile& p, std::size_t i)
{
    if (i < p.gap.size()) return p.gap[i] * (2.0 - p.gap[i]);
    return 1.0 - p.w[i] * p.w[i];
}

}  // namespace

EnergyForms static_energy_forms(const StaticProfile& profile)
{
    const double L = profile.params.coupling();
    if (profile.kind == StaticKind::ground) return {0.0, 0.0};
    if (profile.kind == StaticKind::star) return {0.5 * L, 0.5 * L};
    const std::size_t m = profile.r.size();
    std::vector<double> direct(m), virial(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double s = sech2(profile.r[i]);
        const double d = one_minus_w2(profile, i);
        direct[i] = 0.5 * (profile.w_prime[i] * profile.w_prime[i] + 0.5 * L * s * d * d);
        virial[i] = 0.25 * L * d * (2.0 - d) * s;
    }
    return {trapezoid(profile.r, direct), trapezoid(profile.r, virial)};
}

double static_energy(const StaticProfile& profile)
{
    const auto [e1, e2] = static_energy_forms(profile);
    if (std::abs(e1 - e2) > 1e-6 * std::max(1.0, std::abs(e1))) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "static_energy: direct and virial forms disagree (" << e1 << " vs " << e2
            << "); profile under-resolved";
        throw InconsistencyError(msg.str());
    }
    return e1;
}

std::vector<double> q_functional(const StaticProfile& profile)
{
    const double L = profile.params.coupling();
    std::vector<double> q(profile.r.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double c = std::cosh(profile.r[i]);
        const double d = one_minus_w2(profile, i);
        q[i] = c * c * profile.w_prime[i] * profile.w_prime[i] - 0.5 * L * d * d;
    }
    return q;
}

IdentityResiduals identity_residuals(const StaticProfile& profile)
{
    IdentityResiduals res;
    if (profile.is_constant()) return res;
    const double L = profile.params.coupling();
    const std::size_t m = profile.r.size();
    std::vector<double> lhs(m), rhs_v(m), odd(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double s = sech2(profile.r[i]);
        const double w2 = profile.w[i] * profile.w[i];
        const double d = one_minus_w2(profile, i);
        lhs[i] = profile.w_prime[i] * profile.w_prime[i];
        rhs_v[i] = L * w2 * d * s;
        odd[i] = std::tanh(profile.r[i]) * s * d * d;
    }
    res.virial = std::abs(trapezoid(profile.r, lhs) - trapezoid(profile.r, rhs_v));
    res.odd_identity = std::abs(trapezoid(profile.r, odd));

    const auto q = q_functional(profile);
    const double tol = 1e-9 * std::max(1.0, L);
    for (std::size_t i = 1; i < m; ++i) {
        if (profile.r[i - 1] >= 0.0 && q[i] < q[i - 1] - tol) ++res.q_monotonicity_violations;
    }
    return res;
}

LegendreLimit legendre_limit(PhysParams params, double r_max)
{
    if (!(r_max >= 10.0) || !std::isfinite(r_max)) throw PreconditionError("legendre_limit: r_max must be >= 10");
    const double L = params.coupling();
    auto sys = [L](const State2& y, State2& dy, double r) {
        dy[0] = y[1];
        dy[1] = -L * sech2(r) * y[0];
    };
    auto stepper = detail::make_rkf78<State2>(1e-14, 1e-12);
    LegendreLimit out;
    State2 y{0.0, 1.0};
    double r = 0.0;
    double dt = 1e-3;
    const double h = 0.01;
    const auto steps = static_cast<std::size_t>(std::ceil(r_max / h));
    out.r.push_back(0.0);
    out.w.push_back(y[0]);
    out.w_prime.push_back(y[1]);
    for (std::size_t i = 1; i <= steps; ++i) {
        detail::advance_to(stepper, sys, y, r, std::min(r_max, static_cast<double>(i) * h), dt, 1e-14,
                           "legendre integration");
        out.r.push_back(r);
        out.w.push_back(y[0]);
        out.w_prime.push_back(y[1]);
    }
    out.zero_count = count_sign_changes(out.r, out.w, out.w_prime);
    return out;
}

int count_sign_changes(const std::vector<double>& r, const std::vector<double>& w, const std::vector<double>& w_prime)
{
    if (r.size() != w.size() || r.size() != w_prime.size()) {
        throw PreconditionError("count_sign_changes: size mismatch");
    }
    if (r.empty()) return 0;
    SignCounter counter;
    counter.start(w[0]);
    for (std::size_t i = 1; i < r.size(); ++i) {
        counter.advance(w[i - 1], w_prime[i - 1], w[i], w_prime[i], r[i] - r[i - 1]);
    }
    return counter.count();
}

std::vector<double> profile_values(const StaticProfile& profile, const std::vector<double>& radii)
{
    std::vector<double> out(radii.size());
    if (profile.is_constant()) {
        std::fill(out.begin(), out.end(), profile.w_inf);
        return out;
    }
    std::vector<std::size_t> order(radii.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!(radii[i] >= 0.0)) throw PreconditionError("profile_values: radii must be nonnegative");
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
    const StaticOptions& o = profile.options;
    const double split = profile.match_radius > 0.0 ? profile.match_radius : std::numeric_limits<double>::infinity();

    const StaticSystem sys{profile.params.coupling()};
    auto fwd = detail::make_rkf78<State2>(o.profile_atol, o.profile_rtol);
    State2 y = initial_state(profile.parity, profile.shoot);
    double r = 0.0;
    double dt = 1e-3;
    std::size_t k = 0;
    for (; k < order.size() && radii[order[k]] <= split; ++k) {
        detail::advance_to(fwd, sys, y, r, radii[order[k]], dt, 1e-15, "static integration");
        out[order[k]] = y[0];
    }
    if (k < order.size()) {
        const InwardSystem in_sys{profile.params.coupling()};
        auto inw = detail::make_rkf78<State4>(kTinyAtol, o.profile_rtol);
        State4 u = asymptotic_state(profile.params.coupling(), profile.tail_log_gap, o.r_max);
        double t = -o.r_max;
        double dt_in = 1e-3;
        for (std::size_t q = order.size(); q-- > k;) {
            const double rq = radii[order[q]];
            if (rq >= o.r_max) {
                out[order[q]] = profile.tail_sign * (1.0 - (rq > o.r_max ? std::exp(profile.tail_log_gap) : u[0]));
                continue;
            }
            detail::advance_to(inw, in_sys, u, t, -rq, dt_in, 1e-15, "static integration");
            out[order[q]] = profile.tail_sign * (1.0 - u[0]);
        }
    }
    return out;
}

ChebSeries to_cheb(const StaticProfile& profile, std::size_t M)
{
    if (M < 8) throw PreconditionError("to_cheb: M must be at least 8");
    if (profile.is_constant()) return ChebSeries::unit(0, M, profile.w_inf);

    const auto nodes = lobatto_nodes(M);
    // nodes descend from +1 to -1; radii for the nonnegative half ascend from
    // the middle outward
    std::vector<double> radii;
    std::vector<std::size_t> index;
    for (std::size_t j = M + 1; j-- > 0;) {
        const double x = nodes[j];
        if (x >= 0.0 && x < 1.0) {
            radii.push_back(std::atanh(x));
            index.push_back(j);
        }
    }
    std::vector<double> positive = profile_values(profile, radii);
    std::vector<double> values(M + 1, 0.0);
    const double sign_w = profile.parity == Parity::odd ? -1.0 : 1.0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const std::size_t j = index[k];
        values[j] = positive[k];
        values[M - j] = sign_w * positive[k];
    }
    values[0] = profile.w_inf;
    values[M] = sign_w * profile.w_inf;

    ChebSeries a = from_lobatto_values(values);
    for (std::size_t k = 0; k <= M; ++k) {
        if (parity_of(static_cast<int>(k)) != profile.parity) a.at(k) = 0.0;
    }
    const double amax = a.max_abs();
    const double tail = std::max(std::abs(a[static_cast<std::ptrdiff_t>(M)]), std::abs(a[static_cast<std::ptrdiff_t>(M) - 1]));
    if (amax > 0.0 && tail > 1e-8 * amax) {
        std::ostringstream msg;
        msg << "to_cheb: " << profile.label() << " unresolved at M = " << M << " (tail ratio " << tail / amax << ")";
        warn(msg.str());
    }
    return a;
}

}  // namespace ymwh
