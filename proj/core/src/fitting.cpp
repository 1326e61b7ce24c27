#include "ymwh/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "ymwh/errors.hpp"

namespace ymwh {

namespace {

struct Samples {
    std::vector<double> t;
    std::vector<double> y;
};

Samples restrict_to(std::span<const double> t, std::span<const double> y, FitWindow w)
{
    if (t.size() != y.size()) throw PreconditionError("fit: time and value series differ in length");
    if (!(w.hi > w.lo)) throw PreconditionError("fit: empty window");
    Samples s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= w.lo && t[i] <= w.hi) {
            s.t.push_back(t[i]);
            s.y.push_back(y[i]);
        }
    }
    return s;
}

void require_samples(const Samples& s, std::size_t n, const char* what)
{
    if (s.t.size() < n) {
        throw InsufficientDataError(std::string(what) + ": fewer than " + std::to_string(n) + " samples in window");
    }
}

/// Ordinary least-squares line.
struct Line {
    double slope;
    double intercept;  // value at x = 0
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto n = static_cast<double>(x.size());
    double xm = 0.0;
    double ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (!(sxx > 0.0)) throw InsufficientDataError("fit: degenerate abscissae");
    const double m = sxy / sxx;
    return {m, ym - m * xm};
}

double misfit(const FitResult& f, const Samples& s)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double d = s.y[i] - f(s.t[i]);
        num += d * d;
        den += s.y[i] * s.y[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? INFINITY : 0.0);
}

/// Damped sinusoid e^{-g s}(c1 sin(w s) + c2 cos(w s)) with s = t - t0,
/// parameters x = (g, w, c1, c2); residuals are scaled by 1/scale.
struct RingdownFunctor : Eigen::DenseFunctor<double> {
    RingdownFunctor(const Samples& s, double t0, double scale)
        : Eigen::DenseFunctor<double>(4, static_cast<int>(s.t.size())), s_(s), t0_(t0), scale_(scale)
    {
    }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const
    {
        for (Eigen::Index i = 0; i < fvec.size(); ++i) {
            const double s = s_.t[static_cast<std::size_t>(i)] - t0_;
            const double e = std::exp(-x[0] * s);
            const double m = e * (x[2] * std::sin(x[1] * s) + x[3] * std::cos(x[1] * s));
            fvec[i] = (m - s_.y[static_cast<std::size_t>(i)]) / scale_;
        }
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& fjac) const
    {
        for (Eigen::Index i = 0; i < fjac.rows(); ++i) {
            const double s = s_.t[static_cast<std::size_t>(i)] - t0_;
            const double e = std::exp(-x[0] * s);
            const double sn = std::sin(x[1] * s);
            const double cs = std::cos(x[1] * s);
            const double m = e * (x[2] * sn + x[3] * cs);
            fjac(i, 0) = -s * m / scale_;
            fjac(i, 1) = e * s * (x[2] * cs - x[3] * sn) / scale_;
            fjac(i, 2) = e * sn / scale_;
            fjac(i, 3) = e * cs / scale_;
        }
        return 0;
    }

    const Samples& s_;
    double t0_;
    double scale_;
};

/// Best (c1, c2) for fixed rate and frequency.
std::pair<double, double> linear_amplitudes(const Samples& s, double t0, double g, double w)
{
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(s.t.size()), 2);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(s.t.size()));
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double u = s.t[i] - t0;
        const double e = std::exp(-g * u);
        basis(static_cast<Eigen::Index>(i), 0) = e * std::sin(w * u);
        basis(static_cast<Eigen::Index>(i), 1) = e * std::cos(w * u);
        rhs[static_cast<Eigen::Index>(i)] = s.y[i];
    }
    const Eigen::Vector2d c = basis.colPivHouseholderQr().solve(rhs);
    return {c[0], c[1]};
}

}  // namespace

std::string to_string(FitModel m)
{
    switch (m) {
        case FitModel::exponential: return "exponential";
        case FitModel::ringdown: return "ringdown";
        case FitModel::powerlaw: return "powerlaw";
    }
    return "unknown";
}

double FitResult::operator()(double t) const
{
    switch (model) {
        case FitModel::exponential: return amplitude * std::exp(-rate * t);
        case FitModel::ringdown:
            return amplitude * std::exp(-rate * t) * std::sin(frequency.value_or(0.0) * t + phase.value_or(0.0));
        case FitModel::powerlaw: return amplitude * std::pow(t - origin.value_or(0.0), rate);
    }
    return 0.0;
}

FitResult fit_exponential(std::span<const double> t, std::span<const double> y, FitWindow window)
{
    const Samples s = restrict_to(t, y, window);
    require_samples(s, 10, "fit_exponential");
    std::vector<double> logy;
    logy.reserve(s.y.size());
    for (double v : s.y) {
        if (!(v > 0.0)) throw PreconditionError("fit_exponential: values must be positive on the window");
        logy.push_back(std::log(v));
    }
    const Line line = fit_line(s.t, logy);
    FitResult r;
    r.model = FitModel::exponential;
    r.rate = -line.slope;
    r.amplitude = std::exp(line.intercept);
    r.window = window;
    r.samples = s.t.size();
    r.residual = misfit(r, s);
    return r;
}

FitResult fit_powerlaw(std::span<const double> t, std::span<const double> y, FitWindow window)
{
    const Samples s = restrict_to(t, y, window);
    require_samples(s, 10, "fit_powerlaw");
    const double sign = s.y.front() < 0.0 ? -1.0 : 1.0;
    std::vector<double> logt;
    std::vector<double> logy;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (!(s.t[i] > 0.0)) throw PreconditionError("fit_powerlaw: times must be positive on the window");
        if (!(sign * s.y[i] > 0.0)) throw PreconditionError("fit_powerlaw: values must keep one sign on the window");
        logt.push_back(std::log(s.t[i]));
        logy.push_back(std::log(sign * s.y[i]));
    }
    const Line line = fit_line(logt, logy);
    FitResult r;
    r.model = FitModel::powerlaw;
    r.rate = line.slope;
    r.amplitude = sign * std::exp(line.intercept);
    r.window = window;
    r.samples = s.t.size();
    r.residual = misfit(r, s);
    return r;
}

FitResult fit_powerlaw_shifted(std::span<const double> t, std::span<const double> y, FitWindow window)
{
    const Samples s = restrict_to(t, y, window);
    require_samples(s, 10, "fit_powerlaw_shifted");
    const double sign = s.y.front() < 0.0 ? -1.0 : 1.0;
    std::vector<double> logy;
    for (double v : s.y) {
        if (!(sign * v > 0.0)) throw PreconditionError("fit_powerlaw_shifted: values must keep one sign on the window");
        logy.push_back(std::log(sign * v));
    }
    const double t_lo = s.t.front();
    const double span = s.t.back() - t_lo;

    std::vector<double> logt(s.t.size());
    auto line_at = [&](double t0) {
        for (std::size_t i = 0; i < s.t.size(); ++i) logt[i] = std::log(s.t[i] - t0);
        return fit_line(logt, logy);
    };
    auto cost = [&](double t0) {
        const Line line = line_at(t0);
        double c = 0.0;
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            const double d = logy[i] - line.intercept - line.slope * logt[i];
            c += d * d;
        }
        return c;
    };
    // Origins far below the window all look like the unshifted law; the
    // bracket spans ten window widths below the window start.
    const double t0_min = t_lo - 10.0 * span;
    const double t0_max = t_lo - 1e-6 * std::max(1.0, span);
    const auto best = boost::math::tools::brent_find_minima(cost, t0_min, t0_max, 52);
    const double t0 = best.first;
    const Line line = line_at(t0);

    FitResult r;
    r.model = FitModel::powerlaw;
    r.rate = line.slope;
    r.amplitude = sign * std::exp(line.intercept);
    r.origin = t0;
    r.window = window;
    r.samples = s.t.size();
    r.residual = misfit(r, s);
    return r;
}

FitResult fit_ringdown(std::span<const double> t, std::span<const double> y, FitWindow window)
{
    const Samples s = restrict_to(t, y, window);
    require_samples(s, 10, "fit_ringdown");

    // Zero crossings split the series into half-periods; the extremum of each
    // complete half-period is refined by a parabola through its neighbours.
    std::vector<std::size_t> crossings;
    for (std::size_t i = 1; i < s.y.size(); ++i) {
        if ((s.y[i - 1] < 0.0) != (s.y[i] < 0.0)) crossings.push_back(i);
    }
    if (crossings.size() < 4) {
        throw InsufficientOscillationError("fit_ringdown: fewer than 4 sign changes in window");
    }
    std::vector<double> ext_t;
    std::vector<double> ext_log;
    for (std::size_t c = 0; c + 1 < crossings.size(); ++c) {
        std::size_t best = crossings[c];
        for (std::size_t i = crossings[c]; i < crossings[c + 1]; ++i) {
            if (std::abs(s.y[i]) > std::abs(s.y[best])) best = i;
        }
        double tb = s.t[best];
        double yb = std::abs(s.y[best]);
        if (best > 0 && best + 1 < s.y.size()) {
            const double y0 = std::abs(s.y[best - 1]);
            const double y2 = std::abs(s.y[best + 1]);
            const double denom = y0 - 2.0 * yb + y2;
            const double h = 0.5 * (s.t[best + 1] - s.t[best - 1]);
            if (denom < 0.0) {
                const double shift = 0.5 * (y0 - y2) / denom;
                if (std::abs(shift) <= 1.0) {
                    tb += shift * h;
                    yb -= 0.25 * (y0 - y2) * shift;
                }
            }
        }
        if (!(yb > 0.0)) continue;
        ext_t.push_back(tb);
        ext_log.push_back(std::log(yb));
    }
    if (ext_t.size() < 3) throw InsufficientOscillationError("fit_ringdown: fewer than 3 resolved extrema");

    const double spacing = (ext_t.back() - ext_t.front()) / static_cast<double>(ext_t.size() - 1);
    double w = std::numbers::pi / spacing;
    double g = -fit_line(ext_t, ext_log).slope;

    const double t0 = s.t.front();
    auto [c1, c2] = linear_amplitudes(s, t0, g, w);
    double scale = 0.0;
    for (double v : s.y) scale = std::max(scale, std::abs(v));

    RingdownFunctor functor(s, t0, scale);
    Eigen::LevenbergMarquardt<RingdownFunctor> lm(functor);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    lm.setMaxfev(2000);
    Eigen::VectorXd x(4);
    x << g, w, c1, c2;
    lm.minimize(x);
    if (x.allFinite()) {
        g = x[0];
        w = x[1];
        c1 = x[2];
        c2 = x[3];
    }
    if (w < 0.0) {
        w = -w;
        c1 = -c1;
    }

    FitResult r;
    r.model = FitModel::ringdown;
    r.rate = g;
    r.frequency = w;
    // c1 sin(w u) + c2 cos(w u) = R sin(w u + phi), u = t - t0
    const double R = std::hypot(c1, c2);
    const double phi = std::atan2(c2, c1);
    r.amplitude = R * std::exp(g * t0);
    r.phase = std::remainder(phi - w * t0, 2.0 * std::numbers::pi);
    r.window = window;
    r.samples = s.t.size();

    // Residual with the parameters in the u = t - t0 form, which avoids the
    // overflow of e^{g t0} for late windows.
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double u = s.t[i] - t0;
        const double m = std::exp(-g * u) * R * std::sin(w * u + phi);
        num += (s.y[i] - m) * (s.y[i] - m);
        den += s.y[i] * s.y[i];
    }
    r.residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return r;
}

FitResult fit(FitModel model, std::span<const double> t, std::span<const double> y, FitWindow window)
{
    switch (model) {
        case FitModel::exponential: return fit_exponential(t, y, window);
        case FitModel::ringdown: return fit_ringdown(t, y, window);
        case FitModel::powerlaw: return fit_powerlaw(t, y, window);
    }
    throw PreconditionError("fit: unknown model");
}

double relative_misfit(const FitResult& f, std::span<const double> t, std::span<const double> y, FitWindow window)
{
    return misfit(f, restrict_to(t, y, window));
}

FitWindow select_window(FitModel model, std::span<const double> t, std::span<const double> y,
                        const WindowSearch& search)
{
    if (t.size() != y.size() || t.size() < 10) throw InsufficientDataError("select_window: too few samples");
    if (!(search.width > 0.0) || !(search.step_fraction > 0.0)) {
        throw PreconditionError("select_window: width and step must be positive");
    }
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    const double floor = search.floor * ymax;

    auto candidate = [&](double hi) {
        return model == FitModel::powerlaw ? FitWindow{hi * std::exp(-search.width), hi}
                                           : FitWindow{hi - search.width, hi};
    };
    auto usable = [&](FitWindow w) {
        double wmax = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < w.lo || t[i] > w.hi) continue;
            if (model != FitModel::ringdown && !(std::abs(y[i]) > floor)) return false;
            wmax = std::max(wmax, std::abs(y[i]));
        }
        return wmax > floor;
    };
    auto close = [&](double a, double b, double ref) {
        return std::abs(a - b) <= search.stationarity * std::max(std::abs(ref), 1e-3);
    };

    const double t_first = t.front();
    double hi = t.back();
    for (;;) {
        const FitWindow w = candidate(hi);
        if (w.lo < t_first) break;
        if (usable(w)) {
            try {
                const FitResult full = fit(model, t, y, w);
                const double mid = model == FitModel::powerlaw ? std::sqrt(w.lo * w.hi) : 0.5 * (w.lo + w.hi);
                const FitResult a = fit(model, t, y, {w.lo, mid});
                const FitResult b = fit(model, t, y, {mid, w.hi});
                bool ok = full.residual <= search.max_residual && close(a.rate, b.rate, full.rate) &&
                          close(a.rate, full.rate, full.rate);
                if (model == FitModel::ringdown) {
                    ok = ok && close(*a.frequency, *b.frequency, *full.frequency);
                }
                if (ok) return w;
            } catch (const PreconditionError&) {
            }
        }
        hi = model == FitModel::powerlaw ? hi * std::exp(-search.step_fraction * search.width)
                                         : hi - search.step_fraction * search.width;
    }
    throw InsufficientDataError("select_window: no window with a stationary rate");
}

}  // namespace ymwh
