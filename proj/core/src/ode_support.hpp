#pragma once

// Internal helpers wrapping Boost.Odeint controlled steppers.

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#if defined(__SSE__) || defined(_M_X64)
#include <xmmintrin.h>
#define YMWH_HAVE_MXCSR 1
#endif

#include "ymwh/errors.hpp"

namespace ymwh::detail {

namespace odeint = boost::numeric::odeint;

/// Flushes subnormal results to zero for the lifetime of the object.
/// Decaying coefficients otherwise spend most of a long run in subnormal
/// arithmetic, which is orders of magnitude slower.
class FlushDenormals {
public:
    FlushDenormals()
    {
#ifdef YMWH_HAVE_MXCSR
        saved_ = _mm_getcsr();
        _mm_setcsr(saved_ | 0x8040u);  // FTZ | DAZ
#endif
    }
    ~FlushDenormals()
    {
#ifdef YMWH_HAVE_MXCSR
        _mm_setcsr(saved_);
#endif
    }
    FlushDenormals(const FlushDenormals&) = delete;
    FlushDenormals& operator=(const FlushDenormals&) = delete;

private:
    unsigned int saved_ = 0;
};

template <class State>
using Rkf78 = odeint::runge_kutta_fehlberg78<State>;

template <class State>
auto make_rkf78(double atol, double rtol)
{
    return odeint::make_controlled(atol, rtol, Rkf78<State>());
}

template <class State>
bool all_finite(const State& x)
{
    return std::all_of(std::begin(x), std::end(x), [](double v) { return std::isfinite(v); });
}

/// Advances x from t to exactly t_end with adaptive steps. `dt` carries the
/// step-size suggestion across calls. Throws StiffnessError when the step
/// collapses below `dt_min` and BlowupError on nonfinite states.
template <class Stepper, class System, class State>
void advance_to(Stepper& stepper, System&& sys, State& x, double& t, double t_end, double& dt, double dt_min,
                const char* what)
{
    const double snap = 1e-13 * std::max(1.0, std::abs(t_end));
    int fails = 0;
    while (t_end - t > snap) {
        const double remaining = t_end - t;
        const bool clipped = dt >= remaining;
        double h = clipped ? remaining : dt;
        const State backup = x;
        const auto res = stepper.try_step(sys, x, t, h);
        if (res == odeint::success) {
            if (!all_finite(x)) {
                x = backup;
                throw BlowupError(std::string(what) + ": nonfinite state", t);
            }
            if (!clipped) dt = h;
            fails = 0;
        } else {
            dt = h;
            if (dt < dt_min || ++fails > 200) {
                throw StiffnessError(std::string(what) + ": step size collapsed at " + std::to_string(t));
            }
        }
    }
    t = t_end;
}

/// Fehlberg 7(8) pair with a relative error norm: component i of the local
/// error estimate is scaled by atol + rtol * max(|x_i before|, |x_i after|).
/// Unlike a scale built from the old state alone, components that start
/// exactly at rest get a meaningful tolerance, so atol can be made tiny for
/// coefficients that must stay accurate far below unity.
template <class State>
class Rkf78Driver {
public:
    Rkf78Driver(double atol, double rtol, double dt_initial) : atol_(atol), rtol_(rtol), dt_(dt_initial) {}

    template <class System>
    void advance(System& sys, State& x, double& t, double t_end, double dt_min, const char* what)
    {
        const double snap = 1e-13 * std::max(1.0, std::abs(t_end));
        out_.resize(x.size());
        err_.resize(x.size());
        while (t_end - t > snap) {
            const double remaining = t_end - t;
            const bool clipped = dt_ >= remaining;
            const double h = clipped ? remaining : dt_;
            stepper_.do_step(sys, x, t, out_, h, err_);
            if (!all_finite(out_)) {
                dt_ = 0.25 * h;
                if (dt_ < dt_min) throw BlowupError(std::string(what) + ": nonfinite state", t);
                continue;
            }
            double e = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double sc = atol_ + rtol_ * std::max(std::abs(x[i]), std::abs(out_[i]));
                e = std::max(e, std::abs(err_[i]) / sc);
            }
            const double factor = e > 0.0 ? std::clamp(0.9 * std::pow(e, -1.0 / 8.0), 0.2, 5.0) : 5.0;
            if (e <= 1.0) {
                x.swap(out_);
                t += h;
                if (!clipped || h * factor < dt_) dt_ = h * factor;
            } else {
                dt_ = h * std::max(factor, 0.2);
                if (dt_ < dt_min) {
                    throw StiffnessError(std::string(what) + ": step size collapsed at " + std::to_string(t));
                }
            }
        }
        t = t_end;
    }

    double dt() const noexcept { return dt_; }

private:
    double atol_;
    double rtol_;
    double dt_;
    Rkf78<State> stepper_;
    State out_;
    State err_;
};

}  // namespace ymwh::detail
