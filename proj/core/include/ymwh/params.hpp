#pragma once

#include <cmath>
#include <string>

#include "ymwh/errors.hpp"

namespace ymwh {

/// Dimensionless coupling of the model. The throat radius alpha enters only
/// through ell*(ell+1) = 1/alpha^2.
class PhysParams {
public:
    explicit PhysParams(double ell) : ell_(ell)
    {
        if (!(ell > 0.0) || !std::isfinite(ell)) {
            throw PreconditionError("coupling ell must be a positive finite number");
        }
    }

    static PhysParams from_alpha(double alpha)
    {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            throw PreconditionError("throat radius alpha must be a positive finite number");
        }
        // positive root of ell^2 + ell - alpha^-2 = 0
        const double c = 1.0 / (alpha * alpha);
        return PhysParams(2.0 * c / (1.0 + std::sqrt(1.0 + 4.0 * c)));
    }

    double ell() const noexcept { return ell_; }
    /// ell*(ell+1), the coefficient of the potential term.
    double coupling() const noexcept { return ell_ * (ell_ + 1.0); }
    double alpha() const noexcept { return 1.0 / std::sqrt(coupling()); }

    bool is_integer(double tol = 1e-12) const noexcept
    {
        return std::abs(ell_ - std::round(ell_)) <= tol * std::max(1.0, ell_);
    }

    /// Largest integer strictly below ell.
    int floor_strict() const noexcept
    {
        const double f = std::floor(ell_);
        return static_cast<int>(f == ell_ ? f - 1.0 : f);
    }

private:
    double ell_;
};

enum class Parity { even, odd };

inline Parity parity_of(int n) noexcept { return (n % 2 == 0) ? Parity::even : Parity::odd; }

inline std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

}  // namespace ymwh
