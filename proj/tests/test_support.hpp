#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>

#include "ymwh/chebyshev.hpp"

namespace ymwh::test {

/// Seed of the randomized property tests; YMWH_TEST_SEED overrides it.
inline std::uint64_t seed()
{
    if (const char* s = std::getenv("YMWH_TEST_SEED")) return std::strtoull(s, nullptr, 10);
    return 20231014u;
}

inline ChebSeries random_series(std::mt19937_64& rng, std::size_t order, double scale = 1.0)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    ChebSeries s(order);
    for (std::size_t n = 0; n <= order; ++n) s.at(n) = u(rng);
    return s;
}

/// T_n(x) = cos(n arccos x).
inline double chebyshev_t(std::size_t n, double x) { return std::cos(static_cast<double>(n) * std::acos(x)); }

/// T_n'(x) = n U_{n-1}(x) by the U recurrence.
inline double chebyshev_t_prime(std::size_t n, double x)
{
    if (n == 0) return 0.0;
    double u_prev = 1.0, u = 2.0 * x;  // U_0, U_1
    if (n == 1) return 1.0;
    for (std::size_t k = 2; k < n; ++k) {
        const double next = 2.0 * x * u - u_prev;
        u_prev = u;
        u = next;
    }
    return static_cast<double>(n) * u;
}

inline double direct_value(const ChebSeries& s, double x)
{
    double v = 0.0;
    for (std::size_t n = 0; n <= s.order(); ++n) v += s[static_cast<std::ptrdiff_t>(n)] * chebyshev_t(n, x);
    return v;
}

inline double direct_derivative(const ChebSeries& s, double x)
{
    double v = 0.0;
    for (std::size_t n = 0; n <= s.order(); ++n) v += s[static_cast<std::ptrdiff_t>(n)] * chebyshev_t_prime(n, x);
    return v;
}

}  // namespace ymwh::test
