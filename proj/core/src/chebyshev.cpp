#include "ymwh/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ymwh/errors.hpp"

namespace ymwh {

ChebSeries::ChebSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs))
{
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

ChebSeries ChebSeries::unit(std::size_t n, std::size_t order, double value)
{
    ChebSeries s(std::max(n, order));
    s.coeffs_[n] = value;
    return s;
}

ChebSeries ChebSeries::resized(std::size_t order) const
{
    std::vector<double> c(order + 1, 0.0);
    std::copy_n(coeffs_.begin(), std::min(coeffs_.size(), c.size()), c.begin());
    return ChebSeries(std::move(c));
}

double ChebSeries::max_abs() const noexcept
{
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double ChebSeries::tail_ratio() const noexcept
{
    const double m = max_abs();
    if (m == 0.0) return 0.0;
    const auto N = static_cast<std::ptrdiff_t>(order());
    return std::max(std::abs((*this)[N]), std::abs((*this)[N - 1])) / m;
}

ChebSeries& ChebSeries::operator+=(const ChebSeries& other)
{
    if (other.size() > coeffs_.size()) coeffs_.resize(other.size(), 0.0);
    for (std::size_t i = 0; i < other.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

ChebSeries& ChebSeries::operator-=(const ChebSeries& other)
{
    if (other.size() > coeffs_.size()) coeffs_.resize(other.size(), 0.0);
    for (std::size_t i = 0; i < other.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

ChebSeries& ChebSeries::operator*=(double s)
{
    for (double& c : coeffs_) c *= s;
    return *this;
}

ChebSeries cheb_product(const ChebSeries& u, const ChebSeries& v)
{
    const std::size_t nu = u.order();
    const std::size_t nv = v.order();
    std::vector<double> out(nu + nv + 1, 0.0);
    for (std::size_t m = 0; m <= nu; ++m) {
        const double um = u[static_cast<std::ptrdiff_t>(m)];
        if (um == 0.0) continue;
        for (std::size_t n = 0; n <= nv; ++n) {
            const double p = 0.5 * um * v[static_cast<std::ptrdiff_t>(n)];
            out[m + n] += p;
            out[m > n ? m - n : n - m] += p;
        }
    }
    return ChebSeries(std::move(out));
}

void nonlinear_w_into(std::span<const double> a, std::span<double> out)
{
    const auto N = static_cast<std::ptrdiff_t>(a.size()) - 1;
    const std::ptrdiff_t smax = 2 * N;

    // Group the double sum over (m, n) by s = m + n and by s = |m - n|:
    // pair[s] = sum_{m+n=s} a_m a_n + sum_{|m-n|=s} a_m a_n over ordered pairs.
    thread_local std::vector<double> pair;
    thread_local std::vector<double> padded;
    pair.assign(static_cast<std::size_t>(smax + 1), 0.0);
    double sum_sq = 0.0;
    for (std::ptrdiff_t m = 0; m <= N; ++m) {
        const double am = a[static_cast<std::size_t>(m)];
        if (am == 0.0) continue;
        sum_sq += am * am;
        for (std::ptrdiff_t n = 0; n <= N; ++n) {
            const double p = am * a[static_cast<std::size_t>(n)];
            pair[static_cast<std::size_t>(m + n)] += p;
            pair[static_cast<std::size_t>(m > n ? m - n : n - m)] += p;
        }
    }

    // a_i stored at padded[i + offset], zero outside 0..N, so that every
    // index k - s, k + s and s - k below is in range.
    const std::ptrdiff_t offset = 3 * N;
    padded.assign(static_cast<std::size_t>(8 * N + 1), 0.0);
    std::copy(a.begin(), a.end(), padded.begin() + offset);
    const double* pa = padded.data() + offset;
    const double* pp = pair.data();

    const auto K = std::min(static_cast<std::ptrdiff_t>(out.size()) - 1, 3 * N);
    if (K >= 0) {
        const double a0 = a[0];
        double acc = a0 * a0 * a0 + a0 * sum_sq;
        for (std::ptrdiff_t s = 0; s <= N; ++s) acc += pp[s] * pa[s];
        out[0] = 0.25 * acc;
    }
    for (std::ptrdiff_t k = 1; k <= K; ++k) {
        double acc = 0.0;
        for (std::ptrdiff_t s = 0; s <= smax; ++s) acc += pp[s] * (pa[k - s] + pa[k + s] + pa[s - k]);
        out[static_cast<std::size_t>(k)] = 0.25 * acc;
    }
    for (std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(K + 1, 0)); k < out.size(); ++k) out[k] = 0.0;
}

ChebSeries nonlinear_w(const ChebSeries& a, std::size_t max_order)
{
    ChebSeries w(max_order);
    nonlinear_w_into(a.coeffs(), w.coeffs());
    return w;
}

ChebSeries nonlinear_w(const ChebSeries& a) { return nonlinear_w(a, 3 * a.order()); }

void x_deriv_z_into(std::span<const double> a, std::span<double> out)
{
    // suffix[k] = sum over i >= k with i = k (mod 2) of i * a_i
    const std::size_t n = a.size();
    thread_local std::vector<double> suffix;
    suffix.assign(n + 2, 0.0);
    for (std::size_t k = n; k-- > 0;) suffix[k] = static_cast<double>(k) * a[k] + suffix[k + 2];
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (k >= n) {
            out[k] = 0.0;
        } else if (k == 0) {
            out[0] = suffix[0];
        } else {
            out[k] = 2.0 * suffix[k] - static_cast<double>(k) * a[k];
        }
    }
}

ChebSeries x_deriv_z(const ChebSeries& a)
{
    ChebSeries z(a.order());
    x_deriv_z_into(a.coeffs(), z.coeffs());
    return z;
}

ChebSeries cheb_derivative(const ChebSeries& a)
{
    const std::size_t N = a.order();
    if (N == 0) return ChebSeries(0);
    std::vector<double> b(N + 1, 0.0);  // b[N] stays zero
    for (std::size_t k = N; k >= 1; --k) {
        b[k - 1] = (k + 1 <= N ? b[k + 1] : 0.0) + 2.0 * static_cast<double>(k) * a[static_cast<std::ptrdiff_t>(k)];
    }
    b[0] *= 0.5;
    b.pop_back();
    return ChebSeries(std::move(b));
}

double eval_series(std::span<const double> a, double x)
{
    if (!(std::abs(x) <= 1.0)) throw DomainError("Chebyshev series evaluated outside [-1, 1]");
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = a.size(); k-- > 1;) {
        const double b0 = a[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return a[0] + x * b1 - b2;
}

double eval_series(const ChebSeries& a, double x) { return eval_series(a.coeffs(), x); }

double eval_right(std::span<const double> a) noexcept
{
    double s = 0.0;
    for (double c : a) s += c;
    return s;
}

double eval_left(std::span<const double> a) noexcept
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (k % 2 == 0) ? a[k] : -a[k];
    return s;
}

ChebSeries from_monomial(std::span<const double> monomial)
{
    if (monomial.empty()) return ChebSeries(0);
    const std::size_t J = monomial.size() - 1;
    std::vector<double> p(J + 1, 0.0);
    p[0] = monomial[J];
    std::size_t deg = 0;
    for (std::size_t j = J; j-- > 0;) {
        // p <- x * p + c_j, with x T_n = (T_{n+1} + T_{|n-1|}) / 2
        std::vector<double> q(J + 1, 0.0);
        for (std::size_t n = 0; n <= deg; ++n) {
            if (n == 0) {
                q[1] += p[0];
            } else {
                q[n + 1] += 0.5 * p[n];
                q[n - 1] += 0.5 * p[n];
            }
        }
        q[0] += monomial[j];
        p = std::move(q);
        ++deg;
    }
    return ChebSeries(std::move(p));
}

std::vector<double> lobatto_nodes(std::size_t M)
{
    std::vector<double> x(M + 1);
    if (M == 0) {
        x[0] = 1.0;
        return x;
    }
    for (std::size_t j = 0; j <= M; ++j) {
        // sin form keeps the nodes exactly antisymmetric
        x[j] = std::sin(std::numbers::pi * (static_cast<double>(M) - 2.0 * static_cast<double>(j)) /
                        (2.0 * static_cast<double>(M)));
    }
    return x;
}

ChebSeries from_lobatto_values(std::span<const double> values)
{
    if (values.size() < 2) return ChebSeries(std::vector<double>(values.begin(), values.end()));
    const std::size_t M = values.size() - 1;
    std::vector<double> a(M + 1, 0.0);
    for (std::size_t k = 0; k <= M; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= M; ++j) {
            const double w = (j == 0 || j == M) ? 0.5 : 1.0;
            // cos(pi j k / M) with the argument reduced mod 2M for accuracy
            const std::size_t r = (j * k) % (2 * M);
            acc += w * values[j] * std::cos(std::numbers::pi * static_cast<double>(r) / static_cast<double>(M));
        }
        a[k] = 2.0 * acc / static_cast<double>(M);
    }
    a[0] *= 0.5;
    a[M] *= 0.5;
    return ChebSeries(std::move(a));
}

QuadratureRule gauss_legendre(std::size_t n)
{
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                                  static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = x;
        rule.nodes[n - 1 - i] = -x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

double l2_distance_squared(const ChebSeries& u, const ChebSeries& v)
{
    const ChebSeries d = u - v;
    const ChebSeries d2 = cheb_product(d, d);
    // int_{-1}^{1} T_k = 2 / (1 - k^2) for even k, 0 for odd k
    double acc = 0.0;
    for (std::size_t k = 0; k <= d2.order(); k += 2) {
        acc += d2[static_cast<std::ptrdiff_t>(k)] * 2.0 / (1.0 - static_cast<double>(k * k));
    }
    return acc;
}

}  // namespace ymwh
