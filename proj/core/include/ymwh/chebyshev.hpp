#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ymwh {

/// Coefficients a_0..a_N of a finite expansion sum_n a_n T_n(x) in Chebyshev
/// polynomials of the first kind on [-1, 1]. Index lookups outside 0..N
/// (including negative indices) read as zero.
class ChebSeries {
public:
    ChebSeries() : coeffs_(1, 0.0) {}
    explicit ChebSeries(std::size_t order) : coeffs_(order + 1, 0.0) {}
    explicit ChebSeries(std::vector<double> coeffs);

    /// The single polynomial value * T_n, padded with zeros to `order`.
    static ChebSeries unit(std::size_t n, std::size_t order, double value = 1.0);

    std::size_t order() const noexcept { return coeffs_.size() - 1; }
    std::size_t size() const noexcept { return coeffs_.size(); }

    double operator[](std::ptrdiff_t n) const noexcept
    {
        return (n < 0 || static_cast<std::size_t>(n) >= coeffs_.size()) ? 0.0 : coeffs_[static_cast<std::size_t>(n)];
    }
    double& at(std::size_t n) { return coeffs_.at(n); }

    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::span<double> coeffs() noexcept { return coeffs_; }
    const std::vector<double>& vector() const noexcept { return coeffs_; }

    /// Copy truncated or zero-padded to the given order.
    ChebSeries resized(std::size_t order) const;

    double max_abs() const noexcept;

    /// max(|a_N|, |a_{N-1}|) / max|a|; 0 for the zero series. Looking at the
    /// last two entries keeps the measure meaningful for single-parity series.
    double tail_ratio() const noexcept;

    ChebSeries& operator+=(const ChebSeries& other);
    ChebSeries& operator-=(const ChebSeries& other);
    ChebSeries& operator*=(double s);
    friend ChebSeries operator+(ChebSeries a, const ChebSeries& b) { return a += b; }
    friend ChebSeries operator-(ChebSeries a, const ChebSeries& b) { return a -= b; }
    friend ChebSeries operator*(double s, ChebSeries a) { return a *= s; }
    friend ChebSeries operator-(ChebSeries a) { return a *= -1.0; }

    bool operator==(const ChebSeries&) const = default;

private:
    std::vector<double> coeffs_;
};

/// Exact product via T_m T_n = (T_{m+n} + T_{|m-n|})/2; the result has order
/// N_u + N_v.
ChebSeries cheb_product(const ChebSeries& u, const ChebSeries& v);

/// Coefficients of W^3 for W = sum a_n T_n, following the triple-product
/// expansion term by term. The untruncated result has order 3N.
ChebSeries nonlinear_w(const ChebSeries& a);

/// Same as nonlinear_w but only the coefficients w_0..w_max_order.
ChebSeries nonlinear_w(const ChebSeries& a, std::size_t max_order);

/// Raw-span kernel used by the time integrator: writes w_0..w_{out.size()-1}.
void nonlinear_w_into(std::span<const double> a, std::span<double> out);

/// Coefficients z_n of x * d/dx sum a_n T_n(x) = sum z_n T_n(x). Same order
/// as the input (the operator is upper triangular).
ChebSeries x_deriv_z(const ChebSeries& a);
void x_deriv_z_into(std::span<const double> a, std::span<double> out);

/// Coefficients of d/dx of the series (order N-1, or 0 for constants).
ChebSeries cheb_derivative(const ChebSeries& a);

/// Clenshaw evaluation of sum a_n T_n(x). Throws DomainError for |x| > 1.
double eval_series(const ChebSeries& a, double x);
double eval_series(std::span<const double> a, double x);

/// Value at the endpoints x = +1 / x = -1: sum a_n and sum (-1)^n a_n.
double eval_right(std::span<const double> a) noexcept;
double eval_left(std::span<const double> a) noexcept;

/// (x^j) expressed in Chebyshev coefficients, for j = 0..degree of `monomial`.
ChebSeries from_monomial(std::span<const double> monomial);

/// Chebyshev coefficients of the values f_j = f(cos(pi j / M)), j = 0..M,
/// by the discrete cosine (Gauss-Lobatto) construction.
ChebSeries from_lobatto_values(std::span<const double> values);

/// Gauss-Lobatto nodes cos(pi j / M), j = 0..M (descending from +1 to -1).
std::vector<double> lobatto_nodes(std::size_t M);

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(std::size_t n);

/// Squared L^2([-1,1]) norm of the difference of two series, integrated
/// exactly (a rule with enough nodes for the degree of the difference).
double l2_distance_squared(const ChebSeries& u, const ChebSeries& v);

}  // namespace ymwh
