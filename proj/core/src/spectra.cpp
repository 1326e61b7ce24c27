#include "ymwh/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ode_support.hpp"
#include "ymwh/errors.hpp"

namespace ymwh {

std::string to_string(ModeSource s)
{
    switch (s) {
    case ModeSource::closed_form: return "closed_form";
    case ModeSource::pencil: return "pencil";
    case ModeSource::ringdown_fit: return "ringdown_fit";
    }
    return "unknown";
}

std::string Background::label() const
{
    switch (kind) {
    case StaticKind::star: return "W*";
    case StaticKind::ground: return "W0";
    case StaticKind::nonconstant: return "W" + std::to_string(n);
    }
    return "?";
}

void normalize(ModeSet& set)
{
    std::stable_sort(set.modes.begin(), set.modes.end(), [](const Mode& a, const Mode& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
        return a.lambda.imag() > b.lambda.imag();
    });
    set.unstable_count = static_cast<int>(std::count_if(set.modes.begin(), set.modes.end(), [](const Mode& m) {
        return m.lambda.real() > kUnstableThreshold;
    }));
}

namespace {

std::complex<double> recurrence_factor(StaticKind which, double coupling, std::complex<double> lambda, int k)
{
    const double kk = static_cast<double>(k);
    const double shift = which == StaticKind::ground ? 2.0 * coupling : -coupling;
    return lambda * lambda + (2.0 * kk + 1.0) * lambda + kk * (kk + 1.0) + shift;
}

std::vector<std::complex<double>> monomial_to_cheb(const std::vector<std::complex<double>>& c)
{
    std::vector<double> re(c.size()), im(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        re[i] = c[i].real();
        im[i] = c[i].imag();
    }
    const ChebSeries a = from_monomial(re);
    const ChebSeries b = from_monomial(im);
    std::vector<std::complex<double>> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        out[i] = {a[static_cast<std::ptrdiff_t>(i)], b[static_cast<std::ptrdiff_t>(i)]};
    }
    return out;
}

}  // namespace

std::vector<std::complex<double>> closed_eigenpolynomial(StaticKind which, PhysParams params,
                                                         std::complex<double> lambda, int j)
{
    if (which == StaticKind::nonconstant) throw PreconditionError("closed forms exist only for W_* and W_0");
    if (j < 0) throw PreconditionError("closed_eigenpolynomial: j must be nonnegative");
    std::vector<std::complex<double>> c(static_cast<std::size_t>(j) + 1, 0.0);
    c[static_cast<std::size_t>(j % 2)] = 1.0;
    for (int k = j % 2; k + 2 <= j; k += 2) {
        c[static_cast<std::size_t>(k + 2)] = recurrence_factor(which, params.coupling(), lambda, k) /
                                             (static_cast<double>(k + 2) * static_cast<double>(k + 1)) *
                                             c[static_cast<std::size_t>(k)];
    }
    return c;
}

ModeSet closed_spectrum(StaticKind which, PhysParams params, int j_max)
{
    if (which == StaticKind::nonconstant) throw PreconditionError("closed_spectrum: background must be W_* or W_0");
    if (j_max < 0) throw PreconditionError("closed_spectrum: j_max must be nonnegative");
    ModeSet set;
    set.background = which == StaticKind::star ? Background::star() : Background::ground();
    set.params = params;
    const double ell = params.ell();
    for (int j = 0; j <= j_max; ++j) {
        const double base = -static_cast<double>(j) - 0.5;
        for (int branch : {+1, -1}) {
            std::complex<double> lambda;
            if (which == StaticKind::star) {
                lambda = base + branch * (ell + 0.5);
            } else {
                const double disc = 1.0 - 8.0 * params.coupling();
                lambda = disc >= 0.0 ? std::complex<double>(base + branch * 0.5 * std::sqrt(disc), 0.0)
                                     : std::complex<double>(base, branch * 0.5 * std::sqrt(-disc));
            }
            Mode m;
            m.lambda = lambda;
            m.parity = parity_of(j);
            m.source = ModeSource::closed_form;
            m.eigenfunction = monomial_to_cheb(closed_eigenpolynomial(which, params, lambda, j));
            m.j = j;
            m.branch = branch;
            set.modes.push_back(std::move(m));
        }
    }
    normalize(set);
    return set;
}

Eigen::MatrixXd x_deriv_matrix(std::size_t M)
{
    const auto n = static_cast<Eigen::Index>(M + 1);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Z(k, k) = static_cast<double>(k);
        for (Eigen::Index m = k + 2; m < n; m += 2) Z(k, m) = (k == 0 ? 1.0 : 2.0) * static_cast<double>(m);
    }
    return Z;
}

Eigen::MatrixXd multiplication_matrix(const ChebSeries& p, std::size_t M)
{
    const auto n = static_cast<Eigen::Index>(M + 1);
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index c = 0; c < n; ++c) {
            double v = p[k - c] + p[c + k];
            if (k > 0) v += p[c - k];
            P(k, c) = 0.5 * v;
        }
    }
    return P;
}

PencilMatrices pencil_matrices(const ChebSeries& background, PhysParams params, std::size_t M)
{
    if (M < 1) throw PreconditionError("pencil_matrices: M must be positive");
    const ChebSeries w = background.resized(M);
    ChebSeries p = 3.0 * cheb_product(w, w);
    p.at(0) -= 1.0;
    const auto n = static_cast<Eigen::Index>(M + 1);
    const Eigen::MatrixXd Z = x_deriv_matrix(M);
    PencilMatrices out;
    out.A = Z + params.coupling() * multiplication_matrix(p, M);
    for (Eigen::Index k = 0; k < n; ++k) out.A(k, k) += static_cast<double>(k * k);
    out.B = 2.0 * Z + Eigen::MatrixXd::Identity(n, n);
    return out;
}

RawPencilSpectrum pencil_raw(const PencilMatrices& m)
{
    const Eigen::Index n = m.A.rows();
    if (m.A.cols() != n || m.B.rows() != n || m.B.cols() != n) {
        throw PreconditionError("pencil_raw: A and B must be square of the same size");
    }
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    C.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    C.bottomLeftCorner(n, n) = -m.A;
    C.bottomRightCorner(n, n) = -m.B;
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, true);
    if (es.info() != Eigen::Success) throw ResolutionError("pencil eigensolver did not converge");
    RawPencilSpectrum out;
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors().topRows(n);
    return out;
}

ModeSet pencil_eigen(const PencilMatrices& coarse, const PencilMatrices& fine, double filter_margin,
                     Background background, PhysParams params)
{
    if (fine.order() <= coarse.order()) throw PreconditionError("pencil_eigen: fine pencil must have higher order");
    if (!(filter_margin > 0.0)) throw PreconditionError("pencil_eigen: filter_margin must be positive");
    const RawPencilSpectrum c = pencil_raw(coarse);
    const RawPencilSpectrum f = pencil_raw(fine);
    ModeSet set;
    set.background = background;
    set.params = params;
    for (Eigen::Index i = 0; i < c.values.size(); ++i) {
        const std::complex<double> lam = c.values(i);
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < f.values.size(); ++k) best = std::min(best, std::abs(lam - f.values(k)));
        if (!(best <= filter_margin * std::max(1.0, std::abs(lam)))) continue;

        Eigen::VectorXcd v = c.vectors.col(i);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (std::abs(v(imax)) > 0.0) v /= v(imax);
        double even = 0.0, odd = 0.0;
        for (Eigen::Index k = 0; k < v.size(); ++k) (k % 2 == 0 ? even : odd) += std::norm(v(k));
        const double total = even + odd;
        Mode m;
        m.lambda = lam;
        m.source = ModeSource::pencil;
        if (odd <= 1e-8 * total) {
            m.parity = Parity::even;
        } else if (even <= 1e-8 * total) {
            m.parity = Parity::odd;
        } else {
            std::ostringstream msg;
            msg << "pencil_eigen: mode " << lam << " has mixed parity (even mass " << even / total << ")";
            throw ResolutionError(msg.str());
        }
        m.eigenfunction.assign(v.data(), v.data() + v.size());
        set.modes.push_back(std::move(m));
    }
    if (set.modes.empty()) throw ResolutionError("pencil_eigen: no eigenvalue agrees between the two resolutions");
    normalize(set);
    return set;
}

ModeSet pencil_spectrum(const ChebSeries& background, PhysParams params, std::size_t M, Background label,
                        double filter_margin)
{
    return pencil_eigen(pencil_matrices(background, params, M), pencil_matrices(background, params, M + 10),
                        filter_margin, label, params);
}

ModeSet pencil_spectrum(const StaticProfile& profile, std::size_t M, double filter_margin)
{
    const ChebSeries series = to_cheb(profile, M + 10);
    Background label{profile.kind, profile.zero_count};
    return pencil_spectrum(series, profile.params, M, label, filter_margin);
}

std::vector<double> poschl_teller_eigenvalues(PhysParams params)
{
    std::vector<double> out;
    for (int j = 0; static_cast<double>(j) < params.ell(); ++j) {
        const double d = params.ell() - j;
        out.push_back(-d * d);
    }
    return out;
}

namespace {

using State2 = std::array<double, 2>;

// Piecewise cubic Hermite interpolant of the profile on r >= 0.
class ProfileInterpolant {
public:
    explicit ProfileInterpolant(const StaticProfile& p) : p_(p)
    {
        half_ = p.r.size() / 2;
        h_ = p.r.size() > 1 ? p.r[half_ + 1] - p.r[half_] : 1.0;
    }

    double operator()(double r) const
    {
        if (p_.is_constant()) return p_.w_inf;
        const double x = std::abs(r) / h_;
        const auto n_half = p_.r.size() - half_ - 1;
        if (x >= static_cast<double>(n_half)) return r >= 0 ? p_.w_inf : (p_.parity == Parity::odd ? -p_.w_inf : p_.w_inf);
        auto i = static_cast<std::size_t>(x);
        const double t = x - static_cast<double>(i);
        const std::size_t a = half_ + i, b = a + 1;
        const double t2 = t * t, t3 = t2 * t;
        const double v = (2 * t3 - 3 * t2 + 1) * p_.w[a] + (t3 - 2 * t2 + t) * h_ * p_.w_prime[a] +
                         (-2 * t3 + 3 * t2) * p_.w[b] + (t3 - t2) * h_ * p_.w_prime[b];
        return (r < 0 && p_.parity == Parity::odd) ? -v : v;
    }

    double grid_step() const { return h_; }
    double r_max() const { return p_.r.back(); }

private:
    const StaticProfile& p_;
    std::size_t half_ = 0;
    double h_ = 1.0;
};

int half_line_count(const StaticProfile& profile, double sigma, Parity parity)
{
    const ProfileInterpolant W(profile);
    const double L = profile.params.coupling();
    auto sys = [&](const State2& y, State2& dy, double r) {
        const double w = W(r);
        dy[0] = y[1];
        dy[1] = (L * sech2(r) * (3.0 * w * w - 1.0) - sigma) * y[0];
    };
    auto stepper = detail::make_rkf78<State2>(1e-300, 1e-11);
    State2 y = parity == Parity::even ? State2{1.0, 0.0} : State2{0.0, 1.0};
    double r = 0.0;
    double dt = 1e-3;
    const double h = W.grid_step();
    const double r_end = W.r_max();
    const auto steps = static_cast<std::size_t>(std::llround(r_end / h));
    int zeros = 0;
    int sign = parity == Parity::even ? 1 : 0;
    for (std::size_t i = 1; i <= steps; ++i) {
        const State2 prev = y;
        const double r_prev = r;
        detail::advance_to(stepper, sys, y, r, static_cast<double>(i) * h, dt, 1e-15, "sturm integration");
        // sign changes on the Hermite interpolant catch double crossings in one step
        const double step = r - r_prev;
        State2 dp, dc;
        sys(prev, dp, r_prev);
        sys(y, dc, r);
        for (int s = 1; s <= 8; ++s) {
            const double t = s / 8.0;
            const double t2 = t * t, t3 = t2 * t;
            const double v = (2 * t3 - 3 * t2 + 1) * prev[0] + (t3 - 2 * t2 + t) * step * prev[1] +
                             (-2 * t3 + 3 * t2) * y[0] + (t3 - t2) * step * y[1];
            if (v == 0.0) continue;
            const int sv = v > 0 ? 1 : -1;
            if (sign != 0 && sv != sign) ++zeros;
            sign = sv;
        }
        const double mag = std::abs(y[0]) + std::abs(y[1]);
        if (mag > 1e100) {
            y[0] /= mag;
            y[1] /= mag;
        }
    }
    const double kappa = std::sqrt(std::max(0.0, -sigma));
    if (y[0] * (kappa * y[0] + y[1]) < 0.0) ++zeros;
    return zeros;
}

}  // namespace

int count_eigenvalues_below(const StaticProfile& profile, double sigma)
{
    if (!(sigma <= 0.0)) throw PreconditionError("count_eigenvalues_below: sigma must be nonpositive");
    if (profile.kind == StaticKind::star) {
        const double top = profile.params.ell() - std::sqrt(-sigma);
        return top > 0.0 ? static_cast<int>(std::ceil(top)) : 0;
    }
    return half_line_count(profile, sigma, Parity::even) + half_line_count(profile, sigma, Parity::odd);
}

int schrodinger_negative_count(const StaticProfile& profile) { return count_eigenvalues_below(profile, 0.0); }

SigmaCheck sigma_minus_one_check(const StaticProfile& profile)
{
    SigmaCheck out;
    if (profile.is_constant()) return out;
    const std::size_t m = profile.r.size();
    if (m < 9) throw PreconditionError("sigma_minus_one_check: profile grid too small");
    const double L = profile.params.coupling();
    const double h = profile.r[1] - profile.r[0];
    std::vector<double> v(m), dv(m);
    double vmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = profile.r[i];
        const double w = profile.w[i];
        const double d2 = -L * sech2(r) * w * (1.0 - w * w);
        v[i] = std::cosh(r) * profile.w_prime[i];
        dv[i] = std::sinh(r) * profile.w_prime[i] + std::cosh(r) * d2;
        vmax = std::max(vmax, std::abs(v[i]));
    }
    static constexpr std::array<double, 5> c{-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    for (std::size_t i = 4; i + 4 < m; ++i) {
        double d2v = c[0] * v[i];
        for (std::size_t k = 1; k <= 4; ++k) d2v += c[k] * (v[i - k] + v[i + k]);
        d2v /= h * h;
        const double w = profile.w[i];
        const double V = L * sech2(profile.r[i]) * (3.0 * w * w - 1.0);
        out.residual = std::max(out.residual, std::abs(-d2v + V * v[i] + v[i]));
    }
    // sign changes of v, ignoring the numerically zero far tail
    const double floor = 1e-12 * vmax;
    int sign = 0;
    for (std::size_t i = 0; i < m; ++i) {
        auto push = [&](double f) {
            if (std::abs(f) <= floor) return;
            const int s = f > 0 ? 1 : -1;
            if (sign != 0 && s != sign) ++out.zero_count;
            sign = s;
        };
        if (i > 0) {
            for (int s = 1; s < 32; ++s) {
                const double t = s / 32.0;
                const double t2 = t * t, t3 = t2 * t;
                push((2 * t3 - 3 * t2 + 1) * v[i - 1] + (t3 - 2 * t2 + t) * h * dv[i - 1] +
                     (-2 * t3 + 3 * t2) * v[i] + (t3 - t2) * h * dv[i]);
            }
        }
        push(v[i]);
    }
    return out;
}

MorseCheck morse_check(PhysParams params, const StaticOptions& options)
{
    if (params.is_integer()) throw PreconditionError("morse_check: integer ell is excluded");
    MorseCheck out;
    out.morse_index_star = static_cast<int>(poschl_teller_eigenvalues(params).size());
    out.nonconstant_static_count = static_cast<int>(enumerate_statics(params, options).size()) - 2;
    out.consistent = out.morse_index_star == out.nonconstant_static_count + 1;
    return out;
}

}  // namespace ymwh
