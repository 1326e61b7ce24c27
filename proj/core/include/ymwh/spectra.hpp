#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ymwh/chebyshev.hpp"
#include "ymwh/params.hpp"
#include "ymwh/static_solver.hpp"

namespace ymwh {

enum class ModeSource { closed_form, pencil, ringdown_fit };

std::string to_string(ModeSource s);

/// A solution w = e^{lambda tau} u(x) of the linearized hyperboloidal
/// equation about a static background, where
///   (A + lambda B + lambda^2) u = 0,
///   A = -d/dx((1 - x^2) d/dx) + l(l+1)(3 W^2 - 1),  B = 2 x d/dx + 1.
struct Mode {
    std::complex<double> lambda;
    Parity parity = Parity::even;
    ModeSource source = ModeSource::pencil;
    /// Complex Chebyshev coefficients of u; empty when not available.
    std::vector<std::complex<double>> eigenfunction;
    /// Closed-form label (j, +1 or -1); zero otherwise.
    int j = -1;
    int branch = 0;
};

/// Which constant or nonconstant static solution the modes belong to.
struct Background {
    StaticKind kind = StaticKind::star;
    int n = 0;

    static Background star() { return {StaticKind::star, 0}; }
    static Background ground() { return {StaticKind::ground, 0}; }
    static Background static_n(int n) { return {StaticKind::nonconstant, n}; }
    std::string label() const;
};

struct ModeSet {
    Background background;
    PhysParams params{1.0};
    /// Real unstable eigenvalues (descending) first, then the rest by
    /// descending real part; conjugate pairs with the positive imaginary
    /// part first.
    std::vector<Mode> modes;
    int unstable_count = 0;
};

/// Sorts by the ordering convention and recomputes unstable_count.
void normalize(ModeSet& set);

/// Threshold below which a real part counts as zero in unstable_count.
inline constexpr double kUnstableThreshold = 1e-10;

/// Spectra of W_* (lambda = -j - 1/2 +- (l + 1/2)) or W_0
/// (lambda = -j - 1/2 +- sqrt(1 - 8 l(l+1))/2) for j = 0..j_max, with the
/// polynomial eigenfunctions from the two-term recurrences.
ModeSet closed_spectrum(StaticKind which, PhysParams params, int j_max);

/// Monomial coefficients c_0..c_j of the closed-form eigenfunction with
/// seed c_{j mod 2} = 1 (complex when lambda is).
std::vector<std::complex<double>> closed_eigenpolynomial(StaticKind which, PhysParams params,
                                                         std::complex<double> lambda, int j);

struct PencilMatrices {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    std::size_t order() const { return static_cast<std::size_t>(A.rows()) - 1; }
};

/// (M+1)x(M+1) Chebyshev-basis matrices of A and B for the given background
/// series (read through degree M).
PencilMatrices pencil_matrices(const ChebSeries& background, PhysParams params, std::size_t M);

/// Matrix of multiplication by p on Chebyshev coefficients 0..M (entries of
/// p up to degree 2M are used).
Eigen::MatrixXd multiplication_matrix(const ChebSeries& p, std::size_t M);

/// Matrix of x d/dx on Chebyshev coefficients 0..M.
Eigen::MatrixXd x_deriv_matrix(std::size_t M);

/// All 2(M+1) eigenvalues with eigenvectors of the companion linearization
/// [0 I; -A -B], unfiltered.
struct RawPencilSpectrum {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // first M+1 rows of the companion eigenvectors
};
RawPencilSpectrum pencil_raw(const PencilMatrices& m);

/// Eigenvalues of the coarse pencil that reappear in the fine one within
/// margin * max(1, |lambda|); parity labelled from the coefficient support.
/// Throws ResolutionError if nothing survives or a surviving mode has mixed
/// parity.
ModeSet pencil_eigen(const PencilMatrices& coarse, const PencilMatrices& fine, double filter_margin = 1e-6,
                     Background background = Background::star(), PhysParams params = PhysParams(1.0));

/// Convenience: builds the pencils at M and M + 10 from the background and
/// filters.
ModeSet pencil_spectrum(const ChebSeries& background, PhysParams params, std::size_t M, Background label,
                        double filter_margin = 1e-6);

/// Pencil spectrum of a static profile (resampled in Chebyshev at M + 10).
ModeSet pencil_spectrum(const StaticProfile& profile, std::size_t M, double filter_margin = 1e-6);

/// Number of eigenvalues of L_n = -d^2/dr^2 + V_n below sigma (sigma <= 0),
/// by Sturm node counting of the even and odd solutions. W_* uses the
/// closed-form count.
int count_eigenvalues_below(const StaticProfile& profile, double sigma);

/// Number of negative eigenvalues of L_n.
int schrodinger_negative_count(const StaticProfile& profile);

struct SigmaCheck {
    double residual = 0.0;  // sup |L_n v + v| over the grid
    int zero_count = 0;     // sign changes of v over the full line
};

/// v = cosh(r) W'(r) against the eigenrelation L_n v = -v, with an
/// eighth-order finite-difference second derivative.
SigmaCheck sigma_minus_one_check(const StaticProfile& profile);

struct MorseCheck {
    int morse_index_star = 0;
    int nonconstant_static_count = 0;
    bool consistent = false;  // index = count + 1
};

MorseCheck morse_check(PhysParams params, const StaticOptions& options = {});

/// The closed-form negative eigenvalues -(l - j)^2 of the W_* operator.
std::vector<double> poschl_teller_eigenvalues(PhysParams params);

}  // namespace ymwh
