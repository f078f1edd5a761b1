#pragma once

// Dense small-matrix kernels: matrix exponential, phi-function integrals,
// pivoted dense solve and nonsymmetric eigenvalues.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pfim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexSpectrum = std::vector<std::complex<double>>;

/// Taylor terms used on the scaled matrix (scaled 1-norm <= 0.5).
inline constexpr int kTaylorTerms = 12;

/// exp(A) by scaling and squaring: A is scaled by 2^-j until its 1-norm is at
/// most 0.5, a truncated Taylor series of `max_term` terms is summed, and the
/// result is squared j times.
[[nodiscard]] Matrix mat_exp(const Matrix& a, int max_term = kTaylorTerms);

/// Integral of exp(A (dt - s)) over s in [0, dt], i.e. (exp(A dt) - I) A^-1.
/// Evaluated from the power series dt * sum_k (A dt)^k / (k+1)!, so singular A
/// is fine.
[[nodiscard]] Matrix phi1(const Matrix& a, double dt);

/// Polynomial input on [0, h] given by derivative coefficients at s = 0:
/// u(s) = sum_m coeffs[m] * s^m / m!.
using PolynomialInput = std::vector<Vector>;

struct ExpMoments {
    Matrix transition;             ///< exp(A h)
    std::vector<Vector> responses; ///< integral of exp(A (h - s)) u_k(s) ds, one per input
};

/// Exact response of x' = A x + u_k(s) over one step of length h from x = 0,
/// for each polynomial input, together with exp(A h). Uses the same scaling
/// and squaring as mat_exp; the polynomial moments are doubled alongside the
/// exponential, acting only on vectors.
[[nodiscard]] ExpMoments exp_with_moments(const Matrix& a, double h,
                                          std::span<const PolynomialInput> inputs);

/// Solves A x = b by LU with partial pivoting. Throws SingularSystemError when
/// a pivot falls below 1e-14 times the largest entry of A.
[[nodiscard]] Vector solve_dense(const Matrix& a, const Vector& b);

/// All eigenvalues of a real square matrix (Hessenberg reduction followed by
/// shifted QR). Throws ConvergenceError after 30 * dim iterations.
[[nodiscard]] ComplexSpectrum eigenvalues(const Matrix& a);

/// Throws DomainError if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what);

}  // namespace pfim
