#include "pfim/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "pfim/errors.hpp"

namespace pfim {
namespace {

constexpr double kScaledNormBound = 0.5;

void require_square(const Matrix& a, const char* what) {
    if (a.rows() < 1 || a.rows() != a.cols()) {
        throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

double norm1(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Number of halvings j so that ||a|| / 2^j <= 0.5.
int squarings_for(double norm) {
    int j = 0;
    if (norm > kScaledNormBound) {
        j = static_cast<int>(std::ceil(std::log2(norm / kScaledNormBound)));
        j = std::max(j, 0);
    }
    return j;
}

// sum_{k=0}^{terms} B^k / k! by Horner.
Matrix taylor_exp(const Matrix& b, int terms) {
    const auto n = b.rows();
    Matrix e = Matrix::Identity(n, n);
    for (int k = terms; k >= 1; --k) {
        e = Matrix::Identity(n, n) + (b * e) / static_cast<double>(k);
    }
    return e;
}

}  // namespace

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) {
        throw DomainError(std::string(what) + ": non-finite entry");
    }
}

Matrix mat_exp(const Matrix& a, int max_term) {
    require_square(a, "mat_exp");
    require_finite(a, "mat_exp");
    if (max_term < 1) throw DomainError("mat_exp: max_term must be >= 1");

    const int j = squarings_for(norm1(a));
    Matrix e = taylor_exp(a / std::ldexp(1.0, j), max_term);
    for (int i = 0; i < j; ++i) e = e * e;
    return e;
}

Matrix phi1(const Matrix& a, double dt) {
    require_square(a, "phi1");
    require_finite(a, "phi1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("phi1: dt must be positive");

    const auto n = a.rows();
    const int j = squarings_for(norm1(a) * dt);
    const double hs = dt / std::ldexp(1.0, j);
    const Matrix b = a * hs;

    // hs * sum_k b^k / (k+1)!  via Horner: S = I + b/2 (I + b/3 (I + ...)).
    Matrix s = Matrix::Identity(n, n);
    for (int k = kTaylorTerms; k >= 1; --k) {
        s = Matrix::Identity(n, n) + (b * s) / static_cast<double>(k + 1);
    }
    Matrix p = s * hs;
    Matrix e = taylor_exp(b, kTaylorTerms);
    for (int i = 0; i < j; ++i) {
        p = (e + Matrix::Identity(n, n)) * p;
        e = e * e;
    }
    return p;
}

ExpMoments exp_with_moments(const Matrix& a, double h, std::span<const PolynomialInput> inputs) {
    require_square(a, "exp_with_moments");
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("exp_with_moments: h must be positive");
    const auto n = a.rows();

    const int j = squarings_for(norm1(a) * h);
    double hs = h / std::ldexp(1.0, j);
    const Matrix b = a * hs;

    // moments[q][m][l] = M_l(hs) c_{q,m} with M_l(t) = int_0^t exp(A(t-s)) s^l / l! ds.
    // At the scaled step M_l(hs) c = hs^{l+1} sum_k b^k c / (k+l+1)!.
    std::vector<std::vector<std::vector<Vector>>> moments(inputs.size());
    for (std::size_t q = 0; q < inputs.size(); ++q) {
        const auto& poly = inputs[q];
        moments[q].resize(poly.size());
        for (std::size_t m = 0; m < poly.size(); ++m) {
            if (poly[m].size() != n) throw DimensionError("exp_with_moments: input length mismatch");
            // Powers b^k c for k = 0..kTaylorTerms.
            std::array<Vector, kTaylorTerms + 1> powers;
            powers[0] = poly[m];
            for (int k = 1; k <= kTaylorTerms; ++k) powers[k] = b * powers[k - 1];

            moments[q][m].resize(m + 1);
            for (std::size_t l = 0; l <= m; ++l) {
                Vector acc = Vector::Zero(n);
                double fact = 1.0;  // (l+1)!
                for (std::size_t i = 2; i <= l + 1; ++i) fact *= static_cast<double>(i);
                for (int k = 0; k <= kTaylorTerms; ++k) {
                    if (k > 0) fact *= static_cast<double>(k + l + 1);
                    acc += powers[k] / fact;
                }
                moments[q][m][l] = acc * std::pow(hs, static_cast<double>(l + 1));
            }
        }
    }

    Matrix e = taylor_exp(b, kTaylorTerms);
    std::vector<Vector> next;
    for (int level = 0; level < j; ++level) {
        // M_l(2t) c = E(t) M_l(t) c + sum_{i<=l} t^{l-i}/(l-i)! M_i(t) c
        for (auto& per_input : moments) {
            for (auto& ml : per_input) {
                next.assign(ml.size(), Vector());
                for (std::size_t l = 0; l < ml.size(); ++l) {
                    Vector v = e * ml[l] + ml[l];
                    double coef = 1.0;
                    for (std::size_t i = l; i-- > 0;) {
                        coef *= hs / static_cast<double>(l - i);
                        v += coef * ml[i];
                    }
                    next[l] = std::move(v);
                }
                ml.swap(next);
            }
        }
        e = e * e;
        hs *= 2.0;
    }

    ExpMoments out;
    out.transition = std::move(e);
    out.responses.reserve(inputs.size());
    for (auto& per_input : moments) {
        Vector r = Vector::Zero(n);
        for (std::size_t m = 0; m < per_input.size(); ++m) r += per_input[m][m];
        out.responses.push_back(std::move(r));
    }
    return out;
}

Vector solve_dense(const Matrix& a, const Vector& b) {
    require_square(a, "solve_dense");
    if (b.size() != a.rows()) throw DimensionError("solve_dense: rhs length mismatch");
    require_finite(a, "solve_dense");

    const auto n = a.rows();
    Matrix lu = a;
    Vector x = b;
    const double threshold = 1e-14 * lu.cwiseAbs().maxCoeff();

    // Right-looking LU, applying the row swaps to the right-hand side as we go.
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index p = 0;
        lu.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
        p += k;
        if (!(std::abs(lu(p, k)) > threshold)) {
            throw SingularSystemError(static_cast<std::size_t>(k),
                                      "solve_dense: numerically singular at pivot " + std::to_string(k));
        }
        if (p != k) {
            lu.row(p).swap(lu.row(k));
            std::swap(x(p), x(k));
        }
        const Eigen::Index rest = n - k - 1;
        if (rest == 0) continue;
        lu.col(k).tail(rest) /= lu(k, k);
        x.tail(rest) -= lu.col(k).tail(rest) * x(k);
        lu.bottomRightCorner(rest, rest).noalias() -= lu.col(k).tail(rest) * lu.row(k).tail(rest);
    }
    lu.triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

ComplexSpectrum eigenvalues(const Matrix& a) {
    require_square(a, "eigenvalues");
    require_finite(a, "eigenvalues");
    Eigen::EigenSolver<Matrix> solver;
    solver.setMaxIterations(30 * a.rows());
    solver.compute(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("eigenvalues: QR iteration did not converge");
    }
    const auto& values = solver.eigenvalues();
    return ComplexSpectrum(values.data(), values.data() + values.size());
}

}  // namespace pfim
