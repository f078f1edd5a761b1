#include "pfim/fe_beam.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "pfim/errors.hpp"

namespace pfim {

Matrix beam_element_stiffness(const FeBeamParameters& p) {
    const double l = p.element_length();
    const double s = p.youngs * p.inertia() / (l * l * l);
    Matrix k(4, 4);
    k << 12, 6 * l, -12, 6 * l,
         6 * l, 4 * l * l, -6 * l, 2 * l * l,
         -12, -6 * l, 12, -6 * l,
         6 * l, 2 * l * l, -6 * l, 4 * l * l;
    return s * k;
}

Matrix beam_element_mass(const FeBeamParameters& p) {
    const double l = p.element_length();
    const double s = p.density * p.area() * l / 420.0;
    Matrix m(4, 4);
    m << 156, 22 * l, 54, -13 * l,
         22 * l, 4 * l * l, 13 * l, -3 * l * l,
         54, 13 * l, 156, -22 * l,
         -13 * l, -3 * l * l, -22 * l, 4 * l * l;
    return s * m;
}

FeBeamAssembly assemble_fe_beam(const FeBeamParameters& p) {
    if (p.elements < 1) throw ParameterError("fe-beam needs at least one element");
    FeBeamAssembly out;
    out.params = p;
    out.element_stiffness = beam_element_stiffness(p);
    out.element_mass = beam_element_mass(p);

    const int full = 2 * (p.elements + 1);
    Matrix m = Matrix::Zero(full, full);
    Matrix k = Matrix::Zero(full, full);
    for (int e = 0; e < p.elements; ++e) {
        m.block(2 * e, 2 * e, 4, 4) += out.element_mass;
        k.block(2 * e, 2 * e, 4, 4) += out.element_stiffness;
    }
    const int reduced = full - 2;
    out.mass = m.bottomRightCorner(reduced, reduced);
    out.stiffness = k.bottomRightCorner(reduced, reduced);
    out.damping = p.alpha * out.mass + p.beta * out.stiffness;
    out.nonlinear_dof = 2 * (5 - 1) - 2;             // y5
    out.excitation_dof = 2 * (p.elements + 1 - 1) - 2;  // y at the free end
    return out;
}

double fe_nonlinear_force(double y5, const FeBeamParameters& p) {
    const double cubic = p.cubic * y5 * y5 * y5;
    if (y5 < -p.gap) return cubic + p.clearance_stiffness * (y5 + p.gap);
    return cubic;
}

double fe_nonlinear_stiffness(double y5, const FeBeamParameters& p) {
    const double cubic = 3.0 * p.cubic * y5 * y5;
    if (y5 < -p.gap) return cubic + p.clearance_stiffness;
    return cubic;
}

std::vector<double> natural_frequencies(const Matrix& mass, const Matrix& stiffness) {
    if (mass.rows() != mass.cols() || stiffness.rows() != stiffness.cols() ||
        mass.rows() != stiffness.rows()) {
        throw DimensionError("natural_frequencies: shape mismatch");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(stiffness, mass, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("natural_frequencies: generalized eigenproblem failed");
    }
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(mass.rows()));
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        w.push_back(std::sqrt(std::max(solver.eigenvalues()(i), 0.0)));
    }
    std::sort(w.begin(), w.end());
    return w;
}

std::pair<double, double> rayleigh_coefficients(double zeta, double w1, double w2) {
    if (!(w1 > 0.0 && w2 > 0.0)) throw DomainError("rayleigh_coefficients: frequencies must be > 0");
    return {2.0 * zeta * w1 * w2 / (w1 + w2), 2.0 * zeta / (w1 + w2)};
}

}  // namespace pfim
