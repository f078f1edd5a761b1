#pragma once

#include <utility>
#include <vector>

#include "pfim/linalg.hpp"

namespace pfim {

/// Cantilever Euler-Bernoulli beam: 10 nodes, 9 elements, node 1 clamped.
struct FeBeamParameters {
    double length = 8.0;       // m
    int elements = 9;
    double width = 0.02;       // m
    double height = 0.2;       // m
    double youngs = 3e9;       // Pa
    double density = 7800.0;   // kg/m^3
    double alpha = 0.362;      // Rayleigh mass coefficient, 1/s
    double beta = 5.23e-4;     // Rayleigh stiffness coefficient, s
    double force = 100.0;      // F0, N
    double cubic = 1e6;        // beta1, N/m^3
    double clearance_stiffness = 5e3;  // k2, N/m
    double gap = 0.01;         // delta, m

    [[nodiscard]] double element_length() const { return length / elements; }
    [[nodiscard]] double area() const { return width * height; }
    [[nodiscard]] double inertia() const { return width * height * height * height / 12.0; }
};

struct FeBeamAssembly {
    Matrix mass;       ///< 18 x 18
    Matrix damping;    ///< alpha M + beta K
    Matrix stiffness;  ///< 18 x 18
    Matrix element_mass;
    Matrix element_stiffness;
    int nonlinear_dof = 6;    ///< y5, zero-based
    int excitation_dof = 16;  ///< y10, zero-based
    FeBeamParameters params;
};

[[nodiscard]] Matrix beam_element_stiffness(const FeBeamParameters& p);
[[nodiscard]] Matrix beam_element_mass(const FeBeamParameters& p);

/// Assembles the global matrices and drops the clamped node's two DOFs.
[[nodiscard]] FeBeamAssembly assemble_fe_beam(const FeBeamParameters& p = {});

/// Cubic spring plus one-sided clearance spring acting on y5.
[[nodiscard]] double fe_nonlinear_force(double y5, const FeBeamParameters& p = {});
/// d(fe_nonlinear_force)/dy5; the boundary y5 = -delta takes the cubic-only branch.
[[nodiscard]] double fe_nonlinear_stiffness(double y5, const FeBeamParameters& p = {});

/// Undamped natural frequencies of (M, K) in rad/s, ascending.
[[nodiscard]] std::vector<double> natural_frequencies(const Matrix& mass, const Matrix& stiffness);

/// Rayleigh (alpha, beta) giving damping ratio zeta at w1 and w2.
[[nodiscard]] std::pair<double, double> rayleigh_coefficients(double zeta, double w1, double w2);

}  // namespace pfim
