#pragma once

// Baseline periodic solvers used as oracles: shooting with fixed-step RK4,
// harmonic balance with alternating frequency-time evaluation, and plain
// long-run integration.

#include "pfim/system_model.hpp"

namespace pfim {

/// Classical RK4 from physical time t0 over t_span in n_s equal steps. The
/// system is evaluated at tau = omega * t. Throws BlowUpError on a non-finite
/// state.
[[nodiscard]] Vector rk4_flow(const SystemModel& sys, const Vector& x0, double omega, double t_span,
                              long n_s, double t0 = 0.0);

/// Integrates one period 2 pi / omega from x0 and records the state on the
/// n_p-interval grid, using `steps_per_interval` RK4 steps between nodes.
/// The last node is replaced by the first.
[[nodiscard]] PeriodicTrajectory sample_orbit(const SystemModel& sys, const Vector& x0, double omega,
                                              int n_p, int steps_per_interval);

struct ShootingConfig {
    long n_s = 1L << 14;
    double tol = 1e-11;
    int max_iter = 50;
    double fd_step = 1e-7;
};

struct ShootingSolution {
    Vector x0;
    double period = 0.0;
    long n_s = 0;
    Matrix monodromy;
    int iterations = 0;
    double residual = 0.0;  ///< |psi(x0, T) - x0|_inf

    [[nodiscard]] double omega() const;
};

/// Newton on psi(x0, T) - x0 with forward-difference Jacobians. Autonomous
/// systems add the period as an unknown and keep x0 on the hyperplane through
/// the guess orthogonal to the flow there. Throws ConvergenceError.
[[nodiscard]] ShootingSolution shooting_solve(const SystemModel& sys, const Vector& guess_x0,
                                              double period_guess, const ShootingConfig& cfg = {});

/// Per-state coefficients [a0, a1..aH, b1..bH] of x(tau).
struct FourierSolution {
    int harmonics = 0;
    Matrix coeffs;  ///< N x (2H + 1)
    double omega = 1.0;

    [[nodiscard]] Vector evaluate(double tau) const;
    [[nodiscard]] PeriodicTrajectory to_trajectory(int n_p) const;
};

struct HbmConfig {
    double tol = 1e-10;
    int max_iter = 50;
    double fd_step = 1e-7;
    /// Also converged when |G| <= floor_factor * tol and the Newton step is
    /// below step_tol relative to the coefficients.
    double floor_factor = 100.0;
    double step_tol = 1e-12;
    int samples = 0;  ///< 0 picks max(256, 8H) rounded up to a power of two
};

struct HbmResult {
    FourierSolution solution;
    int iterations = 0;
    double residual = 0.0;  ///< |G_H|_inf
};

[[nodiscard]] int aft_samples(int harmonics);

/// Galerkin residual of the Fourier ansatz, (2H + 1) N entries, state-major.
[[nodiscard]] Vector hbm_residual(const SystemModel& sys, const FourierSolution& sol, int samples);

/// Newton on the Galerkin residual with a forward-difference Jacobian. Throws
/// ConvergenceError.
[[nodiscard]] HbmResult hbm_solve(const SystemModel& sys, int harmonics, double omega,
                                  const FourierSolution& guess, const HbmConfig& cfg = {});

/// Discrete Fourier projection of grid samples onto H harmonics.
[[nodiscard]] FourierSolution fourier_from_trajectory(const PeriodicTrajectory& traj, int harmonics);

/// Truncated Fourier series of a scalar signal sampled on a periodic grid:
/// returns the series evaluated back on the same grid.
[[nodiscard]] Eigen::VectorXd fourier_truncate(const Eigen::VectorXd& signal, int harmonics);

struct SteadyStateConfig {
    int settle_periods = 200;
    int steps_per_interval = 4;
    /// Relative period-map displacement regarded as already settled.
    double settled_tol = 1e-10;
};

/// Integrates `settle_periods` forcing periods from x0, then samples one more
/// period on the grid. Throws NotSettledError when the period-map displacement
/// stops shrinking over the last 50 periods.
[[nodiscard]] PeriodicTrajectory steady_state_reference(const SystemModel& sys, double omega, int n_p,
                                                        const Vector& x0,
                                                        const SteadyStateConfig& cfg = {});

}  // namespace pfim
