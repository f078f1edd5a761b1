#pragma once

#include <functional>
#include <string>

#include "pfim/linalg.hpp"

namespace pfim {

/// Row i holds the state at node i; (n_p + 1) rows, N columns.
using StateArray = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// f(x, tau; omega): derivative with respect to physical time t, evaluated at
/// scaled time tau = omega * t.
using RhsFn = std::function<Vector(const Vector& x, double tau, double omega)>;
using JacobianFn = std::function<Matrix(const Vector& x, double tau, double omega)>;
/// Signed distance-like indicator that vanishes on a switching surface.
using SwitchFn = std::function<double(const Vector& x, double tau, double omega)>;

struct SystemModel {
    std::string name;
    int dim = 0;
    bool autonomous = false;
    RhsFn rhs;
    JacobianFn jacobian;
    SwitchFn switching;  ///< empty for smooth systems

    [[nodiscard]] Vector f(const Vector& x, double tau, double omega) const;
    [[nodiscard]] Matrix jac(const Vector& x, double tau, double omega) const;
};

/// Forward-difference Jacobian of sys.rhs, step h_j = rel * (1 + |x_j|).
[[nodiscard]] Matrix fd_jacobian(const SystemModel& sys, const Vector& x, double tau,
                                 double omega, double rel = 1e-7);

struct PeriodicTrajectory {
    StateArray samples;  ///< (n_p + 1) x N, last row identical to the first
    double omega = 1.0;

    [[nodiscard]] int intervals() const { return static_cast<int>(samples.rows()) - 1; }
    [[nodiscard]] int dim() const { return static_cast<int>(samples.cols()); }
    [[nodiscard]] double dtau() const;
    [[nodiscard]] double tau(int i) const;
    [[nodiscard]] Vector node(int i) const { return samples.row(i).transpose(); }

    /// Throws GridTooCoarseError, DomainError or DimensionError on a broken
    /// trajectory.
    void validate() const;

    /// Samples fn(tau) at the n_p + 1 nodes; the last node copies the first.
    static PeriodicTrajectory sample(int n_p, double omega,
                                     const std::function<Vector(double)>& fn);
    static PeriodicTrajectory zeros(int n_p, int dim, double omega);
};

/// dx/dtau at every node, 4th-order central differences with periodic wrap.
[[nodiscard]] StateArray grid_derivative(const PeriodicTrajectory& traj);

/// R_i = f(x_i, tau_i, omega) - omega * x'_i.
[[nodiscard]] StateArray residual(const SystemModel& sys, const PeriodicTrajectory& traj);

/// Euclidean norm of the node-averaged residual vector.
[[nodiscard]] double average_error(const StateArray& r);

/// Node average of the Euclidean residual norms (no sign cancellation).
[[nodiscard]] double mean_residual_norm(const StateArray& r);

/// Largest Euclidean residual norm over the nodes.
[[nodiscard]] double max_residual_norm(const StateArray& r);

inline constexpr double kRelativeUpdateFloor = 1e-8;

/// Node average of |dx_i| / max(|x_i|, 1e-8).
[[nodiscard]] double relative_update(const PeriodicTrajectory& traj, const StateArray& delta);

}  // namespace pfim
