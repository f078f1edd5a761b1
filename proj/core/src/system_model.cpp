#include "pfim/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pfim/errors.hpp"

namespace pfim {

Vector SystemModel::f(const Vector& x, double tau, double omega) const {
    if (x.size() != dim) throw DimensionError(name + ": state length mismatch");
    Vector out = rhs(x, tau, omega);
    if (out.size() != dim) throw DimensionError(name + ": rhs returned wrong length");
    return out;
}

Matrix SystemModel::jac(const Vector& x, double tau, double omega) const {
    if (x.size() != dim) throw DimensionError(name + ": state length mismatch");
    Matrix out = jacobian(x, tau, omega);
    if (out.rows() != dim || out.cols() != dim) {
        throw DimensionError(name + ": jacobian returned wrong shape");
    }
    return out;
}

Matrix fd_jacobian(const SystemModel& sys, const Vector& x, double tau, double omega, double rel) {
    const Vector f0 = sys.f(x, tau, omega);
    Matrix j(sys.dim, sys.dim);
    Vector xp = x;
    for (int c = 0; c < sys.dim; ++c) {
        const double h = rel * (1.0 + std::abs(x(c)));
        xp(c) = x(c) + h;
        j.col(c) = (sys.f(xp, tau, omega) - f0) / h;
        xp(c) = x(c);
    }
    return j;
}

double PeriodicTrajectory::dtau() const { return 2.0 * std::numbers::pi / intervals(); }

double PeriodicTrajectory::tau(int i) const { return 2.0 * std::numbers::pi * i / intervals(); }

void PeriodicTrajectory::validate() const {
    if (samples.cols() < 1) throw DimensionError("trajectory has no state columns");
    if (intervals() < 8) {
        throw GridTooCoarseError("trajectory needs at least 8 intervals, got " +
                                 std::to_string(intervals()));
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("trajectory omega must be > 0");
    if (!samples.allFinite()) throw DomainError("trajectory has non-finite samples");
    if (samples.row(intervals()) != samples.row(0)) {
        throw DomainError("trajectory last node must equal the first");
    }
}

PeriodicTrajectory PeriodicTrajectory::sample(int n_p, double omega,
                                              const std::function<Vector(double)>& fn) {
    if (n_p < 8) throw GridTooCoarseError("need at least 8 intervals");
    const Vector first = fn(0.0);
    PeriodicTrajectory t;
    t.omega = omega;
    t.samples.resize(n_p + 1, first.size());
    t.samples.row(0) = first.transpose();
    for (int i = 1; i < n_p; ++i) {
        t.samples.row(i) = fn(2.0 * std::numbers::pi * i / n_p).transpose();
    }
    t.samples.row(n_p) = t.samples.row(0);
    return t;
}

PeriodicTrajectory PeriodicTrajectory::zeros(int n_p, int dim, double omega) {
    if (n_p < 8) throw GridTooCoarseError("need at least 8 intervals");
    PeriodicTrajectory t;
    t.omega = omega;
    t.samples = StateArray::Zero(n_p + 1, dim);
    return t;
}

StateArray grid_derivative(const PeriodicTrajectory& traj) {
    const int n = traj.intervals();
    if (n < 8) throw GridTooCoarseError("grid_derivative needs at least 8 intervals");
    const double scale = 1.0 / (12.0 * traj.dtau());
    const auto& x = traj.samples;
    StateArray d(n + 1, x.cols());
    auto wrap = [n](int i) { return ((i % n) + n) % n; };
    for (int i = 0; i < n; ++i) {
        d.row(i) = (8.0 * (x.row(wrap(i + 1)) - x.row(wrap(i - 1))) - (x.row(wrap(i + 2)) - x.row(wrap(i - 2)))) *
                   scale;
    }
    d.row(n) = d.row(0);
    return d;
}

StateArray residual(const SystemModel& sys, const PeriodicTrajectory& traj) {
    if (traj.dim() != sys.dim) throw DimensionError("residual: trajectory dimension mismatch");
    const StateArray d = grid_derivative(traj);
    const int n = traj.intervals();
    StateArray r(n + 1, sys.dim);
    for (int i = 0; i < n; ++i) {
        r.row(i) = sys.f(traj.node(i), traj.tau(i), traj.omega).transpose() - traj.omega * d.row(i);
    }
    r.row(n) = r.row(0);
    return r;
}

double average_error(const StateArray& r) {
    return (r.colwise().sum() / static_cast<double>(r.rows())).norm();
}

double mean_residual_norm(const StateArray& r) {
    return r.rowwise().norm().sum() / static_cast<double>(r.rows());
}

double max_residual_norm(const StateArray& r) { return r.rowwise().norm().maxCoeff(); }

double relative_update(const PeriodicTrajectory& traj, const StateArray& delta) {
    if (delta.rows() != traj.samples.rows() || delta.cols() != traj.samples.cols()) {
        throw DimensionError("relative_update: shape mismatch");
    }
    const Eigen::ArrayXd num = delta.rowwise().norm().array();
    const Eigen::ArrayXd den = traj.samples.rowwise().norm().array().max(kRelativeUpdateFloor);
    return (num / den).sum() / static_cast<double>(delta.rows());
}

}  // namespace pfim
