#include "pfim/pfim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>

#include "pfim/errors.hpp"

namespace pfim {
namespace {

constexpr double kClosureWarn = 1e-9;
constexpr double kClosureFail = 1e-6;
constexpr double kDivergenceFactor = 1e6;

// Derivative coefficients at s = 0 of the cubic through (-h, 0, h, 2h).
PolynomialInput cubic_input(const StateArray& v, int i, int n, double h) {
    auto row = [&](int k) -> Vector { return v.row(((k % n) + n) % n).transpose(); };
    const Vector a = row(i - 1);
    const Vector b = row(i);
    const Vector c = row(i + 1);
    const Vector d = row(i + 2);
    return {b, (-2.0 * a - 3.0 * b + 6.0 * c - d) / (6.0 * h), (a - 2.0 * b + c) / (h * h),
            (-a + 3.0 * b - 3.0 * c + d) / (h * h * h)};
}

}  // namespace

void PfimConfig::validate() const {
    if (intervals < 8) throw ParameterError("PFIM needs at least 8 intervals");
    if (!(tol_a > 0.0) || !(tol_r > 0.0)) throw ParameterError("PFIM tolerances must be > 0");
    if (max_iter < 1) throw ParameterError("PFIM max_iter must be >= 1");
}

Linearization build_linearization(const SystemModel& sys, const PeriodicTrajectory& traj) {
    traj.validate();
    if (traj.dim() != sys.dim) throw DimensionError("build_linearization: dimension mismatch");
    const double w = traj.omega;
    const int n = traj.intervals();
    const StateArray d = grid_derivative(traj);

    Linearization lin;
    lin.dtau = traj.dtau();
    lin.q.resize(static_cast<std::size_t>(n) + 1);
    lin.p.resize(n + 1, sys.dim);
    for (int i = 0; i < n; ++i) {
        const Vector x = traj.node(i);
        const double tau = traj.tau(i);
        lin.q[static_cast<std::size_t>(i)] = sys.jac(x, tau, w) / w;
        lin.p.row(i) = (sys.f(x, tau, w).transpose() - w * d.row(i)) / w;
    }
    lin.q[static_cast<std::size_t>(n)] = lin.q[0];
    lin.p.row(n) = lin.p.row(0);
    lin.f = -d / w;
    return lin;
}

IntervalOperators build_interval_operators(const Linearization& lin, ForcingHold hold) {
    const int n = lin.intervals();
    if (n < 1) throw DimensionError("build_interval_operators: no intervals");
    const auto dim = lin.q[0].rows();
    const double h = lin.dtau;

    IntervalOperators ops;
    ops.phi.resize(static_cast<std::size_t>(n));
    ops.gamma.resize(static_cast<std::size_t>(n));
    ops.pi.resize(static_cast<std::size_t>(n));
    std::array<PolynomialInput, 2> inputs;
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const Matrix qi = 0.5 * (lin.q[k] + lin.q[k + 1]);
        if (hold == ForcingHold::cubic) {
            inputs[0] = cubic_input(lin.p, i, n, h);
            inputs[1] = cubic_input(lin.f, i, n, h);
        } else {
            inputs[0] = {0.5 * (lin.p.row(i) + lin.p.row(i + 1)).transpose()};
            inputs[1] = {0.5 * (lin.f.row(i) + lin.f.row(i + 1)).transpose()};
        }
        ExpMoments em = exp_with_moments(qi, h, std::span<const PolynomialInput>(inputs));
        ops.phi[k] = std::move(em.transition);
        ops.gamma[k] = std::move(em.responses[0]);
        ops.pi[k] = std::move(em.responses[1]);
    }

    ops.phi_total = Matrix::Identity(dim, dim);
    ops.gamma_total = Vector::Zero(dim);
    ops.pi_total = Vector::Zero(dim);
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        ops.phi_total = ops.phi[k] * ops.phi_total;
        ops.gamma_total = ops.phi[k] * ops.gamma_total + ops.gamma[k];
        ops.pi_total = ops.phi[k] * ops.pi_total + ops.pi[k];
    }
    return ops;
}

const char* to_string(PhaseKind k) {
    switch (k) {
        case PhaseKind::forced: return "forced";
        case PhaseKind::autonomous: return "autonomous";
        case PhaseKind::continuation: return "continuation";
    }
    return "unknown";
}

PhaseCondition phase_forced(int dim) {
    if (dim < 1) throw DimensionError("phase_forced: dim must be >= 1");
    PhaseCondition pc;
    pc.upsilon = Vector::Zero(dim + 1);
    pc.upsilon(dim) = 1.0;
    pc.kind = PhaseKind::forced;
    return pc;
}

PhaseCondition phase_autonomous(const PeriodicTrajectory& traj) {
    const StateArray d = grid_derivative(traj);
    const Vector d0 = d.row(0).transpose();
    if (d0.norm() < 1e-12) {
        throw DegeneratePhaseError("phase_autonomous: dx/dtau vanishes at tau = 0");
    }
    PhaseCondition pc;
    pc.upsilon = Vector::Zero(traj.dim() + 1);
    pc.upsilon.head(traj.dim()) = d0;
    pc.kind = PhaseKind::autonomous;
    return pc;
}

BoundaryCorrection solve_boundary(const IntervalOperators& ops, const PhaseCondition& pc, int iteration) {
    const int n = ops.dim();
    if (pc.upsilon.size() != n + 1) throw DimensionError("solve_boundary: phase row has wrong length");
    Matrix a(n + 1, n + 1);
    a.topLeftCorner(n, n) = Matrix::Identity(n, n) - ops.phi_total;
    a.topRightCorner(n, 1) = -ops.pi_total;
    a.row(n) = pc.upsilon.transpose();
    Vector b(n + 1);
    b.head(n) = ops.gamma_total;
    b(n) = pc.xi;

    Vector sol;
    try {
        sol = solve_dense(a, b);
    } catch (const SingularSystemError& e) {
        throw BoundarySingularError(iteration, "boundary system singular at iteration " +
                                                   std::to_string(iteration) + ": " + e.what());
    }
    return {sol.head(n), sol(n)};
}

PropagatedCorrection propagate_correction(const IntervalOperators& ops, const Vector& mu0, double nu) {
    const int n = ops.intervals();
    if (mu0.size() != ops.dim()) throw DimensionError("propagate_correction: mu0 length mismatch");
    PropagatedCorrection out;
    out.delta.resize(n + 1, ops.dim());
    Vector mu = mu0;
    out.delta.row(0) = mu.transpose();
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        mu = ops.phi[k] * mu + ops.gamma[k] + ops.pi[k] * nu;
        out.delta.row(i + 1) = mu.transpose();
    }
    out.closure = (mu - mu0).norm();
    if (!(out.closure <= kClosureFail * (1.0 + mu0.norm()))) {
        throw PropagationError("correction does not close over the period: gap " +
                               std::to_string(out.closure));
    }
    out.delta.row(n) = out.delta.row(0);
    return out;
}

PfimResult pfim_solve(const SystemModel& sys, const PeriodicTrajectory& guess, PhaseKind kind,
                      const PfimConfig& cfg, const IterationObserver& observer) {
    if (kind == PhaseKind::continuation) {
        throw ParameterError("pfim_solve: continuation phase needs a phase provider");
    }
    PhaseProvider provider;
    if (kind == PhaseKind::forced) {
        const PhaseCondition pc = phase_forced(sys.dim);
        provider = [pc](const PeriodicTrajectory&) { return pc; };
    } else {
        provider = [](const PeriodicTrajectory& t) { return phase_autonomous(t); };
    }
    return pfim_solve(sys, guess, provider, kind == PhaseKind::autonomous, cfg, observer);
}

PfimResult pfim_solve(const SystemModel& sys, const PeriodicTrajectory& guess, const PhaseProvider& phase,
                      bool update_omega, const PfimConfig& cfg, const IterationObserver& observer) {
    cfg.validate();
    guess.validate();
    if (guess.dim() != sys.dim) throw DimensionError("pfim_solve: guess dimension mismatch");
    if (guess.intervals() != cfg.intervals) {
        throw DimensionError("pfim_solve: guess has " + std::to_string(guess.intervals()) +
                             " intervals, config expects " + std::to_string(cfg.intervals));
    }

    PfimResult result;
    result.trajectory = guess;
    PeriodicTrajectory& x = result.trajectory;
    double e_r = std::numeric_limits<double>::quiet_NaN();
    double best_e_a = std::numeric_limits<double>::infinity();

    for (int it = 0;; ++it) {
        const StateArray r = residual(sys, x);
        IterationRecord rec;
        rec.iteration = it;
        rec.e_a = mean_residual_norm(r);
        rec.e_r = e_r;
        rec.omega = x.omega;
        rec.e_mean = average_error(r);
        rec.e_max = max_residual_norm(r);
        if (cfg.record_history) result.history.push_back(rec);
        result.iterations = it;

        if (!std::isfinite(rec.e_a)) {
            result.stop_reason = "non-finite residual";
            break;
        }
        if (rec.e_a < cfg.tol_a) {
            result.converged = true;
            result.stop_reason = "e_a below tol_a";
            break;
        }
        if (it > 0 && e_r < cfg.tol_r) {
            result.converged = true;
            result.stop_reason = "e_r below tol_r";
            break;
        }
        best_e_a = std::min(best_e_a, rec.e_a);
        if (rec.e_a > kDivergenceFactor * best_e_a) {
            result.stop_reason = "diverged";
            break;
        }
        if (it >= cfg.max_iter) {
            result.stop_reason = "max_iter reached";
            break;
        }

        const Linearization lin = build_linearization(sys, x);
        const IntervalOperators ops = build_interval_operators(lin, cfg.hold);
        const PhaseCondition pc = phase(x);
        const BoundaryCorrection corr = solve_boundary(ops, pc, it + 1);
        const PropagatedCorrection prop = propagate_correction(ops, corr.mu0, corr.nu);
        if (observer) observer({it + 1, &x, &ops, &pc, &corr, &prop});

        x.samples += prop.delta;
        x.samples.row(x.intervals()) = x.samples.row(0);
        if (update_omega) {
            if (!(x.omega + corr.nu > 0.0)) {
                result.stop_reason = "omega became non-positive";
                break;
            }
            x.omega += corr.nu;
        }
        e_r = relative_update(x, prop.delta);
    }

    if (cfg.final_operators && x.samples.allFinite()) {
        result.final_operators = build_interval_operators(build_linearization(sys, x), cfg.hold);
    }
    return result;
}

}  // namespace pfim
