#include "pfim/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pfim {
namespace {

constexpr double kStableSlack = 1e-6;
constexpr double kTrivialMultiplier = 1e-4;
constexpr int kFastCorrector = 3;
constexpr double kGrowth = 1.25;

double amplitude_of(const PeriodicTrajectory& t, int state) {
    return t.samples.col(state).cwiseAbs().maxCoeff();
}

BranchPoint make_point(const SystemModel& sys, const PfimResult& r, int amplitude_state) {
    BranchPoint p;
    p.x0 = r.trajectory.node(0);
    p.omega = r.trajectory.omega;
    p.amplitude = amplitude_of(r.trajectory, amplitude_state);
    p.multipliers = floquet(r.final_operators);
    p.stable = is_stable(p.multipliers, sys.autonomous);
    p.iterations = r.iterations;
    return p;
}

// The alternating node pattern lies in the null space of the central
// difference stencil, so correctors barely touch it and secant
// extrapolation lets round-off in it grow along the branch.
void drop_alternating_mode(PeriodicTrajectory& t) {
    const int n = t.intervals();
    if (n % 2 != 0) return;
    for (int c = 0; c < t.dim(); ++c) {
        double a = 0.0;
        for (int i = 0; i < n; ++i) a += (i % 2 == 0 ? 1.0 : -1.0) * t.samples(i, c);
        a /= n;
        for (int i = 0; i < n; ++i) t.samples(i, c) -= (i % 2 == 0 ? a : -a);
    }
    t.samples.row(n) = t.samples.row(0);
}

Vector joint(const Vector& x0, double omega) {
    Vector v(x0.size() + 1);
    v.head(x0.size()) = x0;
    v(x0.size()) = omega;
    return v;
}

}  // namespace

ComplexSpectrum floquet(const IntervalOperators& ops) {
    if (ops.phi_total.size() == 0) throw DimensionError("floquet: operators were not built");
    return eigenvalues(ops.phi_total);
}

bool is_stable(const ComplexSpectrum& multipliers, bool autonomous) {
    std::size_t skip = multipliers.size();
    if (autonomous) {
        double best = kTrivialMultiplier;
        for (std::size_t i = 0; i < multipliers.size(); ++i) {
            const double d = std::abs(multipliers[i] - 1.0);
            if (d <= best) {
                best = d;
                skip = i;
            }
        }
    }
    for (std::size_t i = 0; i < multipliers.size(); ++i) {
        if (i == skip) continue;
        if (std::abs(multipliers[i]) > 1.0 + kStableSlack) return false;
    }
    return true;
}

double max_modulus(const ComplexSpectrum& multipliers) {
    double m = 0.0;
    for (const auto& z : multipliers) m = std::max(m, std::abs(z));
    return m;
}

void ContinuationConfig::validate() const {
    if (!(omega_start > 0.0) || !(omega_end > 0.0)) throw ParameterError("sweep bounds must be > 0");
    if (omega_start == omega_end) throw ParameterError("omega_start must differ from omega_end");
    if (!(ds_min > 0.0) || ds_min > ds_max) throw ParameterError("need 0 < ds_min <= ds_max");
    if (ds < ds_min || ds > ds_max) throw ParameterError("ds must lie in [ds_min, ds_max]");
    if (!(transition_ds > 0.0)) throw ParameterError("transition_ds must be > 0");
    if (max_points < 2) throw ParameterError("max_points must be >= 2");
    pfim.validate();
}

double arclength_residual(const BranchPoint& prev, double ds, const PeriodicTrajectory& current) {
    const auto n = prev.x0.size();
    const Vector dx = current.node(0) - prev.x0;
    return dx.dot(prev.tangent.head(n)) + (current.omega - prev.omega) * prev.tangent(n) - ds;
}

PhaseCondition phase_continuation(const BranchPoint& prev, double ds, const PeriodicTrajectory& current) {
    if (prev.tangent.size() != prev.x0.size() + 1) {
        throw DimensionError("phase_continuation: tangent has wrong length");
    }
    PhaseCondition pc;
    pc.upsilon = prev.tangent;
    pc.xi = -arclength_residual(prev, ds, current);
    pc.kind = PhaseKind::continuation;
    return pc;
}

std::vector<BranchPoint> continue_branch(const SystemModel& sys, const PeriodicTrajectory& seed_guess,
                                         const ContinuationConfig& cfg) {
    cfg.validate();
    if (sys.autonomous) throw ParameterError("continue_branch needs a forced system");
    const double lo = std::min(cfg.omega_start, cfg.omega_end);
    const double hi = std::max(cfg.omega_start, cfg.omega_end);
    const double dir = cfg.omega_end > cfg.omega_start ? 1.0 : -1.0;

    std::vector<BranchPoint> branch;
    PeriodicTrajectory guess = seed_guess;
    guess.omega = cfg.omega_start;
    PfimResult first = pfim_solve(sys, guess, PhaseKind::forced, cfg.pfim);
    if (!first.converged) throw BranchStalledError(branch, "first branch point did not converge");
    branch.push_back(make_point(sys, first, cfg.amplitude_state));

    guess = first.trajectory;
    guess.omega = cfg.omega_start + dir * cfg.ds;
    PfimResult second = pfim_solve(sys, guess, PhaseKind::forced, cfg.pfim);
    if (!second.converged) throw BranchStalledError(branch, "second branch point did not converge");
    branch.push_back(make_point(sys, second, cfg.amplitude_state));

    PeriodicTrajectory prev_traj = std::move(first.trajectory);
    PeriodicTrajectory cur_traj = std::move(second.trajectory);
    Vector secant = joint(branch[1].x0, branch[1].omega) - joint(branch[0].x0, branch[0].omega);
    branch[0].tangent = secant.normalized();
    branch[1].tangent = branch[0].tangent;
    branch[0].ds = 0.0;
    branch[1].ds = cfg.ds;

    PfimConfig corrector = cfg.pfim;
    corrector.record_history = false;
    double ds = cfg.ds;

    while (static_cast<int>(branch.size()) < cfg.max_points) {
        const BranchPoint& prev = branch.back();
        const double span = (joint(prev.x0, prev.omega) -
                             joint(prev_traj.node(0), prev_traj.omega)).norm();
        // Orientation of the full-trajectory secant relative to the stored tangent.
        const double orient =
            (joint(prev.x0, prev.omega) - joint(prev_traj.node(0), prev_traj.omega)).dot(prev.tangent) >= 0.0
                ? 1.0
                : -1.0;

        PfimResult r;
        bool ok = false;
        while (!ok) {
            PeriodicTrajectory predicted = cur_traj;
            const double scale = orient * ds / span;
            predicted.samples += scale * (cur_traj.samples - prev_traj.samples);
            predicted.omega += scale * (cur_traj.omega - prev_traj.omega);
            drop_alternating_mode(predicted);
            const BranchPoint anchor = prev;
            const double step = ds;
            try {
                if (predicted.omega > 0.0) {
                    r = pfim_solve(
                        sys, predicted,
                        [&anchor, step](const PeriodicTrajectory& t) {
                            return phase_continuation(anchor, step, t);
                        },
                        true, corrector);
                    ok = r.converged;
                }
            } catch (const Error&) {
                ok = false;
            }
            if (!ok) {
                ds *= 0.5;
                if (ds < cfg.ds_min) {
                    throw BranchStalledError(branch, "corrector failed at the minimum step near omega = " +
                                                         std::to_string(prev.omega));
                }
            }
        }

        BranchPoint next = make_point(sys, r, cfg.amplitude_state);
        next.ds = ds;
        Vector t = (joint(next.x0, next.omega) - joint(prev.x0, prev.omega)).normalized();
        if (t.dot(prev.tangent) < 0.0) t = -t;
        next.tangent = std::move(t);

        if (next.omega < lo || next.omega > hi) break;
        if (next.stable != prev.stable && ds > cfg.transition_ds) {
            ds = std::max(cfg.transition_ds, 0.25 * ds);
            continue;
        }
        if (r.iterations <= kFastCorrector) ds = std::min(ds * kGrowth, cfg.ds_max);

        prev_traj = std::move(cur_traj);
        cur_traj = std::move(r.trajectory);
        branch.push_back(std::move(next));
    }
    return branch;
}

std::vector<BranchRecord> branch_to_records(const std::vector<BranchPoint>& branch) {
    std::vector<BranchRecord> out;
    out.reserve(branch.size());
    for (const auto& p : branch) {
        out.push_back({p.omega, p.amplitude, p.stable, max_modulus(p.multipliers), p.iterations});
    }
    return out;
}

}  // namespace pfim
