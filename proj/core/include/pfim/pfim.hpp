#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pfim/system_model.hpp"

namespace pfim {

/// How the forcing-like terms P and F are held inside one interval. Q always
/// uses the endpoint average.
enum class ForcingHold {
    endpoint_average,  ///< constant (P_i + P_{i+1}) / 2
    cubic,             ///< cubic through nodes i-1 .. i+2, integrated exactly
};

struct PfimConfig {
    int intervals = 4096;
    double tol_a = 1e-10;
    double tol_r = 1e-12;
    int max_iter = 50;
    bool record_history = true;
    ForcingHold hold = ForcingHold::cubic;
    /// Rebuild the operators at the returned trajectory for Floquet analysis.
    bool final_operators = true;

    /// Throws ParameterError.
    void validate() const;
};

/// Node-wise linearization about a trajectory: Q = J / w, P = R / w, F = -x' / w.
struct Linearization {
    std::vector<Matrix> q;  ///< n_p + 1 matrices
    StateArray p;           ///< (n_p + 1) x N
    StateArray f;           ///< (n_p + 1) x N
    double dtau = 0.0;

    [[nodiscard]] int intervals() const { return static_cast<int>(q.size()) - 1; }
};

[[nodiscard]] Linearization build_linearization(const SystemModel& sys, const PeriodicTrajectory& traj);

struct IntervalOperators {
    std::vector<Matrix> phi;
    std::vector<Vector> gamma;
    std::vector<Vector> pi;
    Matrix phi_total;
    Vector gamma_total;
    Vector pi_total;

    [[nodiscard]] int intervals() const { return static_cast<int>(phi.size()); }
    [[nodiscard]] int dim() const { return static_cast<int>(phi_total.rows()); }
};

[[nodiscard]] IntervalOperators build_interval_operators(const Linearization& lin,
                                                         ForcingHold hold = ForcingHold::endpoint_average);

enum class PhaseKind { forced, autonomous, continuation };

[[nodiscard]] const char* to_string(PhaseKind k);

/// Last row of the bordered boundary system: upsilon . [mu0; nu] = xi.
struct PhaseCondition {
    Vector upsilon;  ///< N + 1 entries
    double xi = 0.0;
    PhaseKind kind = PhaseKind::forced;
};

[[nodiscard]] PhaseCondition phase_forced(int dim);

/// Orthogonality to dx/dtau at tau = 0. Throws DegeneratePhaseError when that
/// derivative vanishes.
[[nodiscard]] PhaseCondition phase_autonomous(const PeriodicTrajectory& traj);

struct BoundaryCorrection {
    Vector mu0;
    double nu = 0.0;
};

/// Solves [[I - Phi, -Pi], [upsilon]] [mu0; nu] = [Gamma; xi]. Throws
/// BoundarySingularError tagged with `iteration`.
[[nodiscard]] BoundaryCorrection solve_boundary(const IntervalOperators& ops, const PhaseCondition& pc,
                                                int iteration = 0);

struct PropagatedCorrection {
    StateArray delta;      ///< (n_p + 1) x N, last row overwritten with the first
    double closure = 0.0;  ///< |mu_n - mu_0| before the overwrite
};

/// Forward recursion mu_{i+1} = Phi_i mu_i + Gamma_i + Pi_i nu. Throws
/// PropagationError if the period does not close to 1e-6 (1 + |mu0|).
[[nodiscard]] PropagatedCorrection propagate_correction(const IntervalOperators& ops,
                                                        const Vector& mu0, double nu);

struct IterationRecord {
    int iteration = 0;     ///< corrections applied so far
    double e_a = 0.0;      ///< mean residual norm, the stopping measure
    double e_r = 0.0;      ///< relative size of the last correction; NaN before the first
    double omega = 0.0;
    double e_mean = 0.0;   ///< norm of the node-averaged residual vector
    double e_max = 0.0;    ///< largest nodal residual norm
};

/// Passed to the observer after every correction step.
struct IterationTrace {
    int iteration = 0;
    const PeriodicTrajectory* before = nullptr;
    const IntervalOperators* ops = nullptr;
    const PhaseCondition* phase = nullptr;
    const BoundaryCorrection* correction = nullptr;
    const PropagatedCorrection* propagated = nullptr;
};

struct PfimResult {
    PeriodicTrajectory trajectory;
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
    std::vector<IterationRecord> history;
    IntervalOperators final_operators;
};

using PhaseProvider = std::function<PhaseCondition(const PeriodicTrajectory& current)>;
using IterationObserver = std::function<void(const IterationTrace&)>;

/// Forced systems keep omega fixed; autonomous systems update it.
[[nodiscard]] PfimResult pfim_solve(const SystemModel& sys, const PeriodicTrajectory& guess,
                                    PhaseKind kind, const PfimConfig& cfg,
                                    const IterationObserver& observer = {});

/// General form: the phase row is re-evaluated at every iterate and omega is
/// updated only when `update_omega` is set.
[[nodiscard]] PfimResult pfim_solve(const SystemModel& sys, const PeriodicTrajectory& guess,
                                    const PhaseProvider& phase, bool update_omega,
                                    const PfimConfig& cfg, const IterationObserver& observer = {});

}  // namespace pfim
