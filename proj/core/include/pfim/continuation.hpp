#pragma once

#include <string>
#include <vector>

#include "pfim/errors.hpp"
#include "pfim/pfim.hpp"

namespace pfim {

/// Eigenvalues of the whole-period propagator.
[[nodiscard]] ComplexSpectrum floquet(const IntervalOperators& ops);

/// Stable when every multiplier has modulus <= 1 + 1e-6; for autonomous
/// systems the one multiplier closest to +1 (within 1e-4) is skipped.
[[nodiscard]] bool is_stable(const ComplexSpectrum& multipliers, bool autonomous);

[[nodiscard]] double max_modulus(const ComplexSpectrum& multipliers);

struct BranchPoint {
    Vector x0;
    double omega = 0.0;
    double amplitude = 0.0;
    ComplexSpectrum multipliers;
    bool stable = false;
    Vector tangent;  ///< (dx0/ds, domega/ds), unit length
    int iterations = 0;
    double ds = 0.0;  ///< step that produced this point
};

struct ContinuationConfig {
    double omega_start = 0.4;
    double omega_end = 4.0;
    double ds = 0.02;
    double ds_min = 1e-4;
    double ds_max = 0.1;
    /// A step across a stability change is retaken until it is no longer
    /// than this, so the bracketing points sit close to the transition.
    double transition_ds = 1e-3;
    int max_points = 2000;
    int amplitude_state = 0;
    PfimConfig pfim;

    /// Throws ParameterError.
    void validate() const;
};

class BranchStalledError : public Error {
public:
    BranchStalledError(std::vector<BranchPoint> partial, const std::string& what)
        : Error(what), partial_(std::move(partial)) {}
    [[nodiscard]] const std::vector<BranchPoint>& partial() const noexcept { return partial_; }

private:
    std::vector<BranchPoint> partial_;
};

/// Arclength row for the corrector. xi is evaluated at `current`, so the
/// provider built from it must be re-run at every iterate.
[[nodiscard]] PhaseCondition phase_continuation(const BranchPoint& prev, double ds,
                                                const PeriodicTrajectory& current);

/// Residual of the arclength constraint at `current`.
[[nodiscard]] double arclength_residual(const BranchPoint& prev, double ds,
                                        const PeriodicTrajectory& current);

/// Traces the periodic response of a forced system as omega varies.
/// `seed_guess` is a guess at omega_start on the configured grid.
[[nodiscard]] std::vector<BranchPoint> continue_branch(const SystemModel& sys,
                                                       const PeriodicTrajectory& seed_guess,
                                                       const ContinuationConfig& cfg);

struct BranchRecord {
    double omega = 0.0;
    double amplitude = 0.0;
    bool stable = false;
    double max_multiplier_abs = 0.0;
    int iterations = 0;
};

[[nodiscard]] std::vector<BranchRecord> branch_to_records(const std::vector<BranchPoint>& branch);

}  // namespace pfim
