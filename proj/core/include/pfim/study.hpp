#pragma once

// Convergence studies and method comparisons against an independent
// reference orbit.

#include <string>
#include <vector>

#include "pfim/benchmarks.hpp"
#include "pfim/pfim.hpp"
#include "pfim/reference.hpp"

namespace pfim {

/// Analytic guess for autonomous systems; otherwise the periodic response of
/// the linear part, solved on the same grid.
[[nodiscard]] PeriodicTrajectory default_guess(const Benchmark& bench, int n_p);

enum class ReferenceKind { shooting, steady };

[[nodiscard]] const char* to_string(ReferenceKind k);

struct ReferenceConfig {
    ReferenceKind kind = ReferenceKind::shooting;
    ShootingConfig shooting;
    SteadyStateConfig steady;
};

struct ReferenceOrbit {
    PeriodicTrajectory trajectory;  ///< sampled by RK4 on the requested grid
    Vector x0;
    double omega = 0.0;
};

/// Reference periodic orbit started from (x0, omega), sampled on n_p intervals.
[[nodiscard]] ReferenceOrbit compute_reference(const SystemModel& sys, const Vector& x0, double omega,
                                               int n_p, const ReferenceConfig& cfg = {});

/// Mean over the n_p distinct nodes of |a - b| in one state column.
[[nodiscard]] double grid_mean_error(const PeriodicTrajectory& a, const PeriodicTrajectory& b, int state);

/// Least-squares slope of log d_{i+1} against log d_i, where d_i = e_i - e_min
/// is the excess over the smallest iterate error of all runs (the first entry
/// of each run is its guess and does not count). A consecutive pair is
/// used when e_i lies in [lo, hi] and d_{i+1} >= e_min. NaN when fewer than
/// two pairs qualify.
[[nodiscard]] double fitted_order(const std::vector<std::vector<double>>& runs, double lo = 1e-9,
                                  double hi = 1e-2);
[[nodiscard]] double fitted_order(const std::vector<double>& errors, double lo = 1e-9, double hi = 1e-2);

/// Number of pairs fitted_order would use.
[[nodiscard]] int fitted_pairs(const std::vector<std::vector<double>>& runs, double lo = 1e-9,
                               double hi = 1e-2);
[[nodiscard]] int fitted_pairs(const std::vector<double>& errors, double lo = 1e-9, double hi = 1e-2);

struct StudyRow {
    int iteration = 0;
    double displacement_error = 0.0;
    double frequency_error = 0.0;
    double e_a = 0.0;
    double e_r = 0.0;
    double omega = 0.0;
};

struct ConvergenceStudy {
    std::vector<StudyRow> rows;
    double order = 0.0;
    int order_pairs = 0;
    double plateau = 0.0;  ///< displacement error of the last iterate
    PfimResult result;
    ReferenceOrbit reference;
};

/// Runs PFIM from `guess`, then measures every iterate against a reference
/// orbit started from the final PFIM state (falling back to the guess).
[[nodiscard]] ConvergenceStudy convergence_study(const Benchmark& bench, const PeriodicTrajectory& guess,
                                                 const PfimConfig& cfg, const ReferenceConfig& ref = {});

struct OrderStudyConfig {
    PfimConfig pfim;          ///< grid and hold; tolerances are ignored
    int max_harmonics = 10;   ///< guesses truncate the reference to H = 1..max_harmonics
    int corrections = 3;      ///< PFIM corrections per guess
    ReferenceConfig reference;
};

struct OrderStudy {
    ConvergenceStudy base;                  ///< run from the default guess
    std::vector<std::vector<double>> runs;  ///< errors per run, base first
    double order = 0.0;
    int order_pairs = 0;
    double plateau = 0.0;  ///< smallest iterate error over all runs
};

/// Pools error sequences from the default guess and from Fourier truncations
/// of the reference orbit, all measured against that one reference.
[[nodiscard]] OrderStudy order_study(const Benchmark& bench, const OrderStudyConfig& cfg);

struct CompareCase {
    std::string method;  ///< pfim, hbm or shooting
    int resolution = 0;  ///< n_p, H or n_s
};

struct CompareRow {
    std::string method;
    int resolution = 0;
    double error = 0.0;
    double time_ms = 0.0;
    int iterations = 0;
    std::string status;  ///< "ok" or the failure message
};

struct CompareConfig {
    PfimConfig pfim;
    HbmConfig hbm;
    ShootingConfig shooting;
    ShootingConfig reference{1L << 14, 1e-11, 50, 1e-7};
    int hbm_guess_harmonics = 5;
    int error_grid = 4096;
};

/// Solves each case, timing only the solver call, and measures the grid-mean
/// displacement error against a shooting reference. Failures are recorded in
/// the row and the remaining cases still run.
[[nodiscard]] std::vector<CompareRow> compare_methods(const Benchmark& bench,
                                                      const std::vector<CompareCase>& cases,
                                                      const CompareConfig& cfg);

}  // namespace pfim
