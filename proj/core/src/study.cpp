#include "pfim/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <numbers>

#include "pfim/errors.hpp"

namespace pfim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int steps_per_interval(long n_s, int n_p) {
    return static_cast<int>(std::max<long>(1, n_s / n_p));
}

template <class F>
double time_ms(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

PeriodicTrajectory default_guess(const Benchmark& bench, int n_p) {
    if (bench.system.autonomous) {
        if (!bench.analytic_guess) throw ParameterError(bench.system.name + " has no default guess");
        return PeriodicTrajectory::sample(n_p, bench.omega, bench.analytic_guess);
    }
    PeriodicTrajectory zero = PeriodicTrajectory::zeros(n_p, bench.system.dim, bench.omega);
    if (!bench.linear_part) return zero;
    PfimConfig cfg;
    cfg.intervals = n_p;
    cfg.max_iter = 1;
    cfg.final_operators = false;
    cfg.record_history = false;
    PeriodicTrajectory guess = pfim_solve(*bench.linear_part, zero, PhaseKind::forced, cfg).trajectory;
    guess.omega = bench.omega;
    return guess;
}

const char* to_string(ReferenceKind k) {
    return k == ReferenceKind::shooting ? "shooting" : "steady";
}

ReferenceOrbit compute_reference(const SystemModel& sys, const Vector& x0, double omega, int n_p,
                                 const ReferenceConfig& cfg) {
    ReferenceOrbit out;
    if (cfg.kind == ReferenceKind::shooting) {
        const ShootingSolution s = shooting_solve(sys, x0, kTwoPi / omega, cfg.shooting);
        out.x0 = s.x0;
        out.omega = s.omega();
        out.trajectory = sample_orbit(sys, s.x0, out.omega, n_p, steps_per_interval(cfg.shooting.n_s, n_p));
    } else {
        if (sys.autonomous) throw ParameterError("steady-state reference needs a forced system");
        out.trajectory = steady_state_reference(sys, omega, n_p, x0, cfg.steady);
        out.x0 = out.trajectory.node(0);
        out.omega = omega;
    }
    return out;
}

double grid_mean_error(const PeriodicTrajectory& a, const PeriodicTrajectory& b, int state) {
    if (a.intervals() != b.intervals()) throw DimensionError("grid_mean_error: grids differ");
    const int n = a.intervals();
    return (a.samples.col(state).head(n) - b.samples.col(state).head(n)).cwiseAbs().mean();
}

namespace {

// Smallest error among iterates; a run's first entry is its guess.
double iterate_floor(const std::vector<std::vector<double>>& runs) {
    double floor = std::numeric_limits<double>::infinity();
    for (const auto& e : runs) {
        for (std::size_t i = 1; i < e.size(); ++i) floor = std::min(floor, e[i]);
    }
    return floor;
}

std::vector<std::pair<double, double>> order_pairs(const std::vector<std::vector<double>>& runs, double lo,
                                                   double hi) {
    std::vector<std::pair<double, double>> pts;
    const double floor = iterate_floor(runs);
    for (const auto& e : runs) {
        for (std::size_t i = 0; i + 1 < e.size(); ++i) {
            const double d0 = e[i] - floor;
            const double d1 = e[i + 1] - floor;
            if (e[i] >= lo && e[i] <= hi && d1 >= floor && d1 > 0.0 && d0 > 0.0) {
                pts.emplace_back(std::log(d0), std::log(d1));
            }
        }
    }
    return pts;
}

double slope(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / sxx;
}

}  // namespace

double fitted_order(const std::vector<std::vector<double>>& runs, double lo, double hi) {
    return slope(order_pairs(runs, lo, hi));
}

double fitted_order(const std::vector<double>& errors, double lo, double hi) {
    return fitted_order(std::vector<std::vector<double>>{errors}, lo, hi);
}

int fitted_pairs(const std::vector<std::vector<double>>& runs, double lo, double hi) {
    return static_cast<int>(order_pairs(runs, lo, hi).size());
}

int fitted_pairs(const std::vector<double>& errors, double lo, double hi) {
    return fitted_pairs(std::vector<std::vector<double>>{errors}, lo, hi);
}

ConvergenceStudy convergence_study(const Benchmark& bench, const PeriodicTrajectory& guess,
                                   const PfimConfig& cfg, const ReferenceConfig& ref) {
    const SystemModel& sys = bench.system;
    const int state = bench.amplitude_state;
    std::vector<Eigen::VectorXd> columns;
    std::vector<double> omegas;
    const PhaseKind kind = sys.autonomous ? PhaseKind::autonomous : PhaseKind::forced;

    ConvergenceStudy study;
    study.result = pfim_solve(sys, guess, kind, cfg, [&](const IterationTrace& t) {
        columns.push_back(t.before->samples.col(state));
        omegas.push_back(t.before->omega);
    });
    columns.push_back(study.result.trajectory.samples.col(state));
    omegas.push_back(study.result.trajectory.omega);

    const PeriodicTrajectory& last = study.result.trajectory;
    try {
        if (!last.samples.allFinite()) throw DomainError("PFIM iterate is not finite");
        study.reference = compute_reference(sys, last.node(0), last.omega, cfg.intervals, ref);
    } catch (const Error&) {
        study.reference = compute_reference(sys, guess.node(0), guess.omega, cfg.intervals, ref);
    }

    const int n = cfg.intervals;
    const Eigen::VectorXd ref_col = study.reference.trajectory.samples.col(state).head(n);
    std::vector<double> errors;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        StudyRow row;
        row.iteration = static_cast<int>(i);
        row.displacement_error = (columns[i].head(n) - ref_col).cwiseAbs().mean();
        row.frequency_error = std::abs(omegas[i] - study.reference.omega);
        row.omega = omegas[i];
        if (i < study.result.history.size()) {
            row.e_a = study.result.history[i].e_a;
            row.e_r = study.result.history[i].e_r;
        }
        errors.push_back(row.displacement_error);
        study.rows.push_back(row);
    }
    study.order = fitted_order(errors);
    study.order_pairs = fitted_pairs(errors);
    study.plateau = errors.back();
    return study;
}

OrderStudy order_study(const Benchmark& bench, const OrderStudyConfig& cfg) {
    if (cfg.max_harmonics < 1 || cfg.corrections < 1) throw ParameterError("order_study: empty guess family");
    const SystemModel& sys = bench.system;
    const int n_p = cfg.pfim.intervals;
    const int state = bench.amplitude_state;
    const PhaseKind kind = sys.autonomous ? PhaseKind::autonomous : PhaseKind::forced;

    OrderStudy out;
    out.base = convergence_study(bench, default_guess(bench, n_p), cfg.pfim, cfg.reference);
    const PeriodicTrajectory& ref = out.base.reference.trajectory;
    std::vector<double> base_errors;
    for (const auto& row : out.base.rows) base_errors.push_back(row.displacement_error);
    out.runs.push_back(std::move(base_errors));

    PfimConfig pc = cfg.pfim;
    pc.max_iter = cfg.corrections;
    pc.tol_a = std::numeric_limits<double>::min();
    pc.tol_r = std::numeric_limits<double>::min();
    pc.record_history = false;
    pc.final_operators = false;
    for (int h = 1; h <= cfg.max_harmonics; ++h) {
        PeriodicTrajectory guess = fourier_from_trajectory(ref, h).to_trajectory(n_p);
        guess.omega = out.base.reference.omega;
        std::vector<double> errors{grid_mean_error(guess, ref, state)};
        try {
            const PfimResult r = pfim_solve(sys, guess, kind, pc, [&](const IterationTrace& t) {
                if (t.iteration > 1) errors.push_back(grid_mean_error(*t.before, ref, state));
            });
            errors.push_back(grid_mean_error(r.trajectory, ref, state));
        } catch (const Error&) {
        }
        out.runs.push_back(std::move(errors));
    }
    out.order = fitted_order(out.runs);
    out.order_pairs = fitted_pairs(out.runs);
    out.plateau = iterate_floor(out.runs);
    return out;
}

std::vector<CompareRow> compare_methods(const Benchmark& bench, const std::vector<CompareCase>& cases,
                                        const CompareConfig& cfg) {
    const SystemModel& sys = bench.system;
    if (sys.autonomous) throw ParameterError("compare needs a forced system");
    const int state = bench.amplitude_state;
    const double omega = bench.omega;

    const PeriodicTrajectory start = default_guess(bench, cfg.error_grid);
    // Shooting seed: the default guess, or a settled state from rest when
    // Newton cannot start from there.
    Vector seed = start.node(0);
    ShootingSolution reference;
    try {
        reference = shooting_solve(sys, seed, kTwoPi / omega, cfg.reference);
    } catch (const Error&) {
        seed = steady_state_reference(sys, omega, 64, Vector::Zero(sys.dim)).node(0);
        reference = shooting_solve(sys, seed, kTwoPi / omega, cfg.reference);
    }
    std::map<int, PeriodicTrajectory> ref_grids;
    auto ref_on = [&](int n_p) -> const PeriodicTrajectory& {
        auto it = ref_grids.find(n_p);
        if (it == ref_grids.end()) {
            it = ref_grids
                     .emplace(n_p, sample_orbit(sys, reference.x0, omega, n_p,
                                                steps_per_interval(cfg.reference.n_s, n_p)))
                     .first;
        }
        return it->second;
    };

    std::optional<FourierSolution> hbm_seed;
    std::vector<CompareRow> rows;
    for (const auto& c : cases) {
        CompareRow row;
        row.method = c.method;
        row.resolution = c.resolution;
        row.error = std::numeric_limits<double>::quiet_NaN();
        try {
            if (c.method == "pfim") {
                PfimConfig pc = cfg.pfim;
                pc.intervals = c.resolution;
                pc.final_operators = false;
                const PeriodicTrajectory guess = default_guess(bench, c.resolution);
                PfimResult r;
                row.time_ms = time_ms([&] { r = pfim_solve(sys, guess, PhaseKind::forced, pc); });
                row.iterations = r.iterations;
                row.error = grid_mean_error(r.trajectory, ref_on(c.resolution), state);
                row.status = r.converged ? "ok" : "not converged";
            } else if (c.method == "hbm") {
                if (!hbm_seed) {
                    const FourierSolution lin = fourier_from_trajectory(default_guess(bench, 256),
                                                                        cfg.hbm_guess_harmonics);
                    hbm_seed = hbm_solve(sys, cfg.hbm_guess_harmonics, omega, lin, cfg.hbm).solution;
                }
                HbmResult r;
                row.time_ms = time_ms([&] { r = hbm_solve(sys, c.resolution, omega, *hbm_seed, cfg.hbm); });
                row.iterations = r.iterations;
                row.error = grid_mean_error(r.solution.to_trajectory(cfg.error_grid), ref_on(cfg.error_grid),
                                            state);
                row.status = "ok";
            } else if (c.method == "shooting") {
                ShootingConfig sc = cfg.shooting;
                sc.n_s = c.resolution;
                ShootingSolution s;
                row.time_ms = time_ms([&] { s = shooting_solve(sys, seed, kTwoPi / omega, sc); });
                row.iterations = s.iterations;
                const PeriodicTrajectory t = sample_orbit(sys, s.x0, omega, cfg.error_grid,
                                                          steps_per_interval(sc.n_s, cfg.error_grid));
                row.error = grid_mean_error(t, ref_on(cfg.error_grid), state);
                row.status = "ok";
            } else {
                throw ParameterError("unknown method '" + c.method + "'");
            }
        } catch (const Error& e) {
            row.status = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pfim
