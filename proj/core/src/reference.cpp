#include "pfim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pfim/errors.hpp"

namespace pfim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxHalvings = 10;

// One RK4 step of length dt from physical time t.
Vector rk4_step(const SystemModel& sys, const Vector& x, double omega, double t, double dt) {
    const Vector k1 = sys.f(x, omega * t, omega);
    const Vector k2 = sys.f(x + 0.5 * dt * k1, omega * (t + 0.5 * dt), omega);
    const Vector k3 = sys.f(x + 0.5 * dt * k2, omega * (t + 0.5 * dt), omega);
    const Vector k4 = sys.f(x + dt * k3, omega * (t + dt), omega);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Basis columns [1, cos k tau, sin k tau] at M equispaced samples.
Matrix fourier_basis(int harmonics, int samples) {
    Matrix b(samples, 2 * harmonics + 1);
    for (int j = 0; j < samples; ++j) {
        const double tau = kTwoPi * j / samples;
        b(j, 0) = 1.0;
        for (int k = 1; k <= harmonics; ++k) {
            b(j, k) = std::cos(k * tau);
            b(j, harmonics + k) = std::sin(k * tau);
        }
    }
    return b;
}

// Projection weights so that coeffs = W * samples.
Matrix fourier_weights(int harmonics, int samples) {
    Matrix w = fourier_basis(harmonics, samples).transpose();
    w.row(0) /= samples;
    w.bottomRows(2 * harmonics) *= 2.0 / samples;
    return w;
}

Vector pack(const Matrix& coeffs) {
    Vector v(coeffs.size());
    const auto width = coeffs.cols();
    for (Eigen::Index s = 0; s < coeffs.rows(); ++s) v.segment(s * width, width) = coeffs.row(s).transpose();
    return v;
}

Matrix unpack(const Vector& v, Eigen::Index states, Eigen::Index width) {
    Matrix c(states, width);
    for (Eigen::Index s = 0; s < states; ++s) c.row(s) = v.segment(s * width, width).transpose();
    return c;
}

struct AftWorkspace {
    int harmonics = 0;
    int samples = 0;
    Matrix basis;    // M x (2H+1)
    Matrix weights;  // (2H+1) x M
};

AftWorkspace make_workspace(int harmonics, int samples) {
    return {harmonics, samples, fourier_basis(harmonics, samples), fourier_weights(harmonics, samples)};
}

Matrix galerkin(const SystemModel& sys, const Matrix& coeffs, double omega, const AftWorkspace& ws) {
    const int h = ws.harmonics;
    const Matrix x = ws.basis * coeffs.transpose();  // M x N
    Matrix f(ws.samples, sys.dim);
    Vector state(sys.dim);
    for (int j = 0; j < ws.samples; ++j) {
        state = x.row(j).transpose();
        f.row(j) = sys.f(state, kTwoPi * j / ws.samples, omega).transpose();
    }
    Matrix g = -(ws.weights * f).transpose();  // N x (2H+1)
    for (int k = 1; k <= h; ++k) {
        // d/dtau of a_k cos + b_k sin = k b_k cos - k a_k sin
        g.col(k) += omega * k * coeffs.col(h + k);
        g.col(h + k) -= omega * k * coeffs.col(k);
    }
    return g;
}

}  // namespace

Vector rk4_flow(const SystemModel& sys, const Vector& x0, double omega, double t_span, long n_s, double t0) {
    if (n_s < 1) throw DomainError("rk4_flow: n_s must be >= 1");
    if (x0.size() != sys.dim) throw DimensionError("rk4_flow: state length mismatch");
    const double dt = t_span / static_cast<double>(n_s);
    Vector x = x0;
    for (long s = 0; s < n_s; ++s) {
        x = rk4_step(sys, x, omega, t0 + static_cast<double>(s) * dt, dt);
        if (!x.allFinite()) {
            throw BlowUpError(s, "rk4_flow: non-finite state at step " + std::to_string(s));
        }
    }
    return x;
}

PeriodicTrajectory sample_orbit(const SystemModel& sys, const Vector& x0, double omega, int n_p,
                                int steps_per_interval) {
    if (n_p < 8) throw GridTooCoarseError("sample_orbit needs at least 8 intervals");
    if (steps_per_interval < 1) throw DomainError("sample_orbit: steps_per_interval must be >= 1");
    const double period = kTwoPi / omega;
    const long total = static_cast<long>(n_p) * steps_per_interval;
    const double dt = period / static_cast<double>(total);
    PeriodicTrajectory t = PeriodicTrajectory::zeros(n_p, sys.dim, omega);
    Vector x = x0;
    t.samples.row(0) = x.transpose();
    long step = 0;
    for (int i = 1; i <= n_p; ++i) {
        for (int s = 0; s < steps_per_interval; ++s, ++step) {
            x = rk4_step(sys, x, omega, static_cast<double>(step) * dt, dt);
        }
        if (!x.allFinite()) throw BlowUpError(step, "sample_orbit: non-finite state");
        if (i < n_p) t.samples.row(i) = x.transpose();
    }
    t.samples.row(n_p) = t.samples.row(0);
    return t;
}

double ShootingSolution::omega() const { return kTwoPi / period; }

ShootingSolution shooting_solve(const SystemModel& sys, const Vector& guess_x0, double period_guess,
                                const ShootingConfig& cfg) {
    if (guess_x0.size() != sys.dim) throw DimensionError("shooting_solve: guess length mismatch");
    if (!(period_guess > 0.0)) throw DomainError("shooting_solve: period must be > 0");
    const int n = sys.dim;
    const bool autonomous = sys.autonomous;
    const int unknowns = autonomous ? n + 1 : n;

    Vector x = guess_x0;
    double period = period_guess;
    // Autonomous phase: stay on the hyperplane through the guess orthogonal to
    // the flow there.
    const Vector anchor = guess_x0;
    const Vector anchor_flow = sys.f(anchor, 0.0, kTwoPi / period_guess);
    auto omega_of = [](double t) { return kTwoPi / t; };
    auto flow = [&](const Vector& x0, double t) {
        return rk4_flow(sys, x0, omega_of(t), t, cfg.n_s);
    };
    auto monodromy = [&](const Vector& x0, double t, const Vector& end) {
        Matrix m(n, n);
        Vector xp = x0;
        for (int c = 0; c < n; ++c) {
            const double h = cfg.fd_step * (1.0 + std::abs(x0(c)));
            xp(c) = x0(c) + h;
            m.col(c) = (flow(xp, t) - end) / h;
            xp(c) = x0(c);
        }
        return m;
    };

    ShootingSolution sol;
    sol.n_s = cfg.n_s;
    Vector end = flow(x, period);
    for (int it = 0; it <= cfg.max_iter; ++it) {
        const Vector g = end - x;
        const double gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm <= cfg.tol) {
            sol.x0 = x;
            sol.period = period;
            sol.iterations = it;
            sol.residual = gnorm;
            sol.monodromy = monodromy(x, period, end);
            return sol;
        }
        if (it == cfg.max_iter) break;

        const Matrix dpsi = monodromy(x, period, end);
        Matrix jac = Matrix::Zero(unknowns, unknowns);
        Vector rhs = Vector::Zero(unknowns);
        jac.topLeftCorner(n, n) = dpsi - Matrix::Identity(n, n);
        rhs.head(n) = -g;
        if (autonomous) {
            jac.topRightCorner(n, 1) = sys.f(end, 0.0, omega_of(period));
            jac.bottomLeftCorner(1, n) = anchor_flow.transpose();
            rhs(n) = -anchor_flow.dot(x - anchor);
        }
        const Vector step = solve_dense(jac, rhs);
        // Halve the step until the residual drops.
        double lambda = 1.0;
        for (int k = 0;; ++k) {
            const Vector trial = x + lambda * step.head(n);
            const double trial_period = autonomous ? period + lambda * step(n) : period;
            Vector trial_end;
            bool better = false;
            if (trial_period > 0.0) {
                try {
                    trial_end = flow(trial, trial_period);
                    better = (trial_end - trial).lpNorm<Eigen::Infinity>() < gnorm;
                } catch (const BlowUpError&) {
                    better = false;
                }
            }
            if (better) {
                x = trial;
                period = trial_period;
                end = std::move(trial_end);
                break;
            }
            if (k == kMaxHalvings) {
                throw ConvergenceError("shooting_solve: no residual decrease along the Newton step");
            }
            lambda *= 0.5;
        }
    }
    throw ConvergenceError("shooting_solve: no convergence after " + std::to_string(cfg.max_iter) +
                           " Newton iterations");
}

Vector FourierSolution::evaluate(double tau) const {
    Vector x = coeffs.col(0);
    for (int k = 1; k <= harmonics; ++k) {
        x += coeffs.col(k) * std::cos(k * tau) + coeffs.col(harmonics + k) * std::sin(k * tau);
    }
    return x;
}

PeriodicTrajectory FourierSolution::to_trajectory(int n_p) const {
    return PeriodicTrajectory::sample(n_p, omega, [this](double tau) { return evaluate(tau); });
}

int aft_samples(int harmonics) {
    int m = std::max(256, 8 * harmonics);
    int p = 1;
    while (p < m) p <<= 1;
    return p;
}

Vector hbm_residual(const SystemModel& sys, const FourierSolution& sol, int samples) {
    const AftWorkspace ws = make_workspace(sol.harmonics, samples);
    return pack(galerkin(sys, sol.coeffs, sol.omega, ws));
}

HbmResult hbm_solve(const SystemModel& sys, int harmonics, double omega, const FourierSolution& guess,
                    const HbmConfig& cfg) {
    if (harmonics < 1) throw DomainError("hbm_solve: need at least one harmonic");
    if (!(omega > 0.0)) throw DomainError("hbm_solve: omega must be > 0");
    const int width = 2 * harmonics + 1;
    const int samples = cfg.samples > 0 ? cfg.samples : aft_samples(harmonics);
    if (samples <= 2 * harmonics) throw DomainError("hbm_solve: too few AFT samples");

    // Re-pad the guess to the requested harmonic count.
    Matrix coeffs = Matrix::Zero(sys.dim, width);
    if (guess.coeffs.rows() != sys.dim) throw DimensionError("hbm_solve: guess dimension mismatch");
    const int keep = std::min(harmonics, guess.harmonics);
    coeffs.col(0) = guess.coeffs.col(0);
    for (int k = 1; k <= keep; ++k) {
        coeffs.col(k) = guess.coeffs.col(k);
        coeffs.col(harmonics + k) = guess.coeffs.col(guess.harmonics + k);
    }

    const AftWorkspace ws = make_workspace(harmonics, samples);
    Vector c = pack(coeffs);
    const auto size = c.size();
    HbmResult out;
    for (int it = 0; it <= cfg.max_iter; ++it) {
        const Vector g = pack(galerkin(sys, unpack(c, sys.dim, width), omega, ws));
        const double gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm <= cfg.tol) {
            out.solution = {harmonics, unpack(c, sys.dim, width), omega};
            out.iterations = it;
            out.residual = gnorm;
            return out;
        }
        if (it == cfg.max_iter) break;
        Matrix jac(size, size);
        Vector cp = c;
        for (Eigen::Index j = 0; j < size; ++j) {
            const double h = cfg.fd_step * (1.0 + std::abs(c(j)));
            cp(j) = c(j) + h;
            jac.col(j) = (pack(galerkin(sys, unpack(cp, sys.dim, width), omega, ws)) - g) / h;
            cp(j) = c(j);
        }
        const Vector step = solve_dense(jac, g);
        c -= step;
        // Stiff systems bottom out above tol at round-off; a vanishing step there counts.
        if (gnorm <= cfg.floor_factor * cfg.tol &&
            step.lpNorm<Eigen::Infinity>() <= cfg.step_tol * (1.0 + c.lpNorm<Eigen::Infinity>())) {
            out.solution = {harmonics, unpack(c, sys.dim, width), omega};
            out.iterations = it + 1;
            out.residual = pack(galerkin(sys, out.solution.coeffs, omega, ws)).lpNorm<Eigen::Infinity>();
            return out;
        }
    }
    throw ConvergenceError("hbm_solve: no convergence after " + std::to_string(cfg.max_iter) +
                           " Newton iterations");
}

FourierSolution fourier_from_trajectory(const PeriodicTrajectory& traj, int harmonics) {
    const int n = traj.intervals();
    if (2 * harmonics >= n) throw DomainError("fourier_from_trajectory: too many harmonics for the grid");
    const Matrix w = fourier_weights(harmonics, n);
    FourierSolution sol;
    sol.harmonics = harmonics;
    sol.omega = traj.omega;
    sol.coeffs = (w * traj.samples.topRows(n)).transpose();
    return sol;
}

Eigen::VectorXd fourier_truncate(const Eigen::VectorXd& signal, int harmonics) {
    const auto n = static_cast<int>(signal.size());
    if (2 * harmonics >= n) throw DomainError("fourier_truncate: too many harmonics for the grid");
    const Matrix basis = fourier_basis(harmonics, n);
    const Matrix w = fourier_weights(harmonics, n);
    return basis * (w * signal);
}

PeriodicTrajectory steady_state_reference(const SystemModel& sys, double omega, int n_p, const Vector& x0,
                                          const SteadyStateConfig& cfg) {
    if (cfg.settle_periods < 1) throw DomainError("steady_state_reference: settle_periods must be >= 1");
    const double period = kTwoPi / omega;
    const long steps = static_cast<long>(n_p) * cfg.steps_per_interval;
    std::vector<double> moves;
    moves.reserve(static_cast<std::size_t>(cfg.settle_periods));
    Vector x = x0;
    for (int p = 0; p < cfg.settle_periods; ++p) {
        const Vector next = rk4_flow(sys, x, omega, period, steps);
        moves.push_back((next - x).norm() / (1.0 + x.norm()));
        x = next;
    }
    const double last = moves.back();
    if (last > cfg.settled_tol && moves.size() > 50) {
        const double earlier = moves[moves.size() - 51];
        if (!(last < earlier)) {
            throw NotSettledError("steady_state_reference: period map still moving (" +
                                  std::to_string(last) + ")");
        }
    }
    return sample_orbit(sys, x, omega, n_p, cfg.steps_per_interval);
}

}  // namespace pfim
