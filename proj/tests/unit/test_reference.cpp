#include <doctest.h>

#include <cmath>
#include <numbers>

#include <pfim/benchmarks.hpp>
#include <pfim/errors.hpp>
#include <pfim/pfim.hpp>
#include <pfim/reference.hpp>
#include <pfim/study.hpp>

using namespace pfim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// x'' + 0.05 x' + x = 0.2 cos t, steady state 4 sin t
SystemModel resonant() {
    SystemModel m;
    m.name = "resonant";
    m.dim = 2;
    m.rhs = [](const Vector& x, double tau, double) {
        Vector d(2);
        d << x(1), -x(0) - 0.05 * x(1) + 0.2 * std::cos(tau);
        return d;
    };
    m.jacobian = [](const Vector&, double, double) {
        Matrix j(2, 2);
        j << 0.0, 1.0, -1.0, -0.05;
        return j;
    };
    return m;
}

Vector state(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

double rk4_error(long n) {
    SystemModel m;
    m.name = "harmonic";
    m.dim = 2;
    m.autonomous = true;
    m.rhs = [](const Vector& x, double, double) { return state(x(1), -x(0)); };
    const Vector end = rk4_flow(m, state(1.0, 0.0), 1.0, 3.0, n);
    return (end - state(std::cos(3.0), -std::sin(3.0))).norm();
}

}  // namespace

TEST_CASE("rk4_flow examples") {
    SystemModel m;
    m.name = "growth";
    m.dim = 1;
    m.autonomous = true;
    m.rhs = [](const Vector& x, double, double) { return Vector(x); };
    const Vector one = Vector::Ones(1);
    CHECK(rk4_flow(m, one, 1.0, 1.0, 1)(0) == doctest::Approx(1.0 + 1.0 + 0.5 + 1.0 / 6 + 1.0 / 24));
    CHECK(rk4_flow(m, one, 1.0, 1.0, 1000)(0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(rk4_flow(m, one, 1.0, 0.0, 10)(0) == 1.0);

    // x' = cos(omega t): the system sees tau = omega t.
    SystemModel drive;
    drive.name = "drive";
    drive.dim = 1;
    drive.rhs = [](const Vector&, double tau, double) { return Vector::Constant(1, std::cos(tau)); };
    CHECK(rk4_flow(drive, Vector::Zero(1), 2.0, 0.4, 400)(0) == doctest::Approx(std::sin(0.8) / 2.0).epsilon(1e-12));
    CHECK(rk4_flow(drive, Vector::Zero(1), 2.0, 0.4, 400, 0.1)(0) ==
          doctest::Approx((std::sin(1.0) - std::sin(0.2)) / 2.0).epsilon(1e-12));
}

TEST_CASE("rk4_flow is fourth order") {
    for (long n : {40L, 80L, 160L}) {
        const double ratio = rk4_error(n) / rk4_error(2 * n);
        CHECK(ratio >= 12.0);
        CHECK(ratio <= 20.0);
    }
}

TEST_CASE("rk4_flow reports blow-up") {
    SystemModel m;
    m.name = "blowup";
    m.dim = 1;
    m.autonomous = true;
    m.rhs = [](const Vector& x, double, double) { return Vector(x.array().square().matrix()); };
    CHECK_THROWS_AS((void)rk4_flow(m, Vector::Ones(1), 1.0, 5.0, 50), BlowUpError);
}

TEST_CASE("sample_orbit closes the grid") {
    const PeriodicTrajectory t = sample_orbit(resonant(), state(0.0, 4.0), 1.0, 64, 8);
    CHECK(t.intervals() == 64);
    CHECK(t.samples.row(64) == t.samples.row(0));
    for (int i = 0; i < 64; ++i) CHECK(std::abs(t.samples(i, 0) - 4.0 * std::sin(t.tau(i))) <= 1e-8);
}

TEST_CASE("shooting on the resonant oscillator") {
    const ShootingSolution s = shooting_solve(resonant(), Vector::Zero(2), kTwoPi);
    CHECK(std::abs(s.x0(0)) <= 1e-9);
    CHECK(s.x0(1) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(s.period == doctest::Approx(kTwoPi));
    CHECK(s.omega() == doctest::Approx(1.0));
    CHECK(s.residual <= 1e-11);
    CHECK(s.monodromy.rows() == 2);
    for (auto z : eigenvalues(s.monodromy)) {
        CHECK(std::abs(z) == doctest::Approx(std::exp(-0.025 * kTwoPi)).epsilon(1e-6));
    }
}

TEST_CASE("shooting on Duffing") {
    const Benchmark b = make_benchmark("duffing");
    const ShootingSolution s = shooting_solve(b.system, state(1.0, 0.0), kTwoPi / b.omega);
    CHECK(s.residual <= 1e-11);
    const Vector end = rk4_flow(b.system, s.x0, b.omega, s.period, s.n_s);
    CHECK((end - s.x0).cwiseAbs().maxCoeff() <= 1e-11);

    ShootingConfig tight;
    tight.max_iter = 1;
    tight.tol = 1e-300;
    CHECK_THROWS_AS((void)shooting_solve(b.system, state(3.0, 0.0), kTwoPi, tight), ConvergenceError);
}

TEST_CASE("shooting on van der Pol finds the limit cycle period") {
    const Benchmark b = make_benchmark("vanderpol");
    const ShootingSolution s = shooting_solve(b.system, state(2.0, 0.0), kTwoPi);
    CHECK(s.residual <= 1e-10);
    CHECK(s.period > kTwoPi);
    // Trivial multiplier.
    double best = 1e9;
    for (auto z : eigenvalues(s.monodromy)) best = std::min(best, std::abs(z - 1.0));
    CHECK(best <= 1e-5);

    // From the small cos(t) guess the full Newton step overshoots; the halved
    // steps still reach the same cycle.
    const ShootingSolution far = shooting_solve(b.system, state(1.0, 0.0), kTwoPi);
    CHECK(far.period == doctest::Approx(s.period).epsilon(1e-8));
}

TEST_CASE("harmonic balance on the resonant oscillator") {
    FourierSolution g;
    g.harmonics = 1;
    g.coeffs = Matrix::Zero(2, 3);
    const HbmResult r = hbm_solve(resonant(), 1, 1.0, g);
    CHECK(r.solution.coeffs(0, 2) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(std::abs(r.solution.coeffs(0, 1)) <= 1e-10);
    CHECK(std::abs(r.solution.coeffs(0, 0)) <= 1e-10);
    CHECK(r.solution.coeffs(1, 1) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(r.residual <= 1e-10);
    CHECK(r.solution.evaluate(std::numbers::pi / 2)(0) == doctest::Approx(4.0));
    CHECK(hbm_residual(resonant(), r.solution, 256).size() == 6);
}

TEST_CASE("harmonic balance agrees with PFIM on Duffing") {
    const Benchmark b = make_benchmark("duffing");
    PfimConfig c;
    c.intervals = 2048;
    const PfimResult p = pfim_solve(b.system, default_guess(b, 2048), PhaseKind::forced, c);
    REQUIRE(p.converged);
    const HbmResult h = hbm_solve(b.system, 12, b.omega, fourier_from_trajectory(p.trajectory, 12));
    const PeriodicTrajectory t = h.solution.to_trajectory(2048);
    CHECK((t.samples - p.trajectory.samples).cwiseAbs().maxCoeff() <= 1e-5);

    // Odd nonlinearity: even harmonics vanish and odd ones decay.
    const Matrix& a = h.solution.coeffs;
    auto mag = [&](int k) { return std::hypot(a(0, k), a(0, 12 + k)); };
    CHECK(mag(2) <= 1e-8);
    CHECK(mag(3) < 0.1 * mag(1));
    CHECK(mag(5) < 0.1 * mag(3));
}

TEST_CASE("aft sample count") {
    CHECK(aft_samples(1) == 256);
    CHECK(aft_samples(32) == 256);
    CHECK(aft_samples(33) == 512);
    CHECK(aft_samples(100) == 1024);
}

TEST_CASE("Fourier projection round trip") {
    const PeriodicTrajectory t = PeriodicTrajectory::sample(64, 1.0, [](double s) {
        return state(0.5 + std::cos(s) - 0.25 * std::sin(3 * s), std::sin(2 * s));
    });
    const FourierSolution f = fourier_from_trajectory(t, 4);
    CHECK(f.coeffs(0, 0) == doctest::Approx(0.5));
    CHECK(f.coeffs(0, 1) == doctest::Approx(1.0));
    CHECK(f.coeffs(0, 4 + 3) == doctest::Approx(-0.25));
    CHECK(f.coeffs(1, 4 + 2) == doctest::Approx(1.0));
    CHECK((f.to_trajectory(64).samples - t.samples).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("truncating a square wave overshoots by the Gibbs fraction") {
    const int n = 4096;
    Eigen::VectorXd sq(n);
    for (int i = 0; i < n; ++i) sq(i) = square_wave(kTwoPi * i / n, kTwoPi);
    double last = 1e9;
    for (int h : {9, 19, 39}) {
        const Eigen::VectorXd f = fourier_truncate(sq, h);
        const double over = f.maxCoeff() - 1.0;
        CHECK(over >= 0.04);
        CHECK(over <= 0.1);
        const double l2 = (f - sq).norm() / std::sqrt(static_cast<double>(n));
        CHECK(l2 < last);
        last = l2;
    }
}

TEST_CASE("long-run integration settles onto the resonant response") {
    const PeriodicTrajectory t = steady_state_reference(resonant(), 1.0, 256, Vector::Zero(2));
    CHECK(t.samples.col(0).maxCoeff() == doctest::Approx(4.0).epsilon(1e-8));
    const ShootingSolution s = shooting_solve(resonant(), Vector::Zero(2), kTwoPi);
    CHECK((t.node(0) - s.x0).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("long-run integration rejects an unsettled response") {
    SystemModel m;
    m.name = "unstable";
    m.dim = 1;
    m.rhs = [](const Vector& x, double tau, double) { return Vector::Constant(1, 0.1 * x(0) + std::cos(tau)); };
    SteadyStateConfig c;
    c.settle_periods = 60;
    CHECK_THROWS_AS((void)steady_state_reference(m, 1.0, 64, Vector::Ones(1), c), NotSettledError);
}
