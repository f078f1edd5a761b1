#include <doctest.h>

#include <cmath>
#include <numbers>

#include <pfim/benchmarks.hpp>
#include <pfim/errors.hpp>
#include <pfim/reference.hpp>
#include <pfim/system_model.hpp>

using namespace pfim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PeriodicTrajectory scalar(int n_p, double (*fn)(double)) {
    return PeriodicTrajectory::sample(n_p, 1.0, [fn](double t) {
        Vector v(1);
        v(0) = fn(t);
        return v;
    });
}

// x'' + 0.05 x' + x = 0.2 cos t
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

double max_deriv_error(int n_p, int k) {
    const auto t = PeriodicTrajectory::sample(n_p, 1.0, [k](double s) {
        Vector v(1);
        v(0) = std::sin(k * s);
        return v;
    });
    const StateArray d = grid_derivative(t);
    double e = 0.0;
    for (int i = 0; i <= n_p; ++i) e = std::max(e, std::abs(d(i, 0) - k * std::cos(k * t.tau(i))));
    return e;
}

}  // namespace

TEST_CASE("trajectory grid layout") {
    const auto t = scalar(16, [](double s) { return std::sin(s); });
    CHECK(t.intervals() == 16);
    CHECK(t.dtau() == doctest::Approx(kTwoPi / 16));
    CHECK(t.tau(4) == doctest::Approx(kTwoPi / 4));
    CHECK(t.samples(16, 0) == t.samples(0, 0));
    CHECK_NOTHROW(t.validate());

    PeriodicTrajectory bad = t;
    bad.samples(16, 0) += 1e-3;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = t;
    bad.omega = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS((void)PeriodicTrajectory::zeros(4, 1, 1.0).dtau(), GridTooCoarseError);
}

TEST_CASE("grid_derivative examples") {
    // Leading truncation term of the stencil is k^5 dtau^4 / 30.
    const auto c = scalar(64, [](double s) { return std::cos(s); });
    const StateArray d = grid_derivative(c);
    const double h = kTwoPi / 64;
    double e = 0.0;
    for (int i = 0; i <= 64; ++i) e = std::max(e, std::abs(d(i, 0) + std::sin(c.tau(i))));
    CHECK(e <= std::pow(h, 4) / 30.0);
    CHECK(e >= 0.9 * std::pow(h, 4) / 30.0);

    const auto k = scalar(32, [](double) { return 2.5; });
    CHECK(grid_derivative(k).cwiseAbs().maxCoeff() == 0.0);

    CHECK(max_deriv_error(256, 3) <= 243.0 * std::pow(kTwoPi / 256, 4) / 30.0);
    CHECK_THROWS_AS((void)grid_derivative(PeriodicTrajectory::zeros(4, 1, 1.0)), GridTooCoarseError);
}

TEST_CASE("grid_derivative converges at fourth order") {
    for (int k = 1; k <= 5; ++k) {
        const double ratio = max_deriv_error(128, k) / max_deriv_error(256, k);
        CHECK(ratio >= 12.0);
        CHECK(ratio <= 20.0);
    }
}

TEST_CASE("grid_derivative is periodic") {
    const auto t = scalar(64, [](double s) { return std::exp(std::sin(s)); });
    const StateArray d = grid_derivative(t);
    CHECK(d(64, 0) == d(0, 0));
}

TEST_CASE("residual of the resonant oscillator at its steady state") {
    const auto t = PeriodicTrajectory::sample(1024, 1.0, [](double s) {
        Vector v(2);
        v << 4.0 * std::sin(s), 4.0 * std::cos(s);
        return v;
    });
    const StateArray r = residual(resonant(), t);
    CHECK(max_residual_norm(r) <= 1e-6);
    CHECK(r.row(1024) == r.row(0));

    SystemModel hom = resonant();
    hom.rhs = [](const Vector& x, double, double) {
        Vector d(2);
        d << x(1), -x(0) - 0.05 * x(1);
        return d;
    };
    CHECK(residual(hom, PeriodicTrajectory::zeros(64, 2, 1.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("residual of a linear system at its exact solution is at truncation level") {
    // Truncation bound for FD4 on amplitude-4 sinusoids: 4 * dtau^4 / 30.
    for (int n : {1024, 2048}) {
        const auto t = PeriodicTrajectory::sample(n, 1.0, [](double s) {
            Vector v(2);
            v << 4.0 * std::sin(s), 4.0 * std::cos(s);
            return v;
        });
        const double h = kTwoPi / n;
        CHECK(max_residual_norm(residual(resonant(), t)) <= 4.0 * std::pow(h, 4) / 30.0 * 1.5 + 1e-12);
    }
}

TEST_CASE("residual of Duffing at the shooting orbit") {
    const Benchmark b = make_benchmark("duffing");
    Vector x0(2);
    x0 << 1.0, 0.0;
    const ShootingSolution s = shooting_solve(b.system, x0, kTwoPi);
    const PeriodicTrajectory t = sample_orbit(b.system, s.x0, 1.0, 4096, 4);
    CHECK(max_residual_norm(residual(b.system, t)) <= 1e-5);
}

TEST_CASE("error measures") {
    StateArray z = StateArray::Zero(5, 2);
    CHECK(average_error(z) == 0.0);
    CHECK(mean_residual_norm(z) == 0.0);

    StateArray c = StateArray::Zero(5, 2);
    c.col(0).setOnes();
    CHECK(average_error(c) == doctest::Approx(1.0));

    StateArray alt = StateArray::Zero(6, 2);
    for (int i = 0; i < 6; ++i) alt(i, 0) = i % 2 ? -1.0 : 1.0;
    CHECK(average_error(alt) == 0.0);
    CHECK(mean_residual_norm(alt) == doctest::Approx(1.0));
    CHECK(max_residual_norm(alt) == doctest::Approx(1.0));
}

TEST_CASE("relative_update examples and homogeneity") {
    PeriodicTrajectory t = PeriodicTrajectory::zeros(8, 2, 1.0);
    CHECK(relative_update(t, StateArray::Zero(9, 2)) == 0.0);

    t.samples.col(0).setOnes();
    StateArray d = StateArray::Zero(9, 2);
    d.col(0).setConstant(0.1);
    CHECK(relative_update(t, d) == doctest::Approx(0.1));

    t.samples.col(0).setConstant(2.0);
    d.col(0).setConstant(1e-3);
    CHECK(relative_update(t, d) == doctest::Approx(5e-4));

    StateArray r = StateArray::Random(9, 2);
    const double base = relative_update(t, r);
    CHECK(relative_update(t, 3.5 * r) == doctest::Approx(3.5 * base).epsilon(1e-14));
}

TEST_CASE("fd_jacobian agrees with an analytic jacobian") {
    const SystemModel m = resonant();
    Vector x(2);
    x << 0.3, -0.7;
    CHECK((fd_jacobian(m, x, 0.4, 1.0) - m.jac(x, 0.4, 1.0)).cwiseAbs().maxCoeff() <= 1e-6);
}
