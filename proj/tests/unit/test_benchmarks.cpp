#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <pfim/benchmarks.hpp>
#include <pfim/errors.hpp>
#include <pfim/fe_beam.hpp>

using namespace pfim;

namespace {

Matrix central_jacobian(const SystemModel& s, const Vector& x, double tau, double omega) {
    Matrix j(s.dim, s.dim);
    for (int c = 0; c < s.dim; ++c) {
        const double h = 1e-6 * (1.0 + std::abs(x(c)));
        Vector xp = x, xm = x;
        xp(c) += h;
        xm(c) -= h;
        j.col(c) = (s.f(xp, tau, omega) - s.f(xm, tau, omega)) / (2.0 * h);
    }
    return j;
}

}  // namespace

TEST_CASE("catalog holds exactly the eight systems") {
    const auto& names = catalog_names();
    CHECK(names == std::vector<std::string>{"vanderpol", "duffing", "quad-drag", "abs-spring", "coulomb",
                                            "heaviside-piecewise", "square-wave", "fe-beam"});
    for (const auto& n : names) CHECK(make_system(n).name == n);
    CHECK_THROWS_AS((void)make_system("lorenz"), CatalogError);
    CHECK_THROWS_AS((void)make_system("duffing", {{"mu", 1.0}}), ParameterError);
}

TEST_CASE("van der Pol right-hand side") {
    const SystemModel s = make_system("vanderpol", {{"mu", 0.9}});
    CHECK(s.autonomous);
    CHECK(s.dim == 2);
    Vector x(2);
    x << 2.0, 0.0;
    const Vector f = s.f(x, 0.3, 1.0);
    CHECK(f(0) == 0.0);
    CHECK(f(1) == doctest::Approx(-2.0));
}

TEST_CASE("Duffing right-hand side at rest") {
    const SystemModel s = make_system("duffing");
    CHECK_FALSE(s.autonomous);
    const Vector f = s.f(Vector::Zero(2), 0.0, 1.0);
    CHECK(f(0) == 0.0);
    CHECK(f(1) == doctest::Approx(1.0));
}

TEST_CASE("Coulomb jacobian off the sticking surface") {
    const SystemModel s = make_system("coulomb");
    Vector x(2);
    x << 0.1, 0.5;
    Matrix want(2, 2);
    want << 0.0, 1.0, -1.0, -0.05;
    CHECK((s.jac(x, 0.0, 1.0) - want).cwiseAbs().maxCoeff() <= 1e-15);
    // sign(0) = 0
    Vector rest(2);
    rest << 0.0, 0.0;
    CHECK(s.f(rest, std::numbers::pi / 2, 1.0)(1) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("autonomous right-hand side does not depend on tau") {
    const SystemModel s = make_system("vanderpol");
    std::mt19937 rng(3);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        Vector x(2);
        x << g(rng), g(rng);
        CHECK((s.f(x, 0.1, 1.0) - s.f(x, 2.9, 1.0)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("every jacobian matches central differences away from switching surfaces") {
    std::mt19937 rng(17);
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        const Benchmark b = make_benchmark(name);
        const SystemModel& s = b.system;
        const double scale = name == "fe-beam" ? 0.02 : 2.0;
        std::normal_distribution<double> g(0.0, scale);
        std::uniform_real_distribution<double> tau(0.0, 2.0 * std::numbers::pi);
        int checked = 0;
        while (checked < 100) {
            Vector x(s.dim);
            for (int i = 0; i < s.dim; ++i) x(i) = g(rng);
            const double t = tau(rng);
            if (s.switching && std::abs(s.switching(x, t, b.omega)) < 1e-3) continue;
            if (name == "fe-beam" && std::abs(x(6) + 0.01) < 1e-3) continue;
            const Matrix ja = s.jac(x, t, b.omega);
            const Matrix jn = central_jacobian(s, x, t, b.omega);
            const double tol = std::max(1e-5, 1e-4 * ja.norm());
            CHECK((ja - jn).cwiseAbs().maxCoeff() <= tol);
            ++checked;
        }
    }
}

TEST_CASE("square wave") {
    const double T = 4.0 * std::numbers::pi;
    CHECK(square_wave(0.0, T) == 1.0);
    CHECK(square_wave(T / 2, T) == 0.0);
    CHECK(square_wave(T + 0.1, T) == 1.0);
    CHECK(square_wave(-0.1, T) == 0.0);
    for (int i = 0; i < 200; ++i) {
        const double t = -7.0 + 0.173 * i;
        CHECK(square_wave(t, T) + square_wave(t + T / 2, T) == 1.0);
    }
    CHECK_THROWS_AS((void)square_wave(0.0, 0.0), DomainError);
}

TEST_CASE("heaviside switching function flags the force branch") {
    std::mt19937 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double x = g(rng), v = g(rng);
        const double sw = heaviside_switch(x, v);
        const double f = heaviside_force(x, v);
        if (sw >= 0.0) {
            CHECK(f == doctest::Approx(2.0 * v + 10.0 * x));
        } else {
            CHECK(f == 0.0);
        }
    }
    // Velocity below zero: force equals the switch value, so it is continuous there.
    CHECK(heaviside_force(0.02, -0.1) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("fe-beam element matrices and assembly") {
    const FeBeamParameters p;
    CHECK(p.area() == doctest::Approx(4e-3));
    CHECK(p.inertia() == doctest::Approx(1.3333e-5).epsilon(1e-4));
    const Matrix ke = beam_element_stiffness(p);
    CHECK(ke(0, 0) == doctest::Approx(12.0 * 3e9 * p.inertia() / std::pow(8.0 / 9.0, 3)));
    CHECK(ke(0, 0) == doctest::Approx(6.833e5).epsilon(1e-3));

    const FeBeamAssembly a = assemble_fe_beam(p);
    CHECK(a.mass.rows() == 18);
    CHECK(a.stiffness.cols() == 18);
    CHECK((a.mass - a.mass.transpose()).norm() <= 1e-9 * a.mass.norm());
    CHECK((a.stiffness - a.stiffness.transpose()).norm() <= 1e-9 * a.stiffness.norm());
    const Eigen::SelfAdjointEigenSolver<Matrix> es(a.mass);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK((a.damping - (p.alpha * a.mass + p.beta * a.stiffness)).norm() <= 1e-12 * a.damping.norm());
    CHECK(a.nonlinear_dof == 6);
    CHECK(a.excitation_dof == 16);
}

TEST_CASE("fe-beam natural frequencies follow the cantilever formula") {
    const FeBeamParameters p;
    const FeBeamAssembly a = assemble_fe_beam(p);
    const auto w = natural_frequencies(a.mass, a.stiffness);
    REQUIRE(w.size() == 18);
    const double ei = p.youngs * p.inertia();
    const double rho_a = p.density * p.area();
    const double base = std::sqrt(ei / (rho_a * std::pow(p.length, 4)));
    CHECK(w[0] == doctest::Approx(1.875104 * 1.875104 * base).epsilon(1e-3));
    CHECK(w[1] == doctest::Approx(4.694091 * 4.694091 * base).epsilon(1e-2));
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] > w[i - 1]);
}

TEST_CASE("Rayleigh coefficients") {
    const auto [alpha, beta] = rayleigh_coefficients(0.02, 10.49, 65.97);
    CHECK(alpha == doctest::Approx(0.362).epsilon(0.01));
    CHECK(beta == doctest::Approx(5.23e-4).epsilon(0.01));
    // Two-point fit reproduces zeta at both anchors.
    for (double w : {10.49, 65.97}) CHECK(alpha / (2 * w) + beta * w / 2 == doctest::Approx(0.02));
}

TEST_CASE("fe-beam nonlinear force") {
    CHECK(fe_nonlinear_force(0.0) == 0.0);
    CHECK(fe_nonlinear_force(-0.01) == doctest::Approx(-1.0));
    CHECK(fe_nonlinear_force(-0.02) == doctest::Approx(-58.0));
    CHECK(fe_nonlinear_stiffness(-0.01) == doctest::Approx(3e6 * 1e-4));
    CHECK(fe_nonlinear_stiffness(-0.02) == doctest::Approx(3e6 * 4e-4 + 5e3));
}

TEST_CASE("fe-beam state space") {
    const Benchmark b = make_benchmark("fe-beam");
    CHECK(b.system.dim == 36);
    CHECK(b.linear_part.has_value());
    CHECK(b.smoothness == Smoothness::c0);
    const Vector x = Vector::Zero(36);
    CHECK(b.system.f(x, 0.0, 1.0).cwiseAbs().maxCoeff() == 0.0);
    // At the forcing peak M a = F0 at the tip displacement DOF.
    const Vector f = b.system.f(x, std::numbers::pi / 2, 1.0);
    CHECK(f.head(18).cwiseAbs().maxCoeff() == 0.0);
    const FeBeamAssembly a = assemble_fe_beam();
    CHECK((a.mass * f.tail(18) - 100.0 * Vector::Unit(18, 16)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("smoothness tags") {
    CHECK(make_benchmark("vanderpol").smoothness == Smoothness::smooth);
    CHECK(make_benchmark("quad-drag").smoothness == Smoothness::c1);
    CHECK(make_benchmark("abs-spring").smoothness == Smoothness::c0);
    CHECK(make_benchmark("coulomb").smoothness == Smoothness::c_minus1);
    CHECK(make_benchmark("heaviside-piecewise").smoothness == Smoothness::c_minus1);
    CHECK(make_benchmark("square-wave").smoothness == Smoothness::c_minus1_forcing);
}
