#include "pfim/benchmarks.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <utility>

#include "pfim/errors.hpp"
#include "pfim/fe_beam.hpp"

namespace pfim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ParameterMap merge(const std::string& system, ParameterMap defaults, const ParameterMap& overrides) {
    for (const auto& [key, value] : overrides) {
        auto it = defaults.find(key);
        if (it == defaults.end()) {
            throw ParameterError("unknown parameter '" + key + "' for system " + system);
        }
        if (!std::isfinite(value)) throw ParameterError("parameter '" + key + "' must be finite");
        it->second = value;
    }
    if (defaults.at("omega") <= 0.0) throw ParameterError("omega must be > 0");
    return defaults;
}

// x'' + c x' + k x + g(x, v) = amp * forcing(tau, omega), states (x, v).
struct Sdof {
    double c = 0.0;
    double k = 1.0;
    double amp = 0.0;
    std::function<double(double, double)> g;
    std::function<std::pair<double, double>(double, double)> dg;  // (dg/dx, dg/dv)
    std::function<double(double, double)> forcing;
};

SystemModel sdof_model(const std::string& name, Sdof s, bool with_nonlinearity = true) {
    auto p = std::make_shared<const Sdof>(std::move(s));
    SystemModel m;
    m.name = name;
    m.dim = 2;
    m.autonomous = false;
    m.rhs = [p, with_nonlinearity](const Vector& x, double tau, double omega) {
        Vector out(2);
        double acc = p->amp * p->forcing(tau, omega) - p->c * x(1) - p->k * x(0);
        if (with_nonlinearity) acc -= p->g(x(0), x(1));
        out << x(1), acc;
        return out;
    };
    m.jacobian = [p, with_nonlinearity](const Vector& x, double, double) {
        Matrix j(2, 2);
        double dx = 0.0;
        double dv = 0.0;
        if (with_nonlinearity) std::tie(dx, dv) = p->dg(x(0), x(1));
        j << 0.0, 1.0, -p->k - dx, -p->c - dv;
        return j;
    };
    return m;
}

Benchmark forced_sdof(const std::string& name, Sdof s, ParameterMap params, Smoothness smooth,
                      SwitchFn switching) {
    Benchmark b;
    b.system = sdof_model(name, s);
    b.system.switching = std::move(switching);
    b.linear_part = sdof_model(name + "-linear", s, false);
    b.omega = params.at("omega");
    b.parameters = std::move(params);
    b.smoothness = smooth;
    return b;
}

double cosine(double tau, double) { return std::cos(tau); }

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Benchmark vanderpol(const ParameterMap& overrides) {
    auto p = merge("vanderpol", {{"mu", 0.9}, {"omega", 1.0}}, overrides);
    const double mu = p.at("mu");
    Benchmark b;
    b.system.name = "vanderpol";
    b.system.dim = 2;
    b.system.autonomous = true;
    b.system.rhs = [mu](const Vector& x, double, double) {
        Vector out(2);
        out << x(1), -x(0) - mu * (x(0) * x(0) - 1.0) * x(1);
        return out;
    };
    b.system.jacobian = [mu](const Vector& x, double, double) {
        Matrix j(2, 2);
        j << 0.0, 1.0, -1.0 - 2.0 * mu * x(0) * x(1), -mu * (x(0) * x(0) - 1.0);
        return j;
    };
    const double w = p.at("omega");
    b.analytic_guess = [w](double tau) {
        Vector x(2);
        x << std::cos(tau), -w * std::sin(tau);
        return x;
    };
    b.omega = w;
    b.parameters = std::move(p);
    b.smoothness = Smoothness::smooth;
    return b;
}

Benchmark duffing(const ParameterMap& overrides) {
    auto p = merge("duffing", {{"c", 0.1}, {"k", 1.0}, {"k3", 0.1}, {"F", 1.0}, {"omega", 1.0}},
                   overrides);
    const double k3 = p.at("k3");
    Sdof s{p.at("c"), p.at("k"), p.at("F"),
           [k3](double x, double) { return k3 * x * x * x; },
           [k3](double x, double) { return std::pair{3.0 * k3 * x * x, 0.0}; }, cosine};
    return forced_sdof("duffing", s, p, Smoothness::smooth, {});
}

Benchmark quad_drag(const ParameterMap& overrides) {
    auto p = merge("quad-drag", {{"c", 0.05}, {"k", 1.0}, {"cd", 0.5}, {"F", 0.2}, {"omega", 1.0}},
                   overrides);
    const double cd = p.at("cd");
    Sdof s{p.at("c"), p.at("k"), p.at("F"),
           [cd](double, double v) { return cd * v * std::abs(v); },
           [cd](double, double v) { return std::pair{0.0, 2.0 * cd * std::abs(v)}; }, cosine};
    return forced_sdof("quad-drag", s, p, Smoothness::c1,
                       [](const Vector& x, double, double) { return x(1); });
}

Benchmark abs_spring(const ParameterMap& overrides) {
    auto p = merge("abs-spring", {{"c", 0.05}, {"k", 1.0}, {"ka", 0.5}, {"F", 0.2}, {"omega", 1.0}},
                   overrides);
    const double ka = p.at("ka");
    Sdof s{p.at("c"), p.at("k"), p.at("F"),
           [ka](double x, double) { return ka * std::abs(x); },
           [ka](double x, double) { return std::pair{x >= 0.0 ? ka : -ka, 0.0}; }, cosine};
    return forced_sdof("abs-spring", s, p, Smoothness::c0,
                       [](const Vector& x, double, double) { return x(0); });
}

Benchmark coulomb(const ParameterMap& overrides) {
    auto p = merge("coulomb", {{"c", 0.05}, {"k", 1.0}, {"friction", 0.02}, {"F", 0.2}, {"omega", 1.0}},
                   overrides);
    const double mu = p.at("friction");
    Sdof s{p.at("c"), p.at("k"), p.at("F"),
           [mu](double, double v) { return mu * sign0(v); },
           [](double, double) { return std::pair{0.0, 0.0}; }, cosine};
    return forced_sdof("coulomb", s, p, Smoothness::c_minus1,
                       [](const Vector& x, double, double) { return x(1); });
}

Benchmark heaviside(const ParameterMap& overrides) {
    auto p = merge("heaviside-piecewise", {{"c", 0.05}, {"k", 1.0}, {"F", 0.2}, {"omega", 3.0}},
                   overrides);
    Sdof s{p.at("c"), p.at("k"), p.at("F"), heaviside_force,
           [](double x, double v) {
               return heaviside_switch(x, v) >= 0.0 ? std::pair{10.0, 2.0} : std::pair{0.0, 0.0};
           },
           cosine};
    return forced_sdof("heaviside-piecewise", s, p, Smoothness::c_minus1,
                       [](const Vector& x, double, double) { return heaviside_switch(x(0), x(1)); });
}

Benchmark square(const ParameterMap& overrides) {
    auto p = merge("square-wave", {{"c", 0.05}, {"k", 1.0}, {"k3", 0.1}, {"F", 0.2}, {"omega", 0.5}},
                   overrides);
    const double k3 = p.at("k3");
    Sdof s{p.at("c"), p.at("k"), p.at("F"),
           [k3](double x, double) { return k3 * x * x * x; },
           [k3](double x, double) { return std::pair{3.0 * k3 * x * x, 0.0}; },
           [](double tau, double omega) { return square_wave(tau / omega, kTwoPi / omega); }};
    return forced_sdof("square-wave", s, p, Smoothness::c_minus1_forcing,
                       [](const Vector&, double tau, double) { return std::sin(tau); });
}

struct BeamOperators {
    FeBeamParameters params;
    Matrix minv_k;
    Matrix minv_c;
    Vector minv_nl;     // M^-1 e_{y5}
    Vector minv_force;  // M^-1 e_{y10}
    int nl_dof = 0;
    int dofs = 0;
};

SystemModel beam_model(std::shared_ptr<const BeamOperators> ops, bool with_nonlinearity) {
    SystemModel m;
    m.name = with_nonlinearity ? "fe-beam" : "fe-beam-linear";
    m.dim = 2 * ops->dofs;
    m.autonomous = false;
    m.rhs = [ops, with_nonlinearity](const Vector& x, double tau, double) {
        const int n = ops->dofs;
        Vector out(2 * n);
        out.head(n) = x.tail(n);
        out.tail(n).noalias() = -ops->minv_k * x.head(n);
        out.tail(n).noalias() -= ops->minv_c * x.tail(n);
        out.tail(n) += ops->params.force * std::sin(tau) * ops->minv_force;
        if (with_nonlinearity) {
            out.tail(n) -= fe_nonlinear_force(x(ops->nl_dof), ops->params) * ops->minv_nl;
        }
        return out;
    };
    m.jacobian = [ops, with_nonlinearity](const Vector& x, double, double) {
        const int n = ops->dofs;
        Matrix j = Matrix::Zero(2 * n, 2 * n);
        j.topRightCorner(n, n).setIdentity();
        j.bottomLeftCorner(n, n) = -ops->minv_k;
        j.bottomRightCorner(n, n) = -ops->minv_c;
        if (with_nonlinearity) {
            j.bottomLeftCorner(n, n).col(ops->nl_dof) -=
                fe_nonlinear_stiffness(x(ops->nl_dof), ops->params) * ops->minv_nl;
        }
        return j;
    };
    if (with_nonlinearity) {
        m.switching = [ops](const Vector& x, double, double) {
            return x(ops->nl_dof) + ops->params.gap;
        };
    }
    return m;
}

Benchmark fe_beam(const ParameterMap& overrides) {
    FeBeamParameters d;
    auto p = merge("fe-beam",
                   {{"F0", d.force}, {"beta1", d.cubic}, {"k2", d.clearance_stiffness},
                    {"delta", d.gap}, {"alpha", d.alpha}, {"beta", d.beta}, {"omega", 1.0}},
                   overrides);
    d.force = p.at("F0");
    d.cubic = p.at("beta1");
    d.clearance_stiffness = p.at("k2");
    d.gap = p.at("delta");
    d.alpha = p.at("alpha");
    d.beta = p.at("beta");
    const FeBeamAssembly a = assemble_fe_beam(d);

    auto ops = std::make_shared<BeamOperators>();
    ops->params = d;
    ops->dofs = static_cast<int>(a.mass.rows());
    ops->nl_dof = a.nonlinear_dof;
    const Eigen::LLT<Matrix> chol(a.mass);
    if (chol.info() != Eigen::Success) throw DomainError("fe-beam mass matrix is not positive definite");
    ops->minv_k = chol.solve(a.stiffness);
    ops->minv_c = chol.solve(a.damping);
    ops->minv_nl = chol.solve(Vector::Unit(ops->dofs, a.nonlinear_dof));
    ops->minv_force = chol.solve(Vector::Unit(ops->dofs, a.excitation_dof));

    Benchmark b;
    b.system = beam_model(ops, true);
    b.linear_part = beam_model(ops, false);
    b.omega = p.at("omega");
    b.parameters = std::move(p);
    b.smoothness = Smoothness::c0;
    b.amplitude_state = a.excitation_dof;
    return b;
}

}  // namespace

const char* to_string(Smoothness s) {
    switch (s) {
        case Smoothness::smooth: return "smooth";
        case Smoothness::c1: return "C1";
        case Smoothness::c0: return "C0";
        case Smoothness::c_minus1: return "C-1";
        case Smoothness::c_minus1_forcing: return "C-1-forcing";
    }
    return "unknown";
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"vanderpol", "duffing", "quad-drag", "abs-spring",
                                                "coulomb", "heaviside-piecewise", "square-wave",
                                                "fe-beam"};
    return names;
}

Benchmark make_benchmark(const std::string& name, const ParameterMap& overrides) {
    if (name == "vanderpol") return vanderpol(overrides);
    if (name == "duffing") return duffing(overrides);
    if (name == "quad-drag") return quad_drag(overrides);
    if (name == "abs-spring") return abs_spring(overrides);
    if (name == "coulomb") return coulomb(overrides);
    if (name == "heaviside-piecewise") return heaviside(overrides);
    if (name == "square-wave") return square(overrides);
    if (name == "fe-beam") return fe_beam(overrides);
    throw CatalogError("unknown system '" + name + "'");
}

SystemModel make_system(const std::string& name, const ParameterMap& overrides) {
    return make_benchmark(name, overrides).system;
}

double square_wave(double t, double period) {
    if (!(period > 0.0)) throw DomainError("square_wave: period must be > 0");
    double r = std::fmod(t, period);
    if (r < 0.0) r += period;
    return r < 0.5 * period ? 1.0 : 0.0;
}

double heaviside_switch(double x, double v) {
    const double h = -v > 0.0 ? 1.0 : 0.0;
    return 2.0 * v * h + 10.0 * x;
}

double heaviside_force(double x, double v) {
    return heaviside_switch(x, v) >= 0.0 ? 2.0 * v + 10.0 * x : 0.0;
}

}  // namespace pfim
