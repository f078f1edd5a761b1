#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfim/system_model.hpp"

namespace pfim {

using ParameterMap = std::map<std::string, double>;

enum class Smoothness { smooth, c1, c0, c_minus1, c_minus1_forcing };

[[nodiscard]] const char* to_string(Smoothness s);

/// A catalog system together with its defaults.
struct Benchmark {
    SystemModel system;
    ParameterMap parameters;  ///< effective values after overrides
    Smoothness smoothness = Smoothness::smooth;
    double omega = 1.0;       ///< forcing frequency, or the frequency guess if autonomous
    int amplitude_state = 0;  ///< state column reported as "amplitude"
    /// Same system with the nonlinear terms removed; used to build the
    /// default guess of forced systems.
    std::optional<SystemModel> linear_part;
    /// Closed-form guess x(tau) for autonomous systems.
    std::function<Vector(double tau)> analytic_guess;
};

/// Catalog names in a fixed order.
[[nodiscard]] const std::vector<std::string>& catalog_names();

/// Throws CatalogError for unknown names and ParameterError for unknown keys
/// or invalid values.
[[nodiscard]] Benchmark make_benchmark(const std::string& name, const ParameterMap& overrides = {});
[[nodiscard]] SystemModel make_system(const std::string& name, const ParameterMap& overrides = {});

/// 1 on [0, T/2), 0 on [T/2, T), T-periodic.
[[nodiscard]] double square_wave(double t, double period);

/// Switching indicator of the heaviside-piecewise system: 2 v H(-v) + 10 x.
[[nodiscard]] double heaviside_switch(double x, double v);
/// Piecewise force of the heaviside-piecewise system.
[[nodiscard]] double heaviside_force(double x, double v);

}  // namespace pfim
