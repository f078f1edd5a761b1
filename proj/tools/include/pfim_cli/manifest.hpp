#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace pfim::cli {

struct RunManifest {
    std::string command;
    std::string system;
    std::map<std::string, double> parameters;
    nlohmann::json config = nlohmann::json::object();
    std::string version;
    std::map<std::string, double> timings_ms;
    nlohmann::json summary = nlohmann::json::object();

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

[[nodiscard]] std::string serialize(const RunManifest& m);

/// Throws std::runtime_error on malformed input.
[[nodiscard]] RunManifest parse_manifest(const std::string& text);

}  // namespace pfim::cli
