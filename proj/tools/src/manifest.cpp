#include "pfim_cli/manifest.hpp"

#include <stdexcept>

namespace pfim::cli {

std::string serialize(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["system"] = m.system;
    j["parameters"] = m.parameters;
    j["config"] = m.config;
    j["version"] = m.version;
    j["timings_ms"] = m.timings_ms;
    j["summary"] = m.summary;
    return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.system = j.at("system").get<std::string>();
        m.parameters = j.at("parameters").get<std::map<std::string, double>>();
        m.config = j.at("config");
        m.version = j.at("version").get<std::string>();
        m.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
        m.summary = j.at("summary");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("bad manifest: ") + e.what());
    }
}

}  // namespace pfim::cli
