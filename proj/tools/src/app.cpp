#include "pfim_cli/app.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfim/continuation.hpp"
#include "pfim/errors.hpp"
#include "pfim/study.hpp"
#include "pfim_cli/csv.hpp"
#include "pfim_cli/manifest.hpp"

#ifndef PFIM_VERSION_STRING
#define PFIM_VERSION_STRING "0.0.0"
#endif

namespace pfim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string system;
    std::string method = "pfim";
    int np = 4096;
    int harmonics = 10;
    std::optional<double> omega;
    std::string omega_range;
    double ds = 0.02;
    double ds_min = 1e-4;
    double ds_max = 0.1;
    double tol_a = 1e-10;
    double tol_r = 1e-12;
    int max_iter = 50;
    std::string ref = "shooting";
    std::string out = "pfim-out";
    std::vector<std::string> params;
    std::vector<std::string> cases;
    long seed = 0;
};

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double parse_number(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError("bad number for " + what + ": '" + text + "'");
    }
    if (used != text.size()) throw UsageError("bad number for " + what + ": '" + text + "'");
    return v;
}

ParameterMap parse_params(const Options& o) {
    ParameterMap p;
    for (const auto& kv : o.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
        p[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), kv.substr(0, eq));
    }
    if (o.omega) p["omega"] = *o.omega;
    return p;
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--omega-range expects a:b, got '" + text + "'");
    return {parse_number(text.substr(0, colon), "--omega-range"),
            parse_number(text.substr(colon + 1), "--omega-range")};
}

PfimConfig pfim_config(const Options& o) {
    PfimConfig c;
    c.intervals = o.np;
    c.tol_a = o.tol_a;
    c.tol_r = o.tol_r;
    c.max_iter = o.max_iter;
    c.validate();
    return c;
}

ReferenceKind reference_kind(const std::string& s) {
    if (s == "shooting") return ReferenceKind::shooting;
    if (s == "steady") return ReferenceKind::steady;
    throw UsageError("--ref must be shooting or steady");
}

template <class F>
double timed(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

json options_json(const Options& o) {
    json j;
    j["method"] = o.method;
    j["np"] = o.np;
    j["harmonics"] = o.harmonics;
    j["omega_range"] = o.omega_range;
    j["ds"] = o.ds;
    j["ds_min"] = o.ds_min;
    j["ds_max"] = o.ds_max;
    j["tol_a"] = o.tol_a;
    j["tol_r"] = o.tol_r;
    j["max_iter"] = o.max_iter;
    j["ref"] = o.ref;
    j["cases"] = o.cases;
    j["seed"] = o.seed;
    return j;
}

RunManifest start_manifest(const std::string& command, const Options& o, const Benchmark& bench) {
    RunManifest m;
    m.command = command;
    m.system = o.system;
    m.parameters = bench.parameters;
    m.config = options_json(o);
    m.version = PFIM_VERSION_STRING;
    return m;
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
    std::ofstream f(dir / "manifest.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    f << serialize(m);
}

fs::path prepare_out(const Options& o) {
    const fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

CsvTable solution_table(const PeriodicTrajectory& t) {
    std::vector<std::string> header{"tau"};
    for (int s = 0; s < t.dim(); ++s) header.push_back("x" + std::to_string(s));
    CsvTable table(std::move(header));
    for (int i = 0; i <= t.intervals(); ++i) {
        std::vector<std::string> row{format_double(t.tau(i))};
        for (int s = 0; s < t.dim(); ++s) row.push_back(format_double(t.samples(i, s)));
        table.add_row(std::move(row));
    }
    return table;
}

CsvTable history_header() { return CsvTable({"iteration", "e_a", "e_r", "omega"}); }

int cmd_solve(const Options& o, std::ostream& out) {
    const Benchmark bench = make_benchmark(o.system, parse_params(o));
    const SystemModel& sys = bench.system;
    if (o.method != "pfim" && o.method != "hbm" && o.method != "shooting") {
        throw UsageError("--method must be pfim, hbm or shooting");
    }
    if (o.method == "hbm" && sys.autonomous) throw UsageError("hbm needs a forced system");
    const PfimConfig cfg = pfim_config(o);
    RunManifest m = start_manifest("solve", o, bench);
    const fs::path dir = prepare_out(o);

    PeriodicTrajectory guess;
    m.timings_ms["guess"] = timed([&] { guess = default_guess(bench, o.np); });

    bool converged = false;
    CsvTable history = history_header();
    std::optional<PeriodicTrajectory> solution;
    if (o.method == "pfim") {
        PfimResult r;
        const PhaseKind kind = sys.autonomous ? PhaseKind::autonomous : PhaseKind::forced;
        PfimConfig c = cfg;
        c.final_operators = false;
        m.timings_ms["solve"] = timed([&] { r = pfim_solve(sys, guess, kind, c); });
        for (const auto& h : r.history) {
            history.add_row({std::to_string(h.iteration), format_double(h.e_a), format_double(h.e_r),
                             format_double(h.omega)});
        }
        converged = r.converged;
        m.summary["iterations"] = r.iterations;
        m.summary["stop_reason"] = r.stop_reason;
        solution = r.trajectory;
    } else {
        try {
            if (o.method == "hbm") {
                const FourierSolution seed = fourier_from_trajectory(guess, o.harmonics);
                HbmResult r;
                m.timings_ms["solve"] = timed([&] { r = hbm_solve(sys, o.harmonics, bench.omega, seed); });
                history.add_row({std::to_string(r.iterations), format_double(r.residual), format_double(NAN),
                                 format_double(bench.omega)});
                m.summary["iterations"] = r.iterations;
                m.summary["residual"] = num(r.residual);
                solution = r.solution.to_trajectory(o.np);
            } else {
                ShootingSolution s;
                m.timings_ms["solve"] =
                    timed([&] { s = shooting_solve(sys, guess.node(0), kTwoPi / guess.omega); });
                history.add_row({std::to_string(s.iterations), format_double(s.residual), format_double(NAN),
                                 format_double(s.omega())});
                m.summary["iterations"] = s.iterations;
                m.summary["residual"] = num(s.residual);
                solution = sample_orbit(sys, s.x0, s.omega(), o.np, std::max<long>(1, s.n_s / o.np));
            }
            converged = true;
        } catch (const ConvergenceError& e) {
            m.summary["stop_reason"] = e.what();
        }
    }
    m.summary["converged"] = converged;

    m.timings_ms["write"] = timed([&] {
        if (solution) solution_table(*solution).write(dir / "solution.csv");
        history.write(dir / "history.csv");
    });
    write_manifest(dir, m);
    out << (converged ? "converged" : "not converged") << "\n";
    return converged ? kOk : kNotConverged;
}

int cmd_convergence(const Options& o, std::ostream& out) {
    const Benchmark bench = make_benchmark(o.system, parse_params(o));
    const PfimConfig cfg = pfim_config(o);
    ReferenceConfig ref;
    ref.kind = reference_kind(o.ref);
    RunManifest m = start_manifest("convergence", o, bench);
    const fs::path dir = prepare_out(o);

    ConvergenceStudy study;
    try {
        m.timings_ms["study"] = timed([&] { study = convergence_study(bench, default_guess(bench, o.np), cfg, ref); });
    } catch (const Error& e) {
        m.summary["error"] = e.what();
        write_manifest(dir, m);
        out << "reference failed: " << e.what() << "\n";
        return kNotConverged;
    }

    CsvTable table({"iteration", "displacement_error", "frequency_error", "e_a", "e_r", "omega"});
    for (const auto& r : study.rows) {
        table.add_row({std::to_string(r.iteration), format_double(r.displacement_error),
                       format_double(r.frequency_error), format_double(r.e_a), format_double(r.e_r),
                       format_double(r.omega)});
    }
    table.write(dir / "convergence.csv");
    m.summary["order"] = num(study.order);
    m.summary["order_pairs"] = study.order_pairs;
    m.summary["plateau"] = num(study.plateau);
    m.summary["converged"] = study.result.converged;
    m.summary["reference"] = to_string(ref.kind);
    write_manifest(dir, m);
    out << "order " << format_double(study.order) << " plateau " << format_double(study.plateau) << "\n";
    return kOk;
}

void add_branch_rows(CsvTable& table, const std::vector<BranchPoint>& branch) {
    for (const auto& r : branch_to_records(branch)) {
        table.add_row({format_double(r.omega), format_double(r.amplitude), r.stable ? "1" : "0",
                       format_double(r.max_multiplier_abs), std::to_string(r.iterations)});
    }
}

int cmd_continue(const Options& o, std::ostream& out) {
    ParameterMap params = parse_params(o);
    if (o.omega_range.empty()) throw UsageError("continue needs --omega-range a:b");
    const auto [a, b] = parse_range(o.omega_range);
    params["omega"] = a;
    const Benchmark bench = make_benchmark(o.system, params);
    if (bench.system.autonomous) throw UsageError("continue needs a forced system");

    ContinuationConfig cfg;
    cfg.omega_start = a;
    cfg.omega_end = b;
    cfg.ds = o.ds;
    cfg.ds_min = o.ds_min;
    cfg.ds_max = o.ds_max;
    cfg.amplitude_state = bench.amplitude_state;
    cfg.pfim = pfim_config(o);
    cfg.validate();

    RunManifest m = start_manifest("continue", o, bench);
    const fs::path dir = prepare_out(o);
    CsvTable table({"omega", "amplitude", "stable", "max_multiplier_abs", "iterations"});
    int code = kOk;
    std::vector<BranchPoint> branch;
    try {
        m.timings_ms["continue"] = timed([&] { branch = continue_branch(bench.system, default_guess(bench, o.np), cfg); });
    } catch (const BranchStalledError& e) {
        branch = e.partial();
        m.summary["stalled"] = e.what();
        code = kNotConverged;
    }
    add_branch_rows(table, branch);
    table.write(dir / "branch.csv");
    m.summary["points"] = branch.size();
    write_manifest(dir, m);
    out << branch.size() << " branch points\n";
    return code;
}

CompareCase parse_case(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--case expects method:resolution, got '" + text + "'");
    CompareCase c;
    c.method = text.substr(0, colon);
    if (c.method != "pfim" && c.method != "hbm" && c.method != "shooting") {
        throw UsageError("unknown method in --case '" + text + "'");
    }
    const double r = parse_number(text.substr(colon + 1), "--case");
    if (r < 1 || r != std::floor(r)) throw UsageError("resolution must be a positive integer in '" + text + "'");
    c.resolution = static_cast<int>(r);
    return c;
}

int cmd_compare(const Options& o, std::ostream& out) {
    const Benchmark bench = make_benchmark(o.system, parse_params(o));
    if (o.cases.empty()) throw UsageError("compare needs at least one --case method:resolution");
    std::vector<CompareCase> cases;
    for (const auto& c : o.cases) cases.push_back(parse_case(c));
    CompareConfig cfg;
    cfg.pfim = pfim_config(o);
    RunManifest m = start_manifest("compare", o, bench);
    const fs::path dir = prepare_out(o);

    std::vector<CompareRow> rows;
    m.timings_ms["compare"] = timed([&] { rows = compare_methods(bench, cases, cfg); });
    CsvTable table({"method", "resolution", "error", "time_ms", "iterations", "status"});
    for (const auto& r : rows) {
        std::string status = r.status;
        for (char& ch : status) {
            if (ch == ',' || ch == '\n') ch = ';';
        }
        table.add_row({r.method, std::to_string(r.resolution), format_double(r.error), format_double(r.time_ms),
                       std::to_string(r.iterations), status});
    }
    table.write(dir / "compare.csv");
    write_manifest(dir, m);
    out << rows.size() << " rows\n";
    return kOk;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--system", o.system, "benchmark system")->required();
    sub->add_option("--np", o.np, "grid intervals")->check(CLI::PositiveNumber);
    sub->add_option("--omega", o.omega, "forcing frequency or frequency guess");
    sub->add_option("--tol-a", o.tol_a, "mean residual tolerance");
    sub->add_option("--tol-r", o.tol_r, "relative update tolerance");
    sub->add_option("--max-iter", o.max_iter, "correction limit");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--param", o.params, "key=value override (repeatable)");
    sub->add_option("--seed", o.seed, "reserved; every algorithm is deterministic");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Periodic responses by perturbation function iteration"};
    app.require_subcommand(1);
    Options o;

    auto* solve = app.add_subcommand("solve", "solve one periodic response");
    add_common(solve, o);
    solve->add_option("--method", o.method, "pfim, hbm or shooting");
    solve->add_option("--harmonics", o.harmonics, "HBM harmonic count")->check(CLI::PositiveNumber);

    auto* conv = app.add_subcommand("convergence", "per-iteration error against a reference orbit");
    add_common(conv, o);
    conv->add_option("--ref", o.ref, "shooting or steady");

    auto* cont = app.add_subcommand("continue", "trace the response as omega varies");
    add_common(cont, o);
    cont->add_option("--omega-range", o.omega_range, "a:b")->required();
    cont->add_option("--ds", o.ds, "initial arclength step");
    cont->add_option("--ds-min", o.ds_min, "smallest arclength step");
    cont->add_option("--ds-max", o.ds_max, "largest arclength step");

    auto* cmp = app.add_subcommand("compare", "time and error of several solvers");
    add_common(cmp, o);
    cmp->add_option("--case", o.cases, "method:resolution (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*solve) return cmd_solve(o, out);
        if (*conv) return cmd_convergence(o, out);
        if (*cont) return cmd_continue(o, out);
        return cmd_compare(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const CatalogError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kNotConverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace pfim::cli
