#include "ddvf/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ddvf/coupling.hpp"
#include "ddvf/errors.hpp"
#include "ddvf/io.hpp"
#include "ddvf/verification.hpp"

namespace ddvf {

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::string config_path;
    std::optional<std::string> scheme;
    std::optional<int> nx, ny, snapshot_every;
    std::optional<double> dt, t_end;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    bool vtk = false;
    bool verify = false;
};

void set_override(ParsedConfig& parsed, const std::string& key, const std::string& value) {
    for (auto& entry : parsed.provenance) {
        if (entry.key == key) {
            entry.value = value;
            entry.origin = ValueOrigin::CommandLine;
            return;
        }
    }
    parsed.provenance.push_back({key, value, ValueOrigin::CommandLine});
}

ParsedConfig resolve_config(const Overrides& o) {
    ParsedConfig parsed = o.config_path.empty() ? parse_config("") : load_config_file(o.config_path);
    SimulationConfig& c = parsed.config;
    if (o.scheme) {
        c.stabilization.scheme = *parse_scheme(*o.scheme);
        set_override(parsed, "stabilization.scheme", *o.scheme);
    }
    if (o.nx) {
        c.mesh.nx = *o.nx;
        set_override(parsed, "mesh.nx", std::to_string(*o.nx));
    }
    if (o.ny) {
        c.mesh.ny = *o.ny;
        set_override(parsed, "mesh.ny", std::to_string(*o.ny));
    }
    if (o.dt) {
        c.time.dt = *o.dt;
        set_override(parsed, "time.dt", format_double(*o.dt));
    }
    if (o.t_end) {
        c.time.t_end = *o.t_end;
        set_override(parsed, "time.t_end", format_double(*o.t_end));
    }
    if (o.snapshot_every) {
        c.time.snapshot_every = *o.snapshot_every;
        set_override(parsed, "time.snapshot_every", std::to_string(*o.snapshot_every));
    }
    if (o.seed) {
        c.flow.seed = *o.seed;
        set_override(parsed, "flow.seed", std::to_string(*o.seed));
    }
    if (o.vtk) {
        c.output.vtk = true;
        set_override(parsed, "output.vtk", "true");
    }
    validate(c);
    return parsed;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    return os;
}

void write_snapshot_files(const fs::path& dir, const std::string& stem, const StructuredQuadMesh& mesh,
                          const SimulationState& state, bool vtk) {
    {
        std::ofstream os = open_output(dir / (stem + ".csv"));
        write_snapshot_csv(os, mesh, state);
    }
    if (vtk) {
        std::ofstream os = open_output(dir / (stem + ".vtk"));
        write_snapshot_vtk(os, mesh, state);
    }
}

int run_verify(std::ostream& out) {
    bool ok = true;
    for (const VerificationResult& r : run_verification_suite()) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": value " << r.value << ", limit " << r.threshold
            << " (" << r.detail << ")\n";
        ok = ok && r.passed;
    }
    return ok ? kExitOk : kExitValidation;
}

void write_manifest(const fs::path& dir, const ParsedConfig& parsed, int steps, double seconds) {
    std::ofstream os = open_output(dir / "manifest.txt");
    os << "# resolved configuration\n" << format_config(parsed.config) << "\n# provenance\n";
    for (const auto& e : parsed.provenance) os << e.key << " = " << e.value << "  [" << origin_label(e.origin) << "]\n";
    os << "\n# run\nsteps = " << steps << "\nwall_clock_seconds = " << seconds << '\n';
    if (!os) throw IoError("failed writing manifest");
}

int run_benchmark(const Overrides& o, std::ostream& out, std::ostream& err) {
    const ParsedConfig parsed = resolve_config(o);
    const fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    const auto start = std::chrono::steady_clock::now();
    CoupledSimulation sim(parsed.config);
    const bool vtk = parsed.config.output.vtk;
    std::ofstream diag = open_output(dir / "diagnostics.csv");
    write_diagnostics_header(diag);

    OutputSinks sinks;
    sinks.snapshot = [&](const SimulationState& s) {
        write_snapshot_files(dir, "snap_" + std::to_string(s.step), sim.mesh(), s, vtk);
    };
    sinks.diagnostics = [&](const DiagnosticsRecord& r) {
        write_diagnostics_row(diag, r);
        diag.flush();
        if (!diag) throw IoError("failed writing diagnostics.csv");
    };

    try {
        const RunResult result = sim.run(sinks);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(dir, parsed, result.steps, seconds);
        out << "completed " << result.steps << " steps in " << seconds << " s, output in " << dir.string() << '\n';
    } catch (const DivergenceError& e) {
        write_snapshot_files(dir, "snap_" + std::to_string(e.state().step) + "_failed", sim.mesh(), e.state(), vtk);
        err << "error: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Double-diffusive viscous fingering simulator (quarter five-spot)", "ddvf"};
    Overrides o;
    app.add_option("--config", o.config_path, "Configuration file");
    app.add_option("--scheme", o.scheme, "Stabilization for the concentration equation")
        ->check(CLI::IsMember({"galerkin", "supg", "supg-iso", "supg-cw", "supg-both"}));
    app.add_option("--nx", o.nx, "Elements in x");
    app.add_option("--ny", o.ny, "Elements in y");
    app.add_option("--dt", o.dt, "Time step");
    app.add_option("--t-end", o.t_end, "Final time");
    app.add_option("--out-dir", o.out_dir, "Output directory");
    app.add_option("--snapshot-every", o.snapshot_every, "Snapshot interval in steps");
    app.add_option("--seed", o.seed, "Seed for the permeability perturbation");
    app.add_flag("--vtk", o.vtk, "Also write VTK snapshots");
    app.add_flag("--verify", o.verify, "Run the verification suite instead of the benchmark");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (o.verify) return run_verify(out);
        return run_benchmark(o, out, err);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ValidationError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitValidation;
    } catch (const InvalidArgument& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitValidation;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const CompatibilityError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
}

int run_cli(int argc, const char* const* argv) {
    return run_cli(argc, argv, std::cout, std::cerr);
}

} // namespace ddvf
