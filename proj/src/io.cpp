#include "ddvf/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "ddvf/errors.hpp"

namespace ddvf {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string_view origin_label(ValueOrigin origin) noexcept {
    switch (origin) {
    case ValueOrigin::ConfigFile: return "config file";
    case ValueOrigin::BenchmarkDefault: return "default (published benchmark parameter)";
    case ValueOrigin::SolverDefault: return "default (solver choice, not a published benchmark value)";
    case ValueOrigin::CommandLine: return "command line";
    }
    return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Snapshots taken before the first flow solve have no flow; write NaN there.
FlowSolution flow_or_nan(const StructuredQuadMesh& mesh, const FlowSolution& flow) {
    const auto nv = static_cast<Eigen::Index>(2 * mesh.num_q9_nodes());
    const auto np = static_cast<Eigen::Index>(mesh.num_q4_nodes());
    if (flow.velocity.size() == nv && flow.pressure.size() == np) return flow;
    FlowSolution out;
    out.velocity = Eigen::VectorXd::Constant(nv, std::numeric_limits<double>::quiet_NaN());
    out.pressure = Eigen::VectorXd::Constant(np, std::numeric_limits<double>::quiet_NaN());
    return out;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

// One configurable key: how to read it from text and how to print it.
struct KeySpec {
    std::string section;
    std::string key;
    ValueOrigin default_origin;
    std::function<bool(SimulationConfig&, std::string_view)> set;
    std::function<std::string(const SimulationConfig&)> get;
    const char* expected;

    [[nodiscard]] std::string full_name() const { return section + "." + key; }
};

template <class Section, class T>
KeySpec number_key(std::string section, std::string key, ValueOrigin origin, Section SimulationConfig::*sec,
                   T Section::*field) {
    return {std::move(section), std::move(key), origin,
            [sec, field](SimulationConfig& c, std::string_view v) { return parse_number(v, c.*sec.*field); },
            [sec, field](const SimulationConfig& c) {
                if constexpr (std::is_floating_point_v<T>) {
                    return format_double(c.*sec.*field);
                } else {
                    return std::to_string(c.*sec.*field);
                }
            },
            std::is_floating_point_v<T> ? "a number" : "an integer"};
}

template <class Section>
KeySpec bool_key(std::string section, std::string key, ValueOrigin origin, Section SimulationConfig::*sec,
                 bool Section::*field) {
    return {std::move(section), std::move(key), origin,
            [sec, field](SimulationConfig& c, std::string_view v) {
                if (v == "true") {
                    c.*sec.*field = true;
                } else if (v == "false") {
                    c.*sec.*field = false;
                } else {
                    return false;
                }
                return true;
            },
            [sec, field](const SimulationConfig& c) { return std::string(c.*sec.*field ? "true" : "false"); },
            "true or false"};
}

template <class Section>
KeySpec string_key(std::string section, std::string key, ValueOrigin origin, Section SimulationConfig::*sec,
                   std::string Section::*field) {
    return {std::move(section), std::move(key), origin,
            [sec, field](SimulationConfig& c, std::string_view v) {
                if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
                c.*sec.*field = std::string(v);
                return true;
            },
            [sec, field](const SimulationConfig& c) { return c.*sec.*field; }, "a string"};
}

const std::vector<KeySpec>& key_table() {
    using S = SimulationConfig;
    constexpr auto bench = ValueOrigin::BenchmarkDefault;
    constexpr auto solver = ValueOrigin::SolverDefault;
    static const std::vector<KeySpec> table = [] {
        std::vector<KeySpec> t;
        t.push_back(number_key("mesh", "nx", bench, &S::mesh, &MeshParams::nx));
        t.push_back(number_key("mesh", "ny", bench, &S::mesh, &MeshParams::ny));
        t.push_back(number_key("mesh", "length", bench, &S::mesh, &MeshParams::length));
        t.push_back(number_key("mesh", "well_width", bench, &S::mesh, &MeshParams::well_width));
        t.push_back(number_key("flow", "permeability", solver, &S::flow, &FlowParams::permeability));
        t.push_back(number_key("flow", "mu0", bench, &S::flow, &FlowParams::mu0));
        t.push_back(number_key("flow", "r_c", bench, &S::flow, &FlowParams::r_c));
        t.push_back(number_key("flow", "r_theta", bench, &S::flow, &FlowParams::r_theta));
        t.push_back(number_key("flow", "perturbation", solver, &S::flow, &FlowParams::perturbation));
        t.push_back(number_key("flow", "seed", solver, &S::flow, &FlowParams::seed));
        t.push_back(number_key("transport", "d_m", bench, &S::transport, &TransportParams::d_m));
        t.push_back(number_key("transport", "phi_injection", bench, &S::transport, &TransportParams::phi_injection));
        t.push_back(number_key("transport", "phi_production", bench, &S::transport, &TransportParams::phi_production));
        t.push_back(number_key("transport", "c0", solver, &S::transport, &TransportParams::c0));
        t.push_back(string_key("transport", "c0_file", solver, &S::transport, &TransportParams::c0_file));
        t.push_back(number_key("thermal", "kappa_theta", solver, &S::thermal, &ThermalParams::kappa_theta));
        t.push_back(number_key("thermal", "theta0", solver, &S::thermal, &ThermalParams::theta0));
        t.push_back(string_key("thermal", "theta0_file", solver, &S::thermal, &ThermalParams::theta0_file));
        t.push_back(number_key("time", "dt", solver, &S::time, &TimeParams::dt));
        t.push_back(number_key("time", "t_end", bench, &S::time, &TimeParams::t_end));
        t.push_back(number_key("time", "snapshot_every", solver, &S::time, &TimeParams::snapshot_every));
        t.push_back({"stabilization", "scheme", solver,
                     [](SimulationConfig& c, std::string_view v) {
                         const auto s = parse_scheme(v);
                         if (!s) return false;
                         c.stabilization.scheme = *s;
                         return true;
                     },
                     [](const SimulationConfig& c) { return std::string(scheme_name(c.stabilization.scheme)); },
                     "one of galerkin, supg, supg-iso, supg-cw, supg-both"});
        t.push_back(number_key("stabilization", "gradient_threshold", solver, &S::stabilization,
                               &StabilizationParams::gradient_threshold));
        t.push_back(bool_key("stabilization", "sold_iteration", solver, &S::stabilization,
                             &StabilizationParams::sold_iteration));
        t.push_back(number_key("stabilization", "sold_max_iterations", solver, &S::stabilization,
                               &StabilizationParams::sold_max_iterations));
        t.push_back(number_key("stabilization", "sold_tolerance", solver, &S::stabilization,
                               &StabilizationParams::sold_tolerance));
        t.push_back(bool_key("stabilization", "picard", solver, &S::stabilization, &StabilizationParams::picard));
        t.push_back(number_key("stabilization", "picard_max_iterations", solver, &S::stabilization,
                               &StabilizationParams::picard_max_iterations));
        t.push_back(number_key("stabilization", "picard_tolerance", solver, &S::stabilization,
                               &StabilizationParams::picard_tolerance));
        t.push_back(bool_key("output", "vtk", solver, &S::output, &OutputParams::vtk));
        t.push_back(number_key("output", "bounds_tol", solver, &S::output, &OutputParams::bounds_tol));
        t.push_back(number_key("output", "interface_level", solver, &S::output, &OutputParams::interface_level));
        return t;
    }();
    return table;
}

const std::set<std::string>& section_names() {
    static const std::set<std::string> names = {"mesh", "flow", "transport", "thermal",
                                                "time", "stabilization", "output"};
    return names;
}

} // namespace

ParsedConfig parse_config(std::string_view text) {
    ParsedConfig out;
    std::map<std::string, int> seen;  // full key -> line
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", std::string(line), line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!section_names().contains(section)) {
                throw ConfigError("unknown section [" + section + "] on line " + std::to_string(line_no), section,
                                  line_no);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value' on line " + std::to_string(line_no), std::string(line), line_no);
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("key '" + key + "' on line " + std::to_string(line_no) + " appears before any section",
                              key, line_no);
        }
        const std::string full = section + "." + key;
        const auto& table = key_table();
        const auto it = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) {
            return k.section == section && k.key == key;
        });
        if (it == table.end()) {
            throw ConfigError("unknown key '" + full + "' on line " + std::to_string(line_no), full, line_no);
        }
        if (seen.contains(full)) {
            throw ConfigError("duplicate key '" + full + "' on line " + std::to_string(line_no), full, line_no);
        }
        if (!it->set(out.config, value)) {
            throw ConfigError("key '" + full + "' on line " + std::to_string(line_no) + " expects " + it->expected +
                                  ", got '" + std::string(value) + "'",
                              full, line_no);
        }
        seen[full] = line_no;
    }

    try {
        validate(out.config);
    } catch (const ValidationError& err) {
        const std::string& key = err.keys().front();
        const auto where = seen.find(key);
        const int line = where == seen.end() ? 0 : where->second;
        throw ConfigError("invalid value for '" + key + "'" +
                              (line > 0 ? " on line " + std::to_string(line) : std::string(" (default)")) + ": " +
                              err.what(),
                          key, line);
    }

    for (const KeySpec& k : key_table()) {
        const std::string full = k.full_name();
        out.provenance.push_back(
            {full, k.get(out.config), seen.contains(full) ? ValueOrigin::ConfigFile : k.default_origin});
    }
    return out;
}

std::string format_config(const SimulationConfig& config) {
    std::ostringstream os;
    std::string section;
    for (const KeySpec& k : key_table()) {
        if (k.section != section) {
            if (!section.empty()) os << '\n';
            section = k.section;
            os << '[' << section << "]\n";
        }
        os << k.key << " = " << k.get(config) << '\n';
    }
    return os.str();
}

ParsedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void write_snapshot_csv(std::ostream& os, const StructuredQuadMesh& mesh, const SimulationState& state) {
    const FlowSolution flow = flow_or_nan(mesh, state.flow);
    os << "x,y,c,theta,p,vx,vy\n";
    for (int j = 0; j <= mesh.ny(); ++j) {
        for (int i = 0; i <= mesh.nx(); ++i) {
            const Index n4 = mesh.q4_node(i, j);
            const Vec2 v = flow.node_velocity(mesh.q9_node(2 * i, 2 * j));
            const Vec2& x = mesh.corner_nodes()[n4];
            const auto k = static_cast<Eigen::Index>(n4);
            os << format_double(x.x()) << ',' << format_double(x.y()) << ',' << format_double(state.c.values[k])
               << ',' << format_double(state.theta.values[k]) << ',' << format_double(flow.pressure[k]) << ','
               << format_double(v.x()) << ',' << format_double(v.y()) << '\n';
        }
    }
    if (!os) throw IoError("failed writing snapshot CSV");
}

SnapshotData read_snapshot_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || trim(line) != "x,y,c,theta,p,vx,vy") {
        throw IoError("snapshot CSV: missing or unexpected header");
    }
    SnapshotData out;
    std::array<std::vector<double>*, 7> cols = {&out.x, &out.y, &out.c, &out.theta, &out.p, &out.vx, &out.vy};
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        std::string_view rest = trim(line);
        if (rest.empty()) continue;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto comma = rest.find(',');
            const std::string_view field = rest.substr(0, comma);
            double value = 0.0;
            if (!parse_number(trim(field), value) || (k + 1 < cols.size()) == (comma == std::string_view::npos)) {
                throw IoError("snapshot CSV: malformed row " + std::to_string(row));
            }
            cols[k]->push_back(value);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }
    return out;
}

SnapshotData read_snapshot_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open snapshot file " + path);
    return read_snapshot_csv(in);
}

void write_snapshot_vtk(std::ostream& os, const StructuredQuadMesh& mesh, const SimulationState& state) {
    const Index n = mesh.num_q4_nodes();
    const FlowSolution flow = flow_or_nan(mesh, state.flow);
    os << "# vtk DataFile Version 3.0\n"
       << "ddvf snapshot step " << state.step << " t " << format_double(state.time) << "\n"
       << "ASCII\n"
       << "DATASET STRUCTURED_POINTS\n"
       << "DIMENSIONS " << mesh.nx() + 1 << ' ' << mesh.ny() + 1 << " 1\n"
       << "ORIGIN 0 0 0\n"
       << "SPACING " << format_double(mesh.hx()) << ' ' << format_double(mesh.hy()) << " 1\n"
       << "POINT_DATA " << n << '\n';
    const auto scalars = [&](const char* name, const Eigen::VectorXd& values) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (Index i = 0; i < n; ++i) os << format_double(values[static_cast<Eigen::Index>(i)]) << '\n';
    };
    scalars("c", state.c.values);
    scalars("theta", state.theta.values);
    scalars("p", flow.pressure);
    os << "VECTORS velocity double\n";
    for (int j = 0; j <= mesh.ny(); ++j) {
        for (int i = 0; i <= mesh.nx(); ++i) {
            const Vec2 v = flow.node_velocity(mesh.q9_node(2 * i, 2 * j));
            os << format_double(v.x()) << ' ' << format_double(v.y()) << " 0\n";
        }
    }
    if (!os) throw IoError("failed writing VTK snapshot");
}

void write_diagnostics_header(std::ostream& os) {
    os << "t,c_min,c_max,frac_below,frac_above,theta_min,theta_max,interface_len,balance_res\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
    os << format_double(r.time) << ',' << format_double(r.c.min) << ',' << format_double(r.c.max) << ','
       << format_double(r.c.below_area_fraction) << ',' << format_double(r.c.above_area_fraction) << ','
       << format_double(r.theta.min) << ',' << format_double(r.theta.max) << ','
       << format_double(r.interface_length) << ',' << format_double(r.balance_residual) << '\n';
}

void write_diagnostics_csv(std::ostream& os, const DiagnosticsSeries& series) {
    write_diagnostics_header(os);
    for (const auto& r : series.records()) write_diagnostics_row(os, r);
    if (!os) throw IoError("failed writing diagnostics CSV");
}

} // namespace ddvf
