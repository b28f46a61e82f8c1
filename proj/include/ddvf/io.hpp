#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ddvf/coupling.hpp"
#include "ddvf/diagnostics.hpp"
#include "ddvf/mesh.hpp"

namespace ddvf {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Configuration documents
// ---------------------------------------------------------------------------

/// Where a resolved configuration value came from.
enum class ValueOrigin {
    ConfigFile,        // set explicitly in the document
    BenchmarkDefault,  // default taken from the published quarter five-spot parameter table
    SolverDefault,     // default chosen for this solver, not part of the published table
    CommandLine,       // overridden by a CLI flag
};

std::string_view origin_label(ValueOrigin origin) noexcept;

struct ProvenanceEntry {
    std::string key;  // "section.key"
    std::string value;
    ValueOrigin origin;
};

struct ParsedConfig {
    SimulationConfig config;
    std::vector<ProvenanceEntry> provenance;
};

/// Parse sectioned key = value text. Unknown sections or keys, malformed
/// values and constraint violations raise ConfigError naming key and line.
ParsedConfig parse_config(std::string_view text);

/// Render a configuration as a document that parse_config reads back to an
/// equal configuration.
std::string format_config(const SimulationConfig& config);

ParsedConfig load_config_file(const std::string& path);

// ---------------------------------------------------------------------------
// Snapshots and diagnostics
// ---------------------------------------------------------------------------

/// Columns of a snapshot CSV, one entry per Q4 node.
struct SnapshotData {
    std::vector<double> x, y, c, theta, p, vx, vy;
};

/// CSV with header x,y,c,theta,p,vx,vy; one row per Q4 node in (y, x)
/// lexicographic order; velocity sampled at the coinciding Q9 nodes.
void write_snapshot_csv(std::ostream& os, const StructuredQuadMesh& mesh, const SimulationState& state);
SnapshotData read_snapshot_csv(std::istream& is);
SnapshotData read_snapshot_csv_file(const std::string& path);

/// Legacy ASCII VTK structured-points file with the same fields.
void write_snapshot_vtk(std::ostream& os, const StructuredQuadMesh& mesh, const SimulationState& state);

/// Header: t,c_min,c_max,frac_below,frac_above,theta_min,theta_max,interface_len,balance_res
void write_diagnostics_csv(std::ostream& os, const DiagnosticsSeries& series);
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& record);

} // namespace ddvf
