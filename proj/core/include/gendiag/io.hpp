#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gendiag/diagnostics.hpp"
#include "gendiag/samplers.hpp"
#include "gendiag/state.hpp"

namespace gendiag {

nlohmann::json state_to_json(const DrawState& state);
DrawState state_from_json(const nlohmann::json& j);

/// One JSON object per line:
///   {"chain": int, "iter": int, "state": {"type": ..., ...payload}}
/// Iterations must be contiguous from 0 within each chain.
void write_chains_ndjson(std::ostream& os, const std::vector<Chain>& chains);
std::vector<Chain> read_chains_ndjson(std::istream& is);

/// "chain,iter,value" with round-trip-exact value formatting.
void write_traceplot_csv(std::ostream& os, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_traceplot_csv(std::istream& is);

MappedChainSet mapped_from_trace_rows(const std::vector<TraceRow>& rows);

/// "i,j,distance" with 0-based pool indices; every unordered pair including
/// the diagonal must be present exactly once (either orientation).
PairwiseDistanceMatrix read_user_table_csv(std::istream& is, std::size_t pool_size);

nlohmann::json report_to_json(const DiagnosticReport& report);

/// Scenario or synthetic-chain configuration:
///   {"name": "m1".."m4" | "synthetic-binary" | "synthetic-partition",
///    "seed": ...,  optional overrides}
/// or {"name": "custom", "target": {...}, "proposal": {...}, "starts": [...],
///     "n_iter": ..., "seed": ...}.
using SimConfig = std::variant<ScenarioSpec, SyntheticSpec>;
SimConfig parse_sim_config(const nlohmann::json& j);
nlohmann::json sim_config_to_json(const SimConfig& config);

/// FNV-1a over the canonical JSON dump; hex string. Used for sidecar hashes.
std::string config_hash(const nlohmann::json& j);

}  // namespace gendiag
