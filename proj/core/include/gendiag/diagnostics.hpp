#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gendiag/proximity.hpp"

namespace gendiag {

/// Effective sample size, summed over per-chain estimates. Chains with zero
/// variance contribute their full length and are flagged rather than treated
/// as errors: a constant mapped chain is evidence about mixing, not a bug.
struct EssResult {
  double total = 0.0;
  std::vector<double> per_chain;
  std::vector<bool> zero_variance;

  bool any_zero_variance() const {
    for (bool z : zero_variance)
      if (z) return true;
    return false;
  }
};

/// Per-chain ESS from the initial monotone positive-sequence truncation of
/// the autocorrelation sum, clamped to (0, n].
double ess_univariate(const std::vector<double>& chain, bool* zero_variance = nullptr);

EssResult ess(const MappedChainSet& chains);

enum class PsrfStatus {
  Ok,
  Degenerate,  // no variance anywhere, or fewer than 2 chains
  Infinite,    // chains stuck at distinct points
};

struct PsrfResult {
  double value = 1.0;  // NaN when Degenerate, +inf when Infinite
  PsrfStatus status = PsrfStatus::Ok;

  bool defined() const { return status == PsrfStatus::Ok; }
};

/// Classic two-part potential scale reduction factor
/// sqrt(((n-1)/n W + B/n) / W), clamped below at 1.
PsrfResult psrf(const MappedChainSet& chains);

struct TraceRow {
  int chain_id = 0;
  std::int64_t iter = 0;
  double value = 0.0;
};

/// Long-format (chain, iter, value) table in deterministic order.
std::vector<TraceRow> traceplot_table(const MappedChainSet& chains);

/// Per-chain [min, max] of mapped values; order matches the chain order.
struct BandInterval {
  int chain_id = 0;
  double lo = 0.0;
  double hi = 0.0;
};
std::vector<BandInterval> band_intervals(const MappedChainSet& chains);

/// Number of other chains whose band intersects chain `which`.
std::size_t band_overlap_count(const std::vector<BandInterval>& bands, std::size_t which);

struct LanfearChoice {
  DrawState reference;
};
struct NearestNeighborChoice {
  std::uint32_t start_index = 0;
};
using MapChoice = std::variant<LanfearChoice, NearestNeighborChoice>;

struct ReportConfig {
  std::string distance;
  std::string map;
  std::optional<std::uint32_t> start_index;
  std::optional<std::uint32_t> cut_index;
  std::optional<std::string> reference_id;  // canonical hash of the reference state
  std::size_t pool_size = 0;
  std::size_t num_chains = 0;
  std::size_t chain_length = 0;
  std::string ess_estimator = "initial_monotone_sequence_per_chain_sum";
  std::string psrf_estimator = "gelman_rubin_classic";
};

struct DiagnosticReport {
  std::optional<EssResult> ess;
  std::optional<PsrfResult> psrf;
  std::vector<TraceRow> traceplot;
  std::vector<std::string> flags;
  ReportConfig config;
  MappedChainSet mapped;  // kept for CSV/SVG export
};

struct DiagnosticOptions {
  bool compute_ess = true;
  bool compute_psrf = true;
};

/// Full pipeline: distance -> proximity map -> univariate chains ->
/// ESS / PSRF / traceplot, with provenance. Errors carry a stage label.
DiagnosticReport run_generalized_diagnostic(const ChainSet& cs, const DistanceSpec& d,
                                            const MapChoice& map_choice,
                                            const DiagnosticOptions& options = {});

/// Wraps natively univariate chains (length-1 real vectors) as mapped chains
/// so the same estimators can run on raw draws.
MappedChainSet raw_univariate(const ChainSet& cs);

}  // namespace gendiag
