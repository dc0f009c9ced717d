#include "gendiag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gendiag {

namespace {

void check_mapped(const MappedChainSet& chains, std::size_t min_chains, const char* op) {
  if (chains.num_chains() < min_chains) {
    throw UsageError(std::string(op) + " requires at least " + std::to_string(min_chains) +
                     " chains");
  }
  const std::size_t n = chains.chain_length();
  if (n < 4) throw UsageError(std::string(op) + " requires chains of length >= 4");
  for (const auto& c : chains.values) {
    if (c.size() != n) throw ShapeMismatch("mapped chains have unequal lengths");
  }
}

}  // namespace

double ess_univariate(const std::vector<double>& chain, bool* zero_variance) {
  const std::size_t n = chain.size();
  if (n < 4) throw UsageError("ess requires chains of length >= 4");
  if (zero_variance) *zero_variance = false;

  double mean = 0.0;
  for (double x : chain) mean += x;
  mean /= static_cast<double>(n);

  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = chain[i] - mean;

  auto gamma = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += centered[i] * centered[i + lag];
    return acc / static_cast<double>(n);
  };

  const double g0 = gamma(0);
  if (g0 <= 0.0) {
    if (zero_variance) *zero_variance = true;
    return static_cast<double>(n);
  }

  // Initial monotone sequence: accumulate autocorrelations in consecutive-lag
  // pairs (rho(2m) + rho(2m+1)) while the pair sums stay positive, clipping
  // each pair to the previous one. Without the monotone clip the positively
  // correlated noise tail of rho can stay above zero for hundreds of lags and
  // inflate the truncation point.
  double pair_sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 <= n - 1; ++m) {
    double pair = gamma(2 * m) / g0 + gamma(2 * m + 1) / g0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);
    prev = pair;
    pair_sum += pair;
  }
  const double tau = 2.0 * pair_sum - 1.0;
  if (tau <= 0.0) return static_cast<double>(n);
  return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

EssResult ess(const MappedChainSet& chains) {
  check_mapped(chains, 1, "ess");
  EssResult out;
  out.per_chain.reserve(chains.num_chains());
  out.zero_variance.reserve(chains.num_chains());
  for (const auto& c : chains.values) {
    bool zero = false;
    const double e = ess_univariate(c, &zero);
    out.per_chain.push_back(e);
    out.zero_variance.push_back(zero);
    out.total += e;
  }
  return out;
}

PsrfResult psrf(const MappedChainSet& chains) {
  if (chains.num_chains() < 2) {
    return {std::numeric_limits<double>::quiet_NaN(), PsrfStatus::Degenerate};
  }
  check_mapped(chains, 2, "psrf");

  const std::size_t k = chains.num_chains();
  const double n = static_cast<double>(chains.chain_length());

  std::vector<double> means(k);
  double within = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& c = chains.values[i];
    double m = 0.0;
    for (double x : c) m += x;
    m /= n;
    means[i] = m;
    double ss = 0.0;
    for (double x : c) ss += (x - m) * (x - m);
    within += ss / (n - 1.0);
  }
  within /= static_cast<double>(k);

  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= static_cast<double>(k);
  double between_over_n = 0.0;
  for (double m : means) between_over_n += (m - grand) * (m - grand);
  between_over_n /= static_cast<double>(k - 1);

  if (within == 0.0) {
    if (between_over_n == 0.0) {
      return {std::numeric_limits<double>::quiet_NaN(), PsrfStatus::Degenerate};
    }
    return {std::numeric_limits<double>::infinity(), PsrfStatus::Infinite};
  }

  const double var_plus = (n - 1.0) / n * within + between_over_n;
  // The (n-1)/n factor pulls the ratio below one when chains agree exactly;
  // the estimator is defined as at least 1.
  const double r = std::sqrt(var_plus / within);
  return {std::max(1.0, r), PsrfStatus::Ok};
}

std::vector<TraceRow> traceplot_table(const MappedChainSet& chains) {
  std::vector<TraceRow> rows;
  rows.reserve(chains.num_chains() * chains.chain_length());
  for (std::size_t i = 0; i < chains.num_chains(); ++i) {
    const auto& c = chains.values[i];
    for (std::size_t j = 0; j < c.size(); ++j) {
      rows.push_back({chains.chain_ids[i], static_cast<std::int64_t>(j), c[j]});
    }
  }
  return rows;
}

std::vector<BandInterval> band_intervals(const MappedChainSet& chains) {
  std::vector<BandInterval> out;
  out.reserve(chains.num_chains());
  for (std::size_t i = 0; i < chains.num_chains(); ++i) {
    const auto& c = chains.values[i];
    if (c.empty()) throw EmptyInput("band interval of an empty chain");
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    out.push_back({chains.chain_ids[i], *lo, *hi});
  }
  return out;
}

std::size_t band_overlap_count(const std::vector<BandInterval>& bands, std::size_t which) {
  if (which >= bands.size()) throw UsageError("band index out of range");
  std::size_t count = 0;
  for (std::size_t j = 0; j < bands.size(); ++j) {
    if (j == which) continue;
    if (bands[which].lo <= bands[j].hi && bands[j].lo <= bands[which].hi) ++count;
  }
  return count;
}

MappedChainSet raw_univariate(const ChainSet& cs) {
  MappedChainSet out;
  out.distance_name = "euclidean";
  out.map_name = "identity";
  for (std::size_t i = 0; i < cs.num_chains(); ++i) {
    out.chain_ids.push_back(cs.chains[i].chain_id);
    std::vector<double> vals;
    vals.reserve(cs.index_chains[i].size());
    for (std::uint32_t idx : cs.index_chains[i]) {
      const RealVector& v = cs.pool[idx].as_real();
      if (v.values.size() != 1) {
        throw ShapeMismatch("raw univariate view requires length-1 real vectors");
      }
      vals.push_back(v.values[0]);
    }
    out.values.push_back(std::move(vals));
  }
  return out;
}

DiagnosticReport run_generalized_diagnostic(const ChainSet& cs, const DistanceSpec& d,
                                            const MapChoice& map_choice,
                                            const DiagnosticOptions& options) {
  DiagnosticReport report;
  report.config.distance = d.name();
  report.config.pool_size = cs.pool_size();
  report.config.num_chains = cs.num_chains();
  report.config.chain_length = cs.chain_length();

  ProximityMap pm;
  if (const auto* lanfear = std::get_if<LanfearChoice>(&map_choice)) {
    report.config.map = "lanfear";
    report.config.reference_id = canonical_id(lanfear->reference);
    try {
      pm = lanfear_map(cs, d, lanfear->reference);
    } catch (...) {
      rethrow_with_context(std::current_exception(), "lanfear map");
    }
  } else {
    const auto& nn = std::get<NearestNeighborChoice>(map_choice);
    report.config.map = "nearest_neighbor";
    report.config.start_index = nn.start_index;
    PairwiseDistanceMatrix matrix;
    try {
      matrix = pairwise_matrix(cs.pool, d);
    } catch (...) {
      rethrow_with_context(std::current_exception(), "pairwise distances");
    }
    Tour tour;
    try {
      tour = nn_tour(matrix, nn.start_index);
    } catch (...) {
      rethrow_with_context(std::current_exception(), "nearest-neighbor tour");
    }
    try {
      pm = cut_point_select(tour, cs);
    } catch (...) {
      rethrow_with_context(std::current_exception(), "cut-point selection");
    }
    report.config.cut_index = std::get<NearestNeighborInfo>(pm.info).cut_index;
  }

  MappedChainSet mapped;
  try {
    mapped = apply_map(cs, pm);
  } catch (...) {
    rethrow_with_context(std::current_exception(), "map application");
  }
  mapped.distance_name = d.name();

  if (options.compute_ess) {
    report.ess = ess(mapped);
    for (std::size_t i = 0; i < report.ess->zero_variance.size(); ++i) {
      if (report.ess->zero_variance[i]) {
        report.flags.push_back("zero_variance_chain_" + std::to_string(mapped.chain_ids[i]));
      }
    }
  }
  if (options.compute_psrf) {
    report.psrf = psrf(mapped);
    if (report.psrf->status == PsrfStatus::Degenerate) report.flags.push_back("psrf_degenerate");
    if (report.psrf->status == PsrfStatus::Infinite) report.flags.push_back("psrf_infinite");
  }
  report.traceplot = traceplot_table(mapped);
  report.mapped = std::move(mapped);
  return report;
}

}  // namespace gendiag
