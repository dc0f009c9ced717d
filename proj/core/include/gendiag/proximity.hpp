#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gendiag/distance.hpp"
#include "gendiag/state.hpp"

namespace gendiag {

/// Greedy closed tour over the unique pool. ordering[t] is the pool index at
/// tour position t; cumdist[t] is the distance travelled from the start up to
/// position t; cycle_length adds the closing edge back to the start.
struct Tour {
  std::vector<std::uint32_t> ordering;
  std::vector<double> cumdist;
  double cycle_length = 0.0;
};

/// Nearest-neighbour tour from a start pool index: repeatedly moves to the
/// closest unvisited state, ties broken by lowest pool index. Self-distances
/// never enter the tour; the closing edge is part of cycle_length.
Tour nn_tour(const PairwiseDistanceMatrix& pairwise, std::uint32_t start);

struct LanfearInfo {
  DrawState reference;
};

struct NearestNeighborInfo {
  Tour tour;
  std::uint32_t cut_index = 0;
};

/// A finite map from pool indices to the real line.
struct ProximityMap {
  std::vector<double> values;  // aligned to pool indices
  std::variant<LanfearInfo, NearestNeighborInfo> info;

  const char* name() const {
    return std::holds_alternative<LanfearInfo>(info) ? "lanfear" : "nearest_neighbor";
  }
};

/// values[i] = d(pool[i], reference); exactly N distance evaluations.
ProximityMap lanfear_map(const ChainSet& cs, const DistanceSpec& d, const DrawState& reference);

/// Opens the cycle at the position minimizing the total vertical traceplot
/// travel summed over chains; ties go to the smallest cut position. The
/// returned values are cumulative tour distances from the cut.
ProximityMap cut_point_select(const Tour& tour, const ChainSet& cs);

/// k univariate chains produced by a proximity map, with provenance.
struct MappedChainSet {
  std::vector<int> chain_ids;
  std::vector<std::vector<double>> values;  // k x n
  std::string distance_name;
  std::string map_name;

  std::size_t num_chains() const { return values.size(); }
  std::size_t chain_length() const { return values.empty() ? 0 : values.front().size(); }
};

/// Pure per-draw lookup of the proximity map; no distance evaluations.
MappedChainSet apply_map(const ChainSet& cs, const ProximityMap& pm);

}  // namespace gendiag
