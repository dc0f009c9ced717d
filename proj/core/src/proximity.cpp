#include "gendiag/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gendiag/parallel.hpp"

namespace gendiag {

Tour nn_tour(const PairwiseDistanceMatrix& pairwise, std::uint32_t start) {
  const std::size_t n = pairwise.size();
  if (n == 0) throw EmptyInput("tour over an empty pool");
  if (start >= n) throw UsageError("tour start index out of range");

  Tour tour;
  tour.ordering.reserve(n);
  tour.cumdist.reserve(n);
  std::vector<char> visited(n, 0);

  std::uint32_t current = start;
  tour.ordering.push_back(current);
  tour.cumdist.push_back(0.0);
  visited[current] = 1;

  for (std::size_t step = 1; step < n; ++step) {
    std::uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint32_t j = 0; j < n; ++j) {
      if (visited[j]) continue;
      const double dj = pairwise(current, j);
      if (dj < best_d) {
        best_d = dj;
        best = j;
      }
    }
    visited[best] = 1;
    tour.ordering.push_back(best);
    tour.cumdist.push_back(tour.cumdist.back() + best_d);
    current = best;
  }
  tour.cycle_length = tour.cumdist.back() + pairwise(current, start);
  return tour;
}

ProximityMap lanfear_map(const ChainSet& cs, const DistanceSpec& d, const DrawState& reference) {
  const std::size_t n = cs.pool_size();
  if (n == 0) throw EmptyInput("empty pool");

  ProximityMap pm;
  pm.values.resize(n);

  if (d.kind() == DistanceSpec::Kind::UserTable) {
    // Index-based distance: the reference must be one of the pooled states.
    const std::string ref_key = canonicalize(reference);
    std::size_t ref_idx = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (canonicalize(cs.pool[i]) == ref_key) {
        ref_idx = i;
        break;
      }
    }
    if (ref_idx == n) {
      throw UsageError("user table distance requires the reference to be a pooled state");
    }
    const auto& table = d.table();
    if (table.size() != n) throw ShapeMismatch("user table size does not match pool");
    for (std::size_t i = 0; i < n; ++i) pm.values[i] = table(i, ref_idx);
  } else {
    if (!same_shape(cs.pool.front(), reference)) {
      throw ShapeMismatch("reference state does not match the pool variant/shape");
    }
    for (std::size_t i = 0; i < n; ++i) {
      try {
        pm.values[i] = d.between(cs.pool[i], reference);
      } catch (...) {
        rethrow_with_context(std::current_exception(),
                             "lanfear value for pool state " + std::to_string(i));
      }
    }
  }
  pm.info = LanfearInfo{reference};
  return pm;
}

ProximityMap cut_point_select(const Tour& tour, const ChainSet& cs) {
  const std::size_t n = tour.ordering.size();
  if (n != cs.pool_size()) throw ShapeMismatch("tour does not cover the chain set pool");

  ProximityMap pm;
  pm.values.assign(n, 0.0);

  if (n == 1) {
    pm.info = NearestNeighborInfo{tour, 0};
    return pm;
  }

  // Tour position of each pool index.
  std::vector<std::uint32_t> position(n);
  for (std::uint32_t t = 0; t < n; ++t) position[tour.ordering[t]] = t;

  // Distinct state transitions with multiplicities, in (low, high) position
  // pairs. Self transitions travel zero vertical distance under every cut.
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> transitions;
  for (const auto& idx : cs.index_chains) {
    for (std::size_t j = 1; j < idx.size(); ++j) {
      if (idx[j] == idx[j - 1]) continue;
      std::uint32_t p = position[idx[j - 1]];
      std::uint32_t q = position[idx[j]];
      if (p > q) std::swap(p, q);
      transitions[{p, q}] += 1.0;
    }
  }

  const std::size_t t_count = transitions.size();
  std::vector<std::uint32_t> lo_pos(t_count), hi_pos(t_count);
  std::vector<double> weight(t_count), plain(t_count), wrapped(t_count);
  {
    std::size_t t = 0;
    const double L = tour.cycle_length;
    for (const auto& [pq, w] : transitions) {
      lo_pos[t] = pq.first;
      hi_pos[t] = pq.second;
      weight[t] = w;
      // Vertical step when the cut does not separate the pair, and when it
      // does (the rotated image wraps through the closing edge).
      plain[t] = tour.cumdist[pq.second] - tour.cumdist[pq.first];
      wrapped[t] = std::abs(plain[t] - L);
      ++t;
    }
  }

  // Total travel for every cut, evaluated term by term in a fixed order so
  // that cuts with identical crossing sets produce bit-identical sums and the
  // smallest-index tie break is meaningful.
  std::vector<double> travel(n);
  parallel_blocks(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      double acc = 0.0;
      for (std::size_t t = 0; t < t_count; ++t) {
        const bool crossed = lo_pos[t] < m && m <= hi_pos[t];
        acc += weight[t] * (crossed ? wrapped[t] : plain[t]);
      }
      travel[m] = acc;
    }
  });

  std::uint32_t best_m = 0;
  for (std::uint32_t m = 1; m < n; ++m) {
    if (travel[m] < travel[best_m]) best_m = m;
  }

  const double L = tour.cycle_length;
  const double cut_cum = tour.cumdist[best_m];
  for (std::uint32_t t = 0; t < n; ++t) {
    const double f = t >= best_m ? tour.cumdist[t] - cut_cum : tour.cumdist[t] - cut_cum + L;
    pm.values[tour.ordering[t]] = f;
  }
  pm.info = NearestNeighborInfo{tour, best_m};
  return pm;
}

MappedChainSet apply_map(const ChainSet& cs, const ProximityMap& pm) {
  if (pm.values.size() != cs.pool_size()) {
    throw ShapeMismatch("proximity map covers " + std::to_string(pm.values.size()) +
                        " states, pool has " + std::to_string(cs.pool_size()));
  }
  MappedChainSet out;
  out.map_name = pm.name();
  out.chain_ids.reserve(cs.num_chains());
  out.values.reserve(cs.num_chains());
  for (std::size_t i = 0; i < cs.num_chains(); ++i) {
    out.chain_ids.push_back(cs.chains[i].chain_id);
    std::vector<double> vals;
    vals.reserve(cs.index_chains[i].size());
    for (std::uint32_t idx : cs.index_chains[i]) vals.push_back(pm.values[idx]);
    out.values.push_back(std::move(vals));
  }
  return out;
}

}  // namespace gendiag
