#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gendiag/diagnostics.hpp"
#include "gendiag/proximity.hpp"
#include "gendiag/rng.hpp"
#include "gendiag/samplers.hpp"

using namespace gendiag;

namespace {

DrawState rv1(double x) { return DrawState(RealVector{{x}}); }

ChainSet chain_set_1d(const std::vector<std::vector<double>>& chains) {
  std::vector<Chain> cs;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    Chain c;
    c.chain_id = static_cast<int>(i);
    for (double x : chains[i]) c.draws.push_back(rv1(x));
    cs.push_back(std::move(c));
  }
  return build_chain_set(std::move(cs));
}

// Literal walk along the cut ordering, accumulating edge distances term by
// term. Independent of the closed-form rotation in the implementation.
std::vector<double> recursion_map(const PairwiseDistanceMatrix& dist,
                                  const std::vector<std::uint32_t>& order, std::size_t m) {
  const std::size_t n = order.size();
  std::vector<double> f(n, 0.0);  // by tour position
  f[m] = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t at = (m + k) % n;
    const std::size_t next = (m + k + 1) % n;
    f[next] = f[at] + dist(order[at], order[next]);
  }
  return f;
}

double total_travel(const std::vector<double>& f_by_pos,
                    const std::vector<std::uint32_t>& positions, const ChainSet& cs) {
  double acc = 0.0;
  for (const auto& idx : cs.index_chains) {
    for (std::size_t j = 1; j < idx.size(); ++j) {
      acc += std::abs(f_by_pos[positions[idx[j]]] - f_by_pos[positions[idx[j - 1]]]);
    }
  }
  return acc;
}

// Exhaustive oracle: recursion-built map for every cut, strict argmin,
// smallest index on ties.
std::pair<std::size_t, std::vector<double>> oracle_cut(const PairwiseDistanceMatrix& dist,
                                                       const Tour& tour, const ChainSet& cs) {
  const std::size_t n = tour.ordering.size();
  std::vector<std::uint32_t> positions(n);
  for (std::uint32_t t = 0; t < n; ++t) positions[tour.ordering[t]] = t;
  std::size_t best_m = 0;
  double best = 0.0;
  std::vector<double> best_f;
  for (std::size_t m = 0; m < n; ++m) {
    const std::vector<double> f = recursion_map(dist, tour.ordering, m);
    const double travel = total_travel(f, positions, cs);
    if (m == 0 || travel < best) {
      best = travel;
      best_m = m;
      best_f = f;
    }
  }
  std::vector<double> by_pool(n);
  for (std::uint32_t t = 0; t < n; ++t) by_pool[tour.ordering[t]] = best_f[t];
  return {best_m, by_pool};
}

// Dyadic random distances keep every cumulative sum exact, so recursion and
// rotation produce bit-identical values and ties are honest ties.
PairwiseDistanceMatrix random_dyadic_matrix(std::size_t n, Rng& rng) {
  PairwiseDistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      m.set(i, j, static_cast<double>(1 + rng.uniform_int(4096)) / 1024.0);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("lanfear map basics and evaluation count") {
  const ChainSet cs = chain_set_1d({{-3.0, 0.0}, {3.0, 0.0}});
  REQUIRE(cs.pool_size() == 3);
  const DistanceSpec d = DistanceSpec::euclidean();
  const std::uint64_t before = d.evaluations();
  const ProximityMap pm = lanfear_map(cs, d, rv1(0.0));
  CHECK(d.evaluations() - before == cs.pool_size());
  // pool order: -3, 0, 3
  CHECK(pm.values == std::vector<double>{3.0, 0.0, 3.0});  // the +-3 collision is inherent
  CHECK(std::string(pm.name()) == "lanfear");

  const ProximityMap self = lanfear_map(cs, d, rv1(-3.0));
  CHECK(self.values[0] == 0.0);
}

TEST_CASE("lanfear map rejects mismatched references") {
  const ChainSet cs = chain_set_1d({{-3.0, 0.0}});
  CHECK_THROWS_AS(lanfear_map(cs, DistanceSpec::euclidean(), DrawState(RealVector{{1.0, 2.0}})),
                  ShapeMismatch);
}

TEST_CASE("lanfear map over a user table uses the reference's pool row") {
  const ChainSet cs = chain_set_1d({{5.0, 7.0}, {9.0, 7.0}});  // pool: 5, 7, 9
  PairwiseDistanceMatrix t(3);
  t.set(1, 0, 1.5);
  t.set(2, 0, 4.0);
  t.set(2, 1, 2.5);
  const DistanceSpec d = DistanceSpec::user_table(t);
  const ProximityMap pm = lanfear_map(cs, d, rv1(7.0));
  CHECK(pm.values == std::vector<double>{1.5, 0.0, 2.5});
  // states outside the pool cannot be looked up in the table
  CHECK_THROWS_AS(lanfear_map(cs, d, rv1(6.0)), UsageError);
}

TEST_CASE("lanfear on partition chains: one-cluster state vs all-singletons reference") {
  SyntheticSpec spec = named_synthetic("synthetic-partition", 5);
  spec.trapped = true;  // chain 0 is frozen at the one-cluster partition
  const ChainSet cs = synthetic_discrete_chains(spec);

  Partition singletons;
  for (std::size_t i = 0; i < spec.n_obs; ++i) {
    singletons.labels.push_back(static_cast<std::int64_t>(i));
  }
  const ProximityMap pm = lanfear_map(cs, DistanceSpec::hamming(), DrawState(singletons));

  const std::uint32_t one_cluster_idx = cs.index_chains[0][0];
  const double expected = static_cast<double>(spec.n_obs * spec.n_obs - spec.n_obs);
  CHECK(pm.values[one_cluster_idx] == expected);

  // oracle: explicit co-association matrices and entry count
  const BinaryMatrix a = coassociation(cs.pool[one_cluster_idx].as_partition());
  const BinaryMatrix b = coassociation(singletons);
  CHECK(hamming(a, b) == expected);
}

TEST_CASE("nn tour greedy behaviour") {
  // single state
  PairwiseDistanceMatrix one(1);
  one.set(0, 0, 0.25);
  const Tour t1 = nn_tour(one, 0);
  CHECK(t1.ordering == std::vector<std::uint32_t>{0});
  CHECK(t1.cycle_length == 0.25);

  // hand-checkable greedy on the line: 0 -> 1 -> 2 -> 10
  const std::vector<double> xs{0.0, 10.0, 1.0, 2.0};
  PairwiseDistanceMatrix m(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, std::abs(xs[i] - xs[j]));
  }
  const Tour t = nn_tour(m, 0);
  CHECK(t.ordering == std::vector<std::uint32_t>{0, 2, 3, 1});
  CHECK(t.cumdist == std::vector<double>{0.0, 1.0, 2.0, 10.0});
  CHECK(t.cycle_length == 20.0);
}

TEST_CASE("nn tour breaks ties by lowest pool index") {
  const std::vector<double> xs{0.0, 1.0, -1.0};
  PairwiseDistanceMatrix m(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, std::abs(xs[i] - xs[j]));
  }
  const Tour t = nn_tour(m, 0);
  CHECK(t.ordering == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("nn tour matches a naive greedy oracle") {
  Rng rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(7);
    const PairwiseDistanceMatrix m = random_dyadic_matrix(n, rng);
    const auto start = static_cast<std::uint32_t>(rng.uniform_int(n));

    // independent greedy re-implementation
    std::vector<std::uint32_t> order{start};
    std::vector<bool> used(n, false);
    used[start] = true;
    while (order.size() < n) {
      std::uint32_t arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t j = 0; j < n; ++j) {
        if (!used[j] && m(order.back(), j) < best) {
          best = m(order.back(), j);
          arg = j;
        }
      }
      used[arg] = true;
      order.push_back(arg);
    }

    const Tour t = nn_tour(m, start);
    CHECK(t.ordering == order);
  }
}

TEST_CASE("cut point for constant chains is the tour start") {
  const ChainSet cs = chain_set_1d({{2.5, 2.5, 2.5}});
  const Tour tour = nn_tour(pairwise_matrix(cs.pool, DistanceSpec::euclidean()), 0);
  const ProximityMap pm = cut_point_select(tour, cs);
  CHECK(std::get<NearestNeighborInfo>(pm.info).cut_index == 0);
  CHECK(pm.values == std::vector<double>{0.0});
}

TEST_CASE("cut point on the unit five-cycle reproduces the worked rotation") {
  // five states on a cycle with unit edges; first occurrences are 0..4 so
  // pool indices equal state values, and greedy from 0 orders them 0..4
  const ChainSet cs = chain_set_1d({{0.0, 1.0, 1.0}, {2.0, 3.0, 4.0}, {4.0, 0.0, 0.0}});
  REQUIRE(cs.pool_size() == 5);
  PairwiseDistanceMatrix dist(5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t gap = i - j;
      dist.set(i, j, i == j ? 0.0 : static_cast<double>(std::min(gap, 5 - gap)));
    }
  }
  const Tour tour = nn_tour(dist, 0);
  REQUIRE(tour.ordering == std::vector<std::uint32_t>{0, 1, 2, 3, 4});
  REQUIRE(tour.cycle_length == 5.0);

  // chain transitions cross every cut except the one at position 2
  const ProximityMap pm = cut_point_select(tour, cs);
  const auto& info = std::get<NearestNeighborInfo>(pm.info);
  CHECK(info.cut_index == 2);
  // walking the cycle from the cut: x2 -> 0, x3 -> 1, x4 -> 2, x0 -> 3, x1 -> 4
  const std::vector<double> expected{3.0, 4.0, 0.0, 1.0, 2.0};
  CHECK(pm.values == expected);
}

TEST_CASE("cut point selection matches the literal-recursion oracle") {
  Rng rng(53);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n_states = 2 + rng.uniform_int(7);
    const std::size_t k = 1 + rng.uniform_int(2);
    const std::size_t n = 2 + rng.uniform_int(5);

    // index sequences covering every state at least once
    std::vector<std::vector<double>> chains(k, std::vector<double>(n));
    std::vector<std::size_t> slots;
    for (std::size_t s = 0; s < k * n; ++s) slots.push_back(s);
    for (std::size_t s = slots.size(); s > 1; --s) std::swap(slots[s - 1], slots[rng.uniform_int(s)]);
    for (std::size_t i = 0; i < k * n; ++i) {
      const std::size_t value = i < n_states ? i : rng.uniform_int(n_states);
      chains[slots[i] / n][slots[i] % n] = static_cast<double>(value);
    }
    ChainSet cs;
    bool covered = true;
    cs = chain_set_1d(chains);
    if (cs.pool_size() != n_states) covered = false;
    if (!covered) continue;

    const PairwiseDistanceMatrix dist = random_dyadic_matrix(n_states, rng);
    const Tour tour = nn_tour(dist, static_cast<std::uint32_t>(rng.uniform_int(n_states)));
    const ProximityMap pm = cut_point_select(tour, cs);
    const auto [oracle_m, oracle_values] = oracle_cut(dist, tour, cs);

    CHECK(std::get<NearestNeighborInfo>(pm.info).cut_index == oracle_m);
    for (std::size_t i = 0; i < n_states; ++i) CHECK(pm.values[i] == oracle_values[i]);
  }
}

TEST_CASE("rotation closed form equals the recursion on random tours") {
  Rng rng(59);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(11);
    PairwiseDistanceMatrix dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) dist.set(i, j, 0.1 + 1.9 * rng.uniform01());
    }
    const Tour tour = nn_tour(dist, 0);
    const double L = tour.cycle_length;
    for (std::size_t m = 0; m < n; ++m) {
      const std::vector<double> rec = recursion_map(dist, tour.ordering, m);
      CHECK(rec[m] == 0.0);
      for (std::size_t t = 0; t < n; ++t) {
        const double closed =
            t >= m ? tour.cumdist[t] - tour.cumdist[m] : tour.cumdist[t] - tour.cumdist[m] + L;
        CHECK(std::abs(closed - rec[t]) <= 1e-9 * std::max(1.0, std::abs(rec[t])));
        CHECK(rec[t] <= L * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("chosen cut minimizes the travel objective") {
  Rng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n_states = 2 + rng.uniform_int(5);
    std::vector<std::vector<double>> chains(1, std::vector<double>(6));
    for (std::size_t i = 0; i < 6; ++i) {
      chains[0][i] = static_cast<double>(i < n_states ? i : rng.uniform_int(n_states));
    }
    const ChainSet cs = chain_set_1d(chains);
    const std::size_t n = cs.pool_size();
    const PairwiseDistanceMatrix dist = random_dyadic_matrix(n, rng);
    const Tour tour = nn_tour(dist, 0);
    const ProximityMap pm = cut_point_select(tour, cs);

    std::vector<std::uint32_t> positions(n);
    for (std::uint32_t t = 0; t < n; ++t) positions[tour.ordering[t]] = t;
    std::vector<double> f_by_pos(n);
    for (std::uint32_t t = 0; t < n; ++t) f_by_pos[t] = pm.values[tour.ordering[t]];
    const double chosen = total_travel(f_by_pos, positions, cs);
    for (std::size_t m = 0; m < n; ++m) {
      const double other = total_travel(recursion_map(dist, tour.ordering, m), positions, cs);
      CHECK(chosen <= other);
    }
  }
}

TEST_CASE("apply_map is a pure lookup") {
  const ChainSet cs = chain_set_1d({{1.0, 2.0, 1.0}});
  ProximityMap pm;
  pm.values = {0.0, 2.5};
  pm.info = LanfearInfo{rv1(1.0)};
  const MappedChainSet mapped = apply_map(cs, pm);
  CHECK(mapped.values[0] == std::vector<double>{0.0, 2.5, 0.0});

  const MappedChainSet again = apply_map(cs, pm);
  CHECK(again.values == mapped.values);

  ProximityMap bad;
  bad.values = {0.0};
  bad.info = pm.info;
  CHECK_THROWS_AS(apply_map(cs, bad), ShapeMismatch);

  const ChainSet constant = chain_set_1d({{5.0, 5.0}});
  ProximityMap pmc;
  pmc.values = {7.0};
  pmc.info = LanfearInfo{rv1(5.0)};
  CHECK(apply_map(constant, pmc).values[0] == std::vector<double>{7.0, 7.0});
}

TEST_CASE("m3 chains map into two non-crossing bands") {
  ScenarioSpec spec = named_scenario("m3", 11);
  spec.n_iter = 800;  // keep the pairwise pass small
  const ChainSet cs = mh_run(spec);
  const DiagnosticReport report = run_generalized_diagnostic(
      cs, DistanceSpec::euclidean(), NearestNeighborChoice{0});

  // group chains by the sign of the mode they settled in
  std::vector<std::size_t> neg, pos;
  for (std::size_t i = 0; i < cs.num_chains(); ++i) {
    (cs.chains[i].draws.back().as_real().values[0] < 0 ? neg : pos).push_back(i);
  }
  REQUIRE(!neg.empty());
  REQUIRE(!pos.empty());

  // once past the walk-in from the spread starts, each chain stays inside its
  // band: the settled bands of the two groups never meet
  const std::size_t settled = 400;
  double neg_lo = 1e300, neg_hi = -1e300, pos_lo = 1e300, pos_hi = -1e300;
  for (std::size_t i = 0; i < cs.num_chains(); ++i) {
    const auto& vals = report.mapped.values[i];
    const bool negative = cs.chains[i].draws.back().as_real().values[0] < 0;
    for (std::size_t t = settled; t < vals.size(); ++t) {
      if (negative) {
        neg_lo = std::min(neg_lo, vals[t]);
        neg_hi = std::max(neg_hi, vals[t]);
      } else {
        pos_lo = std::min(pos_lo, vals[t]);
        pos_hi = std::max(pos_hi, vals[t]);
      }
    }
  }
  const bool disjoint = neg_hi < pos_lo || pos_hi < neg_lo;
  CHECK(disjoint);
}
