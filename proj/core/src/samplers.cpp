#include "gendiag/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gendiag/parallel.hpp"

namespace gendiag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -std::log(sd) - kLogSqrt2Pi - 0.5 * z * z;
}

double logsumexp2(double a, double b) {
  const double m = std::max(a, b);
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double scalar_of(const DrawState& s) {
  const RealVector& v = s.as_real();
  if (v.values.size() != 1) throw ShapeMismatch("expected a length-1 real vector state");
  return v.values[0];
}

}  // namespace

double GaussianMixture1D::log_density(double x) const {
  double best = kNegInf;
  std::vector<double> terms(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    terms[i] = std::log(weights[i]) + log_normal_pdf(x, means[i], sds[i]);
    best = std::max(best, terms[i]);
  }
  if (best == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return best + std::log(acc);
}

LogDensity GaussianMixture1D::as_log_density() const {
  GaussianMixture1D copy = *this;
  return [copy](const DrawState& s) { return copy.log_density(scalar_of(s)); };
}

GaussianMixture1D bimodal_target() {
  return {{0.5, 0.5}, {-3.0, 3.0}, {1.0, 1.0}};
}

GaussianMixture1D trimodal_target() {
  const double w = 1.0 / 3.0;
  return {{w, w, w}, {-3.0, 0.0, 3.0}, {0.1, 0.1, 0.1}};
}

double ProposalFamily::sample(double current, Rng& rng) const {
  switch (kind) {
    case Kind::RandomWalk:
      return rng.normal(current, sd);
    case Kind::ReflectMixture: {
      const double center = rng.bernoulli(0.5) ? current : -current;
      return rng.normal(center, sd);
    }
  }
  throw Error("unreachable proposal kind");
}

double ProposalFamily::log_q(double from, double to) const {
  switch (kind) {
    case Kind::RandomWalk:
      return log_normal_pdf(to, from, sd);
    case Kind::ReflectMixture:
      return logsumexp2(std::log(0.5) + log_normal_pdf(to, from, sd),
                        std::log(0.5) + log_normal_pdf(to, -from, sd));
  }
  throw Error("unreachable proposal kind");
}

double ProposalFamily::log_q_star(double x) const {
  if (kind == Kind::RandomWalk) return -std::log(sd) - kLogSqrt2Pi;

  // Reflect mixture: the density in `to` is symmetric about 0, so search
  // to >= 0. Probe the component centers and 0, then refine around the best
  // grid cell; near |x| ~ sd the merged peak sits between the probes.
  double best = std::max(log_q(x, std::abs(x)), log_q(x, 0.0));
  const double span = std::abs(x) + 5.0 * sd;
  constexpr int kGrid = 256;
  double best_y = 0.0;
  double best_grid = kNegInf;
  for (int i = 0; i <= kGrid; ++i) {
    const double y = span * static_cast<double>(i) / kGrid;
    const double v = log_q(x, y);
    if (v > best_grid) {
      best_grid = v;
      best_y = y;
    }
  }
  double lo = std::max(0.0, best_y - span / kGrid);
  double hi = best_y + span / kGrid;
  for (int it = 0; it < 80; ++it) {
    const double m1 = lo + 0.382 * (hi - lo);
    const double m2 = lo + 0.618 * (hi - lo);
    if (log_q(x, m1) < log_q(x, m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return std::max(best, log_q(x, 0.5 * (lo + hi)));
}

LogProposal ProposalFamily::as_log_proposal() const {
  ProposalFamily copy = *this;
  return {
      [copy](const DrawState& from, const DrawState& to) {
        return copy.log_q(scalar_of(from), scalar_of(to));
      },
      [copy](const DrawState& x) { return copy.log_q_star(scalar_of(x)); },
  };
}

const char* ProposalFamily::name() const {
  return kind == Kind::RandomWalk ? "random_walk" : "reflect_mixture";
}

ScenarioSpec named_scenario(std::string_view name, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.name = std::string(name);
  spec.starts = {-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0};
  spec.n_iter = 2000;
  spec.seed = seed;
  if (name == "m1") {
    spec.target = trimodal_target();
    spec.proposal = {ProposalFamily::Kind::RandomWalk, 1.0};
  } else if (name == "m2") {
    spec.target = trimodal_target();
    spec.proposal = {ProposalFamily::Kind::ReflectMixture, 0.1};
  } else if (name == "m3") {
    spec.target = bimodal_target();
    spec.proposal = {ProposalFamily::Kind::RandomWalk, 0.1};
  } else if (name == "m4") {
    spec.target = bimodal_target();
    spec.proposal = {ProposalFamily::Kind::RandomWalk, 2.0};
  } else {
    throw UsageError("unknown scenario '" + std::string(name) + "'");
  }
  return spec;
}

ChainSet mh_run(const ScenarioSpec& spec) {
  if (spec.starts.empty()) throw EmptyInput("scenario has no chain starts");
  if (spec.n_iter < 2) throw UsageError("scenario needs n_iter >= 2");
  if (spec.proposal.sd <= 0) throw UsageError("proposal sd must be positive");
  if (spec.target.weights.empty()) throw UsageError("target mixture is empty");

  // Chains run concurrently on independent rng substreams; the result is
  // ordered by chain id and identical to a serial run.
  std::vector<Chain> chains(spec.starts.size());
  parallel_blocks(spec.starts.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      Rng rng = Rng::substream(spec.seed, c);
      Chain chain;
      chain.chain_id = static_cast<int>(c);
      chain.draws.reserve(spec.n_iter);

      double x = spec.starts[c];
      double lp_x = spec.target.log_density(x);
      chain.draws.push_back(RealVector{{x}});
      for (std::int64_t t = 1; t < spec.n_iter; ++t) {
        const double y = spec.proposal.sample(x, rng);
        const double lp_y = spec.target.log_density(y);
        const double log_alpha = std::min(0.0, lp_y - lp_x);
        if (rng.uniform01() <= std::exp(log_alpha)) {
          x = y;
          lp_x = lp_y;
        }
        chain.draws.push_back(RealVector{{x}});
      }
      chains[c] = std::move(chain);
    }
  });
  return build_chain_set(std::move(chains));
}

SyntheticSpec named_synthetic(std::string_view name, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  if (name == "synthetic-binary") {
    spec.kind = SyntheticSpec::Kind::BinaryMatrix;
  } else if (name == "synthetic-partition") {
    spec.kind = SyntheticSpec::Kind::Partition;
  } else {
    throw UsageError("unknown synthetic scenario '" + std::string(name) + "'");
  }
  return spec;
}

namespace {

// Fill-level state: the first `level` entries (row-major) are 1.
BinaryMatrix fill_matrix(std::size_t rows, std::size_t cols, std::size_t level) {
  BinaryMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.data.assign(rows * cols, 0);
  std::fill(m.data.begin(), m.data.begin() + static_cast<std::ptrdiff_t>(level), 1);
  return m;
}

// Merge-level state: the first `level` observations share cluster 0, the
// rest keep distinct singleton labels.
Partition merge_partition(std::size_t n_obs, std::size_t level) {
  Partition p;
  p.labels.resize(n_obs);
  for (std::size_t i = 0; i < n_obs; ++i) {
    p.labels[i] = i < level ? 0 : static_cast<std::int64_t>(i + 1);
  }
  return p;
}

}  // namespace

ChainSet synthetic_discrete_chains(const SyntheticSpec& spec) {
  if (spec.num_chains == 0) throw EmptyInput("no chains requested");
  if (spec.n_iter < 2) throw UsageError("synthetic chains need n_iter >= 2");

  const bool binary = spec.kind == SyntheticSpec::Kind::BinaryMatrix;
  const double move_rate = binary ? spec.flip_rate : spec.resample_rate;
  if (move_rate < 0 || move_rate > 1) throw UsageError("move rate must be in [0, 1]");

  std::size_t cap;       // walkers move on levels [0, cap]
  std::size_t extreme;   // frozen trapped level
  if (binary) {
    extreme = spec.rows * spec.cols;
    if (extreme == 0) throw UsageError("binary matrix dimensions must be positive");
    cap = extreme / 2;
  } else {
    if (spec.n_obs < 2) throw UsageError("partitions need at least 2 observations");
    extreme = spec.n_obs;
    cap = spec.n_clusters < spec.n_obs ? spec.n_obs - spec.n_clusters : 1;
  }

  auto state_at = [&](std::size_t level) -> DrawState {
    if (binary) return fill_matrix(spec.rows, spec.cols, level);
    return merge_partition(spec.n_obs, level);
  };

  const std::size_t walkers = spec.trapped ? spec.num_chains - 1 : spec.num_chains;
  if (spec.trapped && walkers == 0) throw UsageError("trapped scenario needs at least 2 chains");

  std::vector<Chain> chains;
  chains.reserve(spec.num_chains);
  for (std::size_t c = 0; c < spec.num_chains; ++c) {
    Chain chain;
    chain.chain_id = static_cast<int>(c);
    chain.draws.reserve(spec.n_iter);

    if (spec.trapped && c == 0) {
      const DrawState frozen = state_at(extreme);
      chain.draws.assign(spec.n_iter, frozen);
      chains.push_back(std::move(chain));
      continue;
    }

    Rng rng = Rng::substream(spec.seed, c);
    const std::size_t w = spec.trapped ? c - 1 : c;
    std::size_t level =
        walkers > 1 ? (w * cap) / (walkers - 1) : cap / 2;  // starts spread over [0, cap]
    for (std::int64_t t = 0; t < spec.n_iter; ++t) {
      chain.draws.push_back(state_at(level));
      if (rng.uniform01() <= move_rate) {
        const bool up = rng.bernoulli(0.5);
        if (up && level < cap) ++level;
        if (!up && level > 0) --level;
      }
    }
    chains.push_back(std::move(chain));
  }
  return build_chain_set(std::move(chains));
}

double kl_binned(const GaussianMixture1D& target, const std::vector<double>& draws,
                 double bin_width, double support_lo, double support_hi) {
  if (bin_width <= 0) throw UsageError("bin width must be positive");
  if (!(support_hi > support_lo)) throw UsageError("empty support interval");

  const auto n_bins =
      static_cast<std::size_t>(std::ceil((support_hi - support_lo) / bin_width - 1e-12));

  auto normal_cdf = [](double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
  };

  // Discretized target mass per bin.
  std::vector<double> p(n_bins, 0.0);
  double mass = 0.0;
  for (std::size_t c = 0; c < target.weights.size(); ++c) {
    double cdf_left = normal_cdf(support_lo, target.means[c], target.sds[c]);
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double right = std::min(support_hi, support_lo + bin_width * (b + 1));
      const double cdf_right = normal_cdf(right, target.means[c], target.sds[c]);
      p[b] += target.weights[c] * (cdf_right - cdf_left);
      cdf_left = cdf_right;
    }
  }
  for (double pb : p) mass += pb;
  if (mass < 1.0 - 1e-6) {
    throw UsageError("support interval covers too little target mass");
  }
  for (double& pb : p) pb /= mass;

  std::vector<double> counts(n_bins, 0.0);
  std::size_t inside = 0;
  for (double x : draws) {
    if (x < support_lo || x >= support_hi) continue;
    auto b = static_cast<std::size_t>((x - support_lo) / bin_width);
    if (b >= n_bins) b = n_bins - 1;
    counts[b] += 1.0;
    ++inside;
  }
  if (inside == 0) throw EmptyHistogram("no draws inside the support interval");

  // One pseudo-count for bins the target occupies but the draws never visit.
  double total = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (counts[b] == 0.0 && p[b] > 0.0) counts[b] = 1.0;
    total += counts[b];
  }

  double kl = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (p[b] <= 0.0) continue;
    kl += p[b] * std::log(p[b] / (counts[b] / total));
  }
  return std::max(0.0, kl);
}

}  // namespace gendiag
