#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gendiag/distance.hpp"
#include "gendiag/rng.hpp"
#include "gendiag/state.hpp"

namespace gendiag {

/// Seed used by the CLI and the acceptance suite when none is given.
inline constexpr std::uint64_t kDefaultSeed = 16;

struct GaussianMixture1D {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> sds;

  double log_density(double x) const;
  LogDensity as_log_density() const;  // adapter over length-1 real vectors
};

/// Equal-parts mixture at -3 and 3 with unit standard deviations.
GaussianMixture1D bimodal_target();

/// Equal-parts mixture at -3, 0 and 3 with standard deviation 0.1; the
/// components essentially do not overlap.
GaussianMixture1D trimodal_target();

/// Univariate proposal families used by the shipped samplers. Both are
/// symmetric in (from, to); the samplers' acceptance ratios rely on it and a
/// property test asserts it numerically.
struct ProposalFamily {
  enum class Kind {
    RandomWalk,      // to ~ N(from, sd^2)
    ReflectMixture,  // to ~ .5 N(from, sd^2) + .5 N(-from, sd^2)
  };

  Kind kind = Kind::RandomWalk;
  double sd = 1.0;

  double sample(double current, Rng& rng) const;
  double log_q(double from, double to) const;

  /// log max_y Q(y|x). Random walk: density at the mode. Reflect mixture:
  /// the best of the probes {x, -x, 0} refined by a bounded 1-d search (the
  /// probes alone can undershoot the true maximum near |x| ~ sd).
  double log_q_star(double x) const;

  LogProposal as_log_proposal() const;
  const char* name() const;
};

struct ScenarioSpec {
  std::string name = "custom";
  GaussianMixture1D target;
  ProposalFamily proposal;
  std::vector<double> starts;
  std::int64_t n_iter = 2000;
  std::uint64_t seed = kDefaultSeed;
};

/// The four named univariate scenarios, all 7 chains x 2000 draws from
/// starts (-6, -4, -2, 0, 2, 4, 6):
///   m1: trimodal target, random walk sd 1
///   m2: trimodal target, reflect mixture sd 0.1
///   m3: bimodal target, random walk sd 0.1
///   m4: bimodal target, random walk sd 2
ScenarioSpec named_scenario(std::string_view name, std::uint64_t seed);

/// Seeded Metropolis-Hastings run; chain i uses rng substream i and starts at
/// starts[i], which is recorded as draw 0. Deterministic given the scenario.
ChainSet mh_run(const ScenarioSpec& spec);

/// Synthetic discrete-state chains: lazy reflected walks along a structured
/// one-parameter family so that the co-association / Hamming geometry of the
/// draws is meaningful. The trapped option freezes chain 0 at an extreme
/// state beyond the walkers' range.
struct SyntheticSpec {
  enum class Kind { BinaryMatrix, Partition };

  Kind kind = Kind::Partition;
  // binary matrix walk: fill level over rows x cols entries
  std::size_t rows = 15;
  std::size_t cols = 15;
  double flip_rate = 0.10;
  // partition walk: leading block of merged observations
  std::size_t n_obs = 24;
  std::size_t n_clusters = 8;
  double resample_rate = 0.10;

  std::size_t num_chains = 5;
  std::int64_t n_iter = 1000;
  std::uint64_t seed = kDefaultSeed;
  bool trapped = false;
};

SyntheticSpec named_synthetic(std::string_view name, std::uint64_t seed);

ChainSet synthetic_discrete_chains(const SyntheticSpec& spec);

/// Binned KL divergence of the empirical draw histogram from the discretized
/// target on [support_lo, support_hi). Bins of the target's support that the
/// draws never visit receive one pseudo-count before normalization.
double kl_binned(const GaussianMixture1D& target, const std::vector<double>& draws,
                 double bin_width, double support_lo, double support_hi);

}  // namespace gendiag
