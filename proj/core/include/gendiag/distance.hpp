#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gendiag/state.hpp"

namespace gendiag {

/// Log of the (possibly unnormalized) target density. Must return a finite
/// value or -infinity, never NaN.
using LogDensity = std::function<double(const DrawState&)>;

/// Conditional proposal density in log space plus its per-state maximum
/// log Q*(x) = log max_y Q(y|x). log_q(from, to) = log Q(to | from).
struct LogProposal {
  std::function<double(const DrawState& from, const DrawState& to)> log_q;
  std::function<double(const DrawState&)> log_q_star;
};

/// Grid-search log_q_star for proposals with no closed-form maximum:
/// scans `points` candidates y in [lo, hi] for univariate real states.
LogProposal with_grid_log_q_star(
    std::function<double(const DrawState&, const DrawState&)> log_q, double lo, double hi,
    std::size_t points = 10000);

double euclidean(const RealVector& x, const RealVector& y);

/// Number of differing entries.
double hamming(const BinaryMatrix& a, const BinaryMatrix& b);

/// Hamming distance between the co-association matrices of two partitions,
/// computed without materializing the matrices.
double hamming_coassociation(const Partition& a, const Partition& b);

/// One minus the symmetrized pseudo-probability of an accept-reject sampler
/// moving between x and y. Evaluated fully in log space; result in [0, 1].
/// Throws UndefinedRatio when both states have zero target density.
double mh_distance(const DrawState& x, const DrawState& y, const LogDensity& target,
                   const LogProposal& proposal);

/// Same formula from pre-evaluated logs; shared by the cached pairwise path.
double mh_distance_from_logs(double lp_x, double lp_y, double lq_x_given_y,
                             double lq_y_given_x, double lq_star_x, double lq_star_y);

/// Symmetric N x N matrix in packed triangular storage.
class PairwiseDistanceMatrix {
public:
  PairwiseDistanceMatrix() = default;
  explicit PairwiseDistanceMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { packed_[index(i, j)] = v; }

private:
  static std::size_t index_ordered(std::size_t hi, std::size_t lo) {
    return hi * (hi + 1) / 2 + lo;
  }
  std::size_t index(std::size_t i, std::size_t j) const {
    return i >= j ? index_ordered(i, j) : index_ordered(j, i);
  }

  std::size_t n_ = 0;
  std::vector<double> packed_;
};

class DistanceSpec {
public:
  enum class Kind { Euclidean, Hamming, MetropolisHastings, UserTable };

  static DistanceSpec euclidean();
  static DistanceSpec hamming();
  static DistanceSpec metropolis_hastings(LogDensity target, LogProposal proposal);
  static DistanceSpec user_table(PairwiseDistanceMatrix table);

  Kind kind() const { return kind_; }
  const char* name() const;

  /// Evaluates the distance between two states. Not available for user
  /// tables, which are indexed by pool position instead of state.
  double between(const DrawState& a, const DrawState& b) const;

  /// Count of distance evaluations made through this spec (shared across
  /// copies). Used to pin evaluation-count contracts in tests.
  std::uint64_t evaluations() const { return evals_->load(); }

  const PairwiseDistanceMatrix& table() const;
  const LogDensity& target() const { return target_; }
  const LogProposal& proposal() const { return proposal_; }

private:
  DistanceSpec(Kind kind) : kind_(kind), evals_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

  Kind kind_;
  LogDensity target_;
  LogProposal proposal_;
  std::shared_ptr<PairwiseDistanceMatrix> table_;
  std::shared_ptr<std::atomic<std::uint64_t>> evals_;

  friend PairwiseDistanceMatrix pairwise_matrix(const std::vector<DrawState>&,
                                                const DistanceSpec&);
};

/// Evaluates every pairwise distance over the unique pool, including the
/// diagonal (self-distance is computed, never assumed zero). Entries may be
/// evaluated concurrently; the result is deterministic. Distance errors are
/// rethrown with the offending pool index pair.
PairwiseDistanceMatrix pairwise_matrix(const std::vector<DrawState>& pool,
                                       const DistanceSpec& d);

}  // namespace gendiag
