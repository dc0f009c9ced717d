#include "gendiag/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gendiag/parallel.hpp"

namespace gendiag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double min0(double t) { return t < 0.0 ? t : 0.0; }

bool is_neg_inf(double x) { return std::isinf(x) && x < 0; }

// Row of the p-th entry of a packed lower triangle (diagonal included).
std::size_t triangular_row(std::size_t p) {
  auto i = static_cast<std::size_t>((std::sqrt(8.0 * static_cast<double>(p) + 1.0) - 1.0) / 2.0);
  while ((i + 1) * (i + 2) / 2 <= p) ++i;
  while (i * (i + 1) / 2 > p) --i;
  return i;
}

void check_log_density_value(double v, const char* what) {
  if (std::isnan(v) || (std::isinf(v) && v > 0)) {
    throw InvalidState(std::string(what) + " returned NaN or +inf");
  }
}

}  // namespace

LogProposal with_grid_log_q_star(
    std::function<double(const DrawState&, const DrawState&)> log_q, double lo, double hi,
    std::size_t points) {
  if (!(hi > lo) || points < 2) throw UsageError("invalid grid for log_q_star search");
  auto q = log_q;
  auto q_star = [q, lo, hi, points](const DrawState& x) {
    double best = kNegInf;
    DrawState y = RealVector{{0.0}};
    auto& yv = std::get<RealVector>(y.payload).values;
    for (std::size_t i = 0; i < points; ++i) {
      yv[0] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
      best = std::max(best, q(x, y));
    }
    return best;
  };
  return LogProposal{std::move(log_q), std::move(q_star)};
}

double euclidean(const RealVector& x, const RealVector& y) {
  if (x.values.size() != y.values.size()) {
    throw ShapeMismatch("euclidean distance between vectors of different length");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const double d = x.values[i] - y.values[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

double hamming(const BinaryMatrix& a, const BinaryMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ShapeMismatch("hamming distance between matrices of different dimensions");
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) count += a.data[i] != b.data[i];
  return static_cast<double>(count);
}

double hamming_coassociation(const Partition& a, const Partition& b) {
  if (a.labels.size() != b.labels.size()) {
    throw ShapeMismatch("partitions cover different numbers of observations");
  }
  const std::size_t n = a.labels.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool together_a = a.labels[i] == a.labels[j];
      const bool together_b = b.labels[i] == b.labels[j];
      count += together_a != together_b;
    }
  }
  return static_cast<double>(2 * count);
}

double mh_distance_from_logs(double lp_x, double lp_y, double lq_x_given_y,
                             double lq_y_given_x, double lq_star_x, double lq_star_y) {
  if (is_neg_inf(lp_x) && is_neg_inf(lp_y)) {
    throw UndefinedRatio("both states have zero target density");
  }
  if (!std::isfinite(lq_star_x) || !std::isfinite(lq_star_y)) {
    throw InvalidState("log_q_star must be finite");
  }
  // min0 of the log density ratio; the one-sided -inf cases stay NaN-free.
  const double ratio_xy = is_neg_inf(lp_x) ? kNegInf : (is_neg_inf(lp_y) ? 0.0 : min0(lp_x - lp_y));
  const double ratio_yx = is_neg_inf(lp_y) ? kNegInf : (is_neg_inf(lp_x) ? 0.0 : min0(lp_y - lp_x));
  const double toward_x = ratio_xy + lq_x_given_y - lq_star_y;
  const double toward_y = ratio_yx + lq_y_given_x - lq_star_x;
  const double log_move = std::min(toward_x, toward_y);
  const double d = 1.0 - std::exp(log_move);
  return std::clamp(d, 0.0, 1.0);
}

double mh_distance(const DrawState& x, const DrawState& y, const LogDensity& target,
                   const LogProposal& proposal) {
  const double lp_x = target(x);
  const double lp_y = target(y);
  check_log_density_value(lp_x, "target log density");
  check_log_density_value(lp_y, "target log density");
  return mh_distance_from_logs(lp_x, lp_y, proposal.log_q(y, x), proposal.log_q(x, y),
                               proposal.log_q_star(x), proposal.log_q_star(y));
}

DistanceSpec DistanceSpec::euclidean() { return DistanceSpec(Kind::Euclidean); }

DistanceSpec DistanceSpec::hamming() { return DistanceSpec(Kind::Hamming); }

DistanceSpec DistanceSpec::metropolis_hastings(LogDensity target, LogProposal proposal) {
  DistanceSpec spec(Kind::MetropolisHastings);
  spec.target_ = std::move(target);
  spec.proposal_ = std::move(proposal);
  return spec;
}

DistanceSpec DistanceSpec::user_table(PairwiseDistanceMatrix table) {
  const std::size_t n = table.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = table(i, j);
      if (!std::isfinite(v) || v < 0) {
        throw InvalidState("user table distance (" + std::to_string(i) + "," +
                           std::to_string(j) + ") is not finite and nonnegative");
      }
    }
  }
  DistanceSpec spec(Kind::UserTable);
  spec.table_ = std::make_shared<PairwiseDistanceMatrix>(std::move(table));
  return spec;
}

const char* DistanceSpec::name() const {
  switch (kind_) {
    case Kind::Euclidean: return "euclidean";
    case Kind::Hamming: return "hamming";
    case Kind::MetropolisHastings: return "metropolis_hastings";
    case Kind::UserTable: return "user_table";
  }
  return "unknown";
}

const PairwiseDistanceMatrix& DistanceSpec::table() const {
  if (kind_ != Kind::UserTable) throw UsageError("distance has no user table");
  return *table_;
}

double DistanceSpec::between(const DrawState& a, const DrawState& b) const {
  evals_->fetch_add(1, std::memory_order_relaxed);
  switch (kind_) {
    case Kind::Euclidean:
      return gendiag::euclidean(a.as_real(), b.as_real());
    case Kind::Hamming:
      if (a.kind() == StateKind::Partition || b.kind() == StateKind::Partition) {
        return hamming_coassociation(a.as_partition(), b.as_partition());
      }
      return gendiag::hamming(a.as_matrix(), b.as_matrix());
    case Kind::MetropolisHastings:
      return mh_distance(a, b, target_, proposal_);
    case Kind::UserTable:
      throw UsageError("user table distances are indexed by pool position, not by state");
  }
  throw Error("unreachable distance kind");
}

PairwiseDistanceMatrix pairwise_matrix(const std::vector<DrawState>& pool,
                                       const DistanceSpec& d) {
  const std::size_t n = pool.size();
  if (n == 0) throw EmptyInput("pairwise matrix over an empty pool");

  if (d.kind() == DistanceSpec::Kind::UserTable) {
    const PairwiseDistanceMatrix& table = d.table();
    if (table.size() != n) {
      throw ShapeMismatch("user table covers " + std::to_string(table.size()) +
                          " states, pool has " + std::to_string(n));
    }
    d.evals_->fetch_add(n * (n + 1) / 2, std::memory_order_relaxed);
    return table;
  }

  PairwiseDistanceMatrix out(n);

  if (d.kind() == DistanceSpec::Kind::MetropolisHastings) {
    // Cache per-state target and proposal-maximum logs; each pair then costs
    // two cross proposal evaluations.
    std::vector<double> lp(n), lqs(n);
    parallel_blocks(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        lp[i] = d.target()(pool[i]);
        check_log_density_value(lp[i], "target log density");
        lqs[i] = d.proposal().log_q_star(pool[i]);
      }
    });
    parallel_blocks(n * (n + 1) / 2, [&](std::size_t lo, std::size_t hi) {
      std::size_t i = triangular_row(lo);
      std::size_t j = lo - i * (i + 1) / 2;
      for (std::size_t p = lo; p < hi; ++p) {
        try {
          out.set(i, j, mh_distance_from_logs(lp[i], lp[j], d.proposal().log_q(pool[j], pool[i]),
                                              d.proposal().log_q(pool[i], pool[j]), lqs[i],
                                              lqs[j]));
        } catch (...) {
          rethrow_with_context(std::current_exception(),
                               "distance(" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (++j > i) {
          ++i;
          j = 0;
        }
      }
    });
    d.evals_->fetch_add(n * (n + 1) / 2, std::memory_order_relaxed);
    return out;
  }

  parallel_blocks(n * (n + 1) / 2, [&](std::size_t lo, std::size_t hi) {
    std::size_t i = triangular_row(lo);
    std::size_t j = lo - i * (i + 1) / 2;
    for (std::size_t p = lo; p < hi; ++p) {
      try {
        out.set(i, j, d.between(pool[i], pool[j]));
      } catch (...) {
        rethrow_with_context(std::current_exception(),
                             "distance(" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (++j > i) {
        ++i;
        j = 0;
      }
    }
  });
  return out;
}

}  // namespace gendiag
