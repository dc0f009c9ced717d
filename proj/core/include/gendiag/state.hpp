#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gendiag/errors.hpp"

namespace gendiag {

struct RealVector {
  std::vector<double> values;
};

/// Row-major 0/1 matrix.
struct BinaryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Cluster assignment of n observations. The label multiset is the state;
/// relabelling invariance is handled by the co-association transform, not here.
struct Partition {
  std::vector<std::int64_t> labels;
};

enum class StateKind { RealVector, BinaryMatrix, Partition };

struct DrawState {
  std::variant<RealVector, BinaryMatrix, Partition> payload;

  DrawState() = default;
  DrawState(RealVector v) : payload(std::move(v)) {}
  DrawState(BinaryMatrix m) : payload(std::move(m)) {}
  DrawState(Partition p) : payload(std::move(p)) {}

  StateKind kind() const { return static_cast<StateKind>(payload.index()); }

  const RealVector& as_real() const;
  const BinaryMatrix& as_matrix() const;
  const Partition& as_partition() const;
};

const char* state_kind_name(StateKind kind);

/// Throws InvalidState if the payload violates its variant invariants
/// (non-finite reals, matrix entries outside {0,1}, negative labels, ...).
void validate(const DrawState& state);

/// True when both states have the same variant and the same dimensions.
bool same_shape(const DrawState& a, const DrawState& b);

/// Deterministic byte encoding. Two valid states encode equally iff they are
/// exactly equal: bitwise for reals, entrywise for matrices and labels.
std::string canonicalize(const DrawState& state);

/// FNV-1a hash of the canonical encoding, hex-encoded. Used for provenance.
std::string canonical_id(const DrawState& state);

/// B[i][j] = 1 iff observations i and j share a cluster. Symmetric with unit
/// diagonal, invariant under relabelling of cluster ids.
BinaryMatrix coassociation(const Partition& p);

struct Chain {
  int chain_id = 0;
  std::vector<DrawState> draws;
};

/// k chains over a deduplicated pool of N unique states. The pool is in
/// first-occurrence order: chains scanned in ascending chain_id, draws in
/// iteration order. index_chains[i][j] is the pool index of chains[i].draws[j].
struct ChainSet {
  std::vector<Chain> chains;
  std::vector<DrawState> pool;
  std::vector<std::vector<std::uint32_t>> index_chains;

  std::size_t num_chains() const { return chains.size(); }
  std::size_t chain_length() const { return chains.empty() ? 0 : chains.front().draws.size(); }
  std::size_t pool_size() const { return pool.size(); }

  const DrawState& state_at(std::size_t chain, std::size_t iter) const {
    return pool[index_chains[chain][iter]];
  }
};

/// Validates, sorts by chain id and deduplicates into a ChainSet.
/// Requires at least one chain, all of one variant and shape, length >= 2.
ChainSet build_chain_set(std::vector<Chain> chains);

}  // namespace gendiag
