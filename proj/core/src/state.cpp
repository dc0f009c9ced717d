#include "gendiag/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

namespace gendiag {

namespace {

template <class T>
void append_raw(std::string& out, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

const RealVector& DrawState::as_real() const {
  if (kind() != StateKind::RealVector) throw ShapeMismatch("state is not a real vector");
  return std::get<RealVector>(payload);
}

const BinaryMatrix& DrawState::as_matrix() const {
  if (kind() != StateKind::BinaryMatrix) throw ShapeMismatch("state is not a binary matrix");
  return std::get<BinaryMatrix>(payload);
}

const Partition& DrawState::as_partition() const {
  if (kind() != StateKind::Partition) throw ShapeMismatch("state is not a partition");
  return std::get<Partition>(payload);
}

const char* state_kind_name(StateKind kind) {
  switch (kind) {
    case StateKind::RealVector: return "real_vector";
    case StateKind::BinaryMatrix: return "binary_matrix";
    case StateKind::Partition: return "partition";
  }
  return "unknown";
}

void validate(const DrawState& state) {
  switch (state.kind()) {
    case StateKind::RealVector: {
      const auto& v = std::get<RealVector>(state.payload);
      for (double x : v.values) {
        if (!std::isfinite(x)) throw InvalidState("real vector entry is not finite");
      }
      break;
    }
    case StateKind::BinaryMatrix: {
      const auto& m = std::get<BinaryMatrix>(state.payload);
      if (m.data.size() != m.rows * m.cols) {
        throw InvalidState("binary matrix entry count does not match rows*cols");
      }
      for (std::uint8_t e : m.data) {
        if (e > 1) throw InvalidState("binary matrix entry is not 0 or 1");
      }
      break;
    }
    case StateKind::Partition: {
      const auto& p = std::get<Partition>(state.payload);
      for (std::int64_t l : p.labels) {
        if (l < 0) throw InvalidState("partition label is negative");
      }
      break;
    }
  }
}

bool same_shape(const DrawState& a, const DrawState& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case StateKind::RealVector:
      return std::get<RealVector>(a.payload).values.size() ==
             std::get<RealVector>(b.payload).values.size();
    case StateKind::BinaryMatrix: {
      const auto& ma = std::get<BinaryMatrix>(a.payload);
      const auto& mb = std::get<BinaryMatrix>(b.payload);
      return ma.rows == mb.rows && ma.cols == mb.cols;
    }
    case StateKind::Partition:
      return std::get<Partition>(a.payload).labels.size() ==
             std::get<Partition>(b.payload).labels.size();
  }
  return false;
}

std::string canonicalize(const DrawState& state) {
  validate(state);
  std::string out;
  switch (state.kind()) {
    case StateKind::RealVector: {
      const auto& v = std::get<RealVector>(state.payload);
      out.reserve(9 + 8 * v.values.size());
      out.push_back('R');
      append_raw(out, static_cast<std::uint64_t>(v.values.size()));
      for (double x : v.values) append_raw(out, x);
      break;
    }
    case StateKind::BinaryMatrix: {
      const auto& m = std::get<BinaryMatrix>(state.payload);
      out.reserve(17 + m.data.size());
      out.push_back('B');
      append_raw(out, static_cast<std::uint64_t>(m.rows));
      append_raw(out, static_cast<std::uint64_t>(m.cols));
      out.append(reinterpret_cast<const char*>(m.data.data()), m.data.size());
      break;
    }
    case StateKind::Partition: {
      const auto& p = std::get<Partition>(state.payload);
      out.reserve(9 + 8 * p.labels.size());
      out.push_back('P');
      append_raw(out, static_cast<std::uint64_t>(p.labels.size()));
      for (std::int64_t l : p.labels) append_raw(out, l);
      break;
    }
  }
  return out;
}

std::string canonical_id(const DrawState& state) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonicalize(state))));
  return std::string(buf);
}

BinaryMatrix coassociation(const Partition& p) {
  if (p.labels.empty()) throw EmptyInput("coassociation of an empty partition");
  const std::size_t n = p.labels.size();
  BinaryMatrix b;
  b.rows = n;
  b.cols = n;
  b.data.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      b.data[i * n + j] = p.labels[i] == p.labels[j] ? 1 : 0;
    }
  }
  return b;
}

ChainSet build_chain_set(std::vector<Chain> chains) {
  if (chains.empty()) throw EmptyInput("no chains given");
  std::stable_sort(chains.begin(), chains.end(),
                   [](const Chain& a, const Chain& b) { return a.chain_id < b.chain_id; });
  for (std::size_t i = 1; i < chains.size(); ++i) {
    if (chains[i].chain_id == chains[i - 1].chain_id) {
      throw UsageError("duplicate chain id " + std::to_string(chains[i].chain_id));
    }
  }

  const std::size_t n = chains.front().draws.size();
  if (n < 2) throw EmptyInput("chains must have at least 2 draws");
  const DrawState& first = chains.front().draws.front();
  for (const Chain& c : chains) {
    if (c.draws.size() != n) {
      throw ShapeMismatch("chain " + std::to_string(c.chain_id) + " has length " +
                          std::to_string(c.draws.size()) + ", expected " + std::to_string(n));
    }
    for (const DrawState& s : c.draws) {
      if (!same_shape(first, s)) {
        throw ShapeMismatch("chain " + std::to_string(c.chain_id) +
                            " mixes state variants or shapes");
      }
    }
  }

  ChainSet out;
  out.index_chains.reserve(chains.size());
  std::unordered_map<std::string, std::uint32_t> seen;
  seen.reserve(chains.size() * n);
  for (const Chain& c : chains) {
    std::vector<std::uint32_t> idx;
    idx.reserve(n);
    for (const DrawState& s : c.draws) {
      const std::string key = canonicalize(s);
      auto [it, inserted] = seen.emplace(key, static_cast<std::uint32_t>(out.pool.size()));
      if (inserted) out.pool.push_back(s);
      idx.push_back(it->second);
    }
    out.index_chains.push_back(std::move(idx));
  }
  out.chains = std::move(chains);
  return out;
}

}  // namespace gendiag
