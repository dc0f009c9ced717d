#include "gendiag/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace gendiag {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::string& ctx) {
  double out = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) throw FormatError(ctx + ": bad number '" + std::string(text) + "'");
  return out;
}

long long parse_int(std::string_view text, const std::string& ctx) {
  long long out = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) throw FormatError(ctx + ": bad integer '" + std::string(text) + "'");
  return out;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

json require_field(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) throw FormatError(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

}  // namespace

json state_to_json(const DrawState& state) {
  json j;
  switch (state.kind()) {
    case StateKind::RealVector:
      j["type"] = "real_vector";
      j["values"] = state.as_real().values;
      break;
    case StateKind::BinaryMatrix: {
      const BinaryMatrix& m = state.as_matrix();
      j["type"] = "binary_matrix";
      j["rows"] = m.rows;
      j["cols"] = m.cols;
      j["data"] = m.data;
      break;
    }
    case StateKind::Partition:
      j["type"] = "partition";
      j["labels"] = state.as_partition().labels;
      break;
  }
  return j;
}

DrawState state_from_json(const json& j) {
  const std::string type = require_field(j, "type", "state").get<std::string>();
  DrawState out;
  if (type == "real_vector") {
    RealVector v;
    v.values = require_field(j, "values", "state").get<std::vector<double>>();
    out = DrawState(std::move(v));
  } else if (type == "binary_matrix") {
    BinaryMatrix m;
    m.rows = require_field(j, "rows", "state").get<std::size_t>();
    m.cols = require_field(j, "cols", "state").get<std::size_t>();
    for (const auto& e : require_field(j, "data", "state")) {
      const auto v = e.get<int>();
      if (v != 0 && v != 1) throw FormatError("state: binary matrix entry is not 0 or 1");
      m.data.push_back(static_cast<std::uint8_t>(v));
    }
    out = DrawState(std::move(m));
  } else if (type == "partition") {
    Partition p;
    p.labels = require_field(j, "labels", "state").get<std::vector<std::int64_t>>();
    out = DrawState(std::move(p));
  } else {
    throw FormatError("state: unknown type '" + type + "'");
  }
  validate(out);
  return out;
}

void write_chains_ndjson(std::ostream& os, const std::vector<Chain>& chains) {
  for (const Chain& c : chains) {
    for (std::size_t t = 0; t < c.draws.size(); ++t) {
      json line;
      line["chain"] = c.chain_id;
      line["iter"] = t;
      line["state"] = state_to_json(c.draws[t]);
      os << line.dump() << '\n';
    }
  }
}

std::vector<Chain> read_chains_ndjson(std::istream& is) {
  std::map<int, Chain> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(ctx + ": " + e.what());
    }
    try {
      const int chain_id = require_field(j, "chain", ctx).get<int>();
      const auto iter = require_field(j, "iter", ctx).get<std::int64_t>();
      DrawState state = state_from_json(require_field(j, "state", ctx));
      Chain& chain = by_id[chain_id];
      chain.chain_id = chain_id;
      if (iter != static_cast<std::int64_t>(chain.draws.size())) {
        throw FormatError(ctx + ": chain " + std::to_string(chain_id) + " iteration " +
                          std::to_string(iter) + " out of order (expected " +
                          std::to_string(chain.draws.size()) + ")");
      }
      chain.draws.push_back(std::move(state));
    } catch (const json::exception& e) {
      throw FormatError(ctx + ": " + e.what());
    }
  }
  if (by_id.empty()) throw EmptyInput("no chain records in input");
  std::vector<Chain> chains;
  chains.reserve(by_id.size());
  for (auto& [id, chain] : by_id) chains.push_back(std::move(chain));
  return chains;
}

void write_traceplot_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "chain,iter,value\n";
  for (const TraceRow& r : rows) {
    os << r.chain_id << ',' << r.iter << ',' << format_double(r.value) << '\n';
  }
}

std::vector<TraceRow> read_traceplot_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw EmptyInput("empty traceplot csv");
  if (line == "chain,iter,value\r") line.pop_back();
  if (line != "chain,iter,value") throw FormatError("line 1: expected header 'chain,iter,value'");
  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string ctx = "line " + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw FormatError(ctx + ": expected 3 fields");
    rows.push_back({static_cast<int>(parse_int(fields[0], ctx)), parse_int(fields[1], ctx),
                    parse_double(fields[2], ctx)});
  }
  return rows;
}

MappedChainSet mapped_from_trace_rows(const std::vector<TraceRow>& rows) {
  std::map<int, std::vector<double>> by_id;
  for (const TraceRow& r : rows) by_id[r.chain_id].push_back(r.value);
  MappedChainSet out;
  for (auto& [id, values] : by_id) {
    out.chain_ids.push_back(id);
    out.values.push_back(std::move(values));
  }
  return out;
}

PairwiseDistanceMatrix read_user_table_csv(std::istream& is, std::size_t pool_size) {
  std::string line;
  if (!std::getline(is, line)) throw EmptyInput("empty distance table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "i,j,distance") throw FormatError("line 1: expected header 'i,j,distance'");

  PairwiseDistanceMatrix table(pool_size);
  std::vector<char> seen(pool_size * (pool_size + 1) / 2, 0);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string ctx = "line " + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw FormatError(ctx + ": expected 3 fields");
    const long long i = parse_int(fields[0], ctx);
    const long long j = parse_int(fields[1], ctx);
    const double v = parse_double(fields[2], ctx);
    if (i < 0 || j < 0 || i >= static_cast<long long>(pool_size) ||
        j >= static_cast<long long>(pool_size)) {
      throw FormatError(ctx + ": index out of range for pool of " + std::to_string(pool_size));
    }
    if (!std::isfinite(v) || v < 0) {
      throw FormatError(ctx + ": distance must be finite and nonnegative");
    }
    const auto hi = static_cast<std::size_t>(std::max(i, j));
    const auto lo = static_cast<std::size_t>(std::min(i, j));
    const std::size_t slot = hi * (hi + 1) / 2 + lo;
    if (seen[slot] && table(hi, lo) != v) {
      throw FormatError(ctx + ": conflicting value for pair (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
    }
    seen[slot] = 1;
    table.set(hi, lo, v);
  }
  for (std::size_t i = 0; i < pool_size; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (!seen[i * (i + 1) / 2 + j]) {
        throw FormatError("distance table is missing pair (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      }
    }
  }
  return table;
}

json report_to_json(const DiagnosticReport& report) {
  json j;
  if (report.ess) {
    j["ess"] = report.ess->total;
    j["per_chain_ess"] = report.ess->per_chain;
  } else {
    j["ess"] = nullptr;
    j["per_chain_ess"] = json::array();
  }
  if (report.psrf && report.psrf->defined()) {
    j["psrf"] = report.psrf->value;
  } else {
    j["psrf"] = nullptr;  // degenerate, infinite, or skipped; see flags
  }
  j["flags"] = report.flags;

  json config;
  config["distance"] = report.config.distance;
  config["map"] = report.config.map;
  config["pool_size"] = report.config.pool_size;
  config["chains"] = report.config.num_chains;
  config["iterations"] = report.config.chain_length;
  config["ess_estimator"] = report.config.ess_estimator;
  config["psrf_estimator"] = report.config.psrf_estimator;
  if (report.config.start_index) config["start_index"] = *report.config.start_index;
  if (report.config.cut_index) config["cut_index"] = *report.config.cut_index;
  if (report.config.reference_id) config["reference"] = *report.config.reference_id;
  j["config"] = config;
  return j;
}

namespace {

GaussianMixture1D mixture_from_json(const json& j) {
  GaussianMixture1D mix;
  mix.weights = require_field(j, "weights", "target").get<std::vector<double>>();
  mix.means = require_field(j, "means", "target").get<std::vector<double>>();
  mix.sds = require_field(j, "sds", "target").get<std::vector<double>>();
  if (mix.weights.size() != mix.means.size() || mix.means.size() != mix.sds.size()) {
    throw FormatError("target: weights/means/sds must have equal lengths");
  }
  if (mix.weights.empty()) throw FormatError("target: empty mixture");
  double wsum = 0.0;
  for (double w : mix.weights) {
    if (w <= 0) throw FormatError("target: weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw FormatError("target: weights must sum to 1");
  for (double s : mix.sds) {
    if (s <= 0) throw FormatError("target: sds must be positive");
  }
  return mix;
}

ProposalFamily proposal_from_json(const json& j) {
  ProposalFamily prop;
  const std::string kind = require_field(j, "kind", "proposal").get<std::string>();
  if (kind == "random_walk") {
    prop.kind = ProposalFamily::Kind::RandomWalk;
  } else if (kind == "reflect_mixture") {
    prop.kind = ProposalFamily::Kind::ReflectMixture;
  } else {
    throw FormatError("proposal: unknown kind '" + kind + "'");
  }
  prop.sd = require_field(j, "sd", "proposal").get<double>();
  if (prop.sd <= 0) throw FormatError("proposal: sd must be positive");
  return prop;
}

}  // namespace

SimConfig parse_sim_config(const json& j) {
  const std::string name = require_field(j, "name", "config").get<std::string>();
  const auto seed = j.value("seed", kDefaultSeed);

  if (name == "custom") {
    ScenarioSpec spec;
    spec.name = "custom";
    spec.seed = seed;
    spec.target = mixture_from_json(require_field(j, "target", "config"));
    spec.proposal = proposal_from_json(require_field(j, "proposal", "config"));
    spec.starts = require_field(j, "starts", "config").get<std::vector<double>>();
    spec.n_iter = require_field(j, "n_iter", "config").get<std::int64_t>();
    return spec;
  }
  if (name.rfind("synthetic-", 0) == 0) {
    SyntheticSpec spec = named_synthetic(name, seed);
    spec.rows = j.value("rows", spec.rows);
    spec.cols = j.value("cols", spec.cols);
    spec.flip_rate = j.value("flip_rate", spec.flip_rate);
    spec.n_obs = j.value("n_obs", spec.n_obs);
    spec.n_clusters = j.value("n_clusters", spec.n_clusters);
    spec.resample_rate = j.value("resample_rate", spec.resample_rate);
    spec.num_chains = j.value("chains", spec.num_chains);
    spec.n_iter = j.value("n_iter", spec.n_iter);
    spec.trapped = j.value("trapped", spec.trapped);
    return spec;
  }
  ScenarioSpec spec = named_scenario(name, seed);
  spec.n_iter = j.value("n_iter", spec.n_iter);
  if (j.contains("starts")) spec.starts = j.at("starts").get<std::vector<double>>();
  return spec;
}

json sim_config_to_json(const SimConfig& config) {
  json j;
  if (const auto* scenario = std::get_if<ScenarioSpec>(&config)) {
    j["name"] = scenario->name;
    j["seed"] = scenario->seed;
    j["n_iter"] = scenario->n_iter;
    j["starts"] = scenario->starts;
    j["target"] = {{"weights", scenario->target.weights},
                   {"means", scenario->target.means},
                   {"sds", scenario->target.sds}};
    j["proposal"] = {{"kind", scenario->proposal.name()}, {"sd", scenario->proposal.sd}};
  } else {
    const auto& syn = std::get<SyntheticSpec>(config);
    j["name"] = syn.kind == SyntheticSpec::Kind::BinaryMatrix ? "synthetic-binary"
                                                              : "synthetic-partition";
    j["seed"] = syn.seed;
    j["n_iter"] = syn.n_iter;
    j["chains"] = syn.num_chains;
    j["trapped"] = syn.trapped;
    if (syn.kind == SyntheticSpec::Kind::BinaryMatrix) {
      j["rows"] = syn.rows;
      j["cols"] = syn.cols;
      j["flip_rate"] = syn.flip_rate;
    } else {
      j["n_obs"] = syn.n_obs;
      j["n_clusters"] = syn.n_clusters;
      j["resample_rate"] = syn.resample_rate;
    }
  }
  return j;
}

std::string config_hash(const json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace gendiag
