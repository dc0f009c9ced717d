// Command-line front end: simulate chains, run generalized convergence
// diagnostics, export traceplots.
//
// Exit codes: 0 success, 2 usage/format errors, 1 internal errors.
// Poor mixing is report content, never an exit status.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gendiag/diagnostics.hpp"
#include "gendiag/io.hpp"
#include "gendiag/rng.hpp"
#include "gendiag/samplers.hpp"
#include "gendiag/svg.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct SimulateOptions {
  std::string scenario;
  std::string spec_path;
  std::string output;
  std::uint64_t seed = gendiag::kDefaultSeed;
  bool seed_given = false;
  std::int64_t n_iter = 0;  // 0 = scenario default
  bool trapped = false;
};

struct DiagOptions {
  std::string input;
  std::string distance = "euclidean";
  std::string map = "nn";
  std::string reference_path;
  std::string scenario;  // target/proposal source for the mh distance
  std::uint32_t start_index = 0;
  std::optional<std::uint64_t> random_start_seed;
  std::int64_t burn_in = 0;
  std::string output;
  std::string csv_path;
  std::string svg_path;
  std::string from_csv;  // traceplot only
  bool no_ess = false;
  bool no_psrf = false;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw gendiag::UsageError("cannot open output file '" + path + "'");
  return os;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw gendiag::UsageError("cannot open input file '" + path + "'");
  return is;
}

json read_json_file(const std::string& path) {
  std::ifstream is = open_input(path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw gendiag::FormatError(path + ": " + e.what());
  }
}

int run_simulate(const SimulateOptions& opt) {
  gendiag::SimConfig config;
  if (!opt.spec_path.empty()) {
    config = gendiag::parse_sim_config(read_json_file(opt.spec_path));
    if (opt.seed_given) {
      std::visit([&](auto& spec) { spec.seed = opt.seed; }, config);
    }
  } else if (!opt.scenario.empty()) {
    if (opt.scenario.rfind("synthetic-", 0) == 0) {
      config = gendiag::named_synthetic(opt.scenario, opt.seed);
    } else {
      config = gendiag::named_scenario(opt.scenario, opt.seed);
    }
  } else {
    throw gendiag::UsageError("simulate needs --scenario or --spec");
  }
  std::visit(
      [&](auto& spec) {
        if (opt.n_iter > 0) spec.n_iter = opt.n_iter;
      },
      config);
  if (auto* syn = std::get_if<gendiag::SyntheticSpec>(&config)) {
    if (opt.trapped) syn->trapped = true;
  } else if (opt.trapped) {
    throw gendiag::UsageError("--trapped applies only to synthetic scenarios");
  }

  const gendiag::ChainSet cs = std::visit(
      [](const auto& spec) -> gendiag::ChainSet {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, gendiag::ScenarioSpec>) {
          return gendiag::mh_run(spec);
        } else {
          return gendiag::synthetic_discrete_chains(spec);
        }
      },
      config);

  {
    std::ofstream os = open_output(opt.output);
    gendiag::write_chains_ndjson(os, cs.chains);
  }

  const json config_json = gendiag::sim_config_to_json(config);
  json meta;
  meta["tool"] = "gendiag";
  meta["version"] = kVersion;
  meta["command"] = "simulate";
  meta["config"] = config_json;
  meta["config_hash"] = gendiag::config_hash(config_json);
  meta["seed"] = std::visit([](const auto& spec) { return spec.seed; }, config);
  meta["rng"] = gendiag::kRngName;
  meta["chains"] = cs.num_chains();
  meta["iterations"] = cs.chain_length();
  meta["unique_states"] = cs.pool_size();
  {
    std::ofstream os = open_output(opt.output + ".meta.json");
    os << meta.dump(2) << '\n';
  }
  std::cerr << "wrote " << cs.num_chains() << " chains x " << cs.chain_length() << " draws ("
            << cs.pool_size() << " unique states) to " << opt.output << '\n';
  return 0;
}

gendiag::ChainSet load_chain_set(const DiagOptions& opt) {
  std::ifstream is = open_input(opt.input);
  std::vector<gendiag::Chain> chains;
  try {
    chains = gendiag::read_chains_ndjson(is);
  } catch (...) {
    gendiag::rethrow_with_context(std::current_exception(), opt.input);
  }
  if (opt.burn_in < 0) throw gendiag::UsageError("--burn-in must be nonnegative");
  if (opt.burn_in > 0) {
    for (auto& chain : chains) {
      if (opt.burn_in >= static_cast<std::int64_t>(chain.draws.size())) {
        throw gendiag::UsageError("no draws remain after burn-in of " +
                                  std::to_string(opt.burn_in));
      }
      chain.draws.erase(chain.draws.begin(), chain.draws.begin() + opt.burn_in);
    }
  }
  return gendiag::build_chain_set(std::move(chains));
}

std::optional<json> sidecar_for(const std::string& input) {
  const std::string path = input + ".meta.json";
  if (!fs::exists(path)) return std::nullopt;
  return read_json_file(path);
}

gendiag::DistanceSpec resolve_distance(const DiagOptions& opt, const gendiag::ChainSet& cs,
                                       std::optional<json>& sidecar) {
  if (opt.distance == "euclidean") return gendiag::DistanceSpec::euclidean();
  if (opt.distance == "hamming") return gendiag::DistanceSpec::hamming();
  if (opt.distance == "mh") {
    std::string scenario = opt.scenario;
    if (scenario.empty() && sidecar && sidecar->contains("config")) {
      scenario = (*sidecar)["config"].value("name", "");
    }
    if (scenario.empty() || scenario == "custom" || scenario.rfind("synthetic-", 0) == 0) {
      throw gendiag::UsageError(
          "--distance mh needs a named sampler scenario (--scenario m1|m2|m3|m4, or a "
          "simulate sidecar next to the input)");
    }
    const gendiag::ScenarioSpec spec = gendiag::named_scenario(scenario, 0);
    return gendiag::DistanceSpec::metropolis_hastings(spec.target.as_log_density(),
                                                      spec.proposal.as_log_proposal());
  }
  if (opt.distance.rfind("table:", 0) == 0) {
    const std::string path = opt.distance.substr(6);
    std::ifstream is = open_input(path);
    try {
      return gendiag::DistanceSpec::user_table(
          gendiag::read_user_table_csv(is, cs.pool_size()));
    } catch (...) {
      gendiag::rethrow_with_context(std::current_exception(), path);
    }
  }
  throw gendiag::UsageError("unknown distance '" + opt.distance +
                            "' (euclidean|hamming|mh|table:PATH)");
}

gendiag::MapChoice resolve_map(const DiagOptions& opt, const gendiag::ChainSet& cs) {
  if (opt.map == "lanfear") {
    if (opt.reference_path.empty()) {
      throw gendiag::UsageError("--map lanfear needs --reference PATH");
    }
    return gendiag::LanfearChoice{gendiag::state_from_json(read_json_file(opt.reference_path))};
  }
  if (opt.map == "nn") {
    std::uint32_t start = opt.start_index;
    if (opt.random_start_seed) {
      gendiag::Rng rng(*opt.random_start_seed);
      start = static_cast<std::uint32_t>(rng.uniform_int(cs.pool_size()));
    }
    if (start >= cs.pool_size()) {
      throw gendiag::UsageError("--start-index out of range for pool of " +
                                std::to_string(cs.pool_size()));
    }
    return gendiag::NearestNeighborChoice{start};
  }
  throw gendiag::UsageError("unknown map '" + opt.map + "' (lanfear|nn)");
}

json diag_report_json(const gendiag::DiagnosticReport& report, const DiagOptions& opt,
                      const std::optional<json>& sidecar) {
  json j = gendiag::report_to_json(report);
  j["config"]["burn_in"] = opt.burn_in;
  if (sidecar) {
    j["config"]["input"] = {{"config_hash", sidecar->value("config_hash", "")},
                            {"seed", sidecar->value("seed", 0ULL)},
                            {"scenario", (*sidecar)["config"].value("name", "")}};
  }
  return j;
}

gendiag::DiagnosticReport compute_report(const DiagOptions& opt, std::optional<json>& sidecar) {
  const gendiag::ChainSet cs = load_chain_set(opt);
  sidecar = sidecar_for(opt.input);
  const gendiag::DistanceSpec d = resolve_distance(opt, cs, sidecar);
  const gendiag::MapChoice map_choice = resolve_map(opt, cs);
  gendiag::DiagnosticOptions options;
  options.compute_ess = !opt.no_ess;
  options.compute_psrf = !opt.no_psrf;
  return gendiag::run_generalized_diagnostic(cs, d, map_choice, options);
}

int run_diag(const DiagOptions& opt) {
  std::optional<json> sidecar;
  const gendiag::DiagnosticReport report = compute_report(opt, sidecar);
  const json j = diag_report_json(report, opt, sidecar);
  if (opt.output.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream os = open_output(opt.output);
    os << j.dump(2) << '\n';
  }
  if (!opt.csv_path.empty()) {
    std::ofstream os = open_output(opt.csv_path);
    gendiag::write_traceplot_csv(os, report.traceplot);
  }
  if (!opt.svg_path.empty()) {
    std::ofstream os = open_output(opt.svg_path);
    os << gendiag::render_traceplot_svg(report.mapped,
                                        std::string(report.config.distance) + " + " +
                                            report.config.map);
  }
  return 0;
}

int run_traceplot(const DiagOptions& opt) {
  if (opt.csv_path.empty() && opt.svg_path.empty()) {
    throw gendiag::UsageError("traceplot needs --csv and/or --svg output paths");
  }

  gendiag::MappedChainSet mapped;
  std::vector<gendiag::TraceRow> rows;
  std::string title;
  if (!opt.from_csv.empty()) {
    std::ifstream is = open_input(opt.from_csv);
    try {
      rows = gendiag::read_traceplot_csv(is);
    } catch (...) {
      gendiag::rethrow_with_context(std::current_exception(), opt.from_csv);
    }
    mapped = gendiag::mapped_from_trace_rows(rows);
    title = "traceplot";
  } else {
    std::optional<json> sidecar;
    gendiag::DiagnosticReport report = compute_report(opt, sidecar);
    rows = std::move(report.traceplot);
    mapped = std::move(report.mapped);
    title = std::string(report.config.distance) + " + " + report.config.map;
  }

  if (!opt.csv_path.empty()) {
    std::ofstream os = open_output(opt.csv_path);
    gendiag::write_traceplot_csv(os, rows);
  }
  if (!opt.svg_path.empty()) {
    std::ofstream os = open_output(opt.svg_path);
    os << gendiag::render_traceplot_svg(mapped, title);
  }
  return 0;
}

void add_diag_flags(CLI::App* cmd, DiagOptions& opt, bool traceplot) {
  cmd->add_option("-i,--input", opt.input, "NDJSON chain file");
  cmd->add_option("--distance", opt.distance, "euclidean|hamming|mh|table:PATH");
  cmd->add_option("--map", opt.map, "lanfear|nn");
  cmd->add_option("--reference", opt.reference_path, "reference state JSON (lanfear map)");
  cmd->add_option("--scenario", opt.scenario, "named scenario supplying the mh-distance target");
  cmd->add_option("--start-index", opt.start_index, "tour start pool index (nn map)");
  cmd->add_option("--random-start-seed", opt.random_start_seed,
                  "pick the tour start pseudo-randomly from this seed");
  cmd->add_option("--burn-in", opt.burn_in, "draws to drop per chain before diagnostics");
  cmd->add_option("--csv", opt.csv_path, "write the mapped chains as CSV");
  cmd->add_option("--svg", opt.svg_path, "write the traceplot as SVG");
  if (traceplot) {
    cmd->add_option("--from-csv", opt.from_csv, "render a previously exported mapped-chain CSV");
  } else {
    cmd->add_option("-o,--output", opt.output, "report JSON path (default: stdout)");
    cmd->add_flag("--no-ess", opt.no_ess, "skip the ESS estimate");
    cmd->add_flag("--no-psrf", opt.no_psrf, "skip the PSRF estimate");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized MCMC convergence diagnostics"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "draw chains from a named scenario");
  simulate->add_option("--scenario", sim.scenario,
                       "m1|m2|m3|m4|synthetic-binary|synthetic-partition");
  simulate->add_option("--spec", sim.spec_path, "scenario config JSON file");
  simulate->add_option("--seed", sim.seed, "rng seed")->each([&](const std::string&) {
    sim.seed_given = true;
  });
  simulate->add_option("--n-iter", sim.n_iter, "override the scenario chain length");
  simulate->add_flag("--trapped", sim.trapped, "freeze one chain (synthetic scenarios)");
  simulate->add_option("-o,--output", sim.output, "NDJSON output path")->required();

  DiagOptions diag;
  CLI::App* diag_cmd = app.add_subcommand("diag", "run generalized diagnostics on chains");
  add_diag_flags(diag_cmd, diag, false);

  DiagOptions trace;
  CLI::App* trace_cmd = app.add_subcommand("traceplot", "export a traceplot CSV/SVG");
  add_diag_flags(trace_cmd, trace, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (diag_cmd->parsed()) return run_diag(diag);
    if (trace_cmd->parsed()) return run_traceplot(trace);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const gendiag::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gendiag::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gendiag::ShapeMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gendiag::InvalidState& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gendiag::EmptyInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const gendiag::EmptyHistogram& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
