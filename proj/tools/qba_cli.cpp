// qba: run, sweep, tables, qmax, replay.
//
// Exit codes: 0 success, 2 configuration error, 1 internal invariant breach.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "qba/adversary/strategies.hpp"
#include "qba/hardy/hardy.hpp"
#include "qba/harness/config.hpp"
#include "qba/harness/trials.hpp"

namespace {

using namespace qba;
using harness::ConfigError;
using harness::Json;

class InvariantBreach : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App& app, const std::string& key, const std::string& help) {
    std::string flag = "--" + key;
    for (auto& ch : flag) {
      if (ch == '_') ch = '-';
    }
    options[key] = app.add_option(flag, values[key], help);
  }

  harness::KeyValues given() const {
    harness::KeyValues out;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) out.emplace_back(key, values.at(key));
    }
    return out;
  }
};

void add_run_flags(CLI::App& app, FlagSet& flags) {
  flags.add(app, "scenario", "honest, c_mixed, c_two_faced, a_basis_flip, b_basis_flip, a_fake_links, "
                             "b_fake_links, a_liar, b_liar");
  flags.add(app, "n", "N of the protocol (>= 8)");
  flags.add(app, "alpha", "real |alpha| of the D observables");
  flags.add(app, "message_bit", "0, 1 or random");
  flags.add(app, "message_fraction", "share of C's runs in the message basis");
  flags.add(app, "classical_flip_prob", "bit-flip probability of the confirmation channel");
  flags.add(app, "epsilon", "tolerance on zero-condition counts");
  flags.add(app, "k_min", "violations needed to falsify a hypothesis");
  flags.add(app, "min_runs", "runs below which a Hardy report is inconclusive");
  flags.add(app, "cheat_fraction", "share of swaps using M' in basis-flip scenarios");
  flags.add(app, "c_mixed_target", "sub-protocol scrambled by c_mixed (A or B)");
  flags.add(app, "trials", "Monte Carlo trials");
  flags.add(app, "seed", "master seed");
  flags.add(app, "threads", "OpenMP threads (0 = default)");
  flags.add(app, "report", "JSON report path");
  flags.add(app, "summary", "CSV summary path");
  flags.add(app, "transcript", "JSONL transcript path for one trial");
  flags.add(app, "transcript_trial", "trial index written to the transcript");
}

harness::RunConfig load(const std::string& config_path, const FlagSet& flags, harness::SweepGrid* grid) {
  harness::RunConfig config;
  if (!config_path.empty()) harness::apply_settings(config, harness::read_config_file(config_path), grid);
  harness::apply_settings(config, flags.given(), grid);
  config.validate();
  return config;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

void check_rows(const harness::RunConfig& config, const std::vector<harness::TrialRow>& rows,
                const Json& report) {
  for (const auto& row : rows) {
    for (const auto& s : row.slots) {
      if (s.direct_to_peer + s.direct_to_c + 2 * s.swapped_pairs + s.discarded != s.total) {
        throw InvariantBreach("slot conservation broken in trial " + std::to_string(row.index));
      }
    }
  }
  std::vector<harness::TrialRow> parsed;
  for (const auto& r : report.at("trials")) parsed.push_back(harness::row_from_json(r));
  if (parsed != rows) throw InvariantBreach("report rows do not round-trip");
  const auto traitors = adversary::make_scenario(config.scenario).traitors;
  if (harness::to_json(harness::aggregate(parsed, traitors)) != report.at("aggregates")) {
    throw InvariantBreach("aggregates differ from recomputation over rows");
  }
}

int cmd_run(const std::string& config_path, const FlagSet& flags, bool serial) {
  const auto config = load(config_path, flags, nullptr);
  const auto rows = serial ? harness::run_trials_serial(config) : harness::run_trials_parallel(config);
  const auto report = harness::build_report(config, rows);
  check_rows(config, rows, report);

  if (!config.report_path.empty()) open_output(config.report_path) << report.dump(2) << '\n';
  const auto traitors = adversary::make_scenario(config.scenario).traitors;
  const auto aggregates = harness::aggregate(rows, traitors);
  if (!config.summary_path.empty()) {
    auto out = open_output(config.summary_path);
    harness::write_summary_csv(out, config, aggregates);
  }
  if (!config.transcript_path.empty()) {
    const auto model = hardy::build_symmetric_model(config.alpha);
    const auto index = static_cast<std::size_t>(config.transcript_trial);
    auto out = open_output(config.transcript_path);
    harness::write_transcript(out, config, index, harness::run_single(config, model, index));
  }
  std::cout << harness::to_json(aggregates).dump(2) << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_path, const FlagSet& flags, const std::string& n_list,
              const std::string& alpha_list, const std::string& scenarios, const std::string& output,
              bool serial) {
  harness::SweepGrid grid;
  auto config = load(config_path, flags, &grid);
  harness::KeyValues lists;
  if (!n_list.empty()) lists.emplace_back("n_values", n_list);
  if (!alpha_list.empty()) lists.emplace_back("alpha_values", alpha_list);
  if (!scenarios.empty()) lists.emplace_back("scenarios", scenarios);
  if (!output.empty()) lists.emplace_back("output", output);
  harness::apply_settings(config, lists, &grid);

  const auto cells = harness::run_sweep(config, grid, !serial);
  if (grid.output_path.empty()) {
    harness::write_sweep_csv(std::cout, cells);
  } else {
    auto out = open_output(grid.output_path);
    harness::write_sweep_csv(out, cells);
  }
  return 0;
}

int cmd_tables(double alpha, const std::string& state, const std::string& output) {
  if (!(alpha > hardy::kAlphaMargin && alpha < 1.0 - hardy::kAlphaMargin)) {
    throw ConfigError("alpha must lie strictly inside (0, 1)");
  }
  if (state != "psi" && state != "chi") throw ConfigError("state must be psi or chi");
  const auto model = hardy::build_symmetric_model(alpha);
  const auto table =
      hardy::probability_table(state == "psi" ? model.psi_h : model.chi, model.pair1, model.pair2);
  if (output.empty()) {
    hardy::write_csv(std::cout, table);
  } else {
    auto out = open_output(output);
    hardy::write_csv(out, table);
  }
  return 0;
}

int cmd_qmax() {
  const auto found = hardy::q_max_search();
  Json j;
  j["alpha_opt"] = found.alpha_opt;
  j["alpha_opt_squared"] = found.alpha_opt * found.alpha_opt;
  j["q_max"] = found.q_max;
  j["q_max_closed_form"] = (5.0 * std::sqrt(5.0) - 11.0) / 2.0;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open transcript " + path);
  harness::ReplayResult result;
  try {
    result = harness::replay(in);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed transcript: ") + e.what());
  }
  Json j;
  j["match"] = result.match;
  j["mismatches"] = result.mismatches;
  Json verdicts = Json::array();
  for (const auto& a : result.recomputed) verdicts.push_back(verify::to_json(a.verdict));
  j["verdicts"] = verdicts;
  std::cout << j.dump(2) << '\n';
  if (!result.match) throw InvariantBreach("replayed verdicts differ from the stored ones");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-party quantum Byzantine agreement simulator"};
  app.require_subcommand(1);

  std::string config_path;
  bool serial = false;

  auto* run = app.add_subcommand("run", "run Monte Carlo trials of one scenario");
  FlagSet run_flags;
  run->add_option("--config", config_path, "key=value or JSON config file");
  run->add_flag("--serial", serial, "use the serial reference loop");
  add_run_flags(*run, run_flags);

  auto* sweep = app.add_subcommand("sweep", "grid over N, alpha and scenario");
  FlagSet sweep_flags;
  std::string n_list, alpha_list, scenario_list, sweep_output;
  sweep->add_option("--config", config_path, "key=value or JSON config file");
  sweep->add_flag("--serial", serial, "use the serial reference loop");
  add_run_flags(*sweep, sweep_flags);
  sweep->add_option("--n-values", n_list, "comma-separated N values");
  sweep->add_option("--alpha-values", alpha_list, "comma-separated alpha values");
  sweep->add_option("--scenarios", scenario_list, "comma-separated scenario names");
  sweep->add_option("--output", sweep_output, "CSV path (default stdout)");

  auto* tables = app.add_subcommand("tables", "16-row probability table");
  double alpha = harness::kOptimalAlpha;
  std::string state = "psi", table_output;
  tables->add_option("--alpha", alpha, "real |alpha|");
  tables->add_option("--state", state, "psi or chi");
  tables->add_option("--output", table_output, "CSV path (default stdout)");

  auto* qmax = app.add_subcommand("qmax", "maximum of q over alpha");

  auto* replay = app.add_subcommand("replay", "recompute verdicts from a stored transcript");
  std::string transcript;
  replay->add_option("transcript", transcript, "JSONL transcript")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path, run_flags, serial);
    if (*sweep) return cmd_sweep(config_path, sweep_flags, n_list, alpha_list, scenario_list, sweep_output, serial);
    if (*tables) return cmd_tables(alpha, state, table_output);
    if (*qmax) return cmd_qmax();
    if (*replay) return cmd_replay(transcript);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
