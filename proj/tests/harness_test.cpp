#include "qba/harness/trials.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qba/adversary/strategies.hpp"
#include "qba/harness/config.hpp"
#include "qba/qcore/rng.hpp"

namespace qba::harness {
namespace {

RunConfig small(const std::string& scenario, int trials = 12, int n = 32) {
  RunConfig c;
  c.scenario = scenario;
  c.trials = trials;
  c.n = n;
  c.seed = 2024;
  return c;
}

// (5 sqrt 5 - 11) / 2, reached at a^2 = (sqrt 5 - 1) / 2.
constexpr double kQMax = 0.09016994374947424;

TEST(Config, KeyValueWithCommentsAndBlankLines) {
  const auto kv = parse_config_text("# header\n\nscenario = a_liar  # inline\nn=64\n  trials = 5\n");
  ASSERT_EQ(kv.size(), 3u);
  RunConfig c;
  apply_settings(c, kv);
  EXPECT_EQ(c.scenario, "a_liar");
  EXPECT_EQ(c.n, 64);
  EXPECT_EQ(c.trials, 5);
}

TEST(Config, JsonObject) {
  const auto kv = parse_config_text(R"({"scenario": "c_mixed", "alpha": 0.7, "message_bit": "random",
                                        "n_values": [32, 64]})");
  RunConfig c;
  SweepGrid g;
  apply_settings(c, kv, &g);
  EXPECT_EQ(c.scenario, "c_mixed");
  EXPECT_DOUBLE_EQ(c.alpha, 0.7);
  EXPECT_EQ(c.message_bit, -1);
  EXPECT_EQ(g.n_values, (std::vector<int>{32, 64}));
  EXPECT_THROW(parse_config_text(R"({"n": {"nested": 1}})"), ConfigError);
  EXPECT_THROW(parse_config_text("{ broken"), ConfigError);
}

TEST(Config, LaterSettingsOverrideEarlierOnes) {
  RunConfig c;
  apply_settings(c, parse_config_text("n=64\nseed=3\n"));
  apply_settings(c, {{"n", "128"}});
  EXPECT_EQ(c.n, 128);
  EXPECT_EQ(c.seed, 3u);
}

TEST(Config, RejectsBadInput) {
  RunConfig c;
  EXPECT_THROW(apply_settings(c, {{"nonsense", "1"}}), ConfigError);
  EXPECT_THROW(apply_settings(c, {{"n", "many"}}), ConfigError);
  EXPECT_THROW(apply_settings(c, {{"n", "12x"}}), ConfigError);
  EXPECT_THROW(apply_settings(c, {{"n_values", "8"}}), ConfigError);  // sweep key without a grid
  EXPECT_THROW(parse_config_text("just words\n"), ConfigError);
  EXPECT_THROW(read_config_file("/nonexistent/qba.cfg"), ConfigError);

  auto invalid = [](auto mutate) {
    RunConfig r;
    mutate(r);
    EXPECT_THROW(r.validate(), ConfigError);
  };
  invalid([](RunConfig& r) { r.n = 4; });
  invalid([](RunConfig& r) { r.alpha = 1.0; });
  invalid([](RunConfig& r) { r.message_bit = 2; });
  invalid([](RunConfig& r) { r.message_fraction = 1.2; });
  invalid([](RunConfig& r) { r.classical_flip_prob = -0.1; });
  invalid([](RunConfig& r) { r.k_min = 0; });
  invalid([](RunConfig& r) { r.cheat_fraction = 0.0; });
  invalid([](RunConfig& r) { r.c_mixed_target = "C"; });
  invalid([](RunConfig& r) { r.trials = 0; });
  invalid([](RunConfig& r) { r.scenario = "nope"; });
  invalid([](RunConfig& r) { r.transcript_trial = 500; });
  EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(Config, JsonRoundTrip) {
  auto c = small("b_basis_flip");
  c.cheat_fraction = 0.5;
  c.message_bit = 1;
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, FileIsReadFromDisk) {
  const auto path = std::filesystem::temp_directory_path() / "qba_harness_test.cfg";
  {
    std::ofstream out(path);
    out << "scenario=b_liar\ntrials=3\n";
  }
  RunConfig c;
  apply_settings(c, read_config_file(path.string()));
  EXPECT_EQ(c.scenario, "b_liar");
  EXPECT_EQ(c.trials, 3);
  std::filesystem::remove(path);
}

TEST(Trials, SeedsAreDerivedPerIndex) {
  const auto c = small("honest");
  EXPECT_EQ(trial_seed(c, 5), qcore::derive_seed(c.seed, 5));
  EXPECT_NE(trial_seed(c, 5), trial_seed(c, 6));
  int ones = 0;
  for (std::size_t i = 0; i < 400; ++i) ones += trial_message_bit(c, i);
  EXPECT_GT(ones, 140);
  EXPECT_LT(ones, 260);
  auto fixed = c;
  fixed.message_bit = 0;
  EXPECT_EQ(trial_message_bit(fixed, 3), 0);
}

TEST(Trials, ParallelMatchesSerial) {
  for (const char* scenario : {"honest", "a_basis_flip", "c_two_faced"}) {
    auto c = small(scenario);
    c.threads = 3;
    EXPECT_EQ(run_trials_serial(c), run_trials_parallel(c)) << scenario;
  }
}

TEST(Trials, ReportsAreByteIdentical) {
  const auto c = small("a_fake_links", 6);
  const auto a = build_report(c, run_trials_parallel(c)).dump(2);
  const auto b = build_report(c, run_trials_parallel(c)).dump(2);
  EXPECT_EQ(a, b);
  auto other = c;
  other.seed = 7;
  EXPECT_NE(a, build_report(other, run_trials_parallel(other)).dump(2));
}

TEST(Trials, AggregatesRecomputeFromReportRows) {
  const auto c = small("a_liar", 10);
  const auto rows = run_trials_serial(c);
  const auto report = build_report(c, rows);
  EXPECT_EQ(report.at("schema_version"), kSchemaVersion);
  std::vector<TrialRow> parsed;
  for (const auto& r : report.at("trials")) parsed.push_back(row_from_json(r));
  EXPECT_EQ(parsed, rows);
  const auto traitors = adversary::make_scenario(c.scenario).traitors;
  EXPECT_EQ(to_json(aggregate(parsed, traitors)), report.at("aggregates"));
  for (const auto& row : rows) {
    for (const auto& s : row.slots) {
      EXPECT_EQ(s.direct_to_peer + s.direct_to_c + 2 * s.swapped_pairs + s.discarded, s.total);
      EXPECT_EQ(s.total, 12u * static_cast<std::size_t>(c.n));
    }
  }
}

TEST(Trials, AggregateRatesHandCounted) {
  const auto c = small("c_mixed", 10, 64);
  const auto rows = run_trials_serial(c);
  const auto a = aggregate(rows, {Party::C});
  std::size_t readable = 0, detected = 0, agreed = 0;
  for (const auto& r : rows) {
    bool both = true;
    for (const auto& act : r.actors) {
      readable += act.message_reading.readable();
      both = both && act.verdict.traitor == Party::C;
    }
    detected += both;
    agreed += r.actors[0].verdict.action && r.actors[0].verdict.action == r.actors[1].verdict.action;
  }
  EXPECT_EQ(a.trials, 10u);
  EXPECT_DOUBLE_EQ(a.readability_rate, static_cast<double>(readable) / 20.0);
  ASSERT_TRUE(a.detection_power.has_value());
  EXPECT_DOUBLE_EQ(*a.detection_power, static_cast<double>(detected) / 10.0);
  EXPECT_DOUBLE_EQ(a.agreement_rate, static_cast<double>(agreed) / 10.0);
  EXPECT_FALSE(a.order_followed_rate.has_value());

  const auto honest = aggregate(run_trials_serial(small("honest", 4, 32)), {});
  EXPECT_FALSE(honest.detection_power.has_value());
  EXPECT_TRUE(honest.order_followed_rate.has_value());
}

TEST(Sweep, SingleCellEqualsDirectRun) {
  auto base = small("honest", 5);
  SweepGrid grid;
  grid.n_values = {32};
  const auto cells = run_sweep(base, grid, false);
  ASSERT_EQ(cells.size(), 1u);
  auto direct = base;
  direct.seed = qcore::derive_seed(base.seed, 0);
  EXPECT_EQ(cells[0].seed, direct.seed);
  EXPECT_EQ(to_json(cells[0].aggregates), to_json(aggregate(run_trials_serial(direct), {})));
}

TEST(Sweep, QColumnFollowsTheModel) {
  auto base = small("honest", 1, 8);
  SweepGrid grid;
  grid.alpha_values = {0.5, 1.0 / std::sqrt(2.0), kOptimalAlpha, 0.9};
  const auto cells = run_sweep(base, grid);
  std::ostringstream out;
  write_sweep_csv(out, cells);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("cell,scenario,n,alpha,q,seed,trials,", 0), 0u);
  std::vector<double> qs;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    qs.push_back(std::stod(fields.at(4)));
  }
  ASSERT_EQ(qs.size(), 4u);
  EXPECT_NEAR(qs[1], 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(qs[2], kQMax, 1e-12);
  EXPECT_LT(qs[0], kQMax);
  EXPECT_LT(qs[3], kQMax);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    EXPECT_NEAR(qs[i], hardy::build_symmetric_model(grid.alpha_values[i]).q, 1e-12);
  }
}

TEST(Sweep, EmptyGridThrows) {
  EXPECT_THROW(run_sweep(small("honest"), SweepGrid{}), ConfigError);
  SweepGrid bad;
  bad.n_values = {4};
  EXPECT_THROW(run_sweep(small("honest"), bad), ConfigError);
}

TEST(Sweep, BasisFlipDetectionGrowsWithN) {
  auto base = small("a_basis_flip", 40);
  SweepGrid grid;
  grid.n_values = {32, 64, 128, 256};
  const auto cells = run_sweep(base, grid);
  double previous = 0.0;
  for (const auto& c : cells) {
    ASSERT_TRUE(c.aggregates.detection_power.has_value());
    EXPECT_GE(*c.aggregates.detection_power, previous - 0.03) << "n=" << c.n;
    previous = *c.aggregates.detection_power;
  }
  EXPECT_GT(previous, 0.95);
}

std::string transcript_for(const RunConfig& c, std::size_t index) {
  std::ostringstream out;
  write_transcript(out, c, index, run_single(c, hardy::build_symmetric_model(c.alpha), index));
  return out.str();
}

TEST(Replay, RecomputesStoredVerdicts) {
  for (const char* scenario : {"honest", "c_mixed", "b_basis_flip", "a_liar"}) {
    const auto c = small(scenario, 3, 64);
    std::istringstream in(transcript_for(c, 1));
    const auto r = replay(in);
    EXPECT_TRUE(r.match) << scenario;
    EXPECT_TRUE(r.mismatches.empty());
  }
}

TEST(Replay, DetectsATamperedVerdict) {
  const auto c = small("honest", 2, 32);
  std::istringstream in(transcript_for(c, 0));
  std::ostringstream tampered;
  std::string line;
  bool changed = false;
  while (std::getline(in, line)) {
    auto j = Json::parse(line);
    if (!changed && j.at("type") == "verdict") {
      j["assessment"]["verdict"]["rule"] = "edited";
      changed = true;
    }
    tampered << j.dump() << '\n';
  }
  ASSERT_TRUE(changed);
  std::istringstream back(tampered.str());
  const auto r = replay(back);
  EXPECT_FALSE(r.match);
  EXPECT_EQ(r.mismatches.size(), 1u);

  std::istringstream headless("{\"type\":\"audit\"}\n");
  EXPECT_THROW(replay(headless), ConfigError);
}

TEST(Replay, ViewsRebuiltFromEventsSupportTheSameVerdict) {
  const auto c = small("b_fake_links", 1, 64);
  const auto out = run_single(c, hardy::build_symmetric_model(c.alpha), 0);
  const auto params = protocol_config(c, trial_seed(c, 0), trial_message_bit(c, 0)).verify;
  for (Party g : engine::kDistributors) {
    const auto v = rebuild_view(g, out.session.transcript().events());
    EXPECT_EQ(verify::assess(v, params).verdict, out.assessment(g).verdict);
  }
}

}  // namespace
}  // namespace qba::harness
