#include "qba/adversary/strategies.hpp"

#include <gtest/gtest.h>

#include <map>

#include "qba/engine/protocol.hpp"
#include "test_support.hpp"

namespace qba::adversary {
namespace {

constexpr double kOptimalAlpha = 0.78615137775742328;

const hardy::HardyModel& model() {
  static const auto m = hardy::build_symmetric_model(kOptimalAlpha);
  return m;
}

engine::ProtocolConfig config_for(std::uint64_t seed, int n = 128) {
  engine::ProtocolConfig c;
  c.n = n;
  c.seed = seed;
  c.message_bit = static_cast<int>(seed & 1U);
  c.verify.hardy.q_reference = model().q;
  return c;
}

TEST(Scenarios, KnownNamesAndTraitors) {
  const std::map<std::string, std::set<Party>> expected{
      {"honest", {}},
      {"c_mixed", {Party::C}},
      {"c_two_faced", {Party::C}},
      {"a_basis_flip", {Party::A}},
      {"b_basis_flip", {Party::B}},
      {"a_fake_links", {Party::A}},
      {"b_fake_links", {Party::B}},
      {"a_liar", {Party::A}},
      {"b_liar", {Party::B}},
  };
  EXPECT_EQ(scenario_names().size(), expected.size());
  for (const auto& name : scenario_names()) {
    const auto sc = make_scenario(name);
    EXPECT_EQ(sc.name, name);
    EXPECT_EQ(sc.traitors, expected.at(name));
    for (auto* p : sc.pointers()) EXPECT_NE(p, nullptr);
  }
}

TEST(Scenarios, UnknownAndConflictingNamesThrow) {
  EXPECT_THROW(make_scenario("bogus"), engine::ConfigError);
  EXPECT_THROW(make_scenario(""), engine::ConfigError);
  EXPECT_THROW(make_scenario("a_liar+a_basis_flip"), engine::ConfigError);
  const auto combo = make_scenario("a_liar+c_mixed");
  EXPECT_EQ(combo.traitors, (std::set<Party>{Party::A, Party::C}));
  EXPECT_THROW(traitor_distributor_basis_flip(Party::A, 0.0), engine::ConfigError);
  EXPECT_THROW(traitor_distributor_basis_flip(Party::A, 1.5), engine::ConfigError);
}

// Expected verdict of the loyal lieutenant(s) per single-traitor scenario.
struct Expectation {
  std::string scenario;
  Party loyal;
  Party traitor;
};

TEST(Scenarios, LoyalLieutenantsNameTheTraitor) {
  const std::vector<Expectation> cases{
      {"a_basis_flip", Party::B, Party::A}, {"b_basis_flip", Party::A, Party::B},
      {"a_fake_links", Party::B, Party::A}, {"b_fake_links", Party::A, Party::B},
      {"a_liar", Party::B, Party::A},       {"b_liar", Party::A, Party::B},
  };
  for (const auto& c : cases) {
    auto sc = make_scenario(c.scenario);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const auto out = engine::run_protocol(config_for(seed, 256), model(), sc.pointers());
      const auto& v = out.assessment(c.loyal).verdict;
      EXPECT_TRUE(v.valid) << c.scenario;
      EXPECT_EQ(v.traitor, c.traitor) << c.scenario << " seed " << seed << " rule " << v.rule;
    }
  }
}

TEST(Scenarios, TraitorousCommanderIsNamedAndLieutenantsAgree) {
  for (const char* name : {"c_mixed", "c_two_faced"}) {
    auto sc = make_scenario(name);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto out = engine::run_protocol(config_for(seed), model(), sc.pointers());
      const auto& va = out.assessment(Party::A).verdict;
      const auto& vb = out.assessment(Party::B).verdict;
      for (const auto* v : {&va, &vb}) {
        if (!v->valid) continue;
        EXPECT_EQ(v->traitor, Party::C) << name << " " << v->rule;
      }
      if (va.valid && vb.valid) {
        EXPECT_EQ(va.action, vb.action) << name;
      }
    }
  }
}

TEST(CommanderModes, TwoFacedSendsOppositeBases) {
  auto sc = make_scenario("c_two_faced");
  const auto out = engine::run_protocol(config_for(3), model(), sc.pointers());
  const auto& audit = out.session.transcript().audit();
  for (Party d : engine::kDistributors) {
    const auto& lists = out.session.view(Party::C).sub(d).lists;
    ASSERT_TRUE(lists.has_value());
    for (auto r : lists->first) {
      EXPECT_EQ(audit.of(d).c_settings.at(r), d == Party::A ? hardy::Setting::U : hardy::Setting::D);
    }
  }
}

TEST(CommanderModes, MixedScramblesOnlyTheTargetSubProtocol) {
  ScenarioOptions opts;
  opts.c_mixed_target = Party::B;
  auto sc = make_scenario("c_mixed", opts);
  auto cfg = config_for(4);
  cfg.message_bit = 0;
  const auto out = engine::run_protocol(cfg, model(), sc.pointers());
  const auto& audit = out.session.transcript().audit();
  std::size_t d_in_b = 0;
  for (Party d : engine::kDistributors) {
    for (auto r : out.session.view(Party::C).sub(d).lists->first) {
      const auto s = audit.of(d).c_settings.at(r);
      if (d == Party::A) {
        EXPECT_EQ(s, hardy::Setting::U);
      } else {
        d_in_b += s == hardy::Setting::D;
      }
    }
  }
  EXPECT_GT(d_in_b, 0u);
}

TEST(BasisFlip, VictimActsOnTheCommandersOrderToTheTraitor) {
  auto sc = make_scenario("a_basis_flip");
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto out = engine::run_protocol(config_for(seed, 256), model(), sc.pointers());
    const auto& b = out.assessment(Party::B);
    EXPECT_EQ(b.verdict.rule, "peer-hardy-failure");
    ASSERT_TRUE(b.inputs.check_reading.readable());
    EXPECT_EQ(b.verdict.action, out.message_bit);
    EXPECT_NE(b.inputs.message_reading.bit(), std::optional<int>(out.message_bit));
    EXPECT_EQ(out.session.transcript().audit().of(Party::A).honest_swaps, 0u);
  }
}

TEST(BasisFlip, PartialCheatingMixesProjectors) {
  auto sc = make_scenario("a_basis_flip", ScenarioOptions{0.5, Party::A});
  std::size_t cheat = 0, honest = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto out = engine::run_protocol(config_for(seed), model(), sc.pointers());
    const auto& audit = out.session.transcript().audit().of(Party::A);
    cheat += audit.cheat_swaps;
    honest += audit.honest_swaps;
  }
  EXPECT_TRUE(testing::wilson_contains(static_cast<double>(cheat), static_cast<double>(cheat + honest), 0.5));
}

TEST(FakeLinks, PublishedLinksDifferFromTheAudit) {
  auto sc = make_scenario("b_fake_links");
  const auto out = engine::run_protocol(config_for(9), model(), sc.pointers());
  const auto& audit = out.session.transcript().audit();
  EXPECT_NE(*out.session.view(Party::A).sub(Party::B).links, audit.of(Party::B).true_links);
  EXPECT_EQ(*out.session.view(Party::A).sub(Party::A).links, audit.of(Party::A).true_links);
}

TEST(Liar, SymmetricAcrossLieutenants) {
  for (Party liar : engine::kDistributors) {
    auto sc = make_scenario(liar == Party::A ? "a_liar" : "b_liar");
    const Party loyal = engine::peer_of(liar);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto out = engine::run_protocol(config_for(seed, 256), model(), sc.pointers());
      const auto& v = out.assessment(loyal).verdict;
      EXPECT_EQ(v.rule, "confirmation-mismatch");
      EXPECT_TRUE(v.peer_link_fault);
      EXPECT_EQ(v.action, out.message_bit);
      EXPECT_EQ(out.session.transcript().audit().sent_confirmations[engine::index_of(liar)],
                std::optional<int>(1 - out.message_bit));
    }
  }
}

}  // namespace
}  // namespace qba::adversary
