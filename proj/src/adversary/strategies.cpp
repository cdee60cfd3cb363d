#include "qba/adversary/strategies.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace qba::adversary {

namespace {

using engine::ConfigError;
using engine::PairLink;
using engine::PartyView;
using engine::RunId;
using engine::SettingPlan;
using engine::SettingRequest;
using engine::Setting;
using engine::SwapChoice;

class Honest final : public StrategyContract {};

class CommanderTraitor final : public StrategyContract {
 public:
  CommanderTraitor(CommanderMode mode, Party target) : mode_(mode), target_(target) {}

  SettingPlan setting_choice(const PartyView& self, Party distributor, const SettingRequest& request,
                             qcore::Rng& rng) override {
    if (mode_ == CommanderMode::TwoFaced) {
      SettingRequest forged = request;
      forged.message_bit = distributor == Party::A ? 0 : 1;
      return engine::choose_settings(self, distributor, forged, rng);
    }
    auto plan = engine::choose_settings(self, distributor, request, rng);
    if (distributor != target_) return plan;
    const std::set<RunId> message(plan.message_runs.begin(), plan.message_runs.end());
    for (auto& [run, s] : plan.settings) {
      if (message.contains(run)) s = rng.bernoulli(0.5) ? Setting::U : Setting::D;
    }
    return plan;
  }

 private:
  CommanderMode mode_;
  Party target_;
};

class BasisFlip final : public StrategyContract {
 public:
  explicit BasisFlip(double fraction) : fraction_(fraction) {}

  SwapChoice distribution_tamper(const PartyView&, RunId, RunId, qcore::Rng& rng) override {
    if (fraction_ >= 1.0) return SwapChoice::Cheat;
    return rng.bernoulli(fraction_) ? SwapChoice::Cheat : SwapChoice::Honest;
  }

 private:
  double fraction_;
};

class FakeLinks final : public StrategyContract {
 public:
  std::vector<PairLink> publish_links(const PartyView& self, qcore::Rng& rng) override {
    auto links = StrategyContract::publish_links(self, rng);
    std::vector<std::size_t> swapped;
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (links[i].first_run != links[i].second_run) swapped.push_back(i);
    }
    if (swapped.size() < 2) return links;
    std::vector<RunId> partners;
    for (auto i : swapped) partners.push_back(links[i].second_run);
    std::vector<RunId> shuffled = partners;
    auto has_fixed_point = [&] {
      for (std::size_t j = 0; j < partners.size(); ++j) {
        if (shuffled[j] == partners[j]) return true;
      }
      return false;
    };
    do {
      rng.shuffle(std::span<RunId>(shuffled));
    } while (has_fixed_point());
    for (std::size_t j = 0; j < swapped.size(); ++j) links[swapped[j]].second_run = shuffled[j];
    return links;
  }
};

class Liar final : public StrategyContract {
 public:
  std::optional<int> classical_message_choice(const PartyView&, std::optional<int> honest_bit,
                                              qcore::Rng&) override {
    if (!honest_bit) return honest_bit;
    return 1 - *honest_bit;
  }
};

void require_lieutenant(Party who) {
  if (who == Party::C) throw ConfigError("this behaviour needs a lieutenant (A or B)");
}

struct Entry {
  Party party;
  std::function<std::unique_ptr<StrategyContract>(const ScenarioOptions&)> make;
};

const std::map<std::string, Entry, std::less<>>& registry() {
  static const std::map<std::string, Entry, std::less<>> table = {
      {"c_mixed",
       {Party::C, [](const ScenarioOptions& o) { return traitor_c(CommanderMode::MixedSettings, o.c_mixed_target); }}},
      {"c_two_faced", {Party::C, [](const ScenarioOptions&) { return traitor_c(CommanderMode::TwoFaced); }}},
      {"a_basis_flip",
       {Party::A, [](const ScenarioOptions& o) { return traitor_distributor_basis_flip(Party::A, o.cheat_fraction); }}},
      {"b_basis_flip",
       {Party::B, [](const ScenarioOptions& o) { return traitor_distributor_basis_flip(Party::B, o.cheat_fraction); }}},
      {"a_fake_links", {Party::A, [](const ScenarioOptions&) { return traitor_distributor_fake_links(Party::A); }}},
      {"b_fake_links", {Party::B, [](const ScenarioOptions&) { return traitor_distributor_fake_links(Party::B); }}},
      {"a_liar", {Party::A, [](const ScenarioOptions&) { return traitor_classical_liar(Party::A); }}},
      {"b_liar", {Party::B, [](const ScenarioOptions&) { return traitor_classical_liar(Party::B); }}},
  };
  return table;
}

}  // namespace

std::unique_ptr<StrategyContract> honest() { return std::make_unique<Honest>(); }

std::unique_ptr<StrategyContract> traitor_c(CommanderMode mode, Party target) {
  require_lieutenant(target);
  return std::make_unique<CommanderTraitor>(mode, target);
}

std::unique_ptr<StrategyContract> traitor_distributor_basis_flip(Party who, double cheat_fraction) {
  require_lieutenant(who);
  if (!(cheat_fraction > 0.0 && cheat_fraction <= 1.0)) {
    throw ConfigError("cheat fraction must lie in (0, 1]");
  }
  return std::make_unique<BasisFlip>(cheat_fraction);
}

std::unique_ptr<StrategyContract> traitor_distributor_fake_links(Party who) {
  require_lieutenant(who);
  return std::make_unique<FakeLinks>();
}

std::unique_ptr<StrategyContract> traitor_classical_liar(Party who) {
  require_lieutenant(who);
  return std::make_unique<Liar>();
}

engine::Strategies Scenario::pointers() const {
  return {strategies[0].get(), strategies[1].get(), strategies[2].get()};
}

Scenario make_scenario(std::string_view name, const ScenarioOptions& options) {
  Scenario sc;
  sc.name = std::string(name);
  for (auto& s : sc.strategies) s = honest();
  if (name == "honest") return sc;
  if (name.empty()) throw ConfigError("empty scenario name");

  std::size_t start = 0;
  while (start <= name.size()) {
    const auto end = std::min(name.find('+', start), name.size());
    const auto part = name.substr(start, end - start);
    const auto it = registry().find(part);
    if (it == registry().end()) throw ConfigError("unknown scenario '" + std::string(part) + "'");
    const Party p = it->second.party;
    if (sc.traitors.contains(p)) {
      throw ConfigError("scenario '" + std::string(name) + "' gives party " +
                        std::string(engine::to_string(p)) + " two behaviours");
    }
    sc.traitors.insert(p);
    sc.strategies[engine::index_of(p)] = it->second.make(options);
    start = end + 1;
  }
  return sc;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"honest",       "c_mixed",      "c_two_faced",
                                                 "a_basis_flip", "b_basis_flip", "a_fake_links",
                                                 "b_fake_links", "a_liar",       "b_liar"};
  return names;
}

}  // namespace qba::adversary
