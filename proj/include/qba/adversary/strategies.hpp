#pragma once

// Honest baseline and the cheating behaviours, each a StrategyContract that
// overrides only the hooks it needs.

#include <array>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qba/engine/engine.hpp"
#include "qba/engine/strategy.hpp"

namespace qba::adversary {

using engine::Party;
using engine::StrategyContract;

std::unique_ptr<StrategyContract> honest();

enum class CommanderMode {
  MixedSettings,  // random settings on message runs of one sub-protocol
  TwoFaced,       // U throughout A's sub-protocol, D throughout B's
};

std::unique_ptr<StrategyContract> traitor_c(CommanderMode mode, Party target = Party::A);

/// Uses M' on each swap with probability cheat_fraction (1 = every swap).
std::unique_ptr<StrategyContract> traitor_distributor_basis_flip(Party who, double cheat_fraction = 1.0);

/// Publishes a uniform random derangement of the true swap links.
std::unique_ptr<StrategyContract> traitor_distributor_fake_links(Party who);

/// Sends the opposite of its own reading to the peer.
std::unique_ptr<StrategyContract> traitor_classical_liar(Party who);

struct ScenarioOptions {
  double cheat_fraction = 1.0;
  Party c_mixed_target = Party::A;
};

struct Scenario {
  std::string name;
  std::array<std::unique_ptr<StrategyContract>, 3> strategies;
  std::set<Party> traitors;

  engine::Strategies pointers() const;
};

/// Known names: honest, c_mixed, c_two_faced, a_basis_flip, b_basis_flip,
/// a_fake_links, b_fake_links, a_liar, b_liar. Several names joined by '+'
/// combine traitors on different parties (experimental). Throws ConfigError
/// for unknown names or two behaviours on one party.
Scenario make_scenario(std::string_view name, const ScenarioOptions& options = {});

const std::vector<std::string>& scenario_names();

}  // namespace qba::adversary
