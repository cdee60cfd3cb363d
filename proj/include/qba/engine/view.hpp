#pragma once

// What one general legitimately knows. Views are fed by the engine: private
// facts through the receive_* / record_* calls, public facts through
// observe(). Strategies and verification only ever see a const PartyView.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "qba/engine/transcript.hpp"
#include "qba/engine/types.hpp"

namespace qba::engine {

/// Everything a party knows about one distributor's sub-protocol.
struct SubKnowledge {
  // Private.
  std::set<RunId> own_runs;             // runs in which this party holds a qubit
  std::set<RunId> consumed;             // distributor only: qubits used up by swaps
  std::optional<std::vector<PairLink>> true_links;  // distributor only
  std::map<RunId, Setting> own_settings;
  std::map<RunId, Outcome> own_outcomes;
  std::vector<RunId> own_message_runs;  // C only, before disclosure
  std::vector<RunId> own_test_runs;     // C only, before disclosure

  // Public.
  bool distributed = false;
  std::set<RunId> discarded;  // R3
  std::map<std::pair<RunId, Party>, Outcome> announcements;
  std::optional<std::pair<std::vector<RunId>, std::vector<RunId>>> lists;  // (L, L1)
  std::optional<std::vector<PairLink>> links;                             // as published
  std::map<std::pair<RunId, Party>, Setting> disclosed_settings;
};

class PartyView {
 public:
  explicit PartyView(Party role) : role_(role) {}

  Party role() const { return role_; }
  const SubKnowledge& sub(Party distributor) const { return subs_[index_of(distributor)]; }

  /// Runs this party will measure: own, not discarded, not consumed.
  std::vector<RunId> measurable_runs(Party distributor) const;

  /// The setting `party` used on `run`, if this view knows it: own settings
  /// first, then disclosed ones.
  std::optional<Setting> setting_of(Party distributor, RunId run, Party party) const;
  std::optional<Outcome> announced(Party distributor, RunId run, Party party) const;

  /// Classical confirmation received from the peer lieutenant.
  const std::optional<std::optional<int>>& confirmation() const { return confirmation_; }

  // Private feeds.
  void receive_runs(Party distributor, const std::vector<RunId>& runs);
  void receive_distribution_secret(std::set<RunId> consumed, std::vector<PairLink> true_links);
  void record_plan(const SettingPlan& plan);
  void record_outcome(Party distributor, RunId run, Outcome outcome);

  // Public feed.
  void observe(const Event& event);

  Json to_json() const;
  static PartyView from_json(const Json& j);

  bool operator==(const PartyView&) const;

 private:
  SubKnowledge& mut(Party distributor) { return subs_[index_of(distributor)]; }

  Party role_;
  std::array<SubKnowledge, 2> subs_{};
  std::optional<std::optional<int>> confirmation_;
};

bool operator==(const SubKnowledge& a, const SubKnowledge& b);

}  // namespace qba::engine
