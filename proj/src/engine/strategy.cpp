#include "qba/engine/strategy.hpp"

#include "qba/engine/engine.hpp"

namespace qba::engine {

SwapChoice StrategyContract::distribution_tamper(const PartyView&, RunId, RunId, qcore::Rng&) {
  return SwapChoice::Honest;
}

std::vector<PairLink> StrategyContract::publish_links(const PartyView& self, qcore::Rng&) {
  const auto& truth = self.sub(self.role()).true_links;
  if (!truth) throw ProtocolAbort("publish_links called without distribution knowledge");
  return *truth;
}

SettingPlan StrategyContract::setting_choice(const PartyView& self, Party distributor,
                                             const SettingRequest& request, qcore::Rng& rng) {
  return choose_settings(self, distributor, request, rng);
}

Outcome StrategyContract::announcement_tamper(const PartyView&, Party, RunId, Outcome measured,
                                              qcore::Rng&) {
  return measured;
}

std::optional<int> StrategyContract::classical_message_choice(const PartyView&,
                                                              std::optional<int> honest_bit,
                                                              qcore::Rng&) {
  return honest_bit;
}

}  // namespace qba::engine
