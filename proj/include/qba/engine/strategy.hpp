#pragma once

// Decision hooks the engine calls at each party's legitimate decision
// points. Every hook receives only the owning party's view. The defaults
// are the honest behaviour.

#include <optional>
#include <string>
#include <vector>

#include "qba/engine/types.hpp"
#include "qba/engine/view.hpp"
#include "qba/qcore/rng.hpp"

namespace qba::engine {

struct SettingRequest {
  std::optional<int> message_bit;  // present only for C
  double message_fraction = 0.75;
};

class StrategyContract {
 public:
  virtual ~StrategyContract() = default;

  /// Distributor only: which projector to use on one swap pair.
  virtual SwapChoice distribution_tamper(const PartyView& self, RunId lieutenant_run,
                                         RunId commander_run, qcore::Rng& rng);

  /// Distributor only: the correlation links to publish.
  virtual std::vector<PairLink> publish_links(const PartyView& self, qcore::Rng& rng);

  virtual SettingPlan setting_choice(const PartyView& self, Party distributor,
                                     const SettingRequest& request, qcore::Rng& rng);

  /// The value announced for one of the party's own measured runs.
  virtual Outcome announcement_tamper(const PartyView& self, Party distributor, RunId run,
                                      Outcome measured, qcore::Rng& rng);

  /// Bit sent to the peer lieutenant. honest_bit is the party's own reading
  /// of the commander's message to it.
  virtual std::optional<int> classical_message_choice(const PartyView& self,
                                                      std::optional<int> honest_bit,
                                                      qcore::Rng& rng);
};

}  // namespace qba::engine
