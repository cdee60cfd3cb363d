#pragma once

// Protocol phases for one distributor's sub-protocol, run against a Session
// that owns the transcript and the three party views. Every public event
// goes through Session::publish, which enforces phase order and broadcasts
// to the views.

#include <array>
#include <optional>

#include "qba/engine/ledger.hpp"
#include "qba/engine/strategy.hpp"
#include "qba/engine/transcript.hpp"
#include "qba/engine/view.hpp"
#include "qba/hardy/hardy.hpp"
#include "qba/qcore/rng.hpp"

namespace qba::engine {

/// Smallest N for which the statistical phases are meaningful.
inline constexpr int kMinNParameter = 8;

class Session {
 public:
  Session();

  void publish(Event event);

  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }
  PartyView& view(Party p) { return views_[index_of(p)]; }
  const PartyView& view(Party p) const { return views_[index_of(p)]; }
  const std::array<PartyView, 3>& views() const { return views_; }

 private:
  Transcript transcript_;
  std::array<PartyView, 3> views_;
};

using Strategies = std::array<StrategyContract*, 3>;

/// Resource distribution with post-selection. 6N copies go to each
/// neighbour: 2N of each are converted to Hardy pairs with the ancilla
/// unitary (kept on ancilla outcome |u>), the remaining 4N + 4N are paired
/// up for swapping (kept when the projector chosen by the tamper hook
/// clicks). Run ids are a random permutation so they carry no kind
/// information.
RunLedger distribute(Party distributor, int n, const hardy::HardyModel& model,
                     StrategyContract& distributor_strategy, const PartyView& distributor_view,
                     qcore::Rng& rng);

/// Hands each party its private share of a ledger and publishes the
/// discard lists.
void deliver(Session& session, const RunLedger& ledger);

/// The correlation links as they really are: direct pairs first, then
/// swapped pairs, each group in run order.
std::vector<PairLink> true_links(const RunLedger& ledger);

/// Honest setting choice. A and B draw uniform U/D per measurable run. C
/// puts each run in L with probability message_fraction (message basis: U
/// for bit 0, D for bit 1) and otherwise in L1 with a uniform test setting.
SettingPlan choose_settings(const PartyView& view, Party distributor,
                            const SettingRequest& request, qcore::Rng& rng);

/// Collects a plan from every party's strategy, validates it against the
/// party's measurable runs and records it in the party's view.
/// Lieutenants get the same request without a message bit.
std::array<SettingPlan, 3> collect_settings(Session& session, Party distributor,
                                            const Strategies& strategies,
                                            const SettingRequest& commander_request,
                                            qcore::Rng& rng);

/// Runs are visited in a random global order; within a run the announcers
/// (distributor and holder) speak in a random order. Real outcomes are Born
/// samples on the shared register; consumed distributor slots get uniform
/// phony outcomes, flagged in the audit record.
void measurement_phase(Session& session, RunLedger& ledger, const hardy::HardyModel& model,
                       const std::array<SettingPlan, 3>& plans, const Strategies& strategies,
                       qcore::Rng& rng);

/// C publishes L/L1, then the distributor publishes its correlation links.
/// Throws ProtocolAbort if announcements of this sub-protocol are not
/// complete.
void disclose_lists_and_links(Session& session, RunLedger& ledger,
                              const std::array<SettingPlan, 3>& plans,
                              const Strategies& strategies, qcore::Rng& rng);

/// A and B disclose all their settings; C discloses its L1 settings only.
void disclose_settings(Session& session, Party distributor);

/// Each lieutenant sends its claimed bit through a channel that flips it
/// with probability flip_prob. honest_bits is indexed by A, B.
void exchange_confirmations(Session& session, const std::array<std::optional<int>, 2>& honest_bits,
                            const Strategies& strategies, double flip_prob, qcore::Rng& rng);

}  // namespace qba::engine
