#pragma once

// Public record of a protocol instance plus the private audit record that
// only the test harness reads.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qba/engine/types.hpp"

namespace qba::engine {

/// Discard lists after distribution. R3 is the sorted union of r1 and r2.
struct DiscardEvent {
  Party distributor;
  std::vector<RunId> r1;
  std::vector<RunId> r2;
};

struct AnnounceEvent {
  std::uint64_t seq;  // global announcement counter
  Party distributor;
  RunId run;
  Party party;
  Outcome outcome;
  int position;  // 0 = first announcer in this run
};

/// C's L (message) and L1 (test) lists for one sub-protocol.
struct ListEvent {
  Party distributor;
  std::vector<RunId> message_runs;
  std::vector<RunId> test_runs;
};

struct LinkEvent {
  Party distributor;
  std::vector<PairLink> links;
};

struct SettingEvent {
  Party distributor;
  Party party;
  std::vector<std::pair<RunId, Setting>> settings;
};

/// Classical confirmation bit as received by `to`. Empty when the sender
/// had no readable bit to report.
struct ConfirmEvent {
  Party from;
  Party to;
  std::optional<int> bit;
};

using Event =
    std::variant<DiscardEvent, AnnounceEvent, ListEvent, LinkEvent, SettingEvent, ConfirmEvent>;

enum class Phase : std::uint8_t {
  Idle,
  Distributed,
  Announced,
  ListsDisclosed,
  LinksRevealed,
  SettingsDisclosed,
};

std::string_view to_string(Phase p);

/// Ground truth kept out of every PartyView.
struct AuditRecord {
  struct PerDistributor {
    std::vector<PairLink> true_links;
    std::set<RunId> phony_runs;
    std::size_t cheat_swaps = 0;
    std::size_t honest_swaps = 0;
    std::map<RunId, Setting> c_settings;  // includes message runs
  };
  std::array<PerDistributor, 2> sub;
  std::optional<int> message_bit;
  std::array<std::optional<int>, 2> sent_confirmations;  // by A, by B

  PerDistributor& of(Party distributor) { return sub[index_of(distributor)]; }
  const PerDistributor& of(Party distributor) const { return sub[index_of(distributor)]; }
};

/// Ordered event log with per-sub-protocol phase tracking. append() refuses
/// events that arrive out of order and throws ProtocolAbort.
class Transcript {
 public:
  void append(Event event);

  /// Marks the end of the announcement stream of one sub-protocol.
  void close_announcements(Party distributor);
  /// Marks the end of setting disclosure of one sub-protocol.
  void close_settings(Party distributor);

  Phase phase(Party distributor) const { return phases_[index_of(distributor)]; }
  const std::vector<Event>& events() const { return events_; }
  std::uint64_t next_seq() const { return next_seq_; }

  AuditRecord& audit() { return audit_; }
  const AuditRecord& audit() const { return audit_; }

 private:
  void require(Party distributor, Phase expected, std::string_view what) const;

  std::vector<Event> events_;
  std::array<Phase, 2> phases_{Phase::Idle, Phase::Idle};
  std::uint64_t next_seq_ = 0;
  AuditRecord audit_;
};

using Json = nlohmann::ordered_json;

/// One JSON object per event with a leading "type" field and stable field
/// order.
Json event_to_json(const Event& event);
Event event_from_json(const Json& j);

/// Writes one line per public event.
void write_events(std::ostream& out, const std::vector<Event>& events);

Json audit_to_json(const AuditRecord& audit);

Json links_to_json(const std::vector<PairLink>& links);
std::vector<PairLink> links_from_json(const Json& j);

}  // namespace qba::engine
