#pragma once

// Inference from a single party's view: message readings by hypothesis
// testing against the Hardy zero conditions, pairwise Hardy tests on
// disclosed data, and the resulting verdict.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qba/engine/transcript.hpp"
#include "qba/engine/types.hpp"
#include "qba/engine/view.hpp"

namespace qba::verify {

using engine::Json;
using engine::Party;
using engine::PartyView;
using hardy::Outcome;
using hardy::Setting;

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct Interval {
  double lower;
  double upper;
  bool contains(double x) const { return lower <= x && x <= upper; }
};

/// Wilson score interval for k successes out of n. n == 0 gives [0, 1].
Interval wilson_interval(std::size_t k, std::size_t n, double z = kZ99);

/// True when (s1, s2, o1, o2) is one of the three events with zero Hardy
/// probability: (D,D,-,-), (D,U,+,+), (U,D,+,+).
bool forbidden(Setting s1, Setting s2, Outcome o1, Outcome o2);

enum class ReadingValue { Zero, One, Unreadable };
enum class UnreadableReason { None, BothFalsified, InsufficientEvidence, NoRuns };

std::string_view to_string(ReadingValue v);
std::string_view to_string(UnreadableReason r);

struct MessageReading {
  ReadingValue value = ReadingValue::Unreadable;
  UnreadableReason reason = UnreadableReason::NoRuns;
  std::size_t violations_if_u = 0;  // forbidden events assuming C measured U
  std::size_t violations_if_d = 0;
  std::size_t runs_used = 0;

  bool readable() const { return value != ReadingValue::Unreadable; }
  std::optional<int> bit() const;
  bool operator==(const MessageReading&) const = default;
};

/// One linked message run: the reader's own setting and outcome, and C's
/// announced outcome.
struct ReaderRun {
  Setting reader_setting;
  Outcome reader_outcome;
  Outcome commander_outcome;
};

MessageReading decide_reading(std::span<const ReaderRun> runs, std::size_t k_min);

/// Reads C's message from the reader's (G, C) pairs in one sub-protocol:
/// swapped pairs in the peer's sub-protocol, direct pairs in the reader's
/// own. Uses only published links, L, C's announcements and the reader's
/// own data.
MessageReading read_message(const PartyView& view, Party distributor, std::size_t k_min);

struct JointRecord {
  Setting s1;
  Setting s2;
  Outcome o1;
  Outcome o2;
};

enum class ReportStatus { Pass, Fail, Inconclusive };
std::string_view to_string(ReportStatus s);

struct HardyTestParams {
  double epsilon = 0.0;
  std::size_t min_runs = 16;
  /// q used for the expected-count guard of the positivity check.
  double q_reference = 0.0901699437494742;
  double q_guard = 10.0;
};

struct HardyReport {
  std::array<std::size_t, 16> counts{};          // indexed like ProbabilityTable
  std::array<std::size_t, 4> setting_totals{};   // UU, UD, DU, DD
  std::size_t dd_minus_minus = 0;
  std::size_t du_plus_plus = 0;
  std::size_t ud_plus_plus = 0;
  std::size_t uu_plus_plus = 0;
  std::size_t runs = 0;
  double q_estimate = 0.0;
  Interval q_interval{0.0, 1.0};
  bool q_checked = false;
  ReportStatus status = ReportStatus::Inconclusive;
  std::string reason;

  std::size_t total(Setting s1, Setting s2) const {
    return setting_totals[static_cast<std::size_t>(s1) * 2 + static_cast<std::size_t>(s2)];
  }
};

HardyReport hardy_test(std::span<const JointRecord> data, const HardyTestParams& params);

struct VerifyParams {
  std::size_t k_min = 1;
  HardyTestParams hardy;
  int fallback_bit = 0;
};

/// A Hardy report on the actor's pairs with `partner` in one sub-protocol.
struct LabeledReport {
  Party distributor;
  Party partner;
  bool swapped;
  HardyReport report;
};

struct Verdict {
  Party actor = Party::A;
  bool valid = true;
  std::optional<int> action;        // empty = abstain
  std::optional<Party> traitor;
  bool peer_link_fault = false;
  std::string rule;

  bool operator==(const Verdict&) const = default;
};

struct VerdictInputs {
  Party actor;
  MessageReading message_reading;  // m_C(actor), from the peer's sub-protocol
  MessageReading check_reading;    // m_C(peer), from the actor's own sub-protocol
  std::vector<LabeledReport> reports;
  std::optional<std::optional<int>> confirmation;
};

/// Decision table, first matching row wins:
///   invalid      some report inconclusive -> abstain
///   peer-hardy   failing report in the peer's sub-protocol or with the peer
///                -> traitor peer, act on the check reading (fallback if unreadable)
///   commander-hardy  failing direct report with C -> traitor C, fallback
///   unreadable   either reading unreadable -> traitor C, fallback
///   disagree     readings differ -> traitor C, fallback
///   confirmation missing or != check reading -> traitor peer, link fault flag,
///                act on the message reading
///   consensus    act on the message reading
Verdict decide(const VerdictInputs& inputs, int fallback_bit);

/// Hardy reports for every pair category visible to the actor.
std::vector<LabeledReport> build_reports(const PartyView& view, const MessageReading& message,
                                         const MessageReading& check, const HardyTestParams& params);

struct Assessment {
  VerdictInputs inputs;
  Verdict verdict;
};

/// Everything derived from one lieutenant's view. Pure function of the view.
Assessment assess(const PartyView& view, const VerifyParams& params);

Json to_json(const MessageReading& r);
Json to_json(const HardyReport& r);
Json to_json(const LabeledReport& r);
Json to_json(const Verdict& v);
Json to_json(const Assessment& a);

}  // namespace qba::verify
