#pragma once

// Seeded Monte Carlo orchestration, aggregation and report emission.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <vector>

#include "qba/engine/protocol.hpp"
#include "qba/harness/config.hpp"
#include "qba/verify/verify.hpp"

namespace qba::harness {

using engine::Party;

inline constexpr int kSchemaVersion = 1;

struct SlotCounts {
  std::size_t total = 0;
  std::size_t direct_to_peer = 0;
  std::size_t direct_to_c = 0;
  std::size_t swapped_pairs = 0;
  std::size_t discarded = 0;
  bool operator==(const SlotCounts&) const = default;
};

struct ActorRow {
  Party actor = Party::A;
  bool loyal = true;
  verify::MessageReading message_reading;
  verify::MessageReading check_reading;
  verify::Verdict verdict;
  std::vector<verify::ReportStatus> report_statuses;
  bool operator==(const ActorRow&) const = default;
};

struct TrialRow {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  int message_bit = 0;
  std::array<ActorRow, 2> actors;  // A, B
  std::array<SlotCounts, 2> slots; // sub-protocols of A, B
  std::size_t q_hits = 0;          // (U,U,+,+) in lieutenant-lieutenant direct pairs
  std::size_t q_total = 0;         // (U,U) runs in the same pairs
  bool operator==(const TrialRow&) const = default;
};

/// Per-trial seed and message bit. A random bit is derived from the trial
/// seed so it does not depend on scheduling.
std::uint64_t trial_seed(const RunConfig& config, std::size_t index);
int trial_message_bit(const RunConfig& config, std::size_t index);

SlotCounts slot_counts(const engine::RunLedger& ledger);

/// Runs one trial from scratch. The outcome is returned for callers that
/// need the transcript.
engine::ProtocolOutcome run_single(const RunConfig& config, const hardy::HardyModel& model,
                                   std::size_t index);
TrialRow make_row(const RunConfig& config, std::size_t index, const engine::ProtocolOutcome& outcome,
                  const std::set<Party>& traitors);

/// Reference loop, one trial after another.
std::vector<TrialRow> run_trials_serial(const RunConfig& config);
/// OpenMP over trials; rows are identical to the serial loop.
std::vector<TrialRow> run_trials_parallel(const RunConfig& config);

struct ActorStats {
  std::size_t readings = 0;
  std::size_t readable = 0;
  std::size_t flipped = 0;  // readable and != commander bit
  std::size_t invalid = 0;
  std::array<std::size_t, 4> named{};  // A, B, C, none
};

struct Aggregates {
  std::size_t trials = 0;
  std::vector<Party> traitors;
  double readability_rate = 0.0;
  double correct_reading_rate = 0.0;
  double flipped_reading_rate = 0.0;
  double agreement_rate = 0.0;
  std::optional<double> order_followed_rate;  // only with a loyal commander
  double honest_success_rate = 0.0;
  std::optional<double> detection_power;      // only with a traitor
  double false_accusation_rate = 0.0;
  double invalid_rate = 0.0;
  std::size_t q_hits = 0;
  std::size_t q_total = 0;
  double q_estimate = 0.0;
  verify::Interval q_interval{0.0, 1.0};
  std::array<ActorStats, 2> actors;
};

Aggregates aggregate(const std::vector<TrialRow>& rows, const std::set<Party>& traitors);

Json to_json(const TrialRow& row);
TrialRow row_from_json(const Json& j);
Json to_json(const Aggregates& a);

/// Complete report: schema version, config, model summary, aggregates and
/// rows. No timestamps, so identical configs give identical bytes.
Json build_report(const RunConfig& config, const std::vector<TrialRow>& rows);

void write_summary_csv(std::ostream& out, const RunConfig& config, const Aggregates& a);

/// Header line, one line per public event, one verdict line per lieutenant
/// and the private audit record.
void write_transcript(std::ostream& out, const RunConfig& config, std::size_t index,
                      const engine::ProtocolOutcome& outcome);

struct SweepCell {
  std::size_t index;
  std::string scenario;
  int n;
  double alpha;
  std::uint64_t seed;
  Aggregates aggregates;
};

/// Cells ordered scenario-major, then n, then alpha. Cell i runs with
/// master seed derive_seed(config.seed, i). Empty grids throw ConfigError.
std::vector<SweepCell> run_sweep(const RunConfig& base, const SweepGrid& grid, bool parallel = true);
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

struct ReplayResult {
  bool match = true;
  std::vector<std::string> mismatches;
  std::array<verify::Assessment, 2> recomputed;
};

/// Rebuilds each lieutenant's view from the public events of a transcript
/// stream (own settings and outcomes come from its disclosed settings and
/// announcements), recomputes the verdicts and compares them with the
/// stored verdict lines.
ReplayResult replay(std::istream& in);

/// The view a lieutenant can rebuild from public events alone.
engine::PartyView rebuild_view(Party role, const std::vector<engine::Event>& events);

}  // namespace qba::harness
