#include "qba/harness/trials.hpp"

#include <algorithm>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include <omp.h>

#include "qba/adversary/strategies.hpp"

namespace qba::harness {

namespace {

using verify::MessageReading;
using verify::ReadingValue;
using verify::ReportStatus;
using verify::UnreadableReason;
using verify::Verdict;

constexpr std::uint64_t kMessageBitStream = 0xB17;

std::string party_str(Party p) { return std::string(engine::to_string(p)); }

Party party_of(const Json& j) {
  const auto p = engine::party_from_string(j.get<std::string>());
  if (!p) throw std::invalid_argument("bad party " + j.dump());
  return *p;
}

adversary::ScenarioOptions scenario_options(const RunConfig& c) {
  adversary::ScenarioOptions o;
  o.cheat_fraction = c.cheat_fraction;
  o.c_mixed_target = c.c_mixed_target == "B" ? Party::B : Party::A;
  return o;
}

hardy::HardyModel model_for(const RunConfig& c) { return hardy::build_symmetric_model(c.alpha); }

MessageReading reading_from_json(const Json& j) {
  MessageReading r;
  const auto v = j.at("value").get<std::string>();
  r.value = v == "0" ? ReadingValue::Zero : v == "1" ? ReadingValue::One : ReadingValue::Unreadable;
  const auto reason = j.at("reason").get<std::string>();
  r.reason = reason == "both-falsified"          ? UnreadableReason::BothFalsified
             : reason == "insufficient-evidence" ? UnreadableReason::InsufficientEvidence
             : reason == "no-runs"               ? UnreadableReason::NoRuns
                                                 : UnreadableReason::None;
  r.violations_if_u = j.at("violations_if_u").get<std::size_t>();
  r.violations_if_d = j.at("violations_if_d").get<std::size_t>();
  r.runs_used = j.at("runs_used").get<std::size_t>();
  return r;
}

Verdict verdict_from_json(const Json& j) {
  Verdict v;
  v.actor = party_of(j.at("actor"));
  v.valid = j.at("valid").get<bool>();
  if (!j.at("action").is_null()) v.action = j.at("action").get<int>();
  if (!j.at("traitor").is_null()) v.traitor = party_of(j.at("traitor"));
  v.peer_link_fault = j.at("peer_link_fault").get<bool>();
  v.rule = j.at("rule").get<std::string>();
  return v;
}

ReportStatus status_from(const std::string& s) {
  if (s == "pass") return ReportStatus::Pass;
  if (s == "fail") return ReportStatus::Fail;
  return ReportStatus::Inconclusive;
}

double rate(std::size_t k, std::size_t n) {
  return n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

const char* kAggregateCsvColumns =
    "readability_rate,correct_reading_rate,flipped_reading_rate,agreement_rate,"
    "order_followed_rate,honest_success_rate,detection_power,false_accusation_rate,"
    "invalid_rate,q_estimate,q_lower,q_upper";

void write_aggregate_cells(std::ostream& out, const Aggregates& a) {
  out << csv_number(a.readability_rate) << ',' << csv_number(a.correct_reading_rate) << ','
      << csv_number(a.flipped_reading_rate) << ',' << csv_number(a.agreement_rate) << ','
      << csv_optional(a.order_followed_rate) << ',' << csv_number(a.honest_success_rate) << ','
      << csv_optional(a.detection_power) << ',' << csv_number(a.false_accusation_rate) << ','
      << csv_number(a.invalid_rate) << ',' << csv_number(a.q_estimate) << ','
      << csv_number(a.q_interval.lower) << ',' << csv_number(a.q_interval.upper);
}

std::vector<TrialRow> run_trials(const RunConfig& config, bool parallel) {
  config.validate();
  const auto model = model_for(config);
  const auto traitors = adversary::make_scenario(config.scenario, scenario_options(config)).traitors;
  const auto count = static_cast<std::size_t>(config.trials);
  std::vector<TrialRow> rows(count);
  std::vector<std::exception_ptr> errors(count);

  auto one = [&](std::size_t i) {
    try {
      rows[i] = make_row(config, i, run_single(config, model, i), traitors);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  if (parallel) {
    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) one(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace

std::uint64_t trial_seed(const RunConfig& config, std::size_t index) {
  return qcore::derive_seed(config.seed, index);
}

int trial_message_bit(const RunConfig& config, std::size_t index) {
  if (config.message_bit >= 0) return config.message_bit;
  return static_cast<int>(qcore::derive_seed(trial_seed(config, index), kMessageBitStream) & 1U);
}

SlotCounts slot_counts(const engine::RunLedger& ledger) {
  using engine::SlotKind;
  SlotCounts s;
  const Party peer = engine::peer_of(ledger.distributor);
  s.total = ledger.total_runs();
  s.direct_to_peer = ledger.count(SlotKind::Direct, peer);
  s.direct_to_c = ledger.count(SlotKind::Direct, Party::C);
  s.swapped_pairs = ledger.swapped_pairs();
  s.discarded = ledger.count(SlotKind::Discarded, peer) + ledger.count(SlotKind::Discarded, Party::C);
  return s;
}

engine::ProtocolOutcome run_single(const RunConfig& config, const hardy::HardyModel& model,
                                   std::size_t index) {
  const auto scenario = adversary::make_scenario(config.scenario, scenario_options(config));
  const auto pc = protocol_config(config, trial_seed(config, index), trial_message_bit(config, index));
  return engine::run_protocol(pc, model, scenario.pointers());
}

TrialRow make_row(const RunConfig& config, std::size_t index, const engine::ProtocolOutcome& outcome,
                  const std::set<Party>& traitors) {
  TrialRow row;
  row.index = index;
  row.seed = trial_seed(config, index);
  row.message_bit = outcome.message_bit;
  for (Party g : engine::kDistributors) {
    const auto& a = outcome.assessment(g);
    auto& r = row.actors[engine::index_of(g)];
    r.actor = g;
    r.loyal = !traitors.contains(g);
    r.message_reading = a.inputs.message_reading;
    r.check_reading = a.inputs.check_reading;
    r.verdict = a.verdict;
    for (const auto& rep : a.inputs.reports) {
      r.report_statuses.push_back(rep.report.status);
      if (rep.distributor == g && rep.partner == engine::peer_of(g)) {
        row.q_hits += rep.report.uu_plus_plus;
        row.q_total += rep.report.total(hardy::Setting::U, hardy::Setting::U);
      }
    }
    row.slots[engine::index_of(g)] = slot_counts(outcome.ledgers[engine::index_of(g)]);
  }
  return row;
}

std::vector<TrialRow> run_trials_serial(const RunConfig& config) { return run_trials(config, false); }

std::vector<TrialRow> run_trials_parallel(const RunConfig& config) { return run_trials(config, true); }

Aggregates aggregate(const std::vector<TrialRow>& rows, const std::set<Party>& traitors) {
  Aggregates a;
  a.trials = rows.size();
  a.traitors.assign(traitors.begin(), traitors.end());
  const bool commander_loyal = !traitors.contains(Party::C);

  std::size_t readings = 0, readable = 0, correct = 0, flipped = 0;
  std::size_t agree = 0, followed = 0, success = 0, detected = 0, accused = 0, invalid = 0;
  for (const auto& row : rows) {
    bool all_agree = true, all_follow = true, all_correct = true, clean = true;
    bool all_detect = true, false_accusation = false, any_invalid = false;
    std::optional<int> common;
    std::size_t loyal = 0;
    for (const auto& r : row.actors) {
      auto& st = a.actors[engine::index_of(r.actor)];
      const auto bit = r.message_reading.bit();
      ++st.readings;
      if (bit) ++st.readable;
      if (bit && *bit != row.message_bit) ++st.flipped;
      if (!r.verdict.valid) ++st.invalid;
      ++st.named[r.verdict.traitor ? engine::index_of(*r.verdict.traitor) : 3];

      if (!r.loyal) continue;
      ++loyal;
      ++readings;
      if (bit) ++readable;
      if (bit && *bit == row.message_bit) ++correct;
      if (bit && *bit != row.message_bit) ++flipped;
      if (!bit || *bit != row.message_bit) all_correct = false;
      if (!r.verdict.valid) any_invalid = true;
      if (r.verdict.traitor) clean = false;
      if (!r.verdict.traitor || !traitors.contains(*r.verdict.traitor)) all_detect = false;
      if (r.verdict.traitor && !traitors.contains(*r.verdict.traitor)) false_accusation = true;
      if (!r.verdict.action || (common && *common != *r.verdict.action)) all_agree = false;
      if (r.verdict.action) common = r.verdict.action;
      if (!r.verdict.action || *r.verdict.action != row.message_bit) all_follow = false;
    }
    if (loyal == 0) all_detect = false;
    agree += all_agree;
    followed += all_follow;
    success += all_correct && clean;
    detected += all_detect;
    accused += false_accusation;
    invalid += any_invalid;
    a.q_hits += row.q_hits;
    a.q_total += row.q_total;
  }
  a.readability_rate = rate(readable, readings);
  a.correct_reading_rate = rate(correct, readings);
  a.flipped_reading_rate = rate(flipped, readable);
  a.agreement_rate = rate(agree, rows.size());
  if (commander_loyal) a.order_followed_rate = rate(followed, rows.size());
  a.honest_success_rate = rate(success, rows.size());
  if (!traitors.empty()) a.detection_power = rate(detected, rows.size());
  a.false_accusation_rate = rate(accused, rows.size());
  a.invalid_rate = rate(invalid, rows.size());
  a.q_estimate = rate(a.q_hits, a.q_total);
  a.q_interval = verify::wilson_interval(a.q_hits, a.q_total);
  return a;
}

Json to_json(const TrialRow& row) {
  Json j;
  j["trial"] = row.index;
  j["seed"] = row.seed;
  j["message_bit"] = row.message_bit;
  Json actors = Json::array();
  for (const auto& r : row.actors) {
    Json a;
    a["actor"] = party_str(r.actor);
    a["loyal"] = r.loyal;
    a["message_reading"] = verify::to_json(r.message_reading);
    a["check_reading"] = verify::to_json(r.check_reading);
    a["verdict"] = verify::to_json(r.verdict);
    Json statuses = Json::array();
    for (auto s : r.report_statuses) statuses.push_back(verify::to_string(s));
    a["reports"] = statuses;
    actors.push_back(a);
  }
  j["actors"] = actors;
  Json slots = Json::array();
  for (Party d : engine::kDistributors) {
    const auto& s = row.slots[engine::index_of(d)];
    slots.push_back(Json{{"distributor", party_str(d)},
                         {"total", s.total},
                         {"direct_to_peer", s.direct_to_peer},
                         {"direct_to_c", s.direct_to_c},
                         {"swapped_pairs", s.swapped_pairs},
                         {"discarded", s.discarded}});
  }
  j["slots"] = slots;
  j["q_hits"] = row.q_hits;
  j["q_total"] = row.q_total;
  return j;
}

TrialRow row_from_json(const Json& j) {
  TrialRow row;
  row.index = j.at("trial").get<std::size_t>();
  row.seed = j.at("seed").get<std::uint64_t>();
  row.message_bit = j.at("message_bit").get<int>();
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = j.at("actors").at(i);
    auto& r = row.actors[i];
    r.actor = party_of(a.at("actor"));
    r.loyal = a.at("loyal").get<bool>();
    r.message_reading = reading_from_json(a.at("message_reading"));
    r.check_reading = reading_from_json(a.at("check_reading"));
    r.verdict = verdict_from_json(a.at("verdict"));
    for (const auto& s : a.at("reports")) r.report_statuses.push_back(status_from(s.get<std::string>()));
    const auto& s = j.at("slots").at(i);
    auto& counts = row.slots[i];
    counts.total = s.at("total").get<std::size_t>();
    counts.direct_to_peer = s.at("direct_to_peer").get<std::size_t>();
    counts.direct_to_c = s.at("direct_to_c").get<std::size_t>();
    counts.swapped_pairs = s.at("swapped_pairs").get<std::size_t>();
    counts.discarded = s.at("discarded").get<std::size_t>();
  }
  row.q_hits = j.at("q_hits").get<std::size_t>();
  row.q_total = j.at("q_total").get<std::size_t>();
  return row;
}

Json to_json(const Aggregates& a) {
  Json j;
  j["trials"] = a.trials;
  Json traitors = Json::array();
  for (Party p : a.traitors) traitors.push_back(party_str(p));
  j["traitors"] = traitors;
  j["readability_rate"] = a.readability_rate;
  j["correct_reading_rate"] = a.correct_reading_rate;
  j["flipped_reading_rate"] = a.flipped_reading_rate;
  j["agreement_rate"] = a.agreement_rate;
  j["order_followed_rate"] = optional_number(a.order_followed_rate);
  j["honest_success_rate"] = a.honest_success_rate;
  j["detection_power"] = optional_number(a.detection_power);
  j["false_accusation_rate"] = a.false_accusation_rate;
  j["invalid_rate"] = a.invalid_rate;
  j["q_hits"] = a.q_hits;
  j["q_total"] = a.q_total;
  j["q_estimate"] = a.q_estimate;
  j["q_interval"] = Json::array({a.q_interval.lower, a.q_interval.upper});
  Json actors;
  for (Party g : engine::kDistributors) {
    const auto& st = a.actors[engine::index_of(g)];
    Json s;
    s["readings"] = st.readings;
    s["readable"] = st.readable;
    s["flipped"] = st.flipped;
    s["invalid"] = st.invalid;
    s["named"] = Json{{"A", st.named[0]}, {"B", st.named[1]}, {"C", st.named[2]}, {"none", st.named[3]}};
    actors[party_str(g)] = s;
  }
  j["per_actor"] = actors;
  return j;
}

Json build_report(const RunConfig& config, const std::vector<TrialRow>& rows) {
  const auto model = model_for(config);
  const auto traitors = adversary::make_scenario(config.scenario, scenario_options(config)).traitors;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = to_json(config);
  j["model"] = Json{{"alpha", config.alpha}, {"q", model.q}};
  j["aggregates"] = to_json(aggregate(rows, traitors));
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  j["trials"] = arr;
  return j;
}

void write_summary_csv(std::ostream& out, const RunConfig& config, const Aggregates& a) {
  out << "scenario,n,alpha,trials,seed," << kAggregateCsvColumns << '\n';
  out << config.scenario << ',' << config.n << ',' << csv_number(config.alpha) << ',' << a.trials << ','
      << config.seed << ',';
  write_aggregate_cells(out, a);
  out << '\n';
}

void write_transcript(std::ostream& out, const RunConfig& config, std::size_t index,
                      const engine::ProtocolOutcome& outcome) {
  Json header;
  header["type"] = "header";
  header["schema_version"] = kSchemaVersion;
  header["trial"] = index;
  header["seed"] = trial_seed(config, index);
  header["message_bit"] = outcome.message_bit;
  header["config"] = to_json(config);
  out << header.dump() << '\n';
  engine::write_events(out, outcome.session.transcript().events());
  for (Party g : engine::kDistributors) {
    Json v;
    v["type"] = "verdict";
    v["actor"] = party_str(g);
    v["assessment"] = verify::to_json(outcome.assessment(g));
    out << v.dump() << '\n';
  }
  out << engine::audit_to_json(outcome.session.transcript().audit()).dump() << '\n';
}

std::vector<SweepCell> run_sweep(const RunConfig& base, const SweepGrid& grid, bool parallel) {
  if (grid.n_values.empty() && grid.alpha_values.empty() && grid.scenarios.empty()) {
    throw ConfigError("sweep grid is empty: give n_values, alpha_values or scenarios");
  }
  const auto scenarios = grid.scenarios.empty() ? std::vector<std::string>{base.scenario} : grid.scenarios;
  const auto ns = grid.n_values.empty() ? std::vector<int>{base.n} : grid.n_values;
  const auto alphas = grid.alpha_values.empty() ? std::vector<double>{base.alpha} : grid.alpha_values;

  std::vector<SweepCell> cells;
  for (const auto& sc : scenarios) {
    for (int n : ns) {
      for (double alpha : alphas) {
        RunConfig cfg = base;
        cfg.scenario = sc;
        cfg.n = n;
        cfg.alpha = alpha;
        cfg.seed = qcore::derive_seed(base.seed, cells.size());
        cfg.validate();
        cells.push_back(SweepCell{cells.size(), sc, n, alpha, cfg.seed, {}});
      }
    }
  }
  for (auto& cell : cells) {
    RunConfig cfg = base;
    cfg.scenario = cell.scenario;
    cfg.n = cell.n;
    cfg.alpha = cell.alpha;
    cfg.seed = cell.seed;
    const auto rows = parallel ? run_trials_parallel(cfg) : run_trials_serial(cfg);
    cell.aggregates = aggregate(rows, adversary::make_scenario(cfg.scenario, scenario_options(cfg)).traitors);
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "cell,scenario,n,alpha,q,seed,trials," << kAggregateCsvColumns << '\n';
  for (const auto& c : cells) {
    const auto model = hardy::build_symmetric_model(c.alpha);
    out << c.index << ',' << c.scenario << ',' << c.n << ',' << csv_number(c.alpha) << ','
        << csv_number(model.q) << ',' << c.seed << ',' << c.aggregates.trials << ',';
    write_aggregate_cells(out, c.aggregates);
    out << '\n';
  }
}

engine::PartyView rebuild_view(Party role, const std::vector<engine::Event>& events) {
  engine::PartyView view(role);
  std::map<Party, std::vector<std::pair<engine::RunId, hardy::Outcome>>> own;
  for (const auto& e : events) {
    view.observe(e);
    if (const auto* a = std::get_if<engine::AnnounceEvent>(&e); a && a->party == role) {
      own[a->distributor].emplace_back(a->run, a->outcome);
    }
  }
  for (Party d : engine::kDistributors) {
    std::vector<engine::RunId> runs;
    for (const auto& [run, o] : own[d]) runs.push_back(run);
    view.receive_runs(d, runs);
    engine::SettingPlan plan;
    plan.distributor = d;
    for (const auto& [key, s] : view.sub(d).disclosed_settings) {
      if (key.second == role) plan.settings.emplace_back(key.first, s);
    }
    view.record_plan(plan);
    for (const auto& [run, o] : own[d]) {
      if (view.sub(d).own_settings.contains(run)) view.record_outcome(d, run, o);
    }
  }
  return view;
}

ReplayResult replay(std::istream& in) {
  std::optional<Json> header;
  std::vector<engine::Event> events;
  std::map<std::string, Json> stored;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = Json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      header = j;
    } else if (type == "verdict") {
      stored[j.at("actor").get<std::string>()] = j.at("assessment");
    } else if (type != "audit") {
      events.push_back(engine::event_from_json(j));
    }
  }
  if (!header) throw ConfigError("transcript has no header line");
  const auto config = config_from_json(header->at("config"));
  const auto params =
      protocol_config(config, header->at("seed").get<std::uint64_t>(), header->at("message_bit").get<int>())
          .verify;

  ReplayResult result;
  for (Party g : engine::kDistributors) {
    auto& a = result.recomputed[engine::index_of(g)];
    a = verify::assess(rebuild_view(g, events), params);
    const auto it = stored.find(party_str(g));
    if (it == stored.end()) {
      result.match = false;
      result.mismatches.push_back("no stored verdict for " + party_str(g));
    } else if (verify::to_json(a) != it->second) {
      result.match = false;
      result.mismatches.push_back("verdict of " + party_str(g) + " differs");
    }
  }
  return result;
}

}  // namespace qba::harness
