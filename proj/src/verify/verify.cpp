#include "qba/verify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qba::verify {

namespace {

using engine::PairLink;
using engine::RunId;

std::optional<Outcome> own_outcome(const PartyView& view, Party distributor, RunId run) {
  const auto& k = view.sub(distributor);
  if (auto it = k.own_outcomes.find(run); it != k.own_outcomes.end()) return it->second;
  return view.announced(distributor, run, view.role());
}

/// The run `who` holds in `link` and the partner's side, if `who` is on it.
struct LinkSide {
  RunId own_run;
  Party partner;
  RunId partner_run;
};

std::optional<LinkSide> side_of(const PairLink& link, Party who) {
  if (link.first == who) return LinkSide{link.first_run, link.second, link.second_run};
  if (link.second == who) return LinkSide{link.second_run, link.first, link.first_run};
  return std::nullopt;
}

std::optional<Setting> message_basis(const MessageReading& r) {
  const auto b = r.bit();
  if (!b) return std::nullopt;
  return *b == 0 ? Setting::U : Setting::D;
}

Json party_or_null(const std::optional<Party>& p) {
  return p ? Json(std::string(engine::to_string(*p))) : Json(nullptr);
}

}  // namespace

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

bool forbidden(Setting s1, Setting s2, Outcome o1, Outcome o2) {
  if (s1 == Setting::D && s2 == Setting::D) return o1 == Outcome::Minus && o2 == Outcome::Minus;
  if (s1 != s2) return o1 == Outcome::Plus && o2 == Outcome::Plus;
  return false;
}

std::string_view to_string(ReadingValue v) {
  switch (v) {
    case ReadingValue::Zero:
      return "0";
    case ReadingValue::One:
      return "1";
    case ReadingValue::Unreadable:
      return "unreadable";
  }
  return "?";
}

std::string_view to_string(UnreadableReason r) {
  switch (r) {
    case UnreadableReason::None:
      return "none";
    case UnreadableReason::BothFalsified:
      return "both-falsified";
    case UnreadableReason::InsufficientEvidence:
      return "insufficient-evidence";
    case UnreadableReason::NoRuns:
      return "no-runs";
  }
  return "?";
}

std::string_view to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::Pass:
      return "pass";
    case ReportStatus::Fail:
      return "fail";
    case ReportStatus::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::optional<int> MessageReading::bit() const {
  switch (value) {
    case ReadingValue::Zero:
      return 0;
    case ReadingValue::One:
      return 1;
    case ReadingValue::Unreadable:
      break;
  }
  return std::nullopt;
}

MessageReading decide_reading(std::span<const ReaderRun> runs, std::size_t k_min) {
  MessageReading r;
  r.runs_used = runs.size();
  for (const auto& run : runs) {
    if (forbidden(run.reader_setting, Setting::U, run.reader_outcome, run.commander_outcome)) {
      ++r.violations_if_u;
    }
    if (forbidden(run.reader_setting, Setting::D, run.reader_outcome, run.commander_outcome)) {
      ++r.violations_if_d;
    }
  }
  if (runs.empty()) {
    r.reason = UnreadableReason::NoRuns;
    return r;
  }
  const std::size_t threshold = std::max<std::size_t>(k_min, 1);
  const bool u_falsified = r.violations_if_u >= threshold;
  const bool d_falsified = r.violations_if_d >= threshold;
  if (r.violations_if_u == 0 && d_falsified) {
    r.value = ReadingValue::Zero;
    r.reason = UnreadableReason::None;
  } else if (r.violations_if_d == 0 && u_falsified) {
    r.value = ReadingValue::One;
    r.reason = UnreadableReason::None;
  } else if (u_falsified && d_falsified) {
    r.reason = UnreadableReason::BothFalsified;
  } else {
    r.reason = UnreadableReason::InsufficientEvidence;
  }
  return r;
}

MessageReading read_message(const PartyView& view, Party distributor, std::size_t k_min) {
  const Party reader = view.role();
  if (reader == Party::C) throw std::invalid_argument("the commander does not read its own message");
  const auto& k = view.sub(distributor);
  std::vector<ReaderRun> runs;
  if (k.links && k.lists) {
    const std::set<RunId> message_runs(k.lists->first.begin(), k.lists->first.end());
    for (const auto& link : *k.links) {
      const auto side = side_of(link, reader);
      if (!side || side->partner != Party::C || !message_runs.contains(side->partner_run)) continue;
      const auto s = view.setting_of(distributor, side->own_run, reader);
      const auto o = own_outcome(view, distributor, side->own_run);
      const auto c = view.announced(distributor, side->partner_run, Party::C);
      if (!s || !o || !c) continue;
      runs.push_back(ReaderRun{*s, *o, *c});
    }
  }
  return decide_reading(runs, k_min);
}

HardyReport hardy_test(std::span<const JointRecord> data, const HardyTestParams& params) {
  HardyReport r;
  r.runs = data.size();
  for (const auto& d : data) {
    ++r.counts[hardy::ProbabilityTable::index(d.s1, d.s2, d.o1, d.o2)];
    ++r.setting_totals[static_cast<std::size_t>(d.s1) * 2 + static_cast<std::size_t>(d.s2)];
    const bool pp = d.o1 == Outcome::Plus && d.o2 == Outcome::Plus;
    const bool mm = d.o1 == Outcome::Minus && d.o2 == Outcome::Minus;
    if (d.s1 == Setting::D && d.s2 == Setting::D && mm) ++r.dd_minus_minus;
    if (d.s1 == Setting::D && d.s2 == Setting::U && pp) ++r.du_plus_plus;
    if (d.s1 == Setting::U && d.s2 == Setting::D && pp) ++r.ud_plus_plus;
    if (d.s1 == Setting::U && d.s2 == Setting::U && pp) ++r.uu_plus_plus;
  }
  const std::size_t uu = r.total(Setting::U, Setting::U);
  r.q_estimate = uu == 0 ? 0.0 : static_cast<double>(r.uu_plus_plus) / static_cast<double>(uu);
  r.q_interval = wilson_interval(r.uu_plus_plus, uu);

  if (r.runs < params.min_runs) {
    r.status = ReportStatus::Inconclusive;
    r.reason = "fewer than " + std::to_string(params.min_runs) + " runs";
    return r;
  }
  auto exceeds = [&](std::size_t violations, Setting s1, Setting s2) {
    return static_cast<double>(violations) > params.epsilon * static_cast<double>(r.total(s1, s2));
  };
  std::vector<std::string> broken;
  if (exceeds(r.dd_minus_minus, Setting::D, Setting::D)) broken.emplace_back("D,D,-,-");
  if (exceeds(r.du_plus_plus, Setting::D, Setting::U)) broken.emplace_back("D,U,+,+");
  if (exceeds(r.ud_plus_plus, Setting::U, Setting::D)) broken.emplace_back("U,D,+,+");
  r.q_checked = params.q_reference * static_cast<double>(uu) >= params.q_guard;
  if (r.q_checked && r.uu_plus_plus == 0) broken.emplace_back("no U,U,+,+ event");
  if (broken.empty()) {
    r.status = ReportStatus::Pass;
    return r;
  }
  r.status = ReportStatus::Fail;
  for (std::size_t i = 0; i < broken.size(); ++i) {
    r.reason += (i ? "; " : "") + broken[i];
  }
  return r;
}

std::vector<LabeledReport> build_reports(const PartyView& view, const MessageReading& message,
                                         const MessageReading& check, const HardyTestParams& params) {
  const Party g = view.role();
  if (g == Party::C) throw std::invalid_argument("reports are built for lieutenants only");
  const Party p = engine::peer_of(g);

  struct Category {
    Party distributor;
    Party partner;
    bool swapped;
    std::vector<JointRecord> data;
  };
  std::array<Category, 4> cats{{
      {g, Party::C, false, {}},
      {g, p, false, {}},
      {p, Party::C, true, {}},
      {p, p, false, {}},
  }};

  for (Party d : {g, p}) {
    const auto& k = view.sub(d);
    if (!k.links) continue;
    const auto inferred = message_basis(d == g ? check : message);
    std::set<RunId> l, l1;
    if (k.lists) {
      l.insert(k.lists->first.begin(), k.lists->first.end());
      l1.insert(k.lists->second.begin(), k.lists->second.end());
    }
    for (const auto& link : *k.links) {
      const auto side = side_of(link, g);
      if (!side) continue;
      const bool swapped = link.first_run != link.second_run;
      auto cat = std::find_if(cats.begin(), cats.end(), [&](const Category& c) {
        return c.distributor == d && c.partner == side->partner && c.swapped == swapped;
      });
      if (cat == cats.end()) continue;

      const auto s1 = view.setting_of(d, side->own_run, g);
      const auto o1 = own_outcome(view, d, side->own_run);
      std::optional<Setting> s2;
      if (side->partner == Party::C && l.contains(side->partner_run)) {
        s2 = inferred;
      } else if (side->partner != Party::C || l1.contains(side->partner_run)) {
        s2 = view.setting_of(d, side->partner_run, side->partner);
      }
      const auto o2 = view.announced(d, side->partner_run, side->partner);
      if (!s1 || !o1 || !s2 || !o2) continue;
      cat->data.push_back(JointRecord{*s1, *s2, *o1, *o2});
    }
  }

  std::vector<LabeledReport> out;
  out.reserve(cats.size());
  for (const auto& c : cats) {
    out.push_back(LabeledReport{c.distributor, c.partner, c.swapped, hardy_test(c.data, params)});
  }
  return out;
}

Verdict decide(const VerdictInputs& in, int fallback_bit) {
  const Party g = in.actor;
  const Party p = engine::peer_of(g);
  Verdict v;
  v.actor = g;

  auto conclude = [&](std::optional<Party> traitor, std::optional<int> action, std::string rule) {
    v.traitor = traitor;
    v.action = action;
    v.rule = std::move(rule);
    return v;
  };

  if (std::any_of(in.reports.begin(), in.reports.end(), [](const LabeledReport& r) {
        return r.report.status == ReportStatus::Inconclusive;
      })) {
    v.valid = false;
    return conclude(std::nullopt, std::nullopt, "invalid");
  }

  auto own_commander = [&](const LabeledReport& r) {
    return r.distributor == g && r.partner == Party::C;
  };
  const bool peer_failure = std::any_of(in.reports.begin(), in.reports.end(), [&](const LabeledReport& r) {
    return r.report.status == ReportStatus::Fail && !own_commander(r);
  });
  if (peer_failure) {
    return conclude(p, in.check_reading.bit().value_or(fallback_bit), "peer-hardy-failure");
  }
  const bool commander_failure = std::any_of(in.reports.begin(), in.reports.end(), [&](const LabeledReport& r) {
    return r.report.status == ReportStatus::Fail && own_commander(r);
  });
  if (commander_failure) return conclude(Party::C, fallback_bit, "commander-hardy-failure");

  if (!in.message_reading.readable() || !in.check_reading.readable()) {
    return conclude(Party::C, fallback_bit, "unreadable");
  }
  const int message = *in.message_reading.bit();
  if (message != *in.check_reading.bit()) return conclude(Party::C, fallback_bit, "readings-disagree");

  const bool confirmed = in.confirmation && *in.confirmation && **in.confirmation == message;
  if (!confirmed) {
    v.peer_link_fault = true;
    return conclude(p, message, "confirmation-mismatch");
  }
  return conclude(std::nullopt, message, "consensus");
}

Assessment assess(const PartyView& view, const VerifyParams& params) {
  const Party g = view.role();
  if (g == Party::C) throw std::invalid_argument("verdicts are issued by lieutenants only");
  Assessment a;
  a.inputs.actor = g;
  a.inputs.message_reading = read_message(view, engine::peer_of(g), params.k_min);
  a.inputs.check_reading = read_message(view, g, params.k_min);
  a.inputs.reports = build_reports(view, a.inputs.message_reading, a.inputs.check_reading, params.hardy);
  a.inputs.confirmation = view.confirmation();
  a.verdict = decide(a.inputs, params.fallback_bit);
  return a;
}

Json to_json(const MessageReading& r) {
  Json j;
  j["value"] = to_string(r.value);
  j["reason"] = to_string(r.reason);
  j["violations_if_u"] = r.violations_if_u;
  j["violations_if_d"] = r.violations_if_d;
  j["runs_used"] = r.runs_used;
  return j;
}

Json to_json(const HardyReport& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["reason"] = r.reason;
  j["runs"] = r.runs;
  j["setting_totals"] = Json{{"UU", r.setting_totals[0]},
                             {"UD", r.setting_totals[1]},
                             {"DU", r.setting_totals[2]},
                             {"DD", r.setting_totals[3]}};
  j["dd_minus_minus"] = r.dd_minus_minus;
  j["du_plus_plus"] = r.du_plus_plus;
  j["ud_plus_plus"] = r.ud_plus_plus;
  j["uu_plus_plus"] = r.uu_plus_plus;
  j["q_estimate"] = r.q_estimate;
  j["q_interval"] = Json::array({r.q_interval.lower, r.q_interval.upper});
  j["q_checked"] = r.q_checked;
  return j;
}

Json to_json(const LabeledReport& r) {
  Json j;
  j["distributor"] = engine::to_string(r.distributor);
  j["partner"] = engine::to_string(r.partner);
  j["swapped"] = r.swapped;
  j["report"] = to_json(r.report);
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["actor"] = engine::to_string(v.actor);
  j["valid"] = v.valid;
  j["action"] = v.action ? Json(*v.action) : Json(nullptr);
  j["traitor"] = party_or_null(v.traitor);
  j["peer_link_fault"] = v.peer_link_fault;
  j["rule"] = v.rule;
  return j;
}

Json to_json(const Assessment& a) {
  Json j;
  j["actor"] = engine::to_string(a.inputs.actor);
  j["message_reading"] = to_json(a.inputs.message_reading);
  j["check_reading"] = to_json(a.inputs.check_reading);
  Json reports = Json::array();
  for (const auto& r : a.inputs.reports) reports.push_back(to_json(r));
  j["reports"] = reports;
  const auto& c = a.inputs.confirmation;
  j["confirmation_received"] = c.has_value();
  j["confirmation"] = (c && *c) ? Json(**c) : Json(nullptr);
  j["verdict"] = to_json(a.verdict);
  return j;
}

}  // namespace qba::verify
