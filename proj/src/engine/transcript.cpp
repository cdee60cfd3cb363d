#include "qba/engine/transcript.hpp"

#include <ostream>
#include <string>

namespace qba::engine {

namespace {

Party party_field(const Json& j, const char* key) {
  const auto p = party_from_string(j.at(key).get<std::string>());
  if (!p) {
    throw std::invalid_argument(std::string("bad party in field ") + key);
  }
  return *p;
}

Setting setting_from(const std::string& s) {
  if (s == "U") return Setting::U;
  if (s == "D") return Setting::D;
  throw std::invalid_argument("bad setting " + s);
}

Outcome outcome_from(int v) {
  if (v == 1) return Outcome::Plus;
  if (v == -1) return Outcome::Minus;
  throw std::invalid_argument("bad outcome " + std::to_string(v));
}

Json settings_to_json(const std::vector<std::pair<RunId, Setting>>& settings) {
  Json arr = Json::array();
  for (const auto& [run, s] : settings) {
    arr.push_back(Json::array({run, std::string(hardy::to_string(s))}));
  }
  return arr;
}

std::vector<std::pair<RunId, Setting>> settings_from_json(const Json& j) {
  std::vector<std::pair<RunId, Setting>> out;
  for (const auto& item : j) {
    out.emplace_back(item.at(0).get<RunId>(), setting_from(item.at(1).get<std::string>()));
  }
  return out;
}

}  // namespace

std::string_view to_string(Party p) {
  switch (p) {
    case Party::A:
      return "A";
    case Party::B:
      return "B";
    case Party::C:
      return "C";
  }
  return "?";
}

std::optional<Party> party_from_string(std::string_view s) {
  if (s == "A") return Party::A;
  if (s == "B") return Party::B;
  if (s == "C") return Party::C;
  return std::nullopt;
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Idle:
      return "idle";
    case Phase::Distributed:
      return "distributed";
    case Phase::Announced:
      return "announced";
    case Phase::ListsDisclosed:
      return "lists-disclosed";
    case Phase::LinksRevealed:
      return "links-revealed";
    case Phase::SettingsDisclosed:
      return "settings-disclosed";
  }
  return "?";
}

void Transcript::require(Party distributor, Phase expected, std::string_view what) const {
  const Phase actual = phase(distributor);
  if (actual != expected) {
    throw ProtocolAbort(std::string(what) + " in sub-protocol " + std::string(to_string(distributor)) +
                        " requires phase " + std::string(to_string(expected)) + ", found " +
                        std::string(to_string(actual)));
  }
}

void Transcript::append(Event event) {
  std::visit(
      [this](auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, DiscardEvent>) {
          require(e.distributor, Phase::Idle, "discard list");
          phases_[index_of(e.distributor)] = Phase::Distributed;
        } else if constexpr (std::is_same_v<T, AnnounceEvent>) {
          require(e.distributor, Phase::Distributed, "announcement");
          e.seq = next_seq_++;
        } else if constexpr (std::is_same_v<T, ListEvent>) {
          require(e.distributor, Phase::Announced, "list disclosure");
          phases_[index_of(e.distributor)] = Phase::ListsDisclosed;
        } else if constexpr (std::is_same_v<T, LinkEvent>) {
          require(e.distributor, Phase::ListsDisclosed, "link revelation");
          phases_[index_of(e.distributor)] = Phase::LinksRevealed;
        } else if constexpr (std::is_same_v<T, SettingEvent>) {
          require(e.distributor, Phase::LinksRevealed, "setting disclosure");
        } else if constexpr (std::is_same_v<T, ConfirmEvent>) {
          require(Party::A, Phase::SettingsDisclosed, "classical confirmation");
          require(Party::B, Phase::SettingsDisclosed, "classical confirmation");
        }
      },
      event);
  events_.push_back(std::move(event));
}

void Transcript::close_announcements(Party distributor) {
  require(distributor, Phase::Distributed, "closing announcements");
  phases_[index_of(distributor)] = Phase::Announced;
}

void Transcript::close_settings(Party distributor) {
  require(distributor, Phase::LinksRevealed, "closing setting disclosure");
  phases_[index_of(distributor)] = Phase::SettingsDisclosed;
}

Json links_to_json(const std::vector<PairLink>& links) {
  Json arr = Json::array();
  for (const auto& l : links) {
    arr.push_back(Json::array({std::string(to_string(l.first)), l.first_run,
                               std::string(to_string(l.second)), l.second_run}));
  }
  return arr;
}

std::vector<PairLink> links_from_json(const Json& j) {
  std::vector<PairLink> out;
  for (const auto& item : j) {
    const auto first = party_from_string(item.at(0).get<std::string>());
    const auto second = party_from_string(item.at(2).get<std::string>());
    if (!first || !second) {
      throw std::invalid_argument("bad party in link");
    }
    out.push_back(PairLink{*first, item.at(1).get<RunId>(), *second, item.at(3).get<RunId>()});
  }
  return out;
}

Json event_to_json(const Event& event) {
  return std::visit(
      [](const auto& e) -> Json {
        using T = std::decay_t<decltype(e)>;
        Json j;
        if constexpr (std::is_same_v<T, DiscardEvent>) {
          j["type"] = "discard";
          j["distributor"] = to_string(e.distributor);
          j["r1"] = e.r1;
          j["r2"] = e.r2;
        } else if constexpr (std::is_same_v<T, AnnounceEvent>) {
          j["type"] = "announce";
          j["seq"] = e.seq;
          j["distributor"] = to_string(e.distributor);
          j["run"] = e.run;
          j["party"] = to_string(e.party);
          j["outcome"] = hardy::sign_of(e.outcome);
          j["position"] = e.position;
        } else if constexpr (std::is_same_v<T, ListEvent>) {
          j["type"] = "lists";
          j["distributor"] = to_string(e.distributor);
          j["L"] = e.message_runs;
          j["L1"] = e.test_runs;
        } else if constexpr (std::is_same_v<T, LinkEvent>) {
          j["type"] = "links";
          j["distributor"] = to_string(e.distributor);
          j["links"] = links_to_json(e.links);
        } else if constexpr (std::is_same_v<T, SettingEvent>) {
          j["type"] = "settings";
          j["distributor"] = to_string(e.distributor);
          j["party"] = to_string(e.party);
          j["settings"] = settings_to_json(e.settings);
        } else if constexpr (std::is_same_v<T, ConfirmEvent>) {
          j["type"] = "confirm";
          j["from"] = to_string(e.from);
          j["to"] = to_string(e.to);
          j["bit"] = e.bit ? Json(*e.bit) : Json(nullptr);
        }
        return j;
      },
      event);
}

Event event_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "discard") {
    return DiscardEvent{party_field(j, "distributor"), j.at("r1").get<std::vector<RunId>>(),
                        j.at("r2").get<std::vector<RunId>>()};
  }
  if (type == "announce") {
    return AnnounceEvent{j.at("seq").get<std::uint64_t>(), party_field(j, "distributor"),
                         j.at("run").get<RunId>(),          party_field(j, "party"),
                         outcome_from(j.at("outcome").get<int>()), j.at("position").get<int>()};
  }
  if (type == "lists") {
    return ListEvent{party_field(j, "distributor"), j.at("L").get<std::vector<RunId>>(),
                     j.at("L1").get<std::vector<RunId>>()};
  }
  if (type == "links") {
    return LinkEvent{party_field(j, "distributor"), links_from_json(j.at("links"))};
  }
  if (type == "settings") {
    return SettingEvent{party_field(j, "distributor"), party_field(j, "party"),
                        settings_from_json(j.at("settings"))};
  }
  if (type == "confirm") {
    std::optional<int> bit;
    if (!j.at("bit").is_null()) bit = j.at("bit").get<int>();
    return ConfirmEvent{party_field(j, "from"), party_field(j, "to"), bit};
  }
  throw std::invalid_argument("unknown event type " + type);
}

void write_events(std::ostream& out, const std::vector<Event>& events) {
  for (const auto& e : events) {
    out << event_to_json(e).dump() << '\n';
  }
}

Json audit_to_json(const AuditRecord& audit) {
  Json j;
  j["type"] = "audit";
  j["message_bit"] = audit.message_bit ? Json(*audit.message_bit) : Json(nullptr);
  Json sent = Json::array();
  for (const auto& s : audit.sent_confirmations) sent.push_back(s ? Json(*s) : Json(nullptr));
  j["sent_confirmations"] = sent;
  for (Party d : kDistributors) {
    const auto& sub = audit.of(d);
    Json s;
    s["true_links"] = links_to_json(sub.true_links);
    s["phony_runs"] = sub.phony_runs;
    s["honest_swaps"] = sub.honest_swaps;
    s["cheat_swaps"] = sub.cheat_swaps;
    std::vector<std::pair<RunId, Setting>> cs(sub.c_settings.begin(), sub.c_settings.end());
    s["c_settings"] = settings_to_json(cs);
    j[std::string("sub_") + std::string(to_string(d))] = s;
  }
  return j;
}

}  // namespace qba::engine
