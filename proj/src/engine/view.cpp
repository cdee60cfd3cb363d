#include "qba/engine/view.hpp"

#include <algorithm>
#include <string>

namespace qba::engine {

namespace {

Setting setting_from(const std::string& s) { return s == "U" ? Setting::U : Setting::D; }
Outcome outcome_from(int v) { return v > 0 ? Outcome::Plus : Outcome::Minus; }
Party party_from(const Json& j) {
  const auto p = party_from_string(j.get<std::string>());
  if (!p) throw std::invalid_argument("bad party in view");
  return *p;
}
std::string str(Setting s) { return std::string(hardy::to_string(s)); }
std::string str(Party p) { return std::string(to_string(p)); }

Json sub_to_json(const SubKnowledge& k) {
  Json j;
  j["own_runs"] = k.own_runs;
  j["consumed"] = k.consumed;
  j["true_links"] = k.true_links ? links_to_json(*k.true_links) : Json(nullptr);
  Json own_settings = Json::array();
  for (const auto& [run, s] : k.own_settings) own_settings.push_back(Json::array({run, str(s)}));
  j["own_settings"] = own_settings;
  Json own_outcomes = Json::array();
  for (const auto& [run, o] : k.own_outcomes) {
    own_outcomes.push_back(Json::array({run, hardy::sign_of(o)}));
  }
  j["own_outcomes"] = own_outcomes;
  j["own_message_runs"] = k.own_message_runs;
  j["own_test_runs"] = k.own_test_runs;
  j["distributed"] = k.distributed;
  j["discarded"] = k.discarded;
  Json ann = Json::array();
  for (const auto& [key, o] : k.announcements) {
    ann.push_back(Json::array({key.first, str(key.second), hardy::sign_of(o)}));
  }
  j["announcements"] = ann;
  if (k.lists) {
    j["lists"] = Json{{"L", k.lists->first}, {"L1", k.lists->second}};
  } else {
    j["lists"] = nullptr;
  }
  j["links"] = k.links ? links_to_json(*k.links) : Json(nullptr);
  Json disclosed = Json::array();
  for (const auto& [key, s] : k.disclosed_settings) {
    disclosed.push_back(Json::array({key.first, str(key.second), str(s)}));
  }
  j["disclosed_settings"] = disclosed;
  return j;
}

SubKnowledge sub_from_json(const Json& j) {
  SubKnowledge k;
  k.own_runs = j.at("own_runs").get<std::set<RunId>>();
  k.consumed = j.at("consumed").get<std::set<RunId>>();
  if (!j.at("true_links").is_null()) k.true_links = links_from_json(j.at("true_links"));
  for (const auto& item : j.at("own_settings")) {
    k.own_settings[item.at(0).get<RunId>()] = setting_from(item.at(1).get<std::string>());
  }
  for (const auto& item : j.at("own_outcomes")) {
    k.own_outcomes[item.at(0).get<RunId>()] = outcome_from(item.at(1).get<int>());
  }
  k.own_message_runs = j.at("own_message_runs").get<std::vector<RunId>>();
  k.own_test_runs = j.at("own_test_runs").get<std::vector<RunId>>();
  k.distributed = j.at("distributed").get<bool>();
  k.discarded = j.at("discarded").get<std::set<RunId>>();
  for (const auto& item : j.at("announcements")) {
    k.announcements[{item.at(0).get<RunId>(), party_from(item.at(1))}] =
        outcome_from(item.at(2).get<int>());
  }
  if (!j.at("lists").is_null()) {
    k.lists = std::make_pair(j.at("lists").at("L").get<std::vector<RunId>>(),
                             j.at("lists").at("L1").get<std::vector<RunId>>());
  }
  if (!j.at("links").is_null()) k.links = links_from_json(j.at("links"));
  for (const auto& item : j.at("disclosed_settings")) {
    k.disclosed_settings[{item.at(0).get<RunId>(), party_from(item.at(1))}] =
        setting_from(item.at(2).get<std::string>());
  }
  return k;
}

}  // namespace

bool operator==(const SubKnowledge& a, const SubKnowledge& b) {
  return a.own_runs == b.own_runs && a.consumed == b.consumed && a.true_links == b.true_links &&
         a.own_settings == b.own_settings && a.own_outcomes == b.own_outcomes &&
         a.own_message_runs == b.own_message_runs && a.own_test_runs == b.own_test_runs &&
         a.distributed == b.distributed && a.discarded == b.discarded &&
         a.announcements == b.announcements && a.lists == b.lists && a.links == b.links &&
         a.disclosed_settings == b.disclosed_settings;
}

bool PartyView::operator==(const PartyView& other) const {
  return role_ == other.role_ && subs_ == other.subs_ && confirmation_ == other.confirmation_;
}

std::vector<RunId> PartyView::measurable_runs(Party distributor) const {
  const auto& k = sub(distributor);
  std::vector<RunId> out;
  for (RunId r : k.own_runs) {
    if (!k.discarded.contains(r) && !k.consumed.contains(r)) out.push_back(r);
  }
  return out;
}

std::optional<Setting> PartyView::setting_of(Party distributor, RunId run, Party party) const {
  const auto& k = sub(distributor);
  if (party == role_) {
    if (auto it = k.own_settings.find(run); it != k.own_settings.end()) return it->second;
  }
  if (auto it = k.disclosed_settings.find({run, party}); it != k.disclosed_settings.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::optional<Outcome> PartyView::announced(Party distributor, RunId run, Party party) const {
  const auto& k = sub(distributor);
  if (auto it = k.announcements.find({run, party}); it != k.announcements.end()) {
    return it->second;
  }
  return std::nullopt;
}

void PartyView::receive_runs(Party distributor, const std::vector<RunId>& runs) {
  auto& k = mut(distributor);
  k.own_runs.insert(runs.begin(), runs.end());
}

void PartyView::receive_distribution_secret(std::set<RunId> consumed,
                                            std::vector<PairLink> true_links) {
  auto& k = mut(role_);
  k.consumed = std::move(consumed);
  k.true_links = std::move(true_links);
}

void PartyView::record_plan(const SettingPlan& plan) {
  auto& k = mut(plan.distributor);
  for (const auto& [run, s] : plan.settings) k.own_settings[run] = s;
  k.own_message_runs = plan.message_runs;
  k.own_test_runs = plan.test_runs;
}

void PartyView::record_outcome(Party distributor, RunId run, Outcome outcome) {
  mut(distributor).own_outcomes[run] = outcome;
}

void PartyView::observe(const Event& event) {
  std::visit(
      [this](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, DiscardEvent>) {
          auto& k = mut(e.distributor);
          k.distributed = true;
          k.discarded.insert(e.r1.begin(), e.r1.end());
          k.discarded.insert(e.r2.begin(), e.r2.end());
        } else if constexpr (std::is_same_v<T, AnnounceEvent>) {
          mut(e.distributor).announcements[{e.run, e.party}] = e.outcome;
        } else if constexpr (std::is_same_v<T, ListEvent>) {
          mut(e.distributor).lists = std::make_pair(e.message_runs, e.test_runs);
        } else if constexpr (std::is_same_v<T, LinkEvent>) {
          mut(e.distributor).links = e.links;
        } else if constexpr (std::is_same_v<T, SettingEvent>) {
          auto& k = mut(e.distributor);
          for (const auto& [run, s] : e.settings) k.disclosed_settings[{run, e.party}] = s;
        } else if constexpr (std::is_same_v<T, ConfirmEvent>) {
          if (e.to == role_) confirmation_ = e.bit;
        }
      },
      event);
}

Json PartyView::to_json() const {
  Json j;
  j["role"] = str(role_);
  Json conf;
  conf["received"] = confirmation_.has_value();
  conf["bit"] = (confirmation_ && *confirmation_) ? Json(**confirmation_) : Json(nullptr);
  j["confirmation"] = conf;
  j["sub_A"] = sub_to_json(subs_[0]);
  j["sub_B"] = sub_to_json(subs_[1]);
  return j;
}

PartyView PartyView::from_json(const Json& j) {
  PartyView v(party_from(j.at("role")));
  const auto& conf = j.at("confirmation");
  if (conf.at("received").get<bool>()) {
    v.confirmation_ = conf.at("bit").is_null() ? std::optional<int>{}
                                               : std::optional<int>{conf.at("bit").get<int>()};
  }
  v.subs_[0] = sub_from_json(j.at("sub_A"));
  v.subs_[1] = sub_from_json(j.at("sub_B"));
  return v;
}

}  // namespace qba::engine
