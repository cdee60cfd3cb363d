#include "qba/engine/engine.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qba::engine {

namespace {

qcore::PureState phi_plus() {
  qcore::Vector v = qcore::Vector::Zero(4);
  v(0) = 1.0;
  v(3) = 1.0;
  return qcore::PureState::normalized(v);
}

void check_plan(const PartyView& view, Party distributor, const SettingPlan& plan) {
  const std::string who(to_string(view.role()));
  if (plan.distributor != distributor) {
    throw ProtocolAbort("setting plan of " + who + " targets the wrong sub-protocol");
  }
  const auto expected = view.measurable_runs(distributor);
  std::vector<RunId> got;
  got.reserve(plan.settings.size());
  for (const auto& [run, s] : plan.settings) got.push_back(run);
  std::sort(got.begin(), got.end());
  if (got != expected) {
    throw ProtocolAbort("setting plan of " + who + " does not cover exactly its measurable runs");
  }
  if (view.role() == Party::C) {
    std::vector<RunId> lists = plan.message_runs;
    lists.insert(lists.end(), plan.test_runs.begin(), plan.test_runs.end());
    std::sort(lists.begin(), lists.end());
    if (lists != expected) {
      throw ProtocolAbort("L and L1 do not partition the commander's measurable runs");
    }
  }
}

}  // namespace

Session::Session() : views_{PartyView(Party::A), PartyView(Party::B), PartyView(Party::C)} {}

void Session::publish(Event event) {
  transcript_.append(std::move(event));
  const Event& stored = transcript_.events().back();
  for (auto& v : views_) v.observe(stored);
}

RunLedger distribute(Party distributor, int n, const hardy::HardyModel& model,
                     StrategyContract& distributor_strategy, const PartyView& distributor_view,
                     qcore::Rng& rng) {
  if (distributor == Party::C) throw ConfigError("C never distributes");
  if (n < kMinNParameter) {
    throw ConfigError("n must be at least " + std::to_string(kMinNParameter) + ", got " +
                      std::to_string(n));
  }
  const Party peer = peer_of(distributor);
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t per_neighbour = 6 * nn;
  const std::size_t total = 2 * per_neighbour;

  RunLedger ledger;
  ledger.distributor = distributor;
  ledger.n_parameter = n;
  ledger.slots.resize(total);

  std::vector<RunId> ids(total);
  std::iota(ids.begin(), ids.end(), RunId{0});
  rng.shuffle(std::span<RunId>(ids));

  // Copies [0, 6N) go to the peer, [6N, 12N) to C.
  for (std::size_t k = 0; k < total; ++k) {
    auto& slot = ledger.slots[ids[k]];
    slot.run = ids[k];
    slot.distributor = distributor;
    slot.holder = k < per_neighbour ? peer : Party::C;
  }

  const auto pair_state = phi_plus();
  const auto ancilla_start = qcore::tensor(qcore::PureState::basis_state(1, 0), pair_state);
  const auto converted = qcore::apply(model.conversion_u, {0, 1}, ancilla_start);
  const auto computational = qcore::LocalBasis::computational();

  auto convert = [&](std::size_t k) {
    auto& slot = ledger.slots[ids[k]];
    auto m = qcore::measure_local(converted, 0, computational, rng);
    if (m.outcome < 0) {
      slot.kind = SlotKind::Discarded;
      ledger.r1.push_back(slot.run);
      return;
    }
    slot.kind = SlotKind::Direct;
    slot.register_index = ledger.registers.size();
    slot.distributor_qubit = 1;
    slot.holder_qubit = 2;
    slot.distributor_role = 0;
    slot.holder_role = 1;
    ledger.registers.push_back(std::move(m.post_state));
    ledger.hardy_pairs.push_back(PairLink{distributor, slot.run, slot.holder, slot.run});
    ledger.hardy_pair_cheated.push_back(false);
  };
  for (std::size_t k = 0; k < 2 * nn; ++k) convert(k);
  for (std::size_t k = per_neighbour; k < per_neighbour + 2 * nn; ++k) convert(k);

  // Register layout (distributor, peer, distributor, C); the projector acts
  // on the two distributor qubits.
  const auto swap_start = qcore::tensor(pair_state, pair_state);
  for (std::size_t j = 0; j < 4 * nn; ++j) {
    auto& ys = ledger.slots[ids[2 * nn + j]];
    auto& cs = ledger.slots[ids[per_neighbour + 2 * nn + j]];
    const SwapChoice choice = distributor_strategy.distribution_tamper(distributor_view, ys.run, cs.run, rng);
    const auto& proj = choice == SwapChoice::Honest ? model.swap_m : model.cheat_m;
    const double p = qcore::branch_probability(proj, {0, 2}, swap_start);
    if (!rng.bernoulli(p)) {
      ys.kind = SlotKind::Discarded;
      cs.kind = SlotKind::Discarded;
      ledger.r2.push_back(ys.run);
      ledger.r2.push_back(cs.run);
      continue;
    }
    auto branch = qcore::collapse(proj, {0, 2}, swap_start);
    for (auto* s : {&ys, &cs}) {
      s->kind = SlotKind::SwapHalf;
      s->consumed = true;
      s->register_index = ledger.registers.size();
    }
    ys.holder_qubit = 1;
    ys.holder_role = 0;
    cs.holder_qubit = 3;
    cs.holder_role = 1;
    ledger.registers.push_back(std::move(branch.state));
    ledger.hardy_pairs.push_back(PairLink{peer, ys.run, Party::C, cs.run});
    ledger.hardy_pair_cheated.push_back(choice == SwapChoice::Cheat);
  }

  std::sort(ledger.r1.begin(), ledger.r1.end());
  std::sort(ledger.r2.begin(), ledger.r2.end());
  std::merge(ledger.r1.begin(), ledger.r1.end(), ledger.r2.begin(), ledger.r2.end(),
             std::back_inserter(ledger.r3));
  return ledger;
}

std::vector<PairLink> true_links(const RunLedger& ledger) {
  std::vector<PairLink> direct;
  std::vector<PairLink> swapped;
  for (const auto& l : ledger.hardy_pairs) {
    (l.first_run == l.second_run ? direct : swapped).push_back(l);
  }
  auto by_run = [](const PairLink& a, const PairLink& b) { return a.first_run < b.first_run; };
  std::sort(direct.begin(), direct.end(), by_run);
  std::sort(swapped.begin(), swapped.end(), by_run);
  direct.insert(direct.end(), swapped.begin(), swapped.end());
  return direct;
}

void deliver(Session& session, const RunLedger& ledger) {
  const Party d = ledger.distributor;
  for (Party holder : {peer_of(d), Party::C}) {
    session.view(holder).receive_runs(d, ledger.runs_held_by(holder));
  }
  std::vector<RunId> all(ledger.total_runs());
  std::iota(all.begin(), all.end(), RunId{0});
  session.view(d).receive_runs(d, all);

  std::set<RunId> consumed;
  for (const auto& s : ledger.slots) {
    if (s.consumed) consumed.insert(s.run);
  }
  auto links = true_links(ledger);
  session.view(d).receive_distribution_secret(std::move(consumed), links);

  auto& audit = session.transcript().audit().of(d);
  audit.true_links = std::move(links);
  for (std::size_t i = 0; i < ledger.hardy_pairs.size(); ++i) {
    if (ledger.hardy_pairs[i].first_run == ledger.hardy_pairs[i].second_run) continue;
    ++(ledger.hardy_pair_cheated[i] ? audit.cheat_swaps : audit.honest_swaps);
  }

  session.publish(DiscardEvent{d, ledger.r1, ledger.r2});
}

SettingPlan choose_settings(const PartyView& view, Party distributor,
                            const SettingRequest& request, qcore::Rng& rng) {
  if (!(request.message_fraction > 0.0 && request.message_fraction < 1.0)) {
    throw ConfigError("message fraction must lie in (0, 1), got " +
                      std::to_string(request.message_fraction));
  }
  const bool commander = view.role() == Party::C;
  if (commander != request.message_bit.has_value()) {
    throw ConfigError("a message bit is given to the commander and to nobody else");
  }
  if (commander && *request.message_bit != 0 && *request.message_bit != 1) {
    throw ConfigError("message bit must be 0 or 1");
  }

  SettingPlan plan;
  plan.distributor = distributor;
  const auto runs = view.measurable_runs(distributor);
  plan.settings.reserve(runs.size());
  for (RunId r : runs) {
    if (commander && rng.bernoulli(request.message_fraction)) {
      plan.settings.emplace_back(r, *request.message_bit == 0 ? Setting::U : Setting::D);
      plan.message_runs.push_back(r);
      continue;
    }
    plan.settings.emplace_back(r, rng.bernoulli(0.5) ? Setting::U : Setting::D);
    if (commander) plan.test_runs.push_back(r);
  }
  return plan;
}

std::array<SettingPlan, 3> collect_settings(Session& session, Party distributor,
                                            const Strategies& strategies,
                                            const SettingRequest& commander_request,
                                            qcore::Rng& rng) {
  std::array<SettingPlan, 3> plans;
  for (Party p : kAllParties) {
    SettingRequest request = commander_request;
    if (p != Party::C) request.message_bit.reset();
    auto& view = session.view(p);
    plans[index_of(p)] = strategies[index_of(p)]->setting_choice(view, distributor, request, rng);
    check_plan(view, distributor, plans[index_of(p)]);
    view.record_plan(plans[index_of(p)]);
  }
  auto& audit = session.transcript().audit().of(distributor);
  for (const auto& [run, s] : plans[index_of(Party::C)].settings) audit.c_settings[run] = s;
  return plans;
}

void measurement_phase(Session& session, RunLedger& ledger, const hardy::HardyModel& model,
                       const std::array<SettingPlan, 3>& plans, const Strategies& strategies,
                       qcore::Rng& rng) {
  const Party d = ledger.distributor;
  const std::size_t total = ledger.total_runs();

  std::array<std::vector<std::optional<Setting>>, 3> settings;
  for (Party p : kAllParties) {
    auto& table = settings[index_of(p)];
    table.assign(total, std::nullopt);
    for (const auto& [run, s] : plans[index_of(p)].settings) {
      if (run >= total) throw ProtocolAbort("setting for unknown run");
      table[run] = s;
    }
  }

  // bases[role][setting]
  std::array<std::array<qcore::LocalBasis, 2>, 2> bases{{
      {model.basis(0, Setting::U), model.basis(0, Setting::D)},
      {model.basis(1, Setting::U), model.basis(1, Setting::D)},
  }};

  std::vector<RunId> order;
  order.reserve(total);
  for (const auto& s : ledger.slots) {
    if (s.kind != SlotKind::Discarded) order.push_back(s.run);
  }
  rng.shuffle(std::span<RunId>(order));

  auto& audit = session.transcript().audit().of(d);
  for (RunId run : order) {
    const SlotRecord& slot = ledger.slots[run];
    std::array<Party, 2> speakers{d, slot.holder};
    if (rng.bernoulli(0.5)) std::swap(speakers[0], speakers[1]);
    for (int pos = 0; pos < 2; ++pos) {
      const Party party = speakers[static_cast<std::size_t>(pos)];
      Outcome announced;
      if (party == d && slot.consumed) {
        announced = hardy::outcome_from_sign(rng.sign());
        audit.phony_runs.insert(run);
      } else {
        const auto setting = settings[index_of(party)][run];
        if (!setting) {
          throw ProtocolAbort("no setting for run " + std::to_string(run) + " of " +
                              std::string(to_string(party)));
        }
        const bool is_distributor = party == d;
        const std::size_t qubit = is_distributor ? slot.distributor_qubit : slot.holder_qubit;
        const int role = is_distributor ? slot.distributor_role : slot.holder_role;
        auto& reg = ledger.registers[slot.register_index];
        auto m = qcore::measure_local(reg, qubit, bases[static_cast<std::size_t>(role)][static_cast<std::size_t>(*setting)], rng);
        reg = std::move(m.post_state);
        const Outcome measured = hardy::outcome_from_sign(m.outcome);
        auto& view = session.view(party);
        view.record_outcome(d, run, measured);
        announced = strategies[index_of(party)]->announcement_tamper(view, d, run, measured, rng);
      }
      session.publish(AnnounceEvent{0, d, run, party, announced, pos});
    }
  }
  session.transcript().close_announcements(d);
}

void disclose_lists_and_links(Session& session, RunLedger& ledger,
                              const std::array<SettingPlan, 3>& plans,
                              const Strategies& strategies, qcore::Rng& rng) {
  const Party d = ledger.distributor;
  const auto& c_plan = plans[index_of(Party::C)];
  std::vector<RunId> l = c_plan.message_runs;
  std::vector<RunId> l1 = c_plan.test_runs;
  std::sort(l.begin(), l.end());
  std::sort(l1.begin(), l1.end());
  session.publish(ListEvent{d, std::move(l), std::move(l1)});

  auto links = strategies[index_of(d)]->publish_links(session.view(d), rng);
  for (const auto& link : ledger.hardy_pairs) {
    if (link.first_run == link.second_run) continue;
    ledger.slots[link.first_run].linked_run = link.second_run;
    ledger.slots[link.second_run].linked_run = link.first_run;
  }
  session.publish(LinkEvent{d, std::move(links)});
}

void disclose_settings(Session& session, Party distributor) {
  for (Party p : kAllParties) {
    const auto& k = session.view(p).sub(distributor);
    SettingEvent event{distributor, p, {}};
    if (p == Party::C) {
      for (RunId r : k.own_test_runs) event.settings.emplace_back(r, k.own_settings.at(r));
      std::sort(event.settings.begin(), event.settings.end());
    } else {
      event.settings.assign(k.own_settings.begin(), k.own_settings.end());
    }
    session.publish(std::move(event));
  }
  session.transcript().close_settings(distributor);
}

void exchange_confirmations(Session& session, const std::array<std::optional<int>, 2>& honest_bits,
                            const Strategies& strategies, double flip_prob, qcore::Rng& rng) {
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw ConfigError("classical flip probability must lie in [0, 1]");
  }
  for (Party g : kDistributors) {
    auto bit = strategies[index_of(g)]->classical_message_choice(session.view(g),
                                                                 honest_bits[index_of(g)], rng);
    session.transcript().audit().sent_confirmations[index_of(g)] = bit;
    if (bit && flip_prob > 0.0 && rng.bernoulli(flip_prob)) bit = 1 - *bit;
    session.publish(ConfirmEvent{g, peer_of(g), bit});
  }
}

}  // namespace qba::engine
