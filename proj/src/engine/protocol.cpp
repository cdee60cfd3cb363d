#include "qba/engine/protocol.hpp"

namespace qba::engine {

ProtocolOutcome run_protocol(const ProtocolConfig& config, const hardy::HardyModel& model,
                             const Strategies& strategies) {
  if (config.message_bit != 0 && config.message_bit != 1) {
    throw ConfigError("message bit must be 0 or 1");
  }
  for (const auto* s : strategies) {
    if (s == nullptr) throw ConfigError("every party needs a strategy");
  }

  qcore::Rng rng(config.seed);
  ProtocolOutcome out;
  out.message_bit = config.message_bit;
  Session& session = out.session;
  session.transcript().audit().message_bit = config.message_bit;

  for (Party d : kDistributors) {
    auto& ledger = out.ledgers[index_of(d)];
    ledger = distribute(d, config.n, model, *strategies[index_of(d)], session.view(d), rng);
    deliver(session, ledger);
  }

  const SettingRequest request{config.message_bit, config.message_fraction};
  std::array<std::array<SettingPlan, 3>, 2> plans;
  for (Party d : kDistributors) {
    plans[index_of(d)] = collect_settings(session, d, strategies, request, rng);
  }
  for (Party d : kDistributors) {
    measurement_phase(session, out.ledgers[index_of(d)], model, plans[index_of(d)], strategies, rng);
  }
  for (Party d : kDistributors) {
    disclose_lists_and_links(session, out.ledgers[index_of(d)], plans[index_of(d)], strategies, rng);
  }
  for (Party d : kDistributors) disclose_settings(session, d);

  std::array<std::optional<int>, 2> honest_bits;
  for (Party g : kDistributors) {
    honest_bits[index_of(g)] =
        verify::read_message(session.view(g), peer_of(g), config.verify.k_min).bit();
  }
  exchange_confirmations(session, honest_bits, strategies, config.classical_flip_prob, rng);

  for (Party g : kDistributors) {
    out.assessments[index_of(g)] = verify::assess(session.view(g), config.verify);
  }
  return out;
}

}  // namespace qba::engine
