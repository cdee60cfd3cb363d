#pragma once

// One full protocol instance: both sub-protocols, confirmations and the two
// lieutenant verdicts.

#include <array>
#include <cstdint>

#include "qba/engine/engine.hpp"
#include "qba/hardy/hardy.hpp"
#include "qba/verify/verify.hpp"

namespace qba::engine {

struct ProtocolConfig {
  int n = 256;
  int message_bit = 1;
  double message_fraction = 0.75;
  double classical_flip_prob = 0.0;
  verify::VerifyParams verify;
  std::uint64_t seed = 1;
};

struct ProtocolOutcome {
  Session session;
  std::array<RunLedger, 2> ledgers;           // by distributor A, B
  std::array<verify::Assessment, 2> assessments;  // by lieutenant A, B
  int message_bit = 0;

  const verify::Assessment& assessment(Party lieutenant) const {
    return assessments[index_of(lieutenant)];
  }
};

/// Throws ConfigError for invalid settings and ProtocolAbort if a strategy
/// breaks the protocol contract. Deterministic in (config, model,
/// strategies).
ProtocolOutcome run_protocol(const ProtocolConfig& config, const hardy::HardyModel& model,
                             const Strategies& strategies);

}  // namespace qba::engine
