#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qba/hardy/hardy.hpp"

namespace qba::engine {

using hardy::Outcome;
using hardy::Setting;

enum class Party : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr Party kAllParties[] = {Party::A, Party::B, Party::C};
inline constexpr Party kDistributors[] = {Party::A, Party::B};

std::string_view to_string(Party p);
std::optional<Party> party_from_string(std::string_view s);

/// The other lieutenant. Only defined for A and B.
constexpr Party peer_of(Party p) { return p == Party::A ? Party::B : Party::A; }
constexpr std::size_t index_of(Party p) { return static_cast<std::size_t>(p); }

/// Run identifiers are local to one distributor's sub-protocol: each
/// distributed |Phi+> copy is one run.
using RunId = std::uint32_t;

/// Bad configuration (exit code 2 at the CLI).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Phase-ordering or contract violation inside a protocol instance.
class ProtocolAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One published correlation link: the qubit `first` holds in run
/// `first_run` shares a Hardy pair with the qubit `second` holds in run
/// `second_run`. Direct pairs have first_run == second_run with the
/// distributor as `first`; swapped pairs link a lieutenant run to a C run.
struct PairLink {
  Party first;
  RunId first_run;
  Party second;
  RunId second_run;

  auto operator<=>(const PairLink&) const = default;
  bool involves(Party p) const { return first == p || second == p; }
};

/// Settings a party will use on its measurable runs of one sub-protocol.
/// message_runs / test_runs are only filled for C (the L and L1 lists).
struct SettingPlan {
  Party distributor = Party::A;
  std::vector<std::pair<RunId, Setting>> settings;
  std::vector<RunId> message_runs;
  std::vector<RunId> test_runs;
};

enum class SwapChoice : std::uint8_t { Honest, Cheat };

}  // namespace qba::engine
