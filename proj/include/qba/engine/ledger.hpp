#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qba/engine/types.hpp"
#include "qba/qcore/state.hpp"

namespace qba::engine {

enum class SlotKind : std::uint8_t { Direct, SwapHalf, Discarded };

std::string_view to_string(SlotKind k);

/// One distributed |Phi+> copy: the distributor keeps one qubit, `holder`
/// gets the other.
struct SlotRecord {
  RunId run = 0;
  Party distributor = Party::A;
  Party holder = Party::B;
  SlotKind kind = SlotKind::Discarded;
  bool consumed = false;              // distributor qubit used by a swap
  std::optional<RunId> linked_run;    // filled at link revelation (swap halves)

  // Physical location of the surviving qubits.
  std::size_t register_index = 0;
  std::size_t holder_qubit = 0;
  std::size_t distributor_qubit = 0;
  int holder_role = 1;       // which side of the Hardy pair (0 or 1) the holder plays
  int distributor_role = 0;
};

/// Ground truth of one sub-protocol's resource distribution. Owned by the
/// engine; never handed to a strategy.
struct RunLedger {
  Party distributor = Party::A;
  int n_parameter = 0;
  std::vector<SlotRecord> slots;  // indexed by RunId
  std::vector<RunId> r1;          // failed conversions
  std::vector<RunId> r2;          // runs of failed swaps
  std::vector<RunId> r3;          // r1 union r2, sorted
  std::vector<PairLink> hardy_pairs;
  std::vector<bool> hardy_pair_cheated;  // parallel to hardy_pairs
  std::vector<qcore::PureState> registers;

  std::size_t total_runs() const { return slots.size(); }
  std::vector<RunId> runs_held_by(Party holder) const;
  std::size_t count(SlotKind kind, Party holder) const;
  std::size_t swapped_pairs() const;
};

}  // namespace qba::engine
