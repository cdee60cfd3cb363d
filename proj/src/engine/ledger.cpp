#include "qba/engine/ledger.hpp"

#include <algorithm>

namespace qba::engine {

std::string_view to_string(SlotKind k) {
  switch (k) {
    case SlotKind::Direct:
      return "direct";
    case SlotKind::SwapHalf:
      return "swap-half";
    case SlotKind::Discarded:
      return "discarded";
  }
  return "?";
}

std::vector<RunId> RunLedger::runs_held_by(Party holder) const {
  std::vector<RunId> out;
  for (const auto& s : slots) {
    if (s.holder == holder) out.push_back(s.run);
  }
  return out;
}

std::size_t RunLedger::count(SlotKind kind, Party holder) const {
  return static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(), [&](const SlotRecord& s) {
    return s.kind == kind && s.holder == holder;
  }));
}

std::size_t RunLedger::swapped_pairs() const {
  return static_cast<std::size_t>(std::count_if(hardy_pairs.begin(), hardy_pairs.end(),
                                                [](const PairLink& l) { return l.first_run != l.second_run; }));
}

}  // namespace qba::engine
