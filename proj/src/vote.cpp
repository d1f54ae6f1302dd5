#include "labelforge/vote.hpp"

#include "labelforge/error.hpp"

namespace labelforge {

LabelVector majority_vote(std::span<const LabelVector> votes) {
  if (votes.size() < 2) throw UserError("majority vote needs at least two model vectors");
  const auto& first = votes.front();
  LabelVector result;
  for (const auto& [id, state] : first.entries()) {
    std::size_t positive = 0;
    std::size_t negative = 0;
    for (const auto& vote : votes) {
      if (vote.entries().size() != first.entries().size()) {
        throw UserError("majority vote: model vectors cover different disorders");
      }
      switch (vote.get(id)) {
        case LabelState::positive: ++positive; break;
        case LabelState::negative: ++negative; break;
        case LabelState::unknown:
          throw UserError("majority vote: a model vector has no definite label for '" + id + "'");
      }
    }
    result.set(id, positive >= negative ? LabelState::positive : LabelState::negative);
  }
  return result;
}

}  // namespace labelforge
