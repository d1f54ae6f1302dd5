#pragma once

#include <span>

#include "labelforge/labels.hpp"

namespace labelforge {

/// Per-disorder strict majority across model vectors; ties go to positive.
/// Requires at least two vectors, each with definite labels for exactly the
/// same disorders, and throws UserError otherwise.
LabelVector majority_vote(std::span<const LabelVector> votes);

}  // namespace labelforge
