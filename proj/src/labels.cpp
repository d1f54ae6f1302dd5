#include "labelforge/labels.hpp"

#include "labelforge/error.hpp"

namespace labelforge {

std::string_view to_string(LabelState state) {
  switch (state) {
    case LabelState::negative: return "negative";
    case LabelState::positive: return "positive";
    case LabelState::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<LabelState> label_state_from_string(std::string_view text) {
  if (text == "negative") return LabelState::negative;
  if (text == "positive") return LabelState::positive;
  if (text == "unknown") return LabelState::unknown;
  return std::nullopt;
}

LabelVector LabelVector::filled(const std::vector<std::string>& ids, LabelState state) {
  LabelVector vector;
  for (const auto& id : ids) vector.set(id, state);
  return vector;
}

LabelState LabelVector::get(std::string_view id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? LabelState::unknown : it->second;
}

void LabelVector::erase(std::string_view id) {
  auto it = entries_.find(id);
  if (it != entries_.end()) entries_.erase(it);
}

bool LabelVector::covers(const std::vector<std::string>& ids) const {
  for (const auto& id : ids) {
    if (!definite(id)) return false;
  }
  return true;
}

LabelVector LabelVector::restricted(const std::vector<std::string>& ids) const {
  LabelVector out;
  for (const auto& id : ids) {
    auto it = entries_.find(id);
    if (it != entries_.end()) out.set(id, it->second);
  }
  return out;
}

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::single_label: return "single_label";
    case PromptKind::multi_label_1: return "multi_label_1";
    case PromptKind::multi_label_2: return "multi_label_2";
    case PromptKind::unrestricted: return "unrestricted";
  }
  return "single_label";
}

PromptKind prompt_kind_from_string(std::string_view text) {
  for (auto kind : kAllPromptKinds) {
    if (to_string(kind) == text) return kind;
  }
  throw UserError("unknown prompt kind '" + std::string(text) +
                  "' (expected single_label, multi_label_1, multi_label_2 or unrestricted)");
}

std::string_view to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::ok: return "ok";
    case ParseStatus::ambiguous_recovered: return "ambiguous_recovered";
    case ParseStatus::failed: return "failed";
  }
  return "failed";
}

std::optional<ParseStatus> parse_status_from_string(std::string_view text) {
  if (text == "ok") return ParseStatus::ok;
  if (text == "ambiguous_recovered") return ParseStatus::ambiguous_recovered;
  if (text == "failed") return ParseStatus::failed;
  return std::nullopt;
}

}  // namespace labelforge
