#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labelforge {

enum class LabelState : std::uint8_t { negative, positive, unknown };

std::string_view to_string(LabelState state);
std::optional<LabelState> label_state_from_string(std::string_view text);

/// Per-disorder tri-state labels for one post.
class LabelVector {
 public:
  LabelVector() = default;

  /// Vector with every id set to the same state.
  static LabelVector filled(const std::vector<std::string>& ids, LabelState state);

  void set(const std::string& id, LabelState state) { entries_[id] = state; }
  /// Unknown when the id has no entry.
  LabelState get(std::string_view id) const;
  bool has(std::string_view id) const { return entries_.find(id) != entries_.end(); }
  bool definite(std::string_view id) const { return get(id) != LabelState::unknown; }
  void erase(std::string_view id);

  /// True when every id carries positive or negative.
  bool covers(const std::vector<std::string>& ids) const;

  /// Copy limited to the given ids (missing ones stay absent).
  LabelVector restricted(const std::vector<std::string>& ids) const;

  const std::map<std::string, LabelState, std::less<>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const LabelVector&) const = default;

 private:
  std::map<std::string, LabelState, std::less<>> entries_;
};

enum class PromptKind : std::uint8_t { single_label, multi_label_1, multi_label_2, unrestricted };

inline constexpr PromptKind kAllPromptKinds[] = {
    PromptKind::single_label, PromptKind::multi_label_1, PromptKind::multi_label_2,
    PromptKind::unrestricted};

std::string_view to_string(PromptKind kind);
/// Throws UserError on anything but the four kind names.
PromptKind prompt_kind_from_string(std::string_view text);

enum class ParseStatus : std::uint8_t { ok, ambiguous_recovered, failed };

std::string_view to_string(ParseStatus status);
std::optional<ParseStatus> parse_status_from_string(std::string_view text);

/// Result of turning one raw model response into labels. Failure is a
/// status, never an exception.
struct ParseOutcome {
  ParseStatus status = ParseStatus::failed;
  std::optional<LabelVector> labels;        ///< absent iff status == failed
  std::vector<std::string> unknown_tokens;  ///< unrestricted prompts only
  std::string note;

  bool operator==(const ParseOutcome&) const = default;
};

}  // namespace labelforge
