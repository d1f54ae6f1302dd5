#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "labelforge/labels.hpp"

namespace labelforge {

class Registry;
struct Post;

/// A replaced region of a rendered prompt: which slot, where it landed,
/// and the golden text it replaced.
struct SlotSpan {
  std::string slot;
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string original;

  bool operator==(const SlotSpan&) const = default;
};

struct RenderedPrompt {
  PromptKind kind = PromptKind::single_label;
  std::vector<std::string> disorders;  ///< registry order; empty for unrestricted
  std::string post_id;
  std::string text;
  std::string template_hash;  ///< SHA-256 hex of the golden template
  std::vector<SlotSpan> spans;

  /// The substituted post body.
  std::string_view post_text() const;
};

/// Slot names.
namespace slot {
inline constexpr std::string_view post = "post";
inline constexpr std::string_view target = "target";        ///< single-label disorder name
inline constexpr std::string_view disorders = "disorders";  ///< "{Depression or Stress}"
inline constexpr std::string_view count = "count";
inline constexpr std::string_view classes = "classes";
}  // namespace slot

/// Golden template text for a kind, exactly as checked in under templates/.
std::string_view golden_template(PromptKind kind);
std::string template_hash(PromptKind kind);
/// Resource name, e.g. "templates/single_label.txt".
std::string template_resource(PromptKind kind);
/// Kind whose golden template hashes to `hash`, if any.
std::optional<PromptKind> kind_from_template_hash(std::string_view hash);

RenderedPrompt render_single(const Registry& registry, std::string_view disorder, const Post& post);
RenderedPrompt render_multilabel_1(const Registry& registry, const std::vector<std::string>& disorders,
                                   const Post& post);
RenderedPrompt render_multilabel_2(const Registry& registry, const std::vector<std::string>& disorders,
                                   const Post& post);
RenderedPrompt render_unrestricted(const Post& post);

/// Dispatch on kind. For single_label `disorders` must hold one id.
RenderedPrompt render(PromptKind kind, const Registry& registry, const std::vector<std::string>& disorders,
                      const Post& post);

/// Restores the golden text in the named slots (all slots when empty).
std::string reblank(const RenderedPrompt& prompt, const std::set<std::string>& slots = {});

/// The 2^n - 1 adjective combinations in size-major, registry order,
/// followed by "Normal". Disorders must be in registry order.
std::vector<std::string> power_set_classes(const Registry& registry, const std::vector<std::string>& disorders);

/// Positive disorders named by a power-set class string (empty for Normal).
/// Class index i >= 1 corresponds to power_set_classes()[i - 1].
std::vector<std::string> class_members(const Registry& registry, const std::vector<std::string>& disorders,
                                       std::string_view class_string);

}  // namespace labelforge
