#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "labelforge/labels.hpp"

namespace labelforge {

class Registry;

/// Lowercases ASCII, trims, collapses inner whitespace and strips wrapping
/// quotes/brackets and trailing punctuation.
std::string normalize_response(std::string_view raw);

/// Resolves a free-text disorder name to a registry id via ids, display
/// names, adjectives and the synonym table. A trailing "disorder" or
/// "illness" qualifier is dropped before a second lookup.
std::optional<std::string> normalize_name(std::string_view token, const Registry& registry);

ParseOutcome parse_single(std::string_view raw, std::string_view disorder);
ParseOutcome parse_multiclass(std::string_view raw, const Registry& registry,
                              const std::vector<std::string>& disorders);
ParseOutcome parse_multilabel(std::string_view raw, const Registry& registry,
                              const std::vector<std::string>& disorders);
/// Labels always span the full registry.
ParseOutcome parse_unrestricted(std::string_view raw, const Registry& registry);

/// Dispatch on kind; `disorders` is the list the prompt was rendered with
/// (ignored for unrestricted).
ParseOutcome parse_response(PromptKind kind, std::string_view raw, const Registry& registry,
                            const std::vector<std::string>& disorders);

}  // namespace labelforge
