#include "labelforge/parser.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "labelforge/prompt.hpp"
#include "labelforge/registry.hpp"
#include "text_util.hpp"

namespace labelforge {
namespace {

constexpr std::string_view kNormal = "normal";
// Tokens with more words than this are prose, not a disorder name.
constexpr std::size_t kMaxNameWords = 6;

bool is_wrapper_open(char c) { return c == '"' || c == '\'' || c == '[' || c == '(' || c == '{' || c == '`' || c == '*'; }
bool is_wrapper_close(char c) { return c == '"' || c == '\'' || c == ']' || c == ')' || c == '}' || c == '`' || c == '*'; }
bool is_trailing_punct(char c) { return c == '.' || c == '!' || c == ',' || c == ';' || c == ':' || c == '?'; }

// UTF-8 curly quotes are common in model output.
constexpr std::string_view kCurly[] = {"\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x98", "\xE2\x80\x99"};

std::string strip_edges(std::string s) {
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    for (auto q : kCurly) {
      if (s.starts_with(q)) {
        s.erase(0, q.size());
        changed = true;
      }
      if (s.ends_with(q)) {
        s.erase(s.size() - q.size());
        changed = true;
      }
    }
    while (!s.empty() && (is_trailing_punct(s.back()) || is_wrapper_close(s.back()) || text::is_space(s.back()))) {
      s.pop_back();
      changed = true;
    }
    while (!s.empty() && (is_wrapper_open(s.front()) || text::is_space(s.front()))) {
      s.erase(0, 1);
      changed = true;
    }
  }
  return s;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::string current;
  for (char c : s) {
    const bool word_char = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                           static_cast<unsigned char>(c) >= 0x80;
    if (word_char) {
      current.push_back(c);
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

struct SplitResult {
  std::vector<std::string> tokens;  // normalized, non-empty
  bool used_comma = false;
  bool used_other = false;  // ';', '&', '+', newline or the word "and"
};

// Splits an already normalized response into list items on punctuation
// separators and on the word "and".
SplitResult split_items(std::string_view normalized) {
  SplitResult out;
  std::vector<std::string> pieces(1);
  for (char c : normalized) {
    if (c == ',') {
      out.used_comma = true;
      pieces.emplace_back();
    } else if (c == ';' || c == '&' || c == '+' || c == '\n') {
      out.used_other = true;
      pieces.emplace_back();
    } else {
      pieces.back().push_back(c);
    }
  }
  for (const auto& piece : pieces) {
    std::string current;
    auto flush = [&] {
      auto token = strip_edges(text::collapse_lower(current));
      if (!token.empty()) out.tokens.push_back(std::move(token));
      current.clear();
    };
    const auto lowered = text::collapse_lower(piece);
    for (auto word : text::split(lowered, ' ')) {
      if (word == "and") {
        out.used_other = true;
        flush();
        continue;
      }
      if (!current.empty()) current.push_back(' ');
      current.append(word);
    }
    flush();
  }
  return out;
}

struct Scan {
  std::set<std::string> positives;
  bool normal = false;
  bool all_exact = true;  // every item is the exact adjective of a requested disorder
  std::vector<std::string> outside;     // registry disorders not requested
  std::vector<std::string> unresolved;  // not a disorder name at all
  SplitResult split;
};

Scan scan_items(std::string_view normalized, const Registry& registry, const std::vector<std::string>& requested) {
  Scan scan;
  scan.split = split_items(normalized);
  for (const auto& token : scan.split.tokens) {
    if (token == kNormal) {
      scan.normal = true;
      scan.all_exact = false;
      continue;
    }
    auto id = normalize_name(token, registry);
    if (id && std::find(requested.begin(), requested.end(), *id) != requested.end()) {
      scan.positives.insert(*id);
      if (token != text::collapse_lower(registry.at(*id).adjective)) scan.all_exact = false;
    } else if (id) {
      scan.outside.push_back(*id);
      scan.all_exact = false;
    } else {
      scan.unresolved.push_back(token);
      scan.all_exact = false;
    }
  }
  return scan;
}

LabelVector labels_from(const std::vector<std::string>& ids, const std::set<std::string>& positives) {
  LabelVector labels;
  for (const auto& id : ids) labels.set(id, positives.count(id) ? LabelState::positive : LabelState::negative);
  return labels;
}

ParseOutcome failed(std::string note) {
  ParseOutcome outcome;
  outcome.status = ParseStatus::failed;
  outcome.note = std::move(note);
  return outcome;
}

ParseOutcome success(ParseStatus status, LabelVector labels, std::string note = {}) {
  ParseOutcome outcome;
  outcome.status = status;
  outcome.labels = std::move(labels);
  outcome.note = std::move(note);
  return outcome;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

// Recovery note shared by the constrained multi-disorder parsers.
std::string recovery_note(const Scan& scan, std::string_view lead) {
  std::string note(lead);
  if (scan.normal && !scan.positives.empty()) note += "; \"normal\" overridden by disorder names";
  if (!scan.outside.empty()) note += "; ignored disorders not in the prompt: " + join(scan.outside);
  if (!scan.unresolved.empty()) note += "; ignored tokens: " + join(scan.unresolved);
  return note;
}

}  // namespace

std::string normalize_response(std::string_view raw) { return strip_edges(text::collapse_lower(raw)); }

std::optional<std::string> normalize_name(std::string_view token, const Registry& registry) {
  auto name = normalize_response(token);
  if (name.empty()) return std::nullopt;
  if (auto id = registry.lookup_alias(name)) return id;
  for (auto [plural, singular] : {std::pair<std::string_view, std::string_view>{"disorders", "disorder"},
                                  {"illnesses", "illness"}}) {
    if (text::ends_with_word(name, plural)) {
      auto singular_form = name.substr(0, name.size() - plural.size()) + std::string(singular);
      if (auto id = registry.lookup_alias(singular_form)) return id;
    }
  }
  for (std::string_view qualifier : {"disorders", "disorder", "illnesses", "illness"}) {
    if (text::ends_with_word(name, qualifier)) {
      auto stripped = name.substr(0, name.size() - qualifier.size() - 1);
      if (auto id = registry.lookup_alias(stripped)) return id;
    }
  }
  return std::nullopt;
}

ParseOutcome parse_single(std::string_view raw, std::string_view disorder) {
  const auto normalized = normalize_response(raw);
  const std::string id(disorder);
  auto labels = [&](LabelState state) {
    LabelVector v;
    v.set(id, state);
    return v;
  };
  if (normalized == "yes") return success(ParseStatus::ok, labels(LabelState::positive));
  if (normalized == "no") return success(ParseStatus::ok, labels(LabelState::negative));
  const auto words = split_words(normalized);
  if (!words.empty() && words.front() == "yes") {
    return success(ParseStatus::ambiguous_recovered, labels(LabelState::positive), "leading 'yes' followed by extra text");
  }
  if (!words.empty() && words.front() == "no") {
    return success(ParseStatus::ambiguous_recovered, labels(LabelState::negative), "leading 'no' followed by extra text");
  }
  return failed(normalized.empty() ? "empty response" : "response does not start with yes or no");
}

ParseOutcome parse_multiclass(std::string_view raw, const Registry& registry, const std::vector<std::string>& disorders) {
  const auto ids = registry.in_registry_order(disorders);
  const auto normalized = normalize_response(raw);
  const auto classes = power_set_classes(registry, ids);
  for (const auto& cls : classes) {
    if (text::collapse_lower(cls) == normalized) {
      auto members = class_members(registry, ids, cls);
      return success(ParseStatus::ok, labels_from(ids, {members.begin(), members.end()}));
    }
  }
  if (normalized.empty()) return failed("empty response");
  const auto scan = scan_items(normalized, registry, ids);
  if (scan.positives.empty() && !scan.normal) return failed("no class or disorder name recognized");
  return success(ParseStatus::ambiguous_recovered, labels_from(ids, scan.positives),
                 recovery_note(scan, "not an exact class string; recovered by token-set match"));
}

ParseOutcome parse_multilabel(std::string_view raw, const Registry& registry, const std::vector<std::string>& disorders) {
  const auto ids = registry.in_registry_order(disorders);
  const auto normalized = normalize_response(raw);
  if (normalized.empty()) return failed("empty response");
  if (normalized == kNormal) return success(ParseStatus::ok, labels_from(ids, {}));
  const auto scan = scan_items(normalized, registry, ids);
  if (scan.positives.empty() && !scan.normal) return failed("no disorder name recognized");
  if (scan.all_exact && !scan.positives.empty()) return success(ParseStatus::ok, labels_from(ids, scan.positives));
  return success(ParseStatus::ambiguous_recovered, labels_from(ids, scan.positives),
                 recovery_note(scan, "names deviate from the listed forms"));
}

ParseOutcome parse_unrestricted(std::string_view raw, const Registry& registry) {
  const auto ids = registry.ids();
  const auto normalized = normalize_response(raw);
  if (normalized.empty()) return failed("empty response");
  if (normalized == kNormal) return success(ParseStatus::ok, labels_from(ids, {}));

  const auto split = split_items(normalized);
  std::set<std::string> positives;
  std::vector<std::string> unknown;
  bool normal = false;
  bool prose = false;
  for (const auto& token : split.tokens) {
    if (token == kNormal) {
      normal = true;
    } else if (auto id = normalize_name(token, registry)) {
      positives.insert(*id);
    } else {
      if (split_words(token).size() > kMaxNameWords) prose = true;
      if (std::find(unknown.begin(), unknown.end(), token) == unknown.end()) unknown.push_back(token);
    }
  }
  if (positives.empty() && !normal && (prose || unknown.empty())) {
    return failed("response is not a list of illness names");
  }

  std::vector<std::string> deviations;
  if (split.used_other) deviations.push_back("separators other than commas");
  if (normal && (!positives.empty() || !unknown.empty())) deviations.push_back("\"normal\" mixed with illness names");
  if (prose) deviations.push_back("free text between names");

  auto outcome = success(deviations.empty() ? ParseStatus::ok : ParseStatus::ambiguous_recovered,
                         labels_from(ids, positives), join(deviations));
  outcome.unknown_tokens = std::move(unknown);
  return outcome;
}

ParseOutcome parse_response(PromptKind kind, std::string_view raw, const Registry& registry,
                            const std::vector<std::string>& disorders) {
  switch (kind) {
    case PromptKind::single_label:
      return parse_single(raw, disorders.empty() ? std::string_view{} : std::string_view(disorders.front()));
    case PromptKind::multi_label_1: return parse_multiclass(raw, registry, disorders);
    case PromptKind::multi_label_2: return parse_multilabel(raw, registry, disorders);
    case PromptKind::unrestricted: return parse_unrestricted(raw, registry);
  }
  return failed("unknown prompt kind");
}

}  // namespace labelforge
