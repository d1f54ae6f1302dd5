#include "labelforge/prompt.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>

#include "labelforge/dataset.hpp"
#include "labelforge/error.hpp"
#include "labelforge/hash.hpp"
#include "labelforge/registry.hpp"
#include "labelforge/resources.hpp"
#include "text_util.hpp"

namespace labelforge {
namespace {

// Lists wrap before this column, continuing on a line indented by two
// spaces, which is how the golden templates lay out their class list.
constexpr std::size_t kWrapColumn = 88;

struct SlotSpec {
  std::string_view name;
  std::vector<std::string_view> literals;  // golden text the slot occupies
};

struct Segment {
  std::string_view literal;  // set for literal segments
  std::string_view slot;     // set for slot segments
  std::string_view original;
};

struct Template {
  std::string_view golden;
  std::string hash;
  std::vector<Segment> segments;
};

std::vector<SlotSpec> slot_specs(PromptKind kind) {
  switch (kind) {
    case PromptKind::single_label:
      return {{slot::target, {"{The target disorder}", "{The target\n  disorder}"}}, {slot::post, {"{The Post}"}}};
    case PromptKind::multi_label_1:
      return {{slot::disorders, {"{Depression or Stress}"}},
              {slot::count, {"these 4 words"}},
              {slot::classes, {"[\"Depressed\", \"Stressed\",\n  \"Depressed and Stressed\", \"Normal\"]"}},
              {slot::post, {"{The Post}"}}};
    case PromptKind::multi_label_2:
      return {{slot::disorders, {"{Depression or Stress}"}},
              {slot::count, {"these 2 mental illness names"}},
              {slot::classes, {"[\"Depressed\", \"Stressed\"]"}},
              {slot::post, {"{The post}"}}};
    case PromptKind::unrestricted:
      return {{slot::post, {"{The post}"}}};
  }
  return {};
}

Template build_template(PromptKind kind) {
  Template tmpl;
  tmpl.golden = resources::get(template_resource(kind));
  tmpl.hash = sha256_hex(tmpl.golden);

  struct Hit {
    std::size_t offset;
    std::string_view slot;
    std::string_view literal;
  };
  std::vector<Hit> hits;
  for (const auto& spec : slot_specs(kind)) {
    std::size_t found = 0;
    for (auto literal : spec.literals) {
      for (auto pos = tmpl.golden.find(literal); pos != std::string_view::npos;
           pos = tmpl.golden.find(literal, pos + literal.size())) {
        hits.push_back({pos, spec.name, literal});
        ++found;
      }
    }
    if (found == 0 || (spec.name == slot::post && found != 1)) {
      throw std::logic_error("template " + std::string(to_string(kind)) + ": slot '" + std::string(spec.name) +
                             "' found " + std::to_string(found) + " times");
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& l, const Hit& r) { return l.offset < r.offset; });
  std::size_t cursor = 0;
  for (const auto& hit : hits) {
    if (hit.offset < cursor) throw std::logic_error("template slots overlap");
    if (hit.offset > cursor) tmpl.segments.push_back({tmpl.golden.substr(cursor, hit.offset - cursor), {}, {}});
    tmpl.segments.push_back({{}, hit.slot, hit.literal});
    cursor = hit.offset + hit.literal.size();
  }
  if (cursor < tmpl.golden.size()) tmpl.segments.push_back({tmpl.golden.substr(cursor), {}, {}});
  return tmpl;
}

const Template& template_for(PromptKind kind) {
  static const std::array<Template, 4> templates = {
      build_template(PromptKind::single_label), build_template(PromptKind::multi_label_1),
      build_template(PromptKind::multi_label_2), build_template(PromptKind::unrestricted)};
  return templates[static_cast<std::size_t>(kind)];
}

std::size_t current_column(const std::string& text) {
  auto newline = text.rfind('\n');
  return newline == std::string::npos ? text.size() : text.size() - newline - 1;
}

// ["A", "B", ...] with greedy wrapping at kWrapColumn.
std::string render_list(const std::vector<std::string>& items, std::size_t start_column) {
  std::string out = "[";
  std::size_t column = start_column + 1;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string piece = "\"" + items[i] + "\"" + (i + 1 == items.size() ? "]" : ",");
    if (i > 0) {
      if (column + 1 + piece.size() > kWrapColumn) {
        out += "\n  ";
        column = 2;
      } else {
        out += ' ';
        column += 1;
      }
    }
    out += piece;
    column += piece.size();
  }
  if (items.empty()) out += "]";
  return out;
}

std::string disorder_phrase(const Registry& registry, const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += (i + 1 == ids.size()) ? " or " : ", ";
    out += registry.at(ids[i]).display_name;
  }
  return out;
}

using SlotValue = std::function<std::string(const std::string& rendered_so_far)>;

RenderedPrompt fill(PromptKind kind, const std::map<std::string_view, SlotValue>& values, const Post& post,
                    std::vector<std::string> disorders) {
  const auto& tmpl = template_for(kind);
  RenderedPrompt prompt;
  prompt.kind = kind;
  prompt.disorders = std::move(disorders);
  prompt.post_id = post.id;
  prompt.template_hash = tmpl.hash;
  for (const auto& segment : tmpl.segments) {
    if (segment.slot.empty()) {
      prompt.text += segment.literal;
      continue;
    }
    std::string value = segment.slot == slot::post ? post.text : values.at(segment.slot)(prompt.text);
    prompt.spans.push_back({std::string(segment.slot), prompt.text.size(), value.size(), std::string(segment.original)});
    prompt.text += value;
  }
  return prompt;
}

void require_post_text(const Post& post) {
  if (text::trim(post.text).empty()) throw UserError("cannot render a prompt for post '" + post.id + "' with empty text");
}

std::vector<std::string> multi_disorders(const Registry& registry, const std::vector<std::string>& disorders) {
  auto ordered = registry.in_registry_order(disorders);
  if (ordered.size() < 2) {
    throw UserError("multi-label prompts need at least two distinct disorders, got " + std::to_string(ordered.size()));
  }
  if (ordered.size() > 16) throw UserError("multi-label prompts support at most 16 disorders");
  return ordered;
}

std::vector<std::string> adjectives(const Registry& registry, const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(registry.at(id).adjective);
  return out;
}

}  // namespace

std::string_view RenderedPrompt::post_text() const {
  for (const auto& span : spans) {
    if (span.slot == slot::post) return std::string_view(text).substr(span.offset, span.length);
  }
  return {};
}

std::string template_resource(PromptKind kind) { return "templates/" + std::string(to_string(kind)) + ".txt"; }

std::string_view golden_template(PromptKind kind) { return template_for(kind).golden; }

std::string template_hash(PromptKind kind) { return template_for(kind).hash; }

std::optional<PromptKind> kind_from_template_hash(std::string_view hash) {
  for (auto kind : kAllPromptKinds) {
    if (template_for(kind).hash == hash) return kind;
  }
  return std::nullopt;
}

RenderedPrompt render_single(const Registry& registry, std::string_view disorder, const Post& post) {
  require_post_text(post);
  const auto& entry = registry.at(disorder);
  const std::map<std::string_view, SlotValue> values = {
      {slot::target, [&](const std::string&) { return entry.display_name; }}};
  return fill(PromptKind::single_label, values, post, {entry.id});
}

RenderedPrompt render_multilabel_1(const Registry& registry, const std::vector<std::string>& disorders,
                                   const Post& post) {
  require_post_text(post);
  auto ids = multi_disorders(registry, disorders);
  const auto classes = power_set_classes(registry, ids);
  const std::map<std::string_view, SlotValue> values = {
      {slot::disorders, [&](const std::string&) { return disorder_phrase(registry, ids); }},
      {slot::count, [&](const std::string&) { return "these " + std::to_string(classes.size()) + " words"; }},
      {slot::classes, [&](const std::string& so_far) { return render_list(classes, current_column(so_far)); }}};
  return fill(PromptKind::multi_label_1, values, post, ids);
}

RenderedPrompt render_multilabel_2(const Registry& registry, const std::vector<std::string>& disorders,
                                   const Post& post) {
  require_post_text(post);
  auto ids = multi_disorders(registry, disorders);
  const auto names = adjectives(registry, ids);
  const std::map<std::string_view, SlotValue> values = {
      {slot::disorders, [&](const std::string&) { return disorder_phrase(registry, ids); }},
      {slot::count,
       [&](const std::string&) { return "these " + std::to_string(ids.size()) + " mental illness names"; }},
      {slot::classes, [&](const std::string& so_far) { return render_list(names, current_column(so_far)); }}};
  return fill(PromptKind::multi_label_2, values, post, ids);
}

RenderedPrompt render_unrestricted(const Post& post) {
  require_post_text(post);
  return fill(PromptKind::unrestricted, {}, post, {});
}

RenderedPrompt render(PromptKind kind, const Registry& registry, const std::vector<std::string>& disorders,
                      const Post& post) {
  switch (kind) {
    case PromptKind::single_label:
      if (disorders.size() != 1) throw UserError("single-label prompts take exactly one disorder");
      return render_single(registry, disorders.front(), post);
    case PromptKind::multi_label_1: return render_multilabel_1(registry, disorders, post);
    case PromptKind::multi_label_2: return render_multilabel_2(registry, disorders, post);
    case PromptKind::unrestricted: return render_unrestricted(post);
  }
  throw UserError("unknown prompt kind");
}

std::string reblank(const RenderedPrompt& prompt, const std::set<std::string>& slots) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& span : prompt.spans) {
    out.append(prompt.text, cursor, span.offset - cursor);
    if (slots.empty() || slots.count(span.slot) != 0) {
      out += span.original;
    } else {
      out.append(prompt.text, span.offset, span.length);
    }
    cursor = span.offset + span.length;
  }
  out.append(prompt.text, cursor, std::string::npos);
  return out;
}

std::vector<std::string> power_set_classes(const Registry& registry, const std::vector<std::string>& disorders) {
  const auto names = adjectives(registry, disorders);
  const std::size_t n = names.size();
  std::vector<std::string> classes;
  for (std::size_t k = 1; k <= n; ++k) {
    // Lexicographic k-combinations of positions 0..n-1.
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::string label;
      for (std::size_t i = 0; i < k; ++i) label += (i ? " and " : "") + names[pick[i]];
      classes.push_back(std::move(label));
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  classes.emplace_back("Normal");
  return classes;
}

std::vector<std::string> class_members(const Registry& registry, const std::vector<std::string>& disorders,
                                       std::string_view class_string) {
  if (class_string == "Normal") return {};
  const auto names = adjectives(registry, disorders);
  std::vector<std::string> members;
  std::string_view rest = class_string;
  while (!rest.empty()) {
    auto pos = rest.find(" and ");
    auto part = rest.substr(0, pos);
    auto it = std::find(names.begin(), names.end(), part);
    if (it == names.end()) throw UserError("'" + std::string(class_string) + "' is not a class of this prompt");
    members.push_back(disorders[static_cast<std::size_t>(it - names.begin())]);
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 5);
  }
  return members;
}

}  // namespace labelforge
