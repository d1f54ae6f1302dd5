#include "labelforge/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "labelforge/error.hpp"
#include "labelforge/resources.hpp"
#include "text_util.hpp"

namespace labelforge {
namespace {

// Non-comment, non-blank lines split on tabs.
std::vector<std::vector<std::string>> tsv_rows(std::string_view content, std::string_view what) {
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 0;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    for (auto field : text::split(line, '\t')) fields.emplace_back(text::trim(field));
    if (fields.size() < 2) {
      throw UserError(std::string(what) + " line " + std::to_string(line_no) + ": expected tab-separated fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

const Registry& Registry::builtin() {
  static const Registry registry =
      parse(resources::get("data/registry.tsv"), resources::get("data/synonyms.tsv"));
  return registry;
}

Registry Registry::parse(std::string_view registry_tsv, std::string_view synonyms_tsv) {
  Registry registry;
  for (auto& fields : tsv_rows(registry_tsv, "registry")) {
    Disorder disorder;
    disorder.id = fields[0];
    disorder.display_name = fields[1];
    disorder.adjective = fields.size() > 2 && !fields[2].empty() ? fields[2] : fields[1];
    if (disorder.id.empty() || disorder.id != text::lower(disorder.id)) {
      throw UserError("registry id '" + disorder.id + "' must be a non-empty lowercase token");
    }
    if (registry.index_.count(disorder.id) != 0) {
      throw UserError("duplicate registry id '" + disorder.id + "'");
    }
    registry.index_.emplace(disorder.id, registry.disorders_.size());
    registry.disorders_.push_back(std::move(disorder));
  }
  for (const auto& d : registry.disorders_) {
    registry.add_alias(d.id, d.id);
    std::string spaced = d.id;
    std::replace(spaced.begin(), spaced.end(), '_', ' ');
    registry.add_alias(spaced, d.id);
    registry.add_alias(d.display_name, d.id);
    registry.add_alias(d.adjective, d.id);
  }
  for (auto& fields : tsv_rows(synonyms_tsv, "synonyms")) {
    const auto& id = fields[1];
    auto it = registry.index_.find(id);
    if (it == registry.index_.end()) {
      throw UserError("synonym '" + fields[0] + "' refers to unknown disorder '" + id + "'");
    }
    registry.add_alias(fields[0], id);
    registry.disorders_[it->second].synonyms.push_back(text::collapse_lower(fields[0]));
  }
  return registry;
}

Registry Registry::load(const std::string& registry_path, const std::string& synonyms_path) {
  const std::string registry_text =
      registry_path.empty() ? std::string(resources::get("data/registry.tsv")) : slurp(registry_path);
  const std::string synonyms_text =
      synonyms_path.empty() ? std::string(resources::get("data/synonyms.tsv")) : slurp(synonyms_path);
  return parse(registry_text, synonyms_text);
}

void Registry::add_alias(const std::string& alias, const std::string& id) {
  auto key = text::collapse_lower(alias);
  auto [it, inserted] = aliases_.emplace(key, id);
  if (!inserted && it->second != id) {
    throw UserError("alias '" + key + "' maps to both '" + it->second + "' and '" + id + "'");
  }
}

bool Registry::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

const Disorder& Registry::at(std::string_view id) const { return disorders_[index_of(id)]; }

std::size_t Registry::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UserError("unknown disorder '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> Registry::ids() const {
  std::vector<std::string> out;
  out.reserve(disorders_.size());
  for (const auto& d : disorders_) out.push_back(d.id);
  return out;
}

std::vector<std::string> Registry::in_registry_order(const std::vector<std::string>& ids) const {
  std::vector<std::size_t> positions;
  for (const auto& id : ids) positions.push_back(index_of(id));
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  std::vector<std::string> out;
  for (auto p : positions) out.push_back(disorders_[p].id);
  return out;
}

std::optional<std::string> Registry::lookup_alias(std::string_view normalized) const {
  auto it = aliases_.find(normalized);
  if (it == aliases_.end()) return std::nullopt;
  return it->second;
}

}  // namespace labelforge
