#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labelforge {

struct Disorder {
  std::string id;            ///< canonical lowercase token, e.g. "eating_disorder"
  std::string display_name;  ///< used in prompts, e.g. "Eating Disorder"
  std::string adjective;     ///< class word in multi-label prompts, e.g. "Depressed"
  std::vector<std::string> synonyms;

  bool operator==(const Disorder&) const = default;
};

/// Ordered set of disorders plus the alias table used to resolve free-text
/// model answers. Registry order is the order used everywhere a list of
/// disorders is rendered or encoded.
class Registry {
 public:
  Registry() = default;

  /// Registry built from the embedded data/registry.tsv and data/synonyms.tsv.
  static const Registry& builtin();

  /// Parses the two tab-separated tables. Throws UserError on duplicate ids,
  /// a synonym pointing at an unknown id, or one alias mapping to two ids.
  static Registry parse(std::string_view registry_tsv, std::string_view synonyms_tsv);

  /// Loads from files; an empty synonyms path means the embedded table.
  static Registry load(const std::string& registry_path, const std::string& synonyms_path);

  const std::vector<Disorder>& disorders() const { return disorders_; }
  std::size_t size() const { return disorders_.size(); }

  bool contains(std::string_view id) const;
  const Disorder& at(std::string_view id) const;  ///< throws UserError when absent
  std::vector<std::string> ids() const;

  /// Position of an id in registry order; throws UserError when absent.
  std::size_t index_of(std::string_view id) const;

  /// Sorts and de-duplicates a list of ids into registry order. Throws on
  /// unknown ids.
  std::vector<std::string> in_registry_order(const std::vector<std::string>& ids) const;

  /// Exact lookup of an already normalized alias (id, display name,
  /// adjective or synonym, all lowercase).
  std::optional<std::string> lookup_alias(std::string_view normalized) const;

 private:
  void add_alias(const std::string& alias, const std::string& id);

  std::vector<Disorder> disorders_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, std::string, std::less<>> aliases_;
};

}  // namespace labelforge
