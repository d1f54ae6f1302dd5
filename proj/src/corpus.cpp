#include "labelforge/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <unordered_map>

#include "labelforge/csv.hpp"
#include "labelforge/error.hpp"
#include "labelforge/hash.hpp"
#include "labelforge/log.hpp"
#include "labelforge/random.hpp"
#include "labelforge/registry.hpp"
#include "text_util.hpp"

namespace labelforge {
namespace {

std::optional<std::size_t> optional_column(const DelimitedTable& table, const std::string& name) {
  if (name.empty()) return std::nullopt;
  return table.column(name);
}

const std::string& field(const DelimitedTable::Row& row, std::size_t column) {
  static const std::string kEmpty;
  return column < row.fields.size() ? row.fields[column] : kEmpty;
}

void warn(std::vector<IngestWarning>& warnings, const DelimitedTable& table, const DelimitedTable::Row& row,
          std::string message) {
  log::warning(table.source() + ": row " + std::to_string(row.index) + " (line " + std::to_string(row.line) +
               "): " + message);
  warnings.push_back({row.index, std::move(message)});
}

std::string normalize_subreddit(std::string_view name) {
  auto lowered = text::collapse_lower(name);
  if (lowered.starts_with("r/")) lowered.erase(0, 2);
  return lowered;
}

}  // namespace

DreadditLoad load_dreaddit(const std::string& path, const DreadditColumns& columns) {
  auto table = DelimitedTable::read_file(path);
  const auto text_col = table.require_column(columns.text);
  const auto label_col = table.require_column(columns.label);
  const auto id_col = optional_column(table, columns.id);
  const auto subreddit_col = optional_column(table, columns.subreddit);

  DreadditLoad load;
  for (const auto& row : table.rows()) {
    const auto& text = field(row, text_col);
    if (text::trim(text).empty()) {
      warn(load.warnings, table, row, "empty text, row skipped");
      continue;
    }
    const auto label = text::trim(field(row, label_col));
    LabelState stress;
    if (label == "1" || label == "1.0") {
      stress = LabelState::positive;
    } else if (label == "0" || label == "0.0") {
      stress = LabelState::negative;
    } else {
      warn(load.warnings, table, row, "stress label '" + std::string(label) + "' is not 0/1, row skipped");
      continue;
    }
    DreadditRecord record;
    record.stress = stress;
    if (id_col && !text::trim(field(row, *id_col)).empty()) {
      record.row_id = std::string(text::trim(field(row, *id_col)));
    }
    record.post.id = "dreaddit-" + (record.row_id ? *record.row_id : std::to_string(row.index));
    record.post.text = text;
    record.post.source = CorpusSource::dreaddit;
    if (subreddit_col && !field(row, *subreddit_col).empty()) {
      record.post.origin_subreddit = normalize_subreddit(field(row, *subreddit_col));
    }
    load.records.push_back(std::move(record));
  }
  return load;
}

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::minimal: return "minimal";
    case Severity::mild: return "mild";
    case Severity::moderate: return "moderate";
    case Severity::severe: return "severe";
  }
  return "minimal";
}

std::optional<Severity> severity_from_string(std::string_view value) {
  const auto lowered = text::collapse_lower(value);
  if (lowered == "minimal" || lowered == "minimum") return Severity::minimal;
  if (lowered == "mild") return Severity::mild;
  if (lowered == "moderate") return Severity::moderate;
  if (lowered == "severe") return Severity::severe;
  return std::nullopt;
}

LabelState binarize_severity(Severity severity) {
  return severity == Severity::minimal ? LabelState::negative : LabelState::positive;
}

DepSeverityLoad load_depseverity(const std::string& path, const DepSeverityColumns& columns) {
  auto table = DelimitedTable::read_file(path);
  const auto text_col = table.require_column(columns.text);
  const auto severity_col = table.require_column(columns.severity);
  const auto id_col = optional_column(table, columns.id);

  DepSeverityLoad load;
  std::vector<std::string> unrecognized;
  for (const auto& row : table.rows()) {
    const auto& raw = field(row, severity_col);
    auto severity = severity_from_string(raw);
    if (!severity) {
      const std::string value(text::trim(raw));
      if (std::find(unrecognized.begin(), unrecognized.end(), value) == unrecognized.end()) {
        unrecognized.push_back(value);
      }
      continue;
    }
    const auto& text = field(row, text_col);
    if (text::trim(text).empty()) {
      warn(load.warnings, table, row, "empty text, row skipped");
      continue;
    }
    DepSeverityRecord record;
    record.severity = *severity;
    if (id_col && !text::trim(field(row, *id_col)).empty()) {
      record.row_id = std::string(text::trim(field(row, *id_col)));
    }
    record.post.id = "depseverity-" + (record.row_id ? *record.row_id : std::to_string(row.index));
    record.post.text = text;
    record.post.source = CorpusSource::depseverity;
    load.records.push_back(std::move(record));
  }
  if (!unrecognized.empty()) {
    std::string listed;
    for (std::size_t i = 0; i < unrecognized.size(); ++i) listed += (i ? ", '" : "'") + unrecognized[i] + "'";
    throw UserError("unrecognized severity in " + path + ": " + listed +
                    " (expected minimal, mild, moderate or severe)");
  }
  return load;
}

std::string normalize_for_join(std::string_view text) { return text::collapse_lower(text); }

std::string join_key(std::string_view text) { return sha256_hex(normalize_for_join(text)); }

MergeResult merge_depseverity_dreaddit(const std::vector<DreadditRecord>& dreaddit,
                                       const std::vector<DepSeverityRecord>& depseverity,
                                       const MergeOptions& options) {
  MergeResult result;
  auto& stats = result.stats;
  stats.dreaddit_rows = dreaddit.size();
  stats.depseverity_rows = depseverity.size();

  // First occurrence of every distinct text, in file order.
  std::vector<std::size_t> d_unique;
  std::vector<std::string> d_keys;
  std::unordered_map<std::string, std::size_t> d_first;
  for (std::size_t i = 0; i < dreaddit.size(); ++i) {
    auto key = join_key(dreaddit[i].post.text);
    auto [it, inserted] = d_first.emplace(key, i);
    if (inserted) {
      d_unique.push_back(i);
      d_keys.push_back(std::move(key));
    } else if (dreaddit[it->second].stress != dreaddit[i].stress) {
      ++stats.duplicate_conflicts;
    }
  }
  std::unordered_map<std::string, std::size_t> s_first;
  std::vector<std::size_t> s_unique;
  for (std::size_t i = 0; i < depseverity.size(); ++i) {
    auto [it, inserted] = s_first.emplace(join_key(depseverity[i].post.text), i);
    if (inserted) {
      s_unique.push_back(i);
    } else if (binarize_severity(depseverity[it->second].severity) != binarize_severity(depseverity[i].severity)) {
      ++stats.duplicate_conflicts;
    }
  }
  stats.dreaddit_unique = d_unique.size();
  stats.depseverity_unique = s_unique.size();

  std::vector<std::optional<std::size_t>> partner(d_unique.size());
  std::vector<bool> s_used(depseverity.size(), false);
  for (std::size_t u = 0; u < d_unique.size(); ++u) {
    auto it = s_first.find(d_keys[u]);
    if (it != s_first.end()) {
      partner[u] = it->second;
      s_used[it->second] = true;
      ++stats.matched_by_text;
    }
  }
  // Fallback: shared row ids between records the text join left over.
  std::unordered_map<std::string, std::size_t> s_by_id;
  for (auto i : s_unique) {
    if (!s_used[i] && depseverity[i].row_id) s_by_id.emplace(*depseverity[i].row_id, i);
  }
  for (std::size_t u = 0; u < d_unique.size(); ++u) {
    const auto& rec = dreaddit[d_unique[u]];
    if (partner[u] || !rec.row_id) continue;
    auto it = s_by_id.find(*rec.row_id);
    if (it != s_by_id.end() && !s_used[it->second]) {
      partner[u] = it->second;
      s_used[it->second] = true;
      ++stats.matched_by_id;
    }
  }

  auto& dataset = result.dataset;
  std::uint64_t cells[2][2] = {};  // [depression][stress], positive = 1
  for (std::size_t u = 0; u < d_unique.size(); ++u) {
    const auto& rec = dreaddit[d_unique[u]];
    if (!partner[u]) {
      stats.unmatched_dreaddit.push_back(rec.row_id ? *rec.row_id : rec.post.id);
      continue;
    }
    const auto& dep = depseverity[*partner[u]];
    Post post;
    post.id = "merged-" + d_keys[u].substr(0, 16);
    post.text = rec.post.text;
    post.source = CorpusSource::merged;
    post.origin_subreddit = rec.post.origin_subreddit;
    dataset.add_post(post);
    const auto depression = binarize_severity(dep.severity);
    dataset.set_truth(post.id, "depression", depression, cell_source::corpus);
    dataset.set_truth(post.id, "stress", rec.stress, cell_source::corpus);
    ++cells[depression == LabelState::positive][rec.stress == LabelState::positive];
  }
  for (auto i : s_unique) {
    if (!s_used[i]) {
      const auto& rec = depseverity[i];
      stats.unmatched_depseverity.push_back(rec.row_id ? *rec.row_id : rec.post.id);
    }
  }

  const auto matched = stats.matched_by_text + stats.matched_by_id;
  const auto denominator = std::min(stats.dreaddit_unique, stats.depseverity_unique);
  stats.join_rate = denominator == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(denominator);

  auto& meta = dataset.meta();
  meta.name = options.name;
  meta.params = {
      {"operation", "merge_depseverity_dreaddit"},
      {"join_key", "sha256(lowercase, whitespace-collapsed text); row-id fallback"},
      {"severity_cut", {{"negative", {"minimal"}}, {"positive", {"mild", "moderate", "severe"}}}},
      {"dreaddit_rows", stats.dreaddit_rows},
      {"depseverity_rows", stats.depseverity_rows},
      {"dreaddit_unique", stats.dreaddit_unique},
      {"depseverity_unique", stats.depseverity_unique},
      {"matched_by_text", stats.matched_by_text},
      {"matched_by_id", stats.matched_by_id},
      {"duplicate_conflicts", stats.duplicate_conflicts},
      {"unmatched_dreaddit", stats.unmatched_dreaddit.size()},
      {"unmatched_depseverity", stats.unmatched_depseverity.size()},
      {"join_rate", stats.join_rate},
      {"cells",
       {{"depression_negative_stress_negative", cells[0][0]},
        {"depression_negative_stress_positive", cells[0][1]},
        {"depression_positive_stress_negative", cells[1][0]},
        {"depression_positive_stress_positive", cells[1][1]}}},
  };

  if (stats.join_rate < options.min_join_rate) {
    throw UserError("merge join rate " + std::to_string(stats.join_rate) + " is below the threshold " +
                    std::to_string(options.min_join_rate) + ": matched " + std::to_string(matched) + " of " +
                    std::to_string(denominator) + " (dreaddit unmatched " +
                    std::to_string(stats.unmatched_dreaddit.size()) + ", depseverity unmatched " +
                    std::to_string(stats.unmatched_depseverity.size()) + ")");
  }
  return result;
}

SubredditFilter SubredditFilter::defaults() {
  SubredditFilter filter;
  filter.disorder_subreddits = {
      {"adhd", "adhd"},
      {"anxiety", "anxiety"},
      {"depression", "depression"},
      {"edanonymous", "eating_disorder"},
      {"ptsd", "ptsd"},
      {"suicidewatch", "suicide"},
  };
  filter.control_subreddits = {"conspiracy", "jokes", "teaching", "personalfinance", "legaladvice"};
  return filter;
}

RmhdLoad load_rmhd(const std::string& path, const SubredditFilter& filter, const RmhdColumns& columns) {
  auto table = DelimitedTable::read_file(path);
  const auto subreddit_col = table.require_column(columns.subreddit);
  const auto text_col = table.require_column(columns.text);
  const auto id_col = optional_column(table, columns.id);
  const auto stem = std::filesystem::path(path).stem().string();

  RmhdLoad load;
  for (const auto& row : table.rows()) {
    const auto subreddit = normalize_subreddit(field(row, subreddit_col));
    const auto disorder = filter.disorder_subreddits.find(subreddit);
    const bool control = filter.control_subreddits.count(subreddit) != 0;
    if (disorder == filter.disorder_subreddits.end() && !control) continue;
    const auto& text = field(row, text_col);
    if (text::trim(text).empty()) {
      warn(load.warnings, table, row, "empty text, row skipped");
      continue;
    }
    Post post;
    if (id_col && !text::trim(field(row, *id_col)).empty()) {
      post.id = "rmhd-" + std::string(text::trim(field(row, *id_col)));
    } else {
      post.id = "rmhd-" + stem + "-" + std::to_string(row.index);
    }
    post.text = text;
    post.source = CorpusSource::rmhd;
    post.origin_subreddit = subreddit;
    if (control) {
      post.is_control = true;
    } else {
      post.origin_disorder = disorder->second;
    }
    load.posts.push_back(std::move(post));
  }
  return load;
}

Dataset rmhd_dataset(std::vector<Post> posts, const Registry& registry, std::string name) {
  Dataset dataset;
  dataset.meta().name = std::move(name);
  dataset.meta().params = {{"operation", "load_rmhd"}, {"posts", posts.size()}};
  for (auto& post : posts) {
    if (post.origin_disorder && !registry.contains(*post.origin_disorder)) {
      throw UserError("post " + post.id + " has origin disorder '" + *post.origin_disorder +
                      "' missing from the registry");
    }
    dataset.add_post(std::move(post));
  }
  return dataset;
}

std::string_view to_string(GroupKey key) {
  switch (key) {
    case GroupKey::origin_disorder: return "origin_disorder";
    case GroupKey::origin_subreddit: return "origin_subreddit";
    case GroupKey::source: return "source";
  }
  return "origin_disorder";
}

GroupKey group_key_from_string(std::string_view text) {
  if (text == "origin_disorder") return GroupKey::origin_disorder;
  if (text == "origin_subreddit") return GroupKey::origin_subreddit;
  if (text == "source") return GroupKey::source;
  throw UserError("unknown group key '" + std::string(text) + "'");
}

std::string group_of(const Post& post, GroupKey key) {
  switch (key) {
    case GroupKey::origin_disorder:
      if (post.is_control) return "control";
      return post.origin_disorder.value_or("");
    case GroupKey::origin_subreddit: return post.origin_subreddit.value_or("");
    case GroupKey::source: return std::string(to_string(post.source));
  }
  return "";
}

namespace {

// Post ids of each group, in dataset order.
std::map<std::string, std::vector<std::string>> group_posts(const Dataset& dataset, GroupKey key,
                                                            const std::set<std::string>& exclude) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& post : dataset.posts()) {
    if (exclude.count(post.id) != 0) continue;
    auto group = group_of(post, key);
    if (!group.empty()) groups[group].push_back(post.id);
  }
  return groups;
}

std::vector<std::string> draw(const std::vector<std::string>& pool, std::size_t n, std::uint64_t seed,
                              const std::string& group) {
  Rng rng(derive_seed(seed, group));
  std::vector<std::string> out;
  for (auto index : sample_indices(rng, pool.size(), n)) out.push_back(pool[index]);
  return out;
}

}  // namespace

Dataset sample_per_group(const Dataset& dataset, GroupKey key, std::size_t n, std::uint64_t seed,
                         const std::vector<std::string>& requested) {
  const auto groups = group_posts(dataset, key, {});
  std::vector<std::string> names = requested;
  if (names.empty()) {
    for (const auto& [name, ids] : groups) names.push_back(name);
  }
  std::vector<std::string> chosen;
  for (const auto& name : names) {
    auto it = groups.find(name);
    const std::size_t available = it == groups.end() ? 0 : it->second.size();
    if (available < n) {
      throw UserError("group '" + name + "' has " + std::to_string(available) + " posts, " + std::to_string(n) +
                      " requested");
    }
    auto picked = draw(it->second, n, seed, name);
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }
  auto out = dataset.subset(chosen);
  out.meta().seed = seed;
  out.meta().params = {{"operation", "sample_per_group"},
                       {"group_key", to_string(key)},
                       {"n", n},
                       {"groups", names},
                       {"parent", dataset.meta().name}};
  return out;
}

std::vector<std::string> sample_controls(const Dataset& dataset, std::size_t n, std::uint64_t seed,
                                         const std::set<std::string>& exclude) {
  std::map<std::string, std::vector<std::string>> by_subreddit;
  for (const auto& post : dataset.posts()) {
    if (post.is_control && exclude.count(post.id) == 0) {
      by_subreddit[post.origin_subreddit.value_or("")].push_back(post.id);
    }
  }
  if (n == 0) return {};
  if (by_subreddit.empty()) throw UserError("no control posts available for sampling");
  const std::size_t k = by_subreddit.size();
  std::vector<std::string> chosen;
  std::size_t i = 0;
  for (const auto& [subreddit, ids] : by_subreddit) {
    const std::size_t quota = n / k + (i < n % k ? 1 : 0);
    ++i;
    if (ids.size() < quota) {
      throw UserError("control subreddit '" + subreddit + "' has " + std::to_string(ids.size()) + " posts, " +
                      std::to_string(quota) + " requested");
    }
    auto picked = draw(ids, quota, seed, "control/" + subreddit);
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }
  return chosen;
}

Dataset sample_rmhd(const Dataset& dataset, const Registry& registry, const RmhdSampleOptions& options) {
  const auto groups = group_posts(dataset, GroupKey::origin_disorder, options.exclude);
  std::vector<std::string> chosen;
  std::vector<std::string> disorder_groups;
  const std::set<std::string> wanted(options.groups.begin(), options.groups.end());
  for (const auto& id : wanted) {
    if (groups.find(id) == groups.end()) throw UserError("no posts available for group '" + id + "'");
  }
  for (const auto& id : registry.ids()) {
    auto it = groups.find(id);
    if (it == groups.end() || (!wanted.empty() && wanted.count(id) == 0)) continue;
    disorder_groups.push_back(id);
    if (it->second.size() < options.per_disorder) {
      throw UserError("group '" + id + "' has " + std::to_string(it->second.size()) + " posts, " +
                      std::to_string(options.per_disorder) + " requested");
    }
    auto picked = draw(it->second, options.per_disorder, options.seed, id);
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }
  auto controls = sample_controls(dataset, options.control, options.seed, options.exclude);
  chosen.insert(chosen.end(), controls.begin(), controls.end());

  auto out = dataset.subset(chosen);
  out.meta().seed = options.seed;
  out.meta().params = {{"operation", "sample_rmhd"},
                       {"per_disorder", options.per_disorder},
                       {"control", options.control},
                       {"disorder_groups", disorder_groups},
                       {"excluded", options.exclude.size()},
                       {"control_allocation", "equal share per control subreddit"},
                       {"parent", dataset.meta().name}};
  return out;
}

}  // namespace labelforge
