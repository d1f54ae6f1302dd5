#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "labelforge/dataset.hpp"

namespace labelforge {

class Registry;

/// Non-fatal ingestion notes (skipped rows and the like).
struct IngestWarning {
  std::size_t row = 0;
  std::string message;
};

struct DreadditColumns {
  std::string text = "text";
  std::string label = "label";
  std::string id = "id";  ///< optional; empty or absent means no id column
  std::string subreddit = "subreddit";
};

struct DreadditRecord {
  Post post;
  LabelState stress = LabelState::unknown;
  std::optional<std::string> row_id;
};

struct DreadditLoad {
  std::vector<DreadditRecord> records;
  std::vector<IngestWarning> warnings;
};

DreadditLoad load_dreaddit(const std::string& path, const DreadditColumns& columns = {});

enum class Severity : std::uint8_t { minimal, mild, moderate, severe };

std::string_view to_string(Severity severity);
/// Case-insensitive; also accepts "minimum", the spelling used by the
/// published DepSeverity file.
std::optional<Severity> severity_from_string(std::string_view text);

/// minimal -> negative, everything else -> positive.
LabelState binarize_severity(Severity severity);

struct DepSeverityColumns {
  std::string text = "text";
  std::string severity = "label";
  std::string id = "id";
};

struct DepSeverityRecord {
  Post post;
  Severity severity = Severity::minimal;
  std::optional<std::string> row_id;
};

struct DepSeverityLoad {
  std::vector<DepSeverityRecord> records;
  std::vector<IngestWarning> warnings;
};

/// Throws UserError listing every unrecognized severity value.
DepSeverityLoad load_depseverity(const std::string& path, const DepSeverityColumns& columns = {});

/// Lowercased, whitespace-collapsed text used as the merge key.
std::string normalize_for_join(std::string_view text);
/// SHA-256 hex of normalize_for_join(text).
std::string join_key(std::string_view text);

struct MergeOptions {
  double min_join_rate = 0.95;
  std::string name = "depseverity-dreaddit";
};

struct MergeStats {
  std::size_t dreaddit_rows = 0;
  std::size_t depseverity_rows = 0;
  std::size_t dreaddit_unique = 0;
  std::size_t depseverity_unique = 0;
  std::size_t matched_by_text = 0;
  std::size_t matched_by_id = 0;
  std::size_t duplicate_conflicts = 0;  ///< identical texts carrying different labels
  std::vector<std::string> unmatched_dreaddit;     ///< row ids or row numbers
  std::vector<std::string> unmatched_depseverity;
  double join_rate = 0.0;
};

struct MergeResult {
  Dataset dataset;
  MergeStats stats;
};

/// Joins the two corpora on normalized text; identical texts collapse into
/// one post that keeps its first occurrence's labels. Throws UserError when
/// the join rate falls below the threshold.
MergeResult merge_depseverity_dreaddit(const std::vector<DreadditRecord>& dreaddit,
                                       const std::vector<DepSeverityRecord>& depseverity,
                                       const MergeOptions& options = {});

struct RmhdColumns {
  std::string subreddit = "subreddit";
  std::string text = "post";
  std::string id = "";  ///< optional; when empty ids are derived from file and row
};

/// Which subreddits are kept and what they mean.
struct SubredditFilter {
  std::map<std::string, std::string> disorder_subreddits;  ///< lowercase subreddit -> disorder id
  std::set<std::string> control_subreddits;                ///< lowercase

  static SubredditFilter defaults();
};

struct RmhdLoad {
  std::vector<Post> posts;
  std::vector<IngestWarning> warnings;
};

/// Rows from subreddits outside the filter are skipped silently.
RmhdLoad load_rmhd(const std::string& path, const SubredditFilter& filter = SubredditFilter::defaults(),
                   const RmhdColumns& columns = {});

/// Builds a dataset from RMHD posts; ids must be unique. Throws UserError on
/// an origin disorder missing from the registry.
Dataset rmhd_dataset(std::vector<Post> posts, const Registry& registry, std::string name = "rmhd");

enum class GroupKey : std::uint8_t { origin_disorder, origin_subreddit, source };

std::string_view to_string(GroupKey key);
GroupKey group_key_from_string(std::string_view text);

/// Group label of a post: the disorder id, "control" for control posts, the
/// subreddit, or the corpus tag. Empty when the post has no value.
std::string group_of(const Post& post, GroupKey key);

/// Exactly n posts per requested group without replacement. An empty
/// `groups` list means every group present. Output keeps dataset order.
/// Throws UserError naming a group with fewer than n posts.
Dataset sample_per_group(const Dataset& dataset, GroupKey key, std::size_t n, std::uint64_t seed,
                         const std::vector<std::string>& groups = {});

/// Control sample spread evenly over the control subreddits (remainder to
/// the first subreddits in sorted order). Posts in `exclude` are never drawn.
std::vector<std::string> sample_controls(const Dataset& dataset, std::size_t n, std::uint64_t seed,
                                         const std::set<std::string>& exclude = {});

struct RmhdSampleOptions {
  std::size_t per_disorder = 600;
  std::size_t control = 500;
  std::uint64_t seed = 0;
  std::set<std::string> exclude;  ///< post ids already used (top-up rounds)
  std::vector<std::string> groups;  ///< disorder groups to draw; empty means all present
};

/// Initial sample of the disorder groups plus the control group.
Dataset sample_rmhd(const Dataset& dataset, const Registry& registry, const RmhdSampleOptions& options);

}  // namespace labelforge
