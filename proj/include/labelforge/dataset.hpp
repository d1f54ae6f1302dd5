#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelforge/labels.hpp"

namespace labelforge {

class Registry;

enum class CorpusSource : std::uint8_t { dreaddit, depseverity, rmhd, merged };

std::string_view to_string(CorpusSource source);
std::optional<CorpusSource> corpus_source_from_string(std::string_view text);

struct Post {
  std::string id;
  std::string text;
  CorpusSource source = CorpusSource::merged;
  std::optional<std::string> origin_subreddit;
  std::optional<std::string> origin_disorder;  ///< subreddit-derived label
  bool is_control = false;

  bool operator==(const Post&) const = default;
};

/// Where a truth cell came from.
namespace cell_source {
inline constexpr std::string_view corpus = "corpus";  ///< human-annotated source corpus
inline constexpr std::string_view origin = "origin";  ///< retained subreddit label
inline constexpr std::string_view llm = "llm";
}  // namespace cell_source

struct TruthRecord {
  LabelVector labels;
  std::map<std::string, std::string, std::less<>> sources;  ///< disorder id -> cell_source

  bool operator==(const TruthRecord&) const = default;
};

/// Identifies one stored model response. Single-label prompts are issued
/// once per disorder, so `target` holds that disorder; it is empty for the
/// kinds that cover several disorders in one request.
struct AnnotationKey {
  std::string post_id;
  std::string model_id;
  PromptKind kind = PromptKind::single_label;
  std::string target;

  auto operator<=>(const AnnotationKey&) const = default;
};

struct Annotation {
  std::string post_id;
  std::string model_id;
  PromptKind kind = PromptKind::single_label;
  std::string target;
  std::string raw_response;  ///< verbatim, also when parsing failed
  ParseOutcome outcome;
  std::int64_t latency_ms = 0;
  bool cached = false;
  std::string timestamp;  ///< ISO-8601 UTC

  AnnotationKey key() const { return {post_id, model_id, kind, target}; }
  bool operator==(const Annotation&) const = default;
};

struct DatasetMeta {
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();  ///< creation parameters

  bool operator==(const DatasetMeta&) const = default;
};

/// Posts with their truth labels and model annotations. Post order is
/// significant and preserved through save/load.
class Dataset {
 public:
  Dataset() = default;

  DatasetMeta& meta() { return meta_; }
  const DatasetMeta& meta() const { return meta_; }

  /// Appends a post; throws UserError when the id already exists or the
  /// text is blank.
  void add_post(Post post);
  const std::vector<Post>& posts() const { return posts_; }
  bool has_post(std::string_view id) const { return index_.find(id) != index_.end(); }
  const Post& post(std::string_view id) const;
  std::size_t size() const { return posts_.size(); }

  void set_truth(const std::string& post_id, std::string_view disorder, LabelState state,
                 std::string_view source);
  const TruthRecord* truth(std::string_view post_id) const;
  const std::map<std::string, TruthRecord, std::less<>>& truth_records() const { return truth_; }

  /// Inserts or replaces the annotation under its key.
  void put_annotation(Annotation annotation);
  const Annotation* annotation(const AnnotationKey& key) const;
  const std::map<AnnotationKey, Annotation>& annotations() const { return annotations_; }

  /// New dataset holding the given posts (in this dataset's order) together
  /// with their truth and annotations. Meta is copied.
  Dataset subset(const std::vector<std::string>& post_ids) const;

  /// Throws UserError when a truth or annotation label names a disorder
  /// missing from the registry.
  void check_registry(const Registry& registry) const;

  bool operator==(const Dataset& other) const {
    return meta_ == other.meta_ && posts_ == other.posts_ && truth_ == other.truth_ &&
           annotations_ == other.annotations_;
  }

 private:
  DatasetMeta meta_;
  std::vector<Post> posts_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, TruthRecord, std::less<>> truth_;
  std::map<AnnotationKey, Annotation> annotations_;
};

/// Selects which labels an analysis or evaluation reads.
struct LabelSource {
  enum class Type { truth, model, vote } type = Type::truth;
  std::vector<std::string> models;  ///< one for `model`, two or more for `vote`
  PromptKind kind = PromptKind::single_label;

  /// "truth", "model:<id>" or "vote:<id>,<id>,...".
  static LabelSource parse(std::string_view text, PromptKind kind);
  std::string describe() const;
};

/// Predicted labels for one post and one model, assembled from its stored
/// annotations. Failed parses contribute negatives; the counters report
/// how many cells that affected.
struct ResolvedPrediction {
  LabelVector labels;
  std::size_t annotations = 0;
  std::size_t failed = 0;
  std::size_t recovered = 0;
  std::vector<std::string> missing;  ///< disorders without any annotation
};

ResolvedPrediction resolve_model_prediction(const Dataset& dataset, std::string_view post_id,
                                            std::string_view model_id, PromptKind kind,
                                            const std::vector<std::string>& disorders);

/// Labels per post for a label source. For model and vote sources, truth
/// cells marked with the "origin" source take precedence over model output.
/// Posts lacking a definite label for any requested disorder are skipped
/// unless `require_complete` is set, in which case a UserError lists them.
std::map<std::string, LabelVector> resolve_labels(const Dataset& dataset, const LabelSource& source,
                                                  const std::vector<std::string>& disorders,
                                                  bool require_complete = false);

}  // namespace labelforge
