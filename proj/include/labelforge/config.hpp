#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelforge/labels.hpp"
#include "labelforge/provider.hpp"

namespace labelforge {

struct SampleSizes {
  std::size_t initial = 600;  ///< per disorder, before review
  std::size_t final = 500;    ///< per disorder, after review
  std::size_t control = 500;
};

/// Everything a pipeline run needs besides its input files. Relative paths
/// are resolved against the directory of the config file.
struct PipelineConfig {
  std::string registry_path;  ///< empty means the built-in registry
  std::string synonyms_path;
  std::vector<ProviderConfig> providers;
  std::string screening_model;               ///< defaults to the first provider
  std::vector<std::string> annotation_models;  ///< empty means every provider
  std::string canonical_model;               ///< writes "llm" truth cells at build; empty skips
  std::vector<std::string> disorders;        ///< multi-label target set
  PromptKind prompt_kind = PromptKind::single_label;
  std::uint64_t seed = 0;
  SampleSizes sample;
  std::string cache_path = "labelforge-cache.jsonl";
  std::string work_dir = ".";  ///< manifests
  int review_port = 8765;
  /// Leaves latency and timestamps out of artifacts so that reruns are
  /// byte-identical.
  bool reproducible = false;

  /// Throws UserError on inconsistent settings.
  void validate() const;
  const ProviderConfig& provider(const std::string& model_id) const;
  std::vector<std::string> annotation_model_ids() const;
};

/// Defaults: one stub provider and the six-disorder target set.
PipelineConfig default_config();
/// Unknown keys are rejected. `base_dir` anchors relative paths.
PipelineConfig config_from_json(const nlohmann::json& record, const std::string& base_dir = "");
nlohmann::json to_json(const PipelineConfig& config);
/// Throws IoError when the file cannot be read or parsed.
PipelineConfig load_config(const std::string& path);
/// SHA-256 of the canonical JSON form, without cache/work-dir/port and
/// with the registry tables counted by content.
std::string config_digest(const PipelineConfig& config);

}  // namespace labelforge
