#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelforge/dataset.hpp"

namespace labelforge {

class Registry;

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& other);
  bool operator==(const ConfusionCounts&) const = default;
};

struct ConfusionResult {
  ConfusionCounts counts;
  std::size_t excluded = 0;  ///< cells with unknown on either side
};

using LabelMap = std::map<std::string, LabelVector>;

/// Binary tally for one disorder over the posts present in both maps.
/// Throws UserError when the post sets differ or no cell is scorable.
ConfusionResult confusion(const LabelMap& pred, const LabelMap& truth, const std::string& disorder);

// 0/0 resolves to 0.0 for precision, recall and F1.
double precision(const ConfusionCounts& counts);
double recall(const ConfusionCounts& counts);
double f1(const ConfusionCounts& counts);
/// Mean of the recalls of the classes with nonzero truth support. Throws
/// UserError when there are no cells at all.
double balanced_accuracy(const ConfusionCounts& counts);

struct OverallMetrics {
  double oba = 0.0;
  double of1 = 0.0;
  double op = 0.0;
  double orc = 0.0;
};

/// Sums the counts, then applies the binary formulas.
OverallMetrics overall_micro(std::span<const ConfusionCounts> per_disorder);

/// Dense N x L binary matrix, row-major.
struct BinaryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> cells;

  BinaryMatrix() = default;
  BinaryMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), cells(r * c, 0) {}
  std::uint8_t& at(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
};

/// Throws UserError on a shape mismatch or an empty matrix.
double hamming_loss(const BinaryMatrix& pred, const BinaryMatrix& truth);

/// Bit i of the id is set when disorders[i] is positive.
std::uint64_t power_set_class(const LabelVector& labels, const std::vector<std::string>& disorders);

/// Power-set balanced accuracy: mean recall over classes with truth support.
double multiclass_ba(std::span<const LabelVector> pred, std::span<const LabelVector> truth,
                     const std::vector<std::string>& disorders);

struct DisorderMetrics {
  ConfusionCounts counts;
  double cba = 0.0;
  double cf1 = 0.0;
  double cp = 0.0;
  double cr = 0.0;
};

struct MetricsReport {
  std::string model;  ///< model id or "vote:a,b,c"
  PromptKind kind = PromptKind::single_label;
  std::vector<std::string> disorders;
  std::map<std::string, DisorderMetrics> per_disorder;
  ConfusionCounts overall_counts;
  OverallMetrics overall;
  double hamming_loss = 0.0;
  double multiclass_ba = 0.0;
  std::size_t posts = 0;
  std::size_t annotations = 0;
  std::size_t parse_failures = 0;
  std::size_t recovered = 0;
  double parse_failure_rate = 0.0;
  double recovery_rate = 0.0;
  std::string truth_source = "truth";
  std::uint64_t seed = 0;
};

struct EvaluateRequest {
  LabelSource prediction;  ///< model or vote
  LabelSource truth;       ///< usually Type::truth
  std::vector<std::string> disorders;
  std::vector<std::string> post_ids;  ///< empty means every post with complete truth
};

/// Throws UserError listing missing (post, disorder) cells when a selected
/// post lacks an annotation.
MetricsReport evaluate(const Dataset& dataset, const Registry& registry, const EvaluateRequest& request);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport metrics_report_from_json(const nlohmann::json& record);

/// Aligned-text table with one row per report. Column names follow the
/// usual layout: CBA/CF1/CP/CR per disorder, then GBA OF1 OP OR HL BA.
std::string render_metrics_table(std::span<const MetricsReport> reports);

/// Equal-size sample of every power-set class present, at the size of the
/// smallest class. Throws UserError when a class of the full power set has
/// no posts.
Dataset balanced_subset(const Dataset& dataset, const std::vector<std::string>& disorders, std::uint64_t seed);

}  // namespace labelforge
