#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelforge/metrics.hpp"

namespace labelforge {

/// 2x2 co-occurrence counts. A is the exposure (rows), B the outcome.
struct ContingencyTable {
  std::string disorder_a;
  std::string disorder_b;
  std::uint64_t a = 0;  ///< A+, B+
  std::uint64_t b = 0;  ///< A+, B-
  std::uint64_t c = 0;  ///< A-, B+
  std::uint64_t d = 0;  ///< A-, B-

  std::uint64_t total() const { return a + b + c + d; }
  bool operator==(const ContingencyTable&) const = default;
};

/// Counts over posts with definite labels for both disorders. Throws
/// UserError when A == B or no post qualifies.
ContingencyTable contingency(const LabelMap& labels, const std::string& disorder_a,
                             const std::string& disorder_b);

/// Row-conditional proportions; a row with no posts leaves its pair unset.
struct ConditionalProportions {
  std::optional<double> pos_given_pos;  ///< P(B+ | A+)
  std::optional<double> neg_given_pos;  ///< P(B- | A+)
  std::optional<double> pos_given_neg;  ///< P(B+ | A-)
  std::optional<double> neg_given_neg;  ///< P(B- | A-)
};

ConditionalProportions conditional_proportions(const ContingencyTable& table);

struct OddsRatio {
  double value = 0.0;
  bool corrected = false;  ///< 0.5 added to every cell because one was zero
};

/// (a*d)/(b*c); with the Haldane-Anscombe correction when any cell is zero.
OddsRatio odds_ratio(const ContingencyTable& table);

struct ComorbidityMatrix {
  std::vector<std::string> disorders;
  std::string label_source;
  /// Ordered pairs (A, B), A != B, in registry order.
  std::vector<ContingencyTable> ordered;
  std::vector<ConditionalProportions> proportions;  ///< parallel to `ordered`
  /// Unordered pairs (A, B) with A before B.
  std::vector<ContingencyTable> unordered;
  std::vector<OddsRatio> odds_ratios;  ///< parallel to `unordered`

  const OddsRatio& odds(const std::string& x, const std::string& y) const;
};

/// Throws UserError with fewer than two disorders.
ComorbidityMatrix comorbidity_matrix(const LabelMap& labels, const std::vector<std::string>& disorders,
                                     std::string label_source = "truth");

/// Export consumed by the heatmap view; see docs/review-api.md.
nlohmann::json to_json(const ComorbidityMatrix& matrix);

struct DistributionRow {
  std::string source;  ///< label source description, e.g. "model:llama-3-70b"
  std::size_t posts = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  ///< disorder -> (positive, negative)
};

/// Positive/negative counts per disorder; posts without a definite label
/// for a disorder are not counted for it.
DistributionRow label_distribution(const LabelMap& labels, const std::vector<std::string>& disorders,
                                   std::string source);

nlohmann::json to_json(const DistributionRow& row);
/// Rows are sources, columns are disorders x {Positive, Negative}.
std::string render_distribution_table(const std::vector<DistributionRow>& rows,
                                      const std::vector<std::string>& disorders);

}  // namespace labelforge
