#pragma once

// Checks shared by the acceptance binary and the unit tests. Each returns
// a verdict plus a one-line detail for the report.

#include <cstdint>
#include <string>
#include <vector>

#include "labelforge/labels.hpp"

namespace labelforge::checks {

struct Verdict {
  bool pass = false;
  std::string detail;
};

/// Library metrics against the brute-force oracle on random instances.
Verdict metric_oracle(std::size_t instances, std::uint64_t seed);

/// Odds ratio and conditional proportion on the reference two-label cells.
Verdict two_label_arithmetic();

/// Merge of the official corpora when both paths exist, else the synthetic
/// pair with its expected cells. `used_official` reports which one ran.
Verdict merge_reproduction(const std::string& dreaddit_path, const std::string& depseverity_path,
                           bool& used_official);

/// Every kind rendered over several posts and disorder lists, re-blanked,
/// compared byte-for-byte and by hash with the template files on disk.
Verdict template_exactness();

struct ParserCase {
  PromptKind kind;
  std::vector<std::string> disorders;
  std::string raw;
  ParseStatus status;
  std::vector<std::string> positives;  ///< expected positive ids; the rest negative
  std::vector<std::string> unknown_tokens;
};

const std::vector<ParserCase>& parser_corpus();
Verdict parser_corpus_agreement();
/// Random strings through every parser; no exception, invariants hold.
Verdict parser_fuzz(std::size_t strings, std::uint64_t seed);

/// Class strings listed by the multi-label-1 prompt for n = 2..6 parse back
/// to their exact label vectors. `cases` receives the number checked.
Verdict power_set_round_trip(std::size_t& cases);

/// Full pipeline twice from cold caches plus one warm rerun, through the
/// in-process CLI, on the synthetic RMHD fixture.
Verdict end_to_end_determinism(double& seconds);

/// Balanced subset of a dataset carrying the reference two-label cells.
Verdict balanced_subset_arithmetic();

}  // namespace labelforge::checks
