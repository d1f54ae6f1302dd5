#pragma once

#include <memory>
#include <string>
#include <vector>

#include "labelforge/analysis.hpp"
#include "labelforge/config.hpp"
#include "labelforge/dataset.hpp"
#include "labelforge/gateway.hpp"
#include "labelforge/review.hpp"

namespace labelforge {

class Registry;

/// Gateways for every configured provider, sharing one cache and clock.
class GatewayPool {
 public:
  GatewayPool(const PipelineConfig& config, const Registry& registry, ResponseCache& cache, Clock& clock);
  /// Test hook: gateways over caller-supplied providers.
  GatewayPool(std::vector<std::unique_ptr<Gateway>> gateways);

  Gateway& get(const std::string& model_id);
  std::size_t provider_calls() const;

 private:
  std::vector<std::unique_ptr<Gateway>> gateways_;
};

struct ScreenOptions {
  std::string manifest_path;
  bool record_timing = true;
};

struct ScreenResult {
  ReviewQueue queue;
  AnnotateReport report;
};

/// Asks the screening model whether each non-control post shows its own
/// origin disorder. Positive answers are kept automatically; negative and
/// unparseable ones enter the review queue. Annotations are stored in the
/// dataset. Throws the first gateway error once the pass is incomplete.
ScreenResult screen(Dataset& dataset, const Registry& registry, Gateway& gateway, const ScreenOptions& options = {});

struct FinalizeOptions {
  std::size_t per_disorder = 500;
  std::uint64_t seed = 0;
};

/// Drops posts decided `remove`, then samples `per_disorder` survivors per
/// origin disorder; control posts pass through. Throws UserError when the
/// queue still has pending items or a group falls short.
Dataset finalize(const Dataset& dataset, const ReviewQueue& queue, const FinalizeOptions& options);

struct BuildOptions {
  std::vector<std::string> disorders;
  std::vector<std::string> models;
  PromptKind kind = PromptKind::single_label;
  std::string canonical_model;
  std::string work_dir;  ///< manifests; empty disables them
  bool record_timing = true;
};

struct BuildResult {
  std::map<std::string, AnnotateReport> reports;  ///< per model
  std::vector<DistributionRow> distribution;      ///< per model
};

/// Converts a finalized dataset to multi-label form in place: the origin
/// disorder cell becomes positive truth from provenance, every other cell
/// is annotated by each model. With a canonical model its answers become
/// "llm" truth cells.
BuildResult build_multilabel(Dataset& dataset, const Registry& registry, GatewayPool& gateways,
                             const BuildOptions& options);

}  // namespace labelforge
