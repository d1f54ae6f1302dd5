#include "labelforge/pipeline.hpp"

#include <filesystem>
#include <map>
#include <set>

#include "labelforge/corpus.hpp"
#include "labelforge/error.hpp"
#include "labelforge/log.hpp"
#include "labelforge/random.hpp"
#include "labelforge/registry.hpp"

namespace labelforge {

GatewayPool::GatewayPool(const PipelineConfig& config, const Registry& registry, ResponseCache& cache,
                         Clock& clock) {
  for (const auto& p : config.providers) {
    gateways_.push_back(std::make_unique<Gateway>(p, make_provider(p, registry), cache, clock));
  }
}

GatewayPool::GatewayPool(std::vector<std::unique_ptr<Gateway>> gateways) : gateways_(std::move(gateways)) {}

Gateway& GatewayPool::get(const std::string& model_id) {
  for (auto& g : gateways_) {
    if (g->config().model_id == model_id) return *g;
  }
  throw UserError("no provider configured for model '" + model_id + "'");
}

std::size_t GatewayPool::provider_calls() const {
  std::size_t n = 0;
  for (const auto& g : gateways_) n += g->provider_calls();
  return n;
}

namespace {

[[noreturn]] void rethrow_incomplete(const AnnotateReport& report, const std::string& what) {
  const auto message = what + ": " + std::to_string(report.failed_post_ids.size()) +
                       " posts unannotated, rerun to resume (" + report.first_error + ")";
  if (report.first_error_code == ExitCode::user) throw UserError(message);
  throw ProviderError(message, "", 0, 0);
}

}  // namespace

ScreenResult screen(Dataset& dataset, const Registry& registry, Gateway& gateway, const ScreenOptions& options) {
  std::map<std::string, std::vector<std::string>> by_disorder;
  for (const auto& post : dataset.posts()) {
    if (post.is_control || !post.origin_disorder) continue;
    by_disorder[*post.origin_disorder].push_back(post.id);
  }
  if (by_disorder.empty()) throw UserError("nothing to screen: no post carries an origin disorder");

  ScreenResult result;
  for (const auto& disorder : registry.in_registry_order([&] {
         std::vector<std::string> ids;
         for (const auto& [d, posts] : by_disorder) ids.push_back(d);
         return ids;
       }())) {
    AnnotateRequest request;
    request.post_ids = by_disorder[disorder];
    request.disorders = {disorder};
    request.kind = PromptKind::single_label;
    request.record_timing = options.record_timing;
    if (!options.manifest_path.empty()) request.manifest_path = options.manifest_path;
    auto report = annotate(dataset, registry, request, gateway);
    result.report.jobs += report.jobs;
    result.report.cache_hits += report.cache_hits;
    result.report.provider_calls += report.provider_calls;
    result.report.skipped_existing += report.skipped_existing;
    if (!report.complete()) rethrow_incomplete(report, "screening for " + disorder);
  }

  const auto& model = gateway.config().model_id;
  for (const auto& post : dataset.posts()) {
    if (post.is_control || !post.origin_disorder) continue;
    const auto& disorder = *post.origin_disorder;
    auto resolved = resolve_model_prediction(dataset, post.id, model, PromptKind::single_label, {disorder});
    if (resolved.labels.get(disorder) == LabelState::positive) {
      result.queue.auto_kept.push_back(post.id);
      continue;
    }
    ReviewItem item;
    item.post_id = post.id;
    item.text = post.text;
    item.origin_disorder = disorder;
    result.queue.add(std::move(item));
  }
  return result;
}

Dataset finalize(const Dataset& dataset, const ReviewQueue& queue, const FinalizeOptions& options) {
  if (auto pending = queue.pending_count(); pending > 0) {
    throw UserError("queue not fully decided: " + std::to_string(pending) + " items pending");
  }
  const auto removed_list = queue.removed_ids();
  const std::set<std::string> removed(removed_list.begin(), removed_list.end());

  std::map<std::string, std::vector<std::string>> survivors;
  std::vector<std::string> controls;
  for (const auto& post : dataset.posts()) {
    if (removed.count(post.id) != 0) continue;
    if (post.is_control) {
      controls.push_back(post.id);
    } else if (post.origin_disorder) {
      survivors[*post.origin_disorder].push_back(post.id);
    }
  }
  std::string shortfall;
  for (const auto& [disorder, ids] : survivors) {
    if (ids.size() < options.per_disorder) {
      if (!shortfall.empty()) shortfall += ", ";
      shortfall += disorder + " short by " + std::to_string(options.per_disorder - ids.size());
    }
  }
  if (!shortfall.empty()) {
    throw UserError("not enough posts survive review (" + shortfall + "); draw replacements with sample --top-up");
  }

  std::set<std::string> chosen(controls.begin(), controls.end());
  for (const auto& [disorder, ids] : survivors) {
    Rng rng(derive_seed(options.seed, "finalize/" + disorder));
    for (auto i : sample_indices(rng, ids.size(), options.per_disorder)) chosen.insert(ids[i]);
  }
  std::vector<std::string> ordered;
  for (const auto& post : dataset.posts()) {
    if (chosen.count(post.id) != 0) ordered.push_back(post.id);
  }
  auto out = dataset.subset(ordered);
  out.meta().seed = options.seed;
  out.meta().params = {{"operation", "finalize"},
                       {"per_disorder", options.per_disorder},
                       {"removed", removed.size()},
                       {"controls", controls.size()},
                       {"parent", dataset.meta().name}};
  return out;
}

BuildResult build_multilabel(Dataset& dataset, const Registry& registry, GatewayPool& gateways,
                             const BuildOptions& options) {
  const auto disorders = registry.in_registry_order(options.disorders);
  if (disorders.empty()) throw UserError("build needs at least one disorder");
  if (options.models.empty()) throw UserError("build needs at least one annotation model");

  for (const auto& post : dataset.posts()) {
    if (post.origin_disorder) dataset.set_truth(post.id, *post.origin_disorder, LabelState::positive, cell_source::origin);
  }

  BuildResult result;
  for (const auto& model : options.models) {
    AnnotateRequest request;
    request.disorders = disorders;
    request.kind = options.kind;
    request.retain_origin = true;
    request.record_timing = options.record_timing;
    if (!options.work_dir.empty()) {
      request.manifest_path = (std::filesystem::path(options.work_dir) / ("build-" + model + ".manifest.json")).string();
    }
    auto report = annotate(dataset, registry, request, gateways.get(model));
    if (!report.complete()) rethrow_incomplete(report, "annotation by " + model);
    result.reports.emplace(model, std::move(report));
  }

  for (const auto& model : options.models) {
    LabelSource source;
    source.type = LabelSource::Type::model;
    source.models = {model};
    source.kind = options.kind;
    auto labels = resolve_labels(dataset, source, disorders, true);
    result.distribution.push_back(label_distribution(labels, disorders, model));
  }

  if (!options.canonical_model.empty()) {
    LabelSource source;
    source.type = LabelSource::Type::model;
    source.models = {options.canonical_model};
    source.kind = options.kind;
    auto labels = resolve_labels(dataset, source, disorders, true);
    for (const auto& [id, vector] : labels) {
      const auto* truth = dataset.truth(id);
      for (const auto& d : disorders) {
        if (truth) {
          auto it = truth->sources.find(d);
          if (it != truth->sources.end() && it->second == cell_source::origin) continue;
        }
        dataset.set_truth(id, d, vector.get(d), cell_source::llm);
      }
    }
  }
  auto& params = dataset.meta().params;
  params["multilabel"] = {{"disorders", disorders},
                          {"models", options.models},
                          {"prompt", to_string(options.kind)},
                          {"canonical_model", options.canonical_model}};
  return result;
}

}  // namespace labelforge
