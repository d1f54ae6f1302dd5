#include "labelforge/gateway.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "labelforge/dataset_io.hpp"
#include "labelforge/error.hpp"
#include "labelforge/hash.hpp"
#include "labelforge/log.hpp"
#include "labelforge/parser.hpp"
#include "labelforge/registry.hpp"

namespace labelforge {

Gateway::Gateway(ProviderConfig config, std::unique_ptr<Provider> provider, ResponseCache& cache, Clock& clock)
    : config_(std::move(config)),
      provider_(std::move(provider)),
      cache_(cache),
      clock_(clock),
      limiter_(config_.requests_per_minute, clock) {
  config_.validate();
}

CompletionResult Gateway::complete(const RenderedPrompt& prompt) {
  const auto key = cache_key(config_.model_id, config_.temperature, prompt.text);
  if (auto hit = cache_.get(key)) {
    ++cache_hits_;
    return {std::move(*hit), true, 0, 0};
  }
  const auto started = clock_.now();
  AttemptResult last;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    limiter_.acquire();
    ++provider_calls_;
    last = provider_->attempt(prompt);
    if (last.success()) {
      cache_.put({key, config_.model_id, config_.temperature, sha256_hex(prompt.text), last.content});
      const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(clock_.now() - started);
      return {std::move(last.content), false, latency.count(), attempt};
    }
    if (last.auth_failure()) {
      throw ConfigError("provider " + provider_->name() + " rejected the credentials (HTTP " +
                        std::to_string(last.status) + ")");
    }
    if (!last.transient()) {
      throw ProviderError("provider " + provider_->name() + " returned HTTP " + std::to_string(last.status) + ": " +
                              last.error,
                          provider_->name(), attempt, last.status);
    }
    if (attempt < config_.retry.max_attempts) clock_.sleep_for(config_.retry.delay_for(attempt));
  }
  throw ProviderError("provider " + provider_->name() + " failed after " + std::to_string(config_.retry.max_attempts) +
                          " attempts (last status " + std::to_string(last.status) +
                          (last.error.empty() ? "" : ", " + last.error) + ")",
                      provider_->name(), config_.retry.max_attempts, last.status);
}

namespace {

struct Job {
  const Post* post = nullptr;
  std::vector<std::string> disorders;  // prompt disorders
  std::string target;
};

struct JobResult {
  std::optional<Annotation> annotation;
  std::string error;
  ExitCode code = ExitCode::ok;
};

}  // namespace

Manifest load_manifest(const std::string& path) {
  try {
    auto record = nlohmann::json::parse(read_file(path));
    Manifest manifest;
    manifest.model_id = record.at("model_id").get<std::string>();
    manifest.kind = prompt_kind_from_string(record.at("kind").get<std::string>());
    manifest.disorders = record.at("disorders").get<std::vector<std::string>>();
    manifest.pending = record.at("pending").get<std::vector<std::string>>();
    manifest.completed = record.at("completed").get<std::size_t>();
    return manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path + ": " + e.what());
  }
}

void save_manifest(const Manifest& manifest, const std::string& path) {
  nlohmann::json record = {{"model_id", manifest.model_id},
                           {"kind", to_string(manifest.kind)},
                           {"disorders", manifest.disorders},
                           {"pending", manifest.pending},
                           {"completed", manifest.completed}};
  write_file_atomic(path, record.dump(2) + "\n");
}

AnnotateReport annotate(Dataset& dataset, const Registry& registry, const AnnotateRequest& request,
                        Gateway& gateway) {
  const auto& model_id = gateway.config().model_id;
  const auto disorders = request.kind == PromptKind::unrestricted ? std::vector<std::string>{}
                                                                    : registry.in_registry_order(request.disorders);
  if (request.kind != PromptKind::unrestricted && disorders.empty()) {
    throw UserError("annotation pass needs at least one disorder");
  }
  if ((request.kind == PromptKind::multi_label_1 || request.kind == PromptKind::multi_label_2) && disorders.size() < 2) {
    throw UserError("multi-label annotation needs at least two disorders");
  }

  std::vector<std::string> post_ids = request.post_ids;
  if (post_ids.empty()) {
    for (const auto& post : dataset.posts()) post_ids.push_back(post.id);
  }

  AnnotateReport report;
  std::vector<Job> jobs;
  for (const auto& id : post_ids) {
    const auto& post = dataset.post(id);
    auto existing = [&](const std::string& target) {
      return !request.overwrite && dataset.annotation({post.id, model_id, request.kind, target}) != nullptr;
    };
    if (request.kind == PromptKind::single_label) {
      for (const auto& d : disorders) {
        if (request.retain_origin && post.origin_disorder == d) {
          ++report.skipped_retained;
          continue;
        }
        if (existing(d)) {
          ++report.skipped_existing;
          continue;
        }
        jobs.push_back({&post, {d}, d});
      }
    } else if (existing("")) {
      ++report.skipped_existing;
    } else {
      jobs.push_back({&post, disorders, ""});
    }
  }
  report.jobs = jobs.size();

  // Remaining job count per post, for the manifest.
  std::map<std::string, std::size_t> remaining;
  std::vector<std::string> pending_order;
  for (const auto& job : jobs) {
    if (remaining[job.post->id]++ == 0) pending_order.push_back(job.post->id);
  }
  Manifest manifest{model_id, request.kind, disorders, pending_order, 0};
  if (!request.manifest_path.empty()) save_manifest(manifest, request.manifest_path);

  const auto calls_before = gateway.provider_calls();
  const auto hits_before = gateway.cache_hits();

  std::vector<JobResult> results(jobs.size());
  std::mutex progress_mutex;
  std::set<std::string> failed_posts;
  std::size_t completed_posts = 0;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto write_progress = [&] {
    if (request.manifest_path.empty()) return;
    Manifest snapshot = manifest;
    snapshot.pending.clear();
    for (const auto& id : pending_order) {
      if (remaining[id] > 0 || failed_posts.count(id) != 0) snapshot.pending.push_back(id);
    }
    snapshot.completed = completed_posts;
    save_manifest(snapshot, request.manifest_path);
  };

  auto worker = [&] {
    while (!abort.load()) {
      const auto index = next.fetch_add(1);
      if (index >= jobs.size()) return;
      const auto& job = jobs[index];
      auto& result = results[index];
      try {
        const auto prompt = render(request.kind, registry, job.disorders, *job.post);
        auto completion = gateway.complete(prompt);
        Annotation a;
        a.post_id = job.post->id;
        a.model_id = model_id;
        a.kind = request.kind;
        a.target = job.target;
        a.outcome = parse_response(request.kind, completion.response, registry, job.disorders);
        a.raw_response = std::move(completion.response);
        a.cached = completion.cached;
        if (request.record_timing) {
          a.latency_ms = completion.latency_ms;
          a.timestamp = gateway.clock().timestamp();
        }
        result.annotation = std::move(a);
      } catch (const ConfigError& e) {
        result.error = e.what();
        result.code = e.code();
        abort = true;
      } catch (const Error& e) {
        result.error = e.what();
        result.code = e.code();
      }
      std::lock_guard lock(progress_mutex);
      const auto& id = job.post->id;
      if (!result.annotation) failed_posts.insert(id);
      if (--remaining[id] == 0 && failed_posts.count(id) == 0) ++completed_posts;
      if ((index + 1) % 64 == 0) write_progress();
    }
  };

  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(gateway.config().max_concurrent), jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& result = results[i];
    if (result.annotation) {
      dataset.put_annotation(std::move(*result.annotation));
    } else {
      failed_posts.insert(jobs[i].post->id);
      if (report.first_error.empty()) {
        report.first_error = result.error.empty() ? "annotation pass aborted" : result.error;
        report.first_error_code = result.error.empty() ? ExitCode::provider : result.code;
      }
    }
  }
  for (const auto& id : pending_order) {
    if (failed_posts.count(id) != 0) report.failed_post_ids.push_back(id);
  }
  report.provider_calls = gateway.provider_calls() - calls_before;
  report.cache_hits = gateway.cache_hits() - hits_before;

  manifest.pending = report.failed_post_ids;
  manifest.completed = pending_order.size() - report.failed_post_ids.size();
  if (!request.manifest_path.empty()) save_manifest(manifest, request.manifest_path);
  if (!report.complete()) {
    log::warning("annotation pass for " + model_id + " left " + std::to_string(report.failed_post_ids.size()) +
                 " posts unannotated: " + report.first_error);
  }
  return report;
}

}  // namespace labelforge
