#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "labelforge/cache.hpp"
#include "labelforge/clock.hpp"
#include "labelforge/dataset.hpp"
#include "labelforge/error.hpp"
#include "labelforge/provider.hpp"
#include "labelforge/rate_limiter.hpp"

namespace labelforge {

class Registry;

struct CompletionResult {
  std::string response;
  bool cached = false;
  std::int64_t latency_ms = 0;
  int attempts = 0;  ///< provider requests issued, 0 on a cache hit
};

/// One configured model: cache lookup, rate limiting, retries.
class Gateway {
 public:
  Gateway(ProviderConfig config, std::unique_ptr<Provider> provider, ResponseCache& cache, Clock& clock);

  /// Cached response when present; otherwise requests with exponential
  /// backoff on transient failures and stores the answer. Throws
  /// ProviderError once attempts are exhausted or on a non-retryable
  /// status, and ConfigError on an auth failure.
  CompletionResult complete(const RenderedPrompt& prompt);

  const ProviderConfig& config() const { return config_; }
  Clock& clock() { return clock_; }
  /// Requests actually sent to the provider, retries included.
  std::size_t provider_calls() const { return provider_calls_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

 private:
  ProviderConfig config_;
  std::unique_ptr<Provider> provider_;
  ResponseCache& cache_;
  Clock& clock_;
  RateLimiter limiter_;
  std::atomic<std::size_t> provider_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

struct AnnotateRequest {
  std::vector<std::string> post_ids;   ///< empty means every post
  std::vector<std::string> disorders;  ///< registry order is enforced
  PromptKind kind = PromptKind::single_label;
  /// Skip the (post, origin disorder) cell for single-label passes; that
  /// label is kept from provenance.
  bool retain_origin = false;
  /// Re-request cells that already carry an annotation.
  bool overwrite = false;
  /// Where to write the resumable manifest; empty disables it.
  std::string manifest_path;
  /// Store latency and timestamps. Off for byte-reproducible runs.
  bool record_timing = true;
};

struct AnnotateReport {
  std::size_t jobs = 0;             ///< requests needed, before cache hits
  std::size_t cache_hits = 0;
  std::size_t provider_calls = 0;   ///< including retries
  std::size_t skipped_retained = 0;
  std::size_t skipped_existing = 0;
  std::vector<std::string> failed_post_ids;
  std::string first_error;
  ExitCode first_error_code = ExitCode::ok;

  bool complete() const { return failed_post_ids.empty(); }
};

/// Issues every request of an annotation pass and stores the Annotations.
/// Requests run on up to max_concurrent threads; results are applied in
/// job order, so the dataset does not depend on completion order. Provider
/// failures do not throw: finished annotations are kept, the failed posts
/// are listed in the report and in the manifest.
AnnotateReport annotate(Dataset& dataset, const Registry& registry, const AnnotateRequest& request,
                        Gateway& gateway);

struct Manifest {
  std::string model_id;
  PromptKind kind = PromptKind::single_label;
  std::vector<std::string> disorders;
  std::vector<std::string> pending;  ///< post ids not yet annotated
  std::size_t completed = 0;
};

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& manifest, const std::string& path);

}  // namespace labelforge
