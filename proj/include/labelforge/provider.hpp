#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "labelforge/prompt.hpp"

namespace labelforge {

class Registry;

enum class ProviderProfile : std::uint8_t { openai, groq, mistral, azure, stub };

std::string_view to_string(ProviderProfile profile);
/// Accepts the bare names and the "-compatible" spellings.
ProviderProfile provider_profile_from_string(std::string_view text);

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_delay{30000};

  /// Delay before attempt `attempt` (1-based retry count): base * 2^(attempt-1), capped.
  std::chrono::milliseconds delay_for(int attempt) const;
};

/// Knobs of the deterministic offline provider.
struct StubOptions {
  std::uint64_t seed = 0;
  double positive_rate = 0.15;  ///< P(positive) when the post does not mention the disorder
  double keyword_rate = 0.85;   ///< P(positive) when it does
  double noise_rate = 0.0;      ///< P(off-contract response)
};

struct ProviderConfig {
  ProviderProfile provider = ProviderProfile::stub;
  std::string model_id = "stub";
  std::string base_url;     ///< empty means the profile default
  std::string api_key_env;  ///< empty means the profile default
  std::string api_version = "2024-06-01";  ///< azure only
  int max_concurrent = 4;
  int requests_per_minute = 60;
  double temperature = 0.0;
  int max_output_tokens = 64;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  StubOptions stub;

  /// Throws UserError on out-of-range values.
  void validate() const;
  std::string resolved_base_url() const;
  std::string resolved_api_key_env() const;
};

ProviderConfig provider_config_from_json(const nlohmann::json& record);
nlohmann::json to_json(const ProviderConfig& config);

/// Outcome of a single request attempt. status 0 means no HTTP response
/// (connection failure or timeout).
struct AttemptResult {
  int status = 0;
  std::string content;
  std::string error;

  bool success() const { return status == 200; }
  bool transient() const { return status == 0 || status == 429 || status >= 500; }
  bool auth_failure() const { return status == 401 || status == 403; }
};

class Provider {
 public:
  virtual ~Provider() = default;
  /// One request, no retries.
  virtual AttemptResult attempt(const RenderedPrompt& prompt) = 0;
  virtual std::string name() const = 0;
};

/// Chat-completion endpoint speaking the OpenAI wire format. The whole
/// rendered prompt goes out as a single user message.
class HttpProvider final : public Provider {
 public:
  /// Reads the API key from the configured environment variable; throws
  /// ConfigError when it is unset.
  explicit HttpProvider(ProviderConfig config);
  /// Explicit key, for tests against local endpoints.
  HttpProvider(ProviderConfig config, std::string api_key);

  AttemptResult attempt(const RenderedPrompt& prompt) override;
  std::string name() const override;

  /// Request body for a prompt.
  nlohmann::json request_body(const RenderedPrompt& prompt) const;

 private:
  ProviderConfig config_;
  std::string api_key_;
};

/// Extracts choices[0].message.content from a chat-completion response.
/// Returns nullopt when the body does not have that shape.
std::optional<std::string> extract_completion_content(std::string_view body);

/// Offline provider whose answers are a pure function of (prompt text, seed).
class StubProvider final : public Provider {
 public:
  StubProvider(StubOptions options, const Registry& registry);

  AttemptResult attempt(const RenderedPrompt& prompt) override;
  std::string name() const override { return "stub"; }

  std::string respond(const RenderedPrompt& prompt) const;

 private:
  StubOptions options_;
  const Registry& registry_;
};

/// Contract-conforming response drawn deterministically from the prompt
/// digest and seed.
std::string stub_complete(const RenderedPrompt& prompt, const StubOptions& options, const Registry& registry);

/// True when `response` is one of the strings the stub emits as noise.
bool is_stub_noise(std::string_view response);

std::unique_ptr<Provider> make_provider(const ProviderConfig& config, const Registry& registry);

}  // namespace labelforge
