#include "labelforge/provider.hpp"

#include <algorithm>
#include <cmath>

#include "labelforge/error.hpp"
#include "labelforge/hash.hpp"
#include "labelforge/registry.hpp"
#include "text_util.hpp"

namespace labelforge {

std::string_view to_string(ProviderProfile profile) {
  switch (profile) {
    case ProviderProfile::openai: return "openai";
    case ProviderProfile::groq: return "groq";
    case ProviderProfile::mistral: return "mistral";
    case ProviderProfile::azure: return "azure";
    case ProviderProfile::stub: return "stub";
  }
  return "stub";
}

ProviderProfile provider_profile_from_string(std::string_view text) {
  std::string name(text);
  if (name.ends_with("-compatible")) name.resize(name.size() - std::string_view("-compatible").size());
  for (auto profile : {ProviderProfile::openai, ProviderProfile::groq, ProviderProfile::mistral,
                       ProviderProfile::azure, ProviderProfile::stub}) {
    if (to_string(profile) == name) return profile;
  }
  throw UserError("unknown provider profile '" + std::string(text) + "'");
}

std::chrono::milliseconds RetryPolicy::delay_for(int attempt) const {
  if (attempt < 1) return std::chrono::milliseconds{0};
  const int shift = std::min(attempt - 1, 30);
  const auto delay = base_delay.count() * (std::int64_t{1} << shift);
  return std::chrono::milliseconds{std::min<std::int64_t>(delay, max_delay.count())};
}

void ProviderConfig::validate() const {
  auto fail = [&](const std::string& what) { throw UserError("provider '" + model_id + "': " + what); };
  if (model_id.empty()) throw UserError("provider config needs a model_id");
  if (max_concurrent < 1) fail("max_concurrent must be at least 1");
  if (requests_per_minute < 1) fail("requests_per_minute must be at least 1");
  if (max_output_tokens < 1) fail("max_output_tokens must be at least 1");
  if (!(temperature >= 0.0 && temperature <= 2.0)) fail("temperature must lie in [0, 2]");
  if (retry.max_attempts < 1) fail("retry.max_attempts must be at least 1");
  if (retry.base_delay.count() < 0 || retry.max_delay.count() < 0) fail("retry delays must not be negative");
  if (timeout.count() < 1) fail("timeout_ms must be positive");
  for (double rate : {stub.positive_rate, stub.keyword_rate, stub.noise_rate}) {
    if (!(rate >= 0.0 && rate <= 1.0)) fail("stub rates must lie in [0, 1]");
  }
  if (provider == ProviderProfile::azure && base_url.empty()) fail("azure profile requires base_url");
}

std::string ProviderConfig::resolved_base_url() const {
  if (!base_url.empty()) return base_url;
  switch (provider) {
    case ProviderProfile::openai: return "https://api.openai.com/v1";
    case ProviderProfile::groq: return "https://api.groq.com/openai/v1";
    case ProviderProfile::mistral: return "https://api.mistral.ai/v1";
    case ProviderProfile::azure:
    case ProviderProfile::stub: return "";
  }
  return "";
}

std::string ProviderConfig::resolved_api_key_env() const {
  if (!api_key_env.empty()) return api_key_env;
  switch (provider) {
    case ProviderProfile::openai: return "OPENAI_API_KEY";
    case ProviderProfile::groq: return "GROQ_API_KEY";
    case ProviderProfile::mistral: return "MISTRAL_API_KEY";
    case ProviderProfile::azure: return "AZURE_OPENAI_API_KEY";
    case ProviderProfile::stub: return "";
  }
  return "";
}

ProviderConfig provider_config_from_json(const nlohmann::json& record) {
  ProviderConfig config;
  try {
    config.provider = provider_profile_from_string(record.value("provider", std::string("stub")));
    config.model_id = record.value("model_id", config.model_id);
    config.base_url = record.value("base_url", config.base_url);
    config.api_key_env = record.value("api_key_env", config.api_key_env);
    config.api_version = record.value("api_version", config.api_version);
    config.max_concurrent = record.value("max_concurrent", config.max_concurrent);
    config.requests_per_minute = record.value("requests_per_minute", config.requests_per_minute);
    config.temperature = record.value("temperature", config.temperature);
    config.max_output_tokens = record.value("max_output_tokens", config.max_output_tokens);
    config.timeout = std::chrono::milliseconds{record.value("timeout_ms", config.timeout.count())};
    if (auto it = record.find("retry"); it != record.end()) {
      config.retry.max_attempts = it->value("max_attempts", config.retry.max_attempts);
      config.retry.base_delay = std::chrono::milliseconds{it->value("base_delay_ms", config.retry.base_delay.count())};
      config.retry.max_delay = std::chrono::milliseconds{it->value("max_delay_ms", config.retry.max_delay.count())};
    }
    if (auto it = record.find("stub"); it != record.end()) {
      config.stub.seed = it->value("seed", config.stub.seed);
      config.stub.positive_rate = it->value("positive_rate", config.stub.positive_rate);
      config.stub.keyword_rate = it->value("keyword_rate", config.stub.keyword_rate);
      config.stub.noise_rate = it->value("noise_rate", config.stub.noise_rate);
    }
  } catch (const nlohmann::json::exception& e) {
    throw UserError(std::string("invalid provider config: ") + e.what());
  }
  config.validate();
  return config;
}

nlohmann::json to_json(const ProviderConfig& config) {
  return {{"provider", to_string(config.provider)},
          {"model_id", config.model_id},
          {"base_url", config.base_url},
          {"api_key_env", config.api_key_env},
          {"api_version", config.api_version},
          {"max_concurrent", config.max_concurrent},
          {"requests_per_minute", config.requests_per_minute},
          {"temperature", config.temperature},
          {"max_output_tokens", config.max_output_tokens},
          {"timeout_ms", config.timeout.count()},
          {"retry",
           {{"max_attempts", config.retry.max_attempts},
            {"base_delay_ms", config.retry.base_delay.count()},
            {"max_delay_ms", config.retry.max_delay.count()}}},
          {"stub",
           {{"seed", config.stub.seed},
            {"positive_rate", config.stub.positive_rate},
            {"keyword_rate", config.stub.keyword_rate},
            {"noise_rate", config.stub.noise_rate}}}};
}

namespace {

constexpr std::string_view kNoise[] = {
    "I cannot provide a medical diagnosis based on a single social media post.",
    "The writer seems to be going through a difficult period in their life.",
    "It is hard to tell from this post alone whether any condition is present.",
    "As an AI language model I am unable to assess mental health conditions.",
};

bool word_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

// Case-insensitive whole-word containment; `lowered` is already lowercase.
bool mentions(std::string_view lowered, std::string_view alias) {
  if (alias.empty()) return false;
  for (auto pos = lowered.find(alias); pos != std::string_view::npos; pos = lowered.find(alias, pos + 1)) {
    const bool left = pos == 0 || !word_char(lowered[pos - 1]);
    const auto end = pos + alias.size();
    const bool right = end >= lowered.size() || !word_char(lowered[end]);
    if (left && right) return true;
  }
  return false;
}

class Draw {
 public:
  Draw(std::string_view prompt_text, std::uint64_t seed)
      : base_(std::string(prompt_text) + '\x1f' + std::to_string(seed) + '\x1f') {}

  double unit(std::string_view salt) const {
    return static_cast<double>(digest_prefix_u64(sha256(base_ + std::string(salt))) >> 11) * 0x1.0p-53;
  }

 private:
  std::string base_;
};

}  // namespace

bool is_stub_noise(std::string_view response) {
  return std::find(std::begin(kNoise), std::end(kNoise), response) != std::end(kNoise);
}

std::string stub_complete(const RenderedPrompt& prompt, const StubOptions& options, const Registry& registry) {
  const Draw draw(prompt.text, options.seed);
  if (draw.unit("noise") < options.noise_rate) {
    const auto pick = static_cast<std::size_t>(draw.unit("noise-pick") * std::size(kNoise));
    return std::string(kNoise[std::min(pick, std::size(kNoise) - 1)]);
  }
  const auto kind = kind_from_template_hash(prompt.template_hash);
  if (!kind) return "Normal";

  const auto lowered = text::lower(prompt.post_text());
  std::vector<std::string> scope = *kind == PromptKind::unrestricted ? registry.ids() : prompt.disorders;
  std::vector<std::string> positives;
  for (const auto& id : scope) {
    if (!registry.contains(id)) continue;
    const auto& d = registry.at(id);
    bool hit = mentions(lowered, text::lower(d.display_name)) || mentions(lowered, text::lower(d.adjective));
    for (const auto& synonym : d.synonyms) hit = hit || mentions(lowered, synonym);
    const double p = hit ? options.keyword_rate : options.positive_rate;
    if (draw.unit("label/" + id) < p) positives.push_back(id);
  }

  auto join = [&](auto name_of) {
    std::string out;
    for (std::size_t i = 0; i < positives.size(); ++i) out += (i ? ", " : "") + name_of(registry.at(positives[i]));
    return out;
  };
  switch (*kind) {
    case PromptKind::single_label: return positives.empty() ? "No" : "Yes";
    case PromptKind::multi_label_1: {
      if (positives.empty()) return "Normal";
      std::string out;
      for (std::size_t i = 0; i < positives.size(); ++i) out += (i ? " and " : "") + registry.at(positives[i]).adjective;
      return out;
    }
    case PromptKind::multi_label_2:
      return positives.empty() ? "Normal" : join([](const Disorder& d) { return d.adjective; });
    case PromptKind::unrestricted:
      return positives.empty() ? "Normal" : join([](const Disorder& d) { return d.display_name; });
  }
  return "Normal";
}

StubProvider::StubProvider(StubOptions options, const Registry& registry) : options_(options), registry_(registry) {}

std::string StubProvider::respond(const RenderedPrompt& prompt) const { return stub_complete(prompt, options_, registry_); }

AttemptResult StubProvider::attempt(const RenderedPrompt& prompt) {
  AttemptResult result;
  result.status = 200;
  result.content = respond(prompt);
  return result;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config, const Registry& registry) {
  config.validate();
  if (config.provider == ProviderProfile::stub) return std::make_unique<StubProvider>(config.stub, registry);
  return std::make_unique<HttpProvider>(config);
}

}  // namespace labelforge
