#include <httplib.h>

#include <cstdlib>

#include "labelforge/error.hpp"
#include "labelforge/provider.hpp"

namespace labelforge {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw UserError("base_url '" + url + "' lacks a scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint endpoint;
  endpoint.origin = url.substr(0, path_start);
  endpoint.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!endpoint.path.empty() && endpoint.path.back() == '/') endpoint.path.pop_back();
  return endpoint;
}

}  // namespace

std::optional<std::string> extract_completion_content(std::string_view body) {
  auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  auto choices = parsed.find("choices");
  if (choices == parsed.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const auto& first = choices->front();
  auto message = first.find("message");
  if (message == first.end() || !message->is_object()) return std::nullopt;
  auto content = message->find("content");
  if (content == message->end() || !content->is_string()) return std::nullopt;
  return content->get<std::string>();
}

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
  const auto variable = config_.resolved_api_key_env();
  const char* key = variable.empty() ? nullptr : std::getenv(variable.c_str());
  if (!key || !*key) {
    throw ConfigError("provider '" + config_.model_id + "': environment variable " +
                      (variable.empty() ? std::string("<unset>") : variable) + " holds no API key");
  }
  api_key_ = key;
}

HttpProvider::HttpProvider(ProviderConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {}

std::string HttpProvider::name() const { return std::string(to_string(config_.provider)) + ":" + config_.model_id; }

nlohmann::json HttpProvider::request_body(const RenderedPrompt& prompt) const {
  nlohmann::json body = {
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt.text}}})},
      {"temperature", config_.temperature},
      {"max_tokens", config_.max_output_tokens},
  };
  if (config_.provider != ProviderProfile::azure) body["model"] = config_.model_id;
  return body;
}

AttemptResult HttpProvider::attempt(const RenderedPrompt& prompt) {
  const auto endpoint = split_url(config_.resolved_base_url());
  httplib::Client client(endpoint.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  std::string path = endpoint.path + "/chat/completions";
  if (config_.provider == ProviderProfile::azure) {
    headers.emplace("api-key", api_key_);
    path += "?api-version=" + config_.api_version;
  } else {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }

  AttemptResult result;
  auto response = client.Post(path, headers, request_body(prompt).dump(), "application/json");
  if (!response) {
    result.error = "request failed: " + httplib::to_string(response.error());
    return result;
  }
  result.status = response->status;
  if (response->status != 200) {
    result.error = response->body.substr(0, 500);
    return result;
  }
  auto content = extract_completion_content(response->body);
  if (!content) {
    result.status = 0;
    result.error = "response body has no choices[0].message.content";
    return result;
  }
  result.content = std::move(*content);
  return result;
}

}  // namespace labelforge
