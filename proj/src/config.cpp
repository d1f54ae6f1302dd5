#include "labelforge/config.hpp"

#include <filesystem>
#include <set>

#include "labelforge/dataset_io.hpp"
#include "labelforge/error.hpp"
#include "labelforge/hash.hpp"

namespace labelforge {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  if (providers.empty()) throw UserError("config lists no providers");
  std::set<std::string> ids;
  for (const auto& p : providers) {
    p.validate();
    if (!ids.insert(p.model_id).second) throw UserError("duplicate provider model_id '" + p.model_id + "'");
  }
  auto known = [&](const std::string& id, const char* what) {
    if (!id.empty() && ids.count(id) == 0) {
      throw UserError(std::string(what) + " '" + id + "' is not a configured provider");
    }
  };
  known(screening_model, "screening_model");
  known(canonical_model, "canonical_model");
  for (const auto& m : annotation_models) known(m, "annotation model");
  if (disorders.empty()) throw UserError("config lists no disorders");
  if (sample.final > sample.initial) {
    throw UserError("final sample (" + std::to_string(sample.final) + ") exceeds initial sample (" +
                    std::to_string(sample.initial) + ")");
  }
  if (review_port <= 0 || review_port > 65535) throw UserError("review_port out of range");
}

const ProviderConfig& PipelineConfig::provider(const std::string& model_id) const {
  for (const auto& p : providers) {
    if (p.model_id == model_id) return p;
  }
  throw UserError("no provider configured for model '" + model_id + "'");
}

std::vector<std::string> PipelineConfig::annotation_model_ids() const {
  if (!annotation_models.empty()) return annotation_models;
  std::vector<std::string> out;
  for (const auto& p : providers) out.push_back(p.model_id);
  return out;
}

PipelineConfig default_config() {
  PipelineConfig config;
  config.providers.push_back(ProviderConfig{});
  config.disorders = {"depression", "anxiety", "adhd", "eating_disorder", "ptsd", "suicide"};
  return config;
}

namespace {

std::string anchored(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

const std::set<std::string> kKeys = {"registry",   "synonyms",  "providers",  "screening_model", "annotation_models",
                                     "canonical_model", "disorders", "prompt_kind", "seed", "sample",
                                     "cache",      "work_dir",  "review_port", "reproducible"};

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& record, const std::string& base_dir) {
  if (!record.is_object()) throw UserError("config must be a JSON object");
  for (const auto& [key, value] : record.items()) {
    if (kKeys.count(key) == 0) throw UserError("unknown config key '" + key + "'");
  }
  auto config = default_config();
  try {
    config.registry_path = anchored(record.value("registry", std::string()), base_dir);
    config.synonyms_path = anchored(record.value("synonyms", std::string()), base_dir);
    if (auto it = record.find("providers"); it != record.end()) {
      config.providers.clear();
      for (const auto& p : *it) config.providers.push_back(provider_config_from_json(p));
    }
    config.screening_model = record.value("screening_model", std::string());
    config.annotation_models = record.value("annotation_models", std::vector<std::string>{});
    config.canonical_model = record.value("canonical_model", std::string());
    config.disorders = record.value("disorders", config.disorders);
    if (auto it = record.find("prompt_kind"); it != record.end()) {
      config.prompt_kind = prompt_kind_from_string(it->get<std::string>());
    }
    config.seed = record.value("seed", config.seed);
    if (auto it = record.find("sample"); it != record.end()) {
      config.sample.initial = it->value("initial", config.sample.initial);
      config.sample.final = it->value("final", config.sample.final);
      config.sample.control = it->value("control", config.sample.control);
    }
    if (record.contains("cache")) config.cache_path = anchored(record["cache"].get<std::string>(), base_dir);
    if (record.contains("work_dir")) config.work_dir = anchored(record["work_dir"].get<std::string>(), base_dir);
    config.review_port = record.value("review_port", config.review_port);
    config.reproducible = record.value("reproducible", config.reproducible);
  } catch (const nlohmann::json::exception& e) {
    throw UserError(std::string("invalid config: ") + e.what());
  }
  if (config.screening_model.empty()) config.screening_model = config.providers.front().model_id;
  config.validate();
  return config;
}

nlohmann::json to_json(const PipelineConfig& config) {
  nlohmann::json providers = nlohmann::json::array();
  for (const auto& p : config.providers) providers.push_back(to_json(p));
  return {{"registry", config.registry_path},
          {"synonyms", config.synonyms_path},
          {"providers", providers},
          {"screening_model", config.screening_model},
          {"annotation_models", config.annotation_models},
          {"canonical_model", config.canonical_model},
          {"disorders", config.disorders},
          {"prompt_kind", to_string(config.prompt_kind)},
          {"seed", config.seed},
          {"sample",
           {{"initial", config.sample.initial}, {"final", config.sample.final}, {"control", config.sample.control}}},
          {"cache", config.cache_path},
          {"work_dir", config.work_dir},
          {"review_port", config.review_port},
          {"reproducible", config.reproducible}};
}

PipelineConfig load_config(const std::string& path) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("cannot parse config " + path + ": " + e.what());
  }
  return config_from_json(record, fs::path(path).parent_path().string());
}

// Location-only settings stay out of the digest; table files count by content.
std::string config_digest(const PipelineConfig& config) {
  auto record = to_json(config);
  for (const char* key : {"cache", "work_dir", "review_port"}) record.erase(key);
  for (const char* key : {"registry", "synonyms"}) {
    const auto path = record[key].get<std::string>();
    record[key] = path.empty() ? "" : sha256_hex(read_file(path));
  }
  return sha256_hex(record.dump());
}

}  // namespace labelforge
