#include "labelforge/cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "labelforge/error.hpp"
#include "labelforge/hash.hpp"
#include "labelforge/log.hpp"

namespace labelforge {

std::string cache_key(std::string_view model_id, double temperature, std::string_view prompt_text) {
  // Fixed formatting keeps keys identical across platforms.
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.6f", temperature);
  std::string material;
  material.reserve(model_id.size() + prompt_text.size() + 48);
  material.append("model=").append(model_id).push_back('\0');
  material.append("temperature=").append(temp).push_back('\0');
  material.append(prompt_text);
  return sha256_hex(material);
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  namespace fs = std::filesystem;
  if (fs::path(path_).has_parent_path()) {
    std::error_code ec;
    fs::create_directories(fs::path(path_).parent_path(), ec);
  }
  std::ifstream in(path_, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto record = nlohmann::json::parse(line);
      entries_.emplace(record.at("key").get<std::string>(), record.at("response").get<std::string>());
    } catch (const nlohmann::json::exception&) {
      ++skipped_lines_;
      log::warning("response cache " + path_ + ": skipping unreadable line " + std::to_string(line_no));
    }
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) throw IoError("cannot open response cache " + path_ + " for appending");
}

ResponseCache::~ResponseCache() {
  if (file_) std::fclose(file_);
}

std::optional<std::string> ResponseCache::get(std::string_view key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::put(const CacheRecord& record) {
  std::lock_guard lock(mutex_);
  auto [it, inserted] = entries_.emplace(record.key, record.response);
  if (!inserted || !file_) return;
  nlohmann::json line = {{"key", record.key},
                         {"model_id", record.model_id},
                         {"temperature", record.temperature},
                         {"prompt_sha256", record.prompt_sha256},
                         {"response", record.response}};
  // One write per record, so a crash can only tear the final line.
  const std::string text = line.dump() + "\n";
  if (std::fwrite(text.data(), 1, text.size(), file_) != text.size() || std::fflush(file_) != 0) {
    throw IoError("write to response cache " + path_ + " failed");
  }
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace labelforge
