#pragma once

#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace labelforge {

/// digest of (model id, temperature, prompt text).
std::string cache_key(std::string_view model_id, double temperature, std::string_view prompt_text);

struct CacheRecord {
  std::string key;
  std::string model_id;
  double temperature = 0.0;
  std::string prompt_sha256;
  std::string response;
};

/// Append-only response store. Each record is one JSON line written with a
/// single flushed write; a torn trailing line from a crash is ignored on
/// load. An empty path keeps the cache in memory only.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::string path);
  ~ResponseCache();

  ResponseCache(const ResponseCache&) = delete;
  ResponseCache& operator=(const ResponseCache&) = delete;

  std::optional<std::string> get(std::string_view key) const;
  /// First write wins; later puts for the same key are ignored.
  void put(const CacheRecord& record);
  std::size_t size() const;
  std::size_t skipped_lines() const { return skipped_lines_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
  mutable std::mutex mutex_;
  std::map<std::string, std::string, std::less<>> entries_;
  std::size_t skipped_lines_ = 0;
};

}  // namespace labelforge
