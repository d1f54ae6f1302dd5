#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace labelforge::testing {

inline std::string fixture(const std::string& relative) {
  return (std::filesystem::path(LABELFORGE_SOURCE_DIR) / "tests" / "fixtures" / relative).string();
}

inline std::string source_path(const std::string& relative) {
  return (std::filesystem::path(LABELFORGE_SOURCE_DIR) / relative).string();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("labelforge-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace labelforge::testing
