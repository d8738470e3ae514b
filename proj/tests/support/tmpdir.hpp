#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace testsupport {

// Unique scratch directory, removed on scope exit.
class TempDir {
public:
  TempDir() {
    std::random_device rd;
    std::uniform_int_distribution<unsigned long long> dist;
    for (int attempt = 0; attempt < 16; ++attempt) {
      auto candidate = std::filesystem::temp_directory_path() /
                       ("vibraug-test-" + std::to_string(dist(rd)));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
  std::filesystem::path path_;
};

}  // namespace testsupport
