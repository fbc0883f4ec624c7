#pragma once

#include <filesystem>
#include <string_view>

namespace tcdm::testing {

/// Fresh empty directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
  explicit ScratchDir(std::string_view tag);
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

}  // namespace tcdm::testing
