#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>

#include "invforge/idx.hpp"

namespace invforge::test {

inline std::filesystem::path mnist_dir() {
  const char* env = std::getenv("INVFORGE_MNIST_DIR");
  return env && *env ? env : "/root/data/mnist";
}

inline bool have_mnist() { return std::filesystem::exists(mnist_dir() / "t10k-images-idx3-ubyte"); }

inline Dataset mnist_test(std::size_t limit) {
  const Dataset all =
      load_mnist(mnist_dir() / "t10k-images-idx3-ubyte", mnist_dir() / "t10k-labels-idx1-ubyte", SplitTag::test);
  return all.slice(0, std::min(limit, all.size()));
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("invforge-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace invforge::test
