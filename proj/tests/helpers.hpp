#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "glmdisc/dataset.hpp"

namespace testutil {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("glmdisc-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline glmdisc::Schema make_schema(const std::vector<std::pair<std::string, glmdisc::FeatureKind>>& cols,
                                   const std::string& target = "y") {
  glmdisc::Schema s;
  s.target_name = target;
  for (const auto& [name, kind] : cols) s.add_feature(name, kind);
  return s;
}

/// One continuous feature named "x".
inline glmdisc::Dataset continuous_dataset(std::vector<double> x, std::vector<int> y) {
  auto s = make_schema({{"x", glmdisc::FeatureKind::Continuous}});
  return glmdisc::Dataset(s, {std::move(x)}, {}, std::move(y));
}

/// One categorical feature named "c" with levels "L0".."L{l-1}".
inline glmdisc::Dataset categorical_dataset(std::vector<int> codes, std::size_t levels,
                                            std::vector<int> y) {
  auto s = make_schema({{"c", glmdisc::FeatureKind::Categorical}});
  for (std::size_t k = 0; k < levels; ++k) s.categorical_levels[0].push_back("L" + std::to_string(k));
  return glmdisc::Dataset(s, {}, {std::move(codes)}, std::move(y));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testutil
