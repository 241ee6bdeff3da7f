/*
 * Copyright 2026 The zslscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef ZSLSCOPE_TESTS_TEST_UTIL_H_
#define ZSLSCOPE_TESTS_TEST_UTIL_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "zslscope/dataset.h"
#include "zslscope/types.h"

namespace zslscope::testing {

// A scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("zslscope_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline Matrix RandomNormal(Eigen::Index rows, Eigen::Index cols,
                           std::mt19937_64& rng, double stddev = 1.0) {
  std::normal_distribution<double> normal(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

inline Vector RandomVector(Eigen::Index size, std::mt19937_64& rng,
                           double stddev = 1.0) {
  return RandomNormal(size, 1, rng, stddev).col(0);
}

// A small synthetic problem that trains in well under a second.
struct SmallSession {
  Dataset dataset;
  Split split;
  SignatureMatrix signatures;
};

inline SyntheticConfig SmallConfig(std::uint64_t seed) {
  SyntheticConfig config;
  config.num_seen = 6;
  config.num_unseen = 2;
  config.num_attributes = 5;
  config.feature_dim = 8;
  config.per_class = 20;
  config.noise_sigma = 0.5;
  config.seed = seed;
  return config;
}

inline SmallSession MakeSmallSession(std::uint64_t seed) {
  const SyntheticConfig config = SmallConfig(seed);
  SmallSession session;
  session.dataset = GenerateSynthetic(config);
  session.split = MakeSplit(session.dataset, SyntheticUnseenNames(config),
                            kDefaultDiagFraction, seed);
  session.signatures = StandardizeSignatures(session.dataset.raw_attributes);
  return session;
}

}  // namespace zslscope::testing

#endif  // ZSLSCOPE_TESTS_TEST_UTIL_H_
