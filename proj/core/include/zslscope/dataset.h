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

#ifndef ZSLSCOPE_DATASET_H_
#define ZSLSCOPE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zslscope/types.h"

namespace zslscope {

// Instances with precomputed features, their class labels, and the
// class-level attribute table. Holds data for seen and unseen classes alike;
// `Split` decides which instances may be used for what.
struct Dataset {
  Matrix features;  // n x d
  std::vector<ClassIndex> labels;
  std::vector<std::string> class_names;
  Matrix raw_attributes;  // C x a
  std::vector<std::string> attribute_names;

  std::size_t num_instances() const { return labels.size(); }
  std::size_t feature_dim() const {
    return static_cast<std::size_t>(features.cols());
  }
  std::size_t num_classes() const { return class_names.size(); }
  std::size_t num_attributes() const { return attribute_names.size(); }

  // Throws InvalidArgument if any structural invariant is violated.
  void Validate() const;

  // Throws InvalidArgument for an unknown name.
  ClassIndex ClassByName(std::string_view name) const;
  std::optional<ClassIndex> FindClass(std::string_view name) const;
};

// Column-standardized attribute signatures (population stddev). Constant
// columns are mapped to zero and listed in `constant_columns`; their stored
// stddev is 0.
struct SignatureMatrix {
  Matrix signatures;  // C x a
  Vector means;
  Vector stddevs;
  std::vector<AttributeIndex> constant_columns;
};

SignatureMatrix StandardizeSignatures(const Matrix& raw);

struct Split {
  std::vector<ClassIndex> seen_classes;    // ascending
  std::vector<ClassIndex> unseen_classes;  // ascending
  std::vector<InstanceIndex> train_instances;  // ascending
  std::vector<InstanceIndex> diag_instances;   // ascending, held-out seen data

  bool IsSeen(ClassIndex c) const;
};

inline constexpr double kDefaultDiagFraction = 0.2;

// Per seen class, ceil(diag_fraction * n_y) instances (capped at n_y - 1) go
// to the diagnostics holdout; the rest are for training.
Split MakeSplit(const Dataset& dataset,
                std::span<const std::string> unseen_class_names,
                double diag_fraction, std::uint64_t seed);

// Number of instances per class among `instances`, indexed by class.
std::vector<std::size_t> CountPerClass(const Dataset& dataset,
                                       std::span<const InstanceIndex> instances);

// Contents of the optional split.json next to a dataset.
struct SplitSpec {
  std::vector<std::string> unseen;
  double diag_fraction = kDefaultDiagFraction;
  std::uint64_t seed = 0;
};

std::optional<SplitSpec> LoadSplitSpec(const std::filesystem::path& directory);
void SaveSplitSpec(const SplitSpec& spec,
                   const std::filesystem::path& directory);

// Reads features.bin, labels.csv and attributes.csv from `directory`.
// Throws DataError naming the file and row on any problem.
Dataset LoadDataset(const std::filesystem::path& directory);

// Writes the three dataset files, creating `directory` if needed. Feature
// values are narrowed to 32-bit floats.
void SaveDataset(const Dataset& dataset,
                 const std::filesystem::path& directory);

struct SyntheticConfig {
  std::size_t num_seen = 20;
  std::size_t num_unseen = 5;
  std::size_t num_attributes = 12;
  std::size_t feature_dim = 32;
  std::size_t per_class = 100;
  double noise_sigma = 0.3;
  std::optional<AttributeIndex> corrupt_attribute;
  std::uint64_t seed = 0;
};

// Class signatures z_y ~ N(0, 1) per entry, features x = A z_y + noise with a
// fixed Gaussian lift A (d x a, entries N(0, 1/a)). When an attribute is
// corrupted, its signature entry is replaced by a fresh N(0, 1) draw per
// instance before lifting, so no feature carries information about it.
// Seen classes come first ("class_00", ...), unseen classes last.
Dataset GenerateSynthetic(const SyntheticConfig& config);

// Same draws as GenerateSynthetic, also returning the lift matrix.
struct SyntheticDataset {
  Dataset dataset;
  Matrix lift;  // d x a
};
SyntheticDataset GenerateSyntheticWithLift(const SyntheticConfig& config);

// The class names GenerateSynthetic treats as unseen.
std::vector<std::string> SyntheticUnseenNames(const SyntheticConfig& config);

}  // namespace zslscope

#endif  // ZSLSCOPE_DATASET_H_
