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

#include "zslscope/dataset.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "binary_io.h"
#include "file_util.h"
#include "zslscope/errors.h"

namespace zslscope {
namespace {

constexpr char kFeaturesFile[] = "features.bin";
constexpr char kLabelsFile[] = "labels.csv";
constexpr char kAttributesFile[] = "attributes.csv";
constexpr char kSplitFile[] = "split.json";
constexpr char kFeaturesMagic[] = "ZSLF";
constexpr std::uint32_t kFeaturesVersion = 1;

template <typename Names>
void RequireUnique(const Names& names, const std::string& what) {
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (name.empty()) throw InvalidArgument(what + " name is empty");
    if (!seen.insert(name).second) {
      throw InvalidArgument("duplicate " + what + " name '" + name + "'");
    }
  }
}

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  // Drop trailing blank lines only.
  while (!lines.empty() && internal::Trim(lines.back()).empty()) {
    lines.pop_back();
  }
  return lines;
}

struct AttributeTable {
  std::vector<std::string> class_names;
  std::vector<std::string> attribute_names;
  Matrix values;
};

AttributeTable ReadAttributes(const std::filesystem::path& path) {
  const std::vector<std::string> lines =
      SplitLines(internal::ReadFileBytes(path));
  if (lines.empty()) throw DataError(path, 1, "missing header");
  std::vector<std::string> header = internal::SplitCsvLine(lines[0]);
  if (header.size() < 2 || header[0] != "class") {
    throw DataError(path, 1, "header must be 'class,<attr_1>,...'");
  }
  AttributeTable table;
  table.attribute_names.assign(header.begin() + 1, header.end());
  const std::size_t a = table.attribute_names.size();
  const std::size_t c = lines.size() - 1;
  table.values.resize(static_cast<Eigen::Index>(c),
                       static_cast<Eigen::Index>(a));
  for (std::size_t row = 0; row < c; ++row) {
    const std::size_t line_no = row + 2;
    const std::vector<std::string> fields =
        internal::SplitCsvLine(lines[row + 1]);
    if (fields.size() != a + 1) {
      throw DataError(path, line_no,
                      "expected " + std::to_string(a + 1) + " columns, got " +
                          std::to_string(fields.size()));
    }
    table.class_names.push_back(fields[0]);
    for (std::size_t k = 0; k < a; ++k) {
      double value = 0.0;
      if (!internal::ParseDouble(fields[k + 1], value)) {
        throw DataError(path, line_no,
                        "cannot parse value '" + fields[k + 1] + "'");
      }
      if (!std::isfinite(value)) {
        throw DataError(path, line_no, "non-finite attribute value");
      }
      table.values(static_cast<Eigen::Index>(row),
                   static_cast<Eigen::Index>(k)) = value;
    }
  }
  try {
    RequireUnique(table.class_names, "class");
    RequireUnique(table.attribute_names, "attribute");
  } catch (const InvalidArgument& e) {
    throw DataError(path, 0, e.what());
  }
  return table;
}

Matrix ReadFeatures(const std::filesystem::path& path) {
  const std::string bytes = internal::ReadFileBytes(path);
  internal::ByteReader reader(bytes);
  if (!reader.ReadMagic(kFeaturesMagic)) {
    throw DataError(path, 0, "bad magic (expected ZSLF)");
  }
  std::uint32_t version = 0, n = 0, d = 0;
  if (!reader.Read(version) || !reader.Read(n) || !reader.Read(d)) {
    throw DataError(path, 0, "truncated header");
  }
  if (version != kFeaturesVersion) {
    throw DataError(path, 0,
                    "unsupported version " + std::to_string(version));
  }
  const std::uint64_t expected =
      static_cast<std::uint64_t>(n) * d * sizeof(float);
  if (reader.remaining() != expected) {
    throw DataError(path, 0,
                    "dimension mismatch: header says " + std::to_string(n) +
                        "x" + std::to_string(d) + " but payload has " +
                        std::to_string(reader.remaining()) + " bytes");
  }
  Matrix features(n, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      float value = 0.0f;
      reader.Read(value);
      if (!std::isfinite(value)) {
        throw DataError(path, i + 1,
                        "non-finite feature value (instance " +
                            std::to_string(i) + ", column " +
                            std::to_string(j) + ")");
      }
      features(i, j) = static_cast<double>(value);
    }
  }
  return features;
}

std::vector<ClassIndex> ReadLabels(const std::filesystem::path& path,
                                   std::size_t num_instances,
                                   const std::vector<std::string>& classes) {
  const std::vector<std::string> lines =
      SplitLines(internal::ReadFileBytes(path));
  if (lines.empty() ||
      internal::SplitCsvLine(lines[0]) !=
          std::vector<std::string>{"instance", "class"}) {
    throw DataError(path, 1, "header must be 'instance,class'");
  }
  if (lines.size() - 1 != num_instances) {
    throw DataError(path, 0,
                    "dimension mismatch: " + std::to_string(lines.size() - 1) +
                        " labels for " + std::to_string(num_instances) +
                        " feature rows");
  }
  std::unordered_map<std::string, ClassIndex> by_name;
  for (ClassIndex c = 0; c < classes.size(); ++c) by_name[classes[c]] = c;

  constexpr ClassIndex kUnset = std::numeric_limits<ClassIndex>::max();
  std::vector<ClassIndex> labels(num_instances, kUnset);
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::vector<std::string> fields = internal::SplitCsvLine(lines[row]);
    if (fields.size() != 2) {
      throw DataError(path, row + 1, "expected 2 columns");
    }
    std::size_t instance = 0;
    if (!internal::ParseSize(fields[0], instance) ||
        instance >= num_instances) {
      throw DataError(path, row + 1,
                      "invalid instance index '" + fields[0] + "'");
    }
    if (labels[instance] != kUnset) {
      throw DataError(path, row + 1,
                      "duplicate instance " + std::to_string(instance));
    }
    const auto it = by_name.find(fields[1]);
    if (it == by_name.end()) {
      throw DataError(path, row + 1, "unknown class '" + fields[1] + "'");
    }
    labels[instance] = it->second;
  }
  return labels;
}

std::string FormatDouble(double value) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10)
      << value;
  return out.str();
}

void RequireCsvSafe(const std::string& name) {
  if (name.find_first_of(",\n\r") != std::string::npos) {
    throw InvalidArgument("name '" + name +
                          "' cannot be written to CSV (comma or newline)");
  }
}

}  // namespace

void Dataset::Validate() const {
  if (labels.empty()) throw InvalidArgument("dataset has no instances");
  if (features.cols() < 1) throw InvalidArgument("feature dimension is 0");
  if (attribute_names.empty()) throw InvalidArgument("no attributes");
  if (class_names.size() < 2) throw InvalidArgument("fewer than 2 classes");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw InvalidArgument("feature rows (" + std::to_string(features.rows()) +
                          ") != labels (" + std::to_string(labels.size()) +
                          ")");
  }
  if (static_cast<std::size_t>(raw_attributes.rows()) != class_names.size() ||
      static_cast<std::size_t>(raw_attributes.cols()) !=
          attribute_names.size()) {
    throw InvalidArgument("attribute matrix shape does not match names");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_names.size()) {
      throw InvalidArgument("label of instance " + std::to_string(i) +
                            " is out of range");
    }
  }
  if (!features.allFinite()) throw InvalidArgument("non-finite feature value");
  if (!raw_attributes.allFinite()) {
    throw InvalidArgument("non-finite attribute value");
  }
  RequireUnique(class_names, "class");
  RequireUnique(attribute_names, "attribute");
}

std::optional<ClassIndex> Dataset::FindClass(std::string_view name) const {
  const auto it = std::find(class_names.begin(), class_names.end(), name);
  if (it == class_names.end()) return std::nullopt;
  return static_cast<ClassIndex>(it - class_names.begin());
}

ClassIndex Dataset::ClassByName(std::string_view name) const {
  if (auto c = FindClass(name)) return *c;
  throw InvalidArgument("unknown class '" + std::string(name) + "'");
}

SignatureMatrix StandardizeSignatures(const Matrix& raw) {
  if (raw.rows() < 2) {
    throw InvalidArgument("standardization needs at least 2 classes");
  }
  SignatureMatrix out;
  const Eigen::Index c = raw.rows();
  const Eigen::Index a = raw.cols();
  out.signatures.resize(c, a);
  out.means.resize(a);
  out.stddevs.resize(a);
  for (Eigen::Index k = 0; k < a; ++k) {
    const auto column = raw.col(k);
    const double mean = column.mean();
    const double variance =
        (column.array() - mean).square().sum() / static_cast<double>(c);
    const double stddev = std::sqrt(variance);
    out.means(k) = mean;
    if (stddev <= 1e-12 * std::max(1.0, std::abs(mean))) {
      out.stddevs(k) = 0.0;
      out.signatures.col(k).setZero();
      out.constant_columns.push_back(static_cast<AttributeIndex>(k));
    } else {
      out.stddevs(k) = stddev;
      out.signatures.col(k) = (column.array() - mean) / stddev;
    }
  }
  return out;
}

bool Split::IsSeen(ClassIndex c) const {
  return std::binary_search(seen_classes.begin(), seen_classes.end(), c);
}

Split MakeSplit(const Dataset& dataset,
                std::span<const std::string> unseen_class_names,
                double diag_fraction, std::uint64_t seed) {
  if (!(diag_fraction > 0.0 && diag_fraction < 1.0)) {
    throw InvalidArgument("diag_fraction must lie in (0, 1)");
  }
  std::set<ClassIndex> unseen;
  for (const std::string& name : unseen_class_names) {
    unseen.insert(dataset.ClassByName(name));
  }
  Split split;
  split.unseen_classes.assign(unseen.begin(), unseen.end());
  for (ClassIndex c = 0; c < dataset.num_classes(); ++c) {
    if (!unseen.contains(c)) split.seen_classes.push_back(c);
  }
  if (split.seen_classes.size() < 2) {
    throw InvalidArgument("split leaves fewer than 2 seen classes");
  }

  std::vector<std::vector<InstanceIndex>> by_class(dataset.num_classes());
  for (InstanceIndex i = 0; i < dataset.num_instances(); ++i) {
    by_class[dataset.labels[i]].push_back(i);
  }
  std::mt19937_64 rng(seed);
  for (ClassIndex c : split.seen_classes) {
    std::vector<InstanceIndex>& members = by_class[c];
    if (members.size() < 2) {
      throw InvalidArgument("seen class '" + dataset.class_names[c] +
                            "' has fewer than 2 instances");
    }
    std::shuffle(members.begin(), members.end(), rng);
    // The epsilon keeps e.g. 0.7 * 10 from rounding up to 8.
    const auto wanted = static_cast<std::size_t>(
        std::ceil(diag_fraction * static_cast<double>(members.size()) - 1e-9));
    const std::size_t holdout =
        std::clamp<std::size_t>(wanted, 1, members.size() - 1);
    split.diag_instances.insert(split.diag_instances.end(), members.begin(),
                                members.begin() + holdout);
    split.train_instances.insert(split.train_instances.end(),
                                 members.begin() + holdout, members.end());
  }
  std::sort(split.diag_instances.begin(), split.diag_instances.end());
  std::sort(split.train_instances.begin(), split.train_instances.end());
  return split;
}

std::vector<std::size_t> CountPerClass(
    const Dataset& dataset, std::span<const InstanceIndex> instances) {
  std::vector<std::size_t> counts(dataset.num_classes(), 0);
  for (InstanceIndex i : instances) ++counts.at(dataset.labels.at(i));
  return counts;
}

std::optional<SplitSpec> LoadSplitSpec(const std::filesystem::path& directory) {
  const std::filesystem::path path = directory / kSplitFile;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(internal::ReadFileBytes(path));
    SplitSpec spec;
    spec.unseen = j.at("unseen").get<std::vector<std::string>>();
    if (j.contains("diag_fraction")) {
      spec.diag_fraction = j.at("diag_fraction").get<double>();
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path, 0, e.what());
  }
}

void SaveSplitSpec(const SplitSpec& spec,
                   const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  nlohmann::json j = {{"unseen", spec.unseen},
                      {"diag_fraction", spec.diag_fraction},
                      {"seed", spec.seed}};
  internal::WriteFileBytes(directory / kSplitFile, j.dump(2) + "\n");
}

Dataset LoadDataset(const std::filesystem::path& directory) {
  const std::filesystem::path features_path = directory / kFeaturesFile;
  const std::filesystem::path labels_path = directory / kLabelsFile;
  const std::filesystem::path attributes_path = directory / kAttributesFile;
  for (const auto& path : {features_path, labels_path, attributes_path}) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      throw DataError(path, 0, "missing file");
    }
  }

  AttributeTable table = ReadAttributes(attributes_path);
  Dataset dataset;
  dataset.features = ReadFeatures(features_path);
  dataset.labels = ReadLabels(labels_path,
                              static_cast<std::size_t>(dataset.features.rows()),
                              table.class_names);
  dataset.class_names = std::move(table.class_names);
  dataset.attribute_names = std::move(table.attribute_names);
  dataset.raw_attributes = std::move(table.values);
  try {
    dataset.Validate();
  } catch (const InvalidArgument& e) {
    throw DataError(directory, 0, e.what());
  }
  return dataset;
}

void SaveDataset(const Dataset& dataset,
                 const std::filesystem::path& directory) {
  dataset.Validate();
  for (const auto& name : dataset.class_names) RequireCsvSafe(name);
  for (const auto& name : dataset.attribute_names) RequireCsvSafe(name);
  std::filesystem::create_directories(directory);

  std::string features;
  const auto n = static_cast<std::uint32_t>(dataset.features.rows());
  const auto d = static_cast<std::uint32_t>(dataset.features.cols());
  features.reserve(16 + static_cast<std::size_t>(n) * d * sizeof(float));
  features.append(kFeaturesMagic, 4);
  internal::AppendLittleEndian(features, kFeaturesVersion);
  internal::AppendLittleEndian(features, n);
  internal::AppendLittleEndian(features, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      internal::AppendLittleEndian(features,
                                   static_cast<float>(dataset.features(i, j)));
    }
  }
  internal::WriteFileBytes(directory / kFeaturesFile, features);

  std::string labels = "instance,class\n";
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
    labels += std::to_string(i) + "," +
              dataset.class_names[dataset.labels[i]] + "\n";
  }
  internal::WriteFileBytes(directory / kLabelsFile, labels);

  std::string attributes = "class";
  for (const auto& name : dataset.attribute_names) attributes += "," + name;
  attributes += "\n";
  for (std::size_t c = 0; c < dataset.num_classes(); ++c) {
    attributes += dataset.class_names[c];
    for (Eigen::Index k = 0; k < dataset.raw_attributes.cols(); ++k) {
      attributes +=
          "," + FormatDouble(dataset.raw_attributes(
                    static_cast<Eigen::Index>(c), k));
    }
    attributes += "\n";
  }
  internal::WriteFileBytes(directory / kAttributesFile, attributes);
}

namespace {

std::string NumberedName(const std::string& prefix, std::size_t index,
                         std::size_t count) {
  const std::size_t width =
      std::max<std::size_t>(2, std::to_string(count - 1).size());
  std::ostringstream out;
  out << prefix << std::setw(static_cast<int>(width)) << std::setfill('0')
      << index;
  return out.str();
}

void ValidateSyntheticConfig(const SyntheticConfig& config) {
  if (config.num_seen < 2) {
    throw InvalidArgument("synthetic data needs at least 2 seen classes");
  }
  if (config.num_attributes < 1) {
    throw InvalidArgument("synthetic data needs at least 1 attribute");
  }
  if (config.feature_dim < config.num_attributes) {
    throw InvalidArgument("feature_dim must be >= num_attributes");
  }
  if (config.per_class < 2) {
    throw InvalidArgument("per_class must be >= 2");
  }
  if (!(config.noise_sigma >= 0.0) || !std::isfinite(config.noise_sigma)) {
    throw InvalidArgument("noise_sigma must be finite and >= 0");
  }
  if (config.corrupt_attribute &&
      *config.corrupt_attribute >= config.num_attributes) {
    throw InvalidArgument("corrupt_attribute out of range");
  }
}

}  // namespace

SyntheticDataset GenerateSyntheticWithLift(const SyntheticConfig& config) {
  ValidateSyntheticConfig(config);
  const std::size_t num_classes = config.num_seen + config.num_unseen;
  const auto a = static_cast<Eigen::Index>(config.num_attributes);
  const auto d = static_cast<Eigen::Index>(config.feature_dim);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  SyntheticDataset out;
  Dataset& dataset = out.dataset;
  dataset.raw_attributes.resize(static_cast<Eigen::Index>(num_classes), a);
  for (Eigen::Index c = 0; c < dataset.raw_attributes.rows(); ++c) {
    for (Eigen::Index k = 0; k < a; ++k) dataset.raw_attributes(c, k) = unit(rng);
  }
  const double lift_scale = 1.0 / std::sqrt(static_cast<double>(a));
  out.lift.resize(d, a);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index k = 0; k < a; ++k) out.lift(r, k) = lift_scale * unit(rng);
  }

  const std::size_t n = num_classes * config.per_class;
  dataset.features.resize(static_cast<Eigen::Index>(n), d);
  dataset.labels.reserve(n);
  Vector latent(a);
  for (ClassIndex c = 0; c < num_classes; ++c) {
    for (std::size_t j = 0; j < config.per_class; ++j) {
      const auto row = static_cast<Eigen::Index>(dataset.labels.size());
      latent = dataset.raw_attributes.row(static_cast<Eigen::Index>(c))
                   .transpose();
      if (config.corrupt_attribute) {
        latent(static_cast<Eigen::Index>(*config.corrupt_attribute)) =
            unit(rng);
      }
      dataset.features.row(row) = (out.lift * latent).transpose();
      if (config.noise_sigma > 0.0) {
        for (Eigen::Index r = 0; r < d; ++r) {
          dataset.features(row, r) += config.noise_sigma * unit(rng);
        }
      }
      // Stored as float32 on disk; round now so a save/load is lossless.
      for (Eigen::Index r = 0; r < d; ++r) {
        dataset.features(row, r) =
            static_cast<double>(static_cast<float>(dataset.features(row, r)));
      }
      dataset.labels.push_back(c);
    }
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    dataset.class_names.push_back(NumberedName("class_", c, num_classes));
  }
  for (std::size_t k = 0; k < config.num_attributes; ++k) {
    dataset.attribute_names.push_back(
        NumberedName("attr_", k, config.num_attributes));
  }
  return out;
}

Dataset GenerateSynthetic(const SyntheticConfig& config) {
  return GenerateSyntheticWithLift(config).dataset;
}

std::vector<std::string> SyntheticUnseenNames(const SyntheticConfig& config) {
  const std::size_t num_classes = config.num_seen + config.num_unseen;
  std::vector<std::string> names;
  for (std::size_t c = config.num_seen; c < num_classes; ++c) {
    names.push_back(NumberedName("class_", c, num_classes));
  }
  return names;
}

}  // namespace zslscope
