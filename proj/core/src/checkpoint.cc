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

#include "zslscope/checkpoint.h"

#include <string>

#include <nlohmann/json.hpp>

#include "binary_io.h"
#include "file_util.h"
#include "zslscope/errors.h"
#include "zslscope/json_io.h"

namespace zslscope {
namespace {

constexpr char kMagic[] = "ZSLM";

template <typename Dense>
void AppendDoubles(std::string& out, const Dense& values) {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      internal::AppendLittleEndian(out, static_cast<double>(values(r, c)));
    }
  }
}

template <typename Dense>
bool ReadDoubles(internal::ByteReader& reader, Dense& values) {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      double v = 0.0;
      if (!reader.Read(v)) return false;
      values(r, c) = v;
    }
  }
  return true;
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& checkpoint) {
  const MappingModel& m = checkpoint.model;
  if (static_cast<std::size_t>(checkpoint.attribute_weights.size()) !=
      m.output_dim()) {
    throw InvalidArgument("checkpoint weights do not match model output");
  }
  std::string out(kMagic, 4);
  internal::AppendLittleEndian(out, kCheckpointVersion);
  internal::AppendLittleEndian(out, static_cast<std::uint32_t>(m.input_dim()));
  internal::AppendLittleEndian(out, static_cast<std::uint32_t>(m.hidden_dim()));
  internal::AppendLittleEndian(out, static_cast<std::uint32_t>(m.output_dim()));
  AppendDoubles(out, m.w1);
  AppendDoubles(out, m.b1);
  AppendDoubles(out, m.w2);
  AppendDoubles(out, m.b2);
  AppendDoubles(out, checkpoint.attribute_weights);
  out += TrainConfigToJson(checkpoint.config).dump();
  return out;
}

Checkpoint ParseCheckpoint(const std::string& bytes,
                           const std::filesystem::path& origin) {
  internal::ByteReader reader(bytes);
  if (!reader.ReadMagic(kMagic)) {
    throw DataError(origin, 0, "bad magic (expected ZSLM)");
  }
  std::uint32_t version = 0, d = 0, h = 0, a = 0;
  if (!reader.Read(version) || !reader.Read(d) || !reader.Read(h) ||
      !reader.Read(a)) {
    throw DataError(origin, 0, "truncated header");
  }
  if (version != kCheckpointVersion) {
    throw DataError(origin, 0,
                    "unsupported checkpoint version " + std::to_string(version));
  }
  if (d == 0 || h == 0 || a == 0) {
    throw DataError(origin, 0, "zero model dimension");
  }
  Checkpoint checkpoint;
  checkpoint.model = MappingModel::Zeros(d, h, a);
  checkpoint.attribute_weights.resize(a);
  MappingModel& m = checkpoint.model;
  if (!ReadDoubles(reader, m.w1) || !ReadDoubles(reader, m.b1) ||
      !ReadDoubles(reader, m.w2) || !ReadDoubles(reader, m.b2) ||
      !ReadDoubles(reader, checkpoint.attribute_weights)) {
    throw DataError(origin, 0, "truncated parameter block");
  }
  if (!m.AllFinite()) throw DataError(origin, 0, "non-finite parameter");
  try {
    ValidateAttributeWeights(checkpoint.attribute_weights, a);
    checkpoint.config =
        TrainConfigFromJson(nlohmann::json::parse(reader.rest()));
    checkpoint.config.Validate();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(origin, 0, std::string("bad config trailer: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(origin, 0, e.what());
  }
  return checkpoint;
}

void SaveCheckpoint(const Checkpoint& checkpoint,
                    const std::filesystem::path& path) {
  internal::WriteFileBytes(path, SerializeCheckpoint(checkpoint));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return ParseCheckpoint(internal::ReadFileBytes(path), path);
}

}  // namespace zslscope
