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

#ifndef ZSLSCOPE_CHECKPOINT_H_
#define ZSLSCOPE_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "zslscope/model.h"

namespace zslscope {

// Layout (little-endian): "ZSLM", u32 version = 1, u32 d, u32 h, u32 a,
// W1, b1, W2, b2 as row-major float64, the attribute weights (a x float64),
// then the training configuration as a JSON trailer running to end of file.
struct Checkpoint {
  MappingModel model;
  Vector attribute_weights;
  TrainConfig config;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
Checkpoint ParseCheckpoint(const std::string& bytes,
                           const std::filesystem::path& origin = {});

void SaveCheckpoint(const Checkpoint& checkpoint,
                    const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace zslscope

#endif  // ZSLSCOPE_CHECKPOINT_H_
