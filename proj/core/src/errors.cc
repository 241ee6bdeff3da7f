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

#include "zslscope/errors.h"

#include <string>
#include <utility>

namespace zslscope {
namespace {

std::string FormatDataError(const std::filesystem::path& file, std::size_t row,
                            const std::string& message) {
  std::string out = file.string();
  if (row > 0) out += ":" + std::to_string(row);
  return out + ": " + message;
}

}  // namespace

DataError::DataError(std::filesystem::path file, std::size_t row,
                     const std::string& message)
    : Error(FormatDataError(file, row, message)),
      file_(std::move(file)),
      row_(row) {}

DivergenceError::DivergenceError(const std::string& what_diverged, int step)
    : Error(what_diverged + " diverged (non-finite value) at step " +
            std::to_string(step)),
      step_(step) {}

}  // namespace zslscope
