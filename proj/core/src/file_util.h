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

#ifndef ZSLSCOPE_SRC_FILE_UTIL_H_
#define ZSLSCOPE_SRC_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace zslscope::internal {

// Throws DataError if the file is missing or unreadable.
std::string ReadFileBytes(const std::filesystem::path& path);
// Throws Error if the file cannot be written.
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

std::string_view Trim(std::string_view s);
std::vector<std::string> SplitCsvLine(std::string_view line);

// Strict full-string parse; returns false on trailing garbage.
bool ParseDouble(std::string_view text, double& value);
bool ParseSize(std::string_view text, std::size_t& value);

}  // namespace zslscope::internal

#endif  // ZSLSCOPE_SRC_FILE_UTIL_H_
