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

#ifndef ZSLSCOPE_ERRORS_H_
#define ZSLSCOPE_ERRORS_H_

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace zslscope {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition (bad index,
// dimension mismatch, out-of-range hyperparameter, unknown class name).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A dataset or checkpoint file is missing or malformed. `row` is zero when
// the problem is not tied to a particular row.
class DataError : public Error {
 public:
  DataError(std::filesystem::path file, std::size_t row,
            const std::string& message);

  const std::filesystem::path& file() const { return file_; }
  std::size_t row() const { return row_; }

 private:
  std::filesystem::path file_;
  std::size_t row_;
};

// An iterative optimizer produced a non-finite objective.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what_diverged, int step);

  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace zslscope

#endif  // ZSLSCOPE_ERRORS_H_
