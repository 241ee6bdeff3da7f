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

#ifndef ZSLSCOPE_TYPES_H_
#define ZSLSCOPE_TYPES_H_

#include <cstddef>

#include <Eigen/Core>

namespace zslscope {

// Row-major so that one instance (or one class signature) is a contiguous row.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using ClassIndex = std::size_t;
using AttributeIndex = std::size_t;
using InstanceIndex = std::size_t;

}  // namespace zslscope

#endif  // ZSLSCOPE_TYPES_H_
