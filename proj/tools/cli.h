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


#ifndef ZSLSCOPE_TOOLS_CLI_H_
#define ZSLSCOPE_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace zslscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Runs one subcommand. `args` excludes the program name. Results go to the
// --out paths or to `out`; diagnostics and errors go to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace zslscope::cli

#endif  // ZSLSCOPE_TOOLS_CLI_H_
