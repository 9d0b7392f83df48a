/*
 *    Copyright 2026 The levelsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LEVELSIM_CLI_H
#define LEVELSIM_CLI_H

#include <iosfwd>
#include <string>
#include <vector>

namespace levelsim
{
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1; // parse or validation failure
inline constexpr int exit_io = 2;    // runtime I/O failure

// Entry point behind the levelsim binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Worker threads for independent mode runs: LEVELSIM_THREADS if set (>= 1),
// else the hardware concurrency, never more than `jobs`.
unsigned worker_count(std::size_t jobs);

} // namespace levelsim

#endif
