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

#ifndef LEVELSIM_REPORT_IO_H
#define LEVELSIM_REPORT_IO_H

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levelsim/metrics.h"

namespace levelsim
{
// Stable key order; infinite ratios are written as the string "inf".
std::string emit_json(const RunReport& report);
// Throws std::invalid_argument on malformed input.
RunReport parse_json(const std::string& text);

// One "metric,value" row per scalar metric, after a header row.
std::string emit_csv(const RunReport& report);
std::size_t csv_metric_rows();
// Header plus one row per window.
std::string emit_windows_csv(const RunReport& report);

// Per-mode comparison against the baseline report (if present): AMAT and
// energy deltas plus the accuracy breakdown.
std::string emit_summary_json(const std::vector<RunReport>& reports);

std::optional<WorkloadClass> parse_workload_class(std::string_view name);

} // namespace levelsim

#endif
