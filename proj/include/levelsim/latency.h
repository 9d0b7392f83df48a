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

#ifndef LEVELSIM_LATENCY_H
#define LEVELSIM_LATENCY_H

#include <cstdint>
#include <vector>

#include "levelsim/hierarchy.h"
#include "levelsim/types.h"

namespace levelsim
{
struct LatencyModel {
  std::uint32_t l1_hit = 4;
  std::uint32_t l2_hit = 12;
  std::uint32_t l3_tag = 20;
  std::uint32_t l3_data = 35;
  std::uint32_t mem_fixed = 200;
  std::uint32_t predictor_cycle = 1;
  std::uint32_t bus_hop = 1;
  // Memory launches after the LLC tag/directory check instead of alongside it.
  bool serial_mem_launch = false;

  static LatencyModel from(const HierarchyConfig& hierarchy, std::uint32_t mem_fixed, std::uint32_t predictor_cycle, std::uint32_t bus_hop,
                           bool serial_mem_launch);

  // Sequential L1 -> L2 -> L3 -> MEM miss cost; used for background
  // metadata-line fetches.
  std::uint32_t full_miss() const;
};

enum class StageKind : std::uint8_t { l1_lookup, l2_lookup, l3_tag, l3_data, memory, bus, predictor, parallel };

struct Stage;
using Path = std::vector<Stage>;

// A serial step, or a group of alternative paths running in parallel.
struct Stage {
  StageKind kind;
  std::vector<Path> branches{};

  Stage(StageKind k) : kind(k) {} // NOLINT: implicit for terse path literals
  static Stage parallel(std::vector<Path> branches);
};

// Serial stages add; a parallel group contributes its slowest branch.
// Throws std::invalid_argument for an empty path or an empty group.
std::uint64_t compose_latency(const Path& path, const LatencyModel& model);

// How one demand access travels through the hierarchy, for timing, energy
// and MSHR bookkeeping.
struct AccessPlan {
  Path path;
  std::uint8_t l2_lookups = 0;
  std::uint8_t l3_tag_lookups = 0; // directory is read with every tag lookup
  std::uint8_t l3_data_reads = 0;
  std::uint8_t mem_reads = 0;      // includes discarded speculative launches
  LevelSet mshr_levels;            // levels that allocate an MSHR entry for the request
  bool recovered = false;          // directory redirected a wrong bypass
};

AccessPlan plan_baseline(MemLevel served);

// Precondition: served != L1, !targets.empty(), targets exclude L1.
AccessPlan plan_predicted(LevelSet targets, MemLevel served, bool serial_mem_launch);

// Extra cycles a directory redirect adds once the bypassed holder is known.
std::uint32_t recovery_penalty(MemLevel actual, const LatencyModel& model);

} // namespace levelsim

#endif
