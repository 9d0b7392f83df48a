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

#ifndef LEVELSIM_METRICS_H
#define LEVELSIM_METRICS_H

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "levelsim/types.h"

namespace levelsim
{
enum class PredictionCategory : std::uint8_t { sequential_correct, useful_skip, opportunity_loss, harmful };
inline constexpr std::array<PredictionCategory, 4> all_categories{PredictionCategory::sequential_correct, PredictionCategory::useful_skip,
                                                                   PredictionCategory::opportunity_loss, PredictionCategory::harmful};
std::string_view to_string(PredictionCategory c);

// Classifies one predicted L1 miss against the level that served it.
//   actual in targets, a shallower level skipped     -> useful_skip
//   actual in targets, nothing shallower skipped     -> sequential_correct
//   actual missing, shallower than the deepest target -> harmful (bypassed the holder)
//   actual missing, deeper than every target          -> opportunity_loss
PredictionCategory classify(LevelSet targets, MemLevel actual);

struct EnergyModel {
  std::array<double, 3> tag{1.0, 2.0, 8.0};
  std::array<double, 3> data{2.0, 4.0, 20.0};
  double dir = 2.0;
  double meta_access = 0.5;
  double pld = 0.01;
  double locmap_fill = 30.0;
  double mem_access = 200.0;
  double tage_2k = 0.5;
  double tage_8k = 2.0;
};

enum class EnergyEvent : std::uint8_t {
  l1_lookup,
  l1_fill,
  l2_lookup,
  l2_fill,
  l3_tag,
  l3_data,
  l3_fill,
  dir,
  mem_read,
  mem_write,
  meta_access,
  pld,
  locmap_fill,
  tage_access,
  count_
};
inline constexpr std::size_t energy_event_count = static_cast<std::size_t>(EnergyEvent::count_);
std::string_view to_string(EnergyEvent e);

struct EnergyCounters {
  std::array<std::uint64_t, energy_event_count> counts{};

  std::uint64_t& operator[](EnergyEvent e) { return counts[static_cast<std::size_t>(e)]; }
  std::uint64_t operator[](EnergyEvent e) const { return counts[static_cast<std::size_t>(e)]; }
};

// Per-event energy. `tage_unit` selects the comparator's per-access cost.
double unit_energy(EnergyEvent e, const EnergyModel& model, double tage_unit);

struct EnergyItem {
  std::string name;
  std::uint64_t count = 0;
  double unit = 0.0;
  double energy = 0.0;
  friend bool operator==(const EnergyItem&, const EnergyItem&) = default;
};

std::vector<EnergyItem> energy_breakdown(const EnergyCounters& counters, const EnergyModel& model, double tage_unit);
double energy_total(const std::vector<EnergyItem>& items);

enum class WorkloadClass : std::uint8_t { sequential_friendly, skip_friendly, mixed };
std::string_view to_string(WorkloadClass c);

struct EffectivenessThresholds {
  double skip_x = 1.5;
  double skip_y = 1.5;
  double seq_x = 3.0;
  double seq_y = 2.0;
};

struct Effectiveness {
  double x = 0.0; // L1 misses / L2 misses
  double y = 0.0; // L2 misses / L3 misses
  WorkloadClass cls = WorkloadClass::mixed;
  friend bool operator==(const Effectiveness&, const Effectiveness&) = default;
};

inline constexpr double ratio_sentinel = std::numeric_limits<double>::infinity();

// Ratios with a zero denominator are reported as +infinity.
Effectiveness effectiveness(std::uint64_t l1_misses, std::uint64_t l2_misses, std::uint64_t l3_misses, const EffectivenessThresholds& th);

struct WindowStats {
  std::uint64_t accesses = 0;
  std::uint64_t l1_misses = 0;
  std::uint64_t l2_misses = 0;
  std::uint64_t l3_misses = 0;
  friend bool operator==(const WindowStats&, const WindowStats&) = default;
};

struct PrefetchStats {
  std::string name;
  std::uint64_t issued = 0;
  std::uint64_t useful = 0;
  std::uint64_t rejected = 0;  // MSHR reservation back-pressure
  std::uint64_t redundant = 0; // landed on a block already present
  std::uint64_t late = 0;      // a demand arrived while still in flight
  std::uint64_t throttled = 0; // proposals suppressed by the accuracy gate
  friend bool operator==(const PrefetchStats&, const PrefetchStats&) = default;
};

struct MshrStats {
  std::string level;
  std::uint64_t demand_allocations = 0;
  std::uint64_t prefetch_allocations = 0;
  std::uint64_t deallocations = 0;
  std::uint64_t demand_rejections = 0;
  std::uint64_t peak_occupancy = 0;
  friend bool operator==(const MshrStats&, const MshrStats&) = default;
};

struct RunReport {
  std::string mode;
  std::uint64_t accesses = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;

  std::uint64_t l1_hits = 0;
  std::uint64_t l1_misses = 0;
  std::uint64_t l1_mshr_hits = 0; // demand merged into an in-flight L1 prefetch
  std::uint64_t l2_hits = 0;
  std::uint64_t l2_misses = 0;
  std::uint64_t l3_hits = 0;
  std::uint64_t l3_misses = 0;

  std::uint64_t predicted = 0;
  std::array<std::uint64_t, 4> categories{};
  std::array<std::uint64_t, 3> target_ways{};     // 1-, 2-, 3-target predictions
  std::array<std::uint64_t, 3> pld_target_ways{}; // same, PLD-sourced only
  std::uint64_t recoveries = 0;

  std::uint64_t meta_accesses = 0;
  std::uint64_t meta_hits = 0;
  std::uint64_t meta_misses = 0;
  double meta_hit_ratio = 0.0;
  std::uint64_t pld_predictions = 0;
  std::uint64_t pld_correct = 0;
  double pld_accuracy = 0.0;

  std::uint64_t total_latency = 0;
  double amat = 0.0;

  std::vector<EnergyItem> energy;
  double energy_total = 0.0;

  std::vector<PrefetchStats> prefetch;
  std::vector<MshrStats> mshr;

  std::uint64_t window_len = 0;
  std::vector<WindowStats> windows;
  Effectiveness effectiveness{};

  std::uint64_t locmap_storage_bits = 0;
  double locmap_overhead_ratio = 0.0;

  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> notes;

  std::uint64_t category(PredictionCategory c) const { return categories[static_cast<std::size_t>(c)]; }
  double category_share(PredictionCategory c) const { return predicted == 0 ? 0.0 : static_cast<double>(category(c)) / predicted; }
  double accuracy() const
  {
    return predicted == 0 ? 0.0 : static_cast<double>(category(PredictionCategory::sequential_correct) + category(PredictionCategory::useful_skip)) / predicted;
  }
  double energy_of(std::string_view name) const;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

} // namespace levelsim

#endif
