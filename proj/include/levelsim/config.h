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

#ifndef LEVELSIM_CONFIG_H
#define LEVELSIM_CONFIG_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levelsim/hierarchy.h"
#include "levelsim/latency.h"
#include "levelsim/level_predictor.h"
#include "levelsim/metrics.h"
#include "levelsim/prefetch.h"
#include "levelsim/tage.h"
#include "levelsim/trace.h"

namespace levelsim
{
enum class EngineMode : std::uint8_t { baseline, locmap, tage2k, tage8k, oracle };
inline constexpr std::array<EngineMode, 5> all_modes{EngineMode::baseline, EngineMode::locmap, EngineMode::tage2k, EngineMode::tage8k, EngineMode::oracle};

std::string_view to_string(EngineMode mode);
std::optional<EngineMode> parse_mode(std::string_view name);
constexpr bool uses_prediction(EngineMode mode) { return mode != EngineMode::baseline; }

// Bad syntax, unknown key or invalid value.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct LatencyConfig {
  std::uint32_t mem_fixed = 200;
  std::uint32_t predictor = 1;
  std::uint32_t bus_hop = 1;
  std::optional<std::uint64_t> metadata_fill; // unset: full sequential miss
  bool serial_mem_launch = false;
};

struct PredictorParams {
  MetadataCacheConfig metadata{};
  double theta_single = 0.8;
  double theta_double = 0.95;
  std::uint64_t locmap_base = 0;
  PrefetchFillPolicy prefetch_fills = PrefetchFillPolicy::metadata_hit;
};

struct PrefetchConfig {
  bool l1_enable = true;
  std::uint32_t l1_degree = 1;
  bool l2_enable = true;
  std::uint32_t l2_degree = 2;
  bool l3_enable = true;
  DcptConfig dcpt{};
  std::uint64_t epoch = 10'000'000;
  std::uint64_t sample = 1'000'000;
  double accuracy_threshold = 0.40;
  // Demand accesses per prefetch-latency unit: an in-flight prefetch of
  // latency L completes ceil(L / cycles_per_access) accesses after issue.
  std::uint32_t cycles_per_access = 10;

  ThrottleConfig throttle() const;
};

struct RunParams {
  std::vector<EngineMode> modes{EngineMode::baseline, EngineMode::locmap};
  std::uint64_t window = 10'000;
  std::uint64_t warmup = 0; // leading accesses excluded from statistics
  std::string out = "levelsim-out";
};

struct SimConfig {
  std::uint64_t physical_bytes = 16ull << 30;
  HierarchyConfig hierarchy = HierarchyConfig::defaults();
  LatencyConfig latency{};
  EnergyModel energy{};
  PredictorParams predictor{};
  PrefetchConfig prefetch{};
  EffectivenessThresholds analysis{};
  RunParams run{};
  std::string trace_path; // empty: use the synthetic spec
  SyntheticSpec synthetic{};

  // Throws ConfigError.
  void validate() const;

  LatencyModel latency_model() const;
  LevelPredictorConfig predictor_config() const;
  TageConfig tage_config(EngineMode mode) const;
  double tage_energy(EngineMode mode) const;

  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  // Every key with its resolved value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> echo() const;
  static std::vector<std::string> keys();
};

// `key = value` lines, optional [section] headers prefixing keys, '#'
// comments. Sizes accept KiB/MiB/GiB suffixes.
SimConfig parse_config(std::istream& in, std::string_view origin = "<config>");
// Throws std::runtime_error when the file cannot be read.
SimConfig load_config(const std::string& path);
// "dotted.key=value"
void apply_override(SimConfig& config, std::string_view assignment);

std::uint64_t parse_size(std::string_view text);
std::string format_size(std::uint64_t bytes);

} // namespace levelsim

#endif
