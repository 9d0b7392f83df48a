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

#ifndef LEVELSIM_PLD_H
#define LEVELSIM_PLD_H

#include <array>
#include <cstdint>

#include "levelsim/types.h"

namespace levelsim
{
// Prediction targets exclude L1: a prediction is only made after an L1 miss.
enum class PredictTarget : std::uint8_t { L2 = 0, L3 = 1, MEM = 2 };

constexpr MemLevel to_level(PredictTarget t) { return static_cast<MemLevel>(static_cast<std::uint8_t>(t) + 1); }
// Precondition: level != L1
constexpr PredictTarget to_target(MemLevel level) { return static_cast<PredictTarget>(index_of(level) - 1); }

enum class PredictionSource : std::uint8_t { locmap, pld, tage, oracle, sequential };

struct Prediction {
  LevelSet targets{MemLevel::L2};
  PredictionSource source = PredictionSource::sequential;

  bool multiway() const { return targets.size() > 1; }
};

// Selection thresholds expressed in parts per million of the counter sum so
// that comparisons are exact integer arithmetic.
struct PopularityThresholds {
  std::uint32_t single_ppm = 800'000;
  std::uint32_t double_ppm = 950'000;

  static PopularityThresholds from_fractions(double single, double dbl);
};

// Popular-levels selection shared by the PLD and the TAGE comparator.
// counts are indexed L2, L3, MEM.
LevelSet select_popular_levels(const std::array<std::uint64_t, 3>& counts, PopularityThresholds thresholds);

// Three saturating per-level hit counters.
class PldCounters
{
public:
  static constexpr std::uint32_t max_count = 0xFFFF'FFFFu;

  PldCounters() = default;
  explicit PldCounters(std::array<std::uint32_t, 3> values) : counts_(values) {}

  void update(PredictTarget resolved);
  Prediction predict(PopularityThresholds thresholds) const;

  std::uint32_t count(PredictTarget t) const { return counts_[static_cast<std::size_t>(t)]; }
  const std::array<std::uint32_t, 3>& counts() const { return counts_; }

  friend bool operator==(const PldCounters&, const PldCounters&) = default;

private:
  std::array<std::uint32_t, 3> counts_{};
};

} // namespace levelsim

#endif
