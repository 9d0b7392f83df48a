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

#include "levelsim/pld.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levelsim
{
PopularityThresholds PopularityThresholds::from_fractions(double single, double dbl)
{
  if (!(single >= 0.0 && single <= 1.0) || !(dbl >= 0.0 && dbl <= 1.0))
    throw std::invalid_argument("popularity thresholds must lie in [0, 1]");
  return {static_cast<std::uint32_t>(std::llround(single * 1e6)), static_cast<std::uint32_t>(std::llround(dbl * 1e6))};
}

LevelSet select_popular_levels(const std::array<std::uint64_t, 3>& counts, PopularityThresholds thresholds)
{
  const std::uint64_t sum = counts[0] + counts[1] + counts[2];
  if (sum == 0)
    return LevelSet{MemLevel::L2};

  // Stable sort keeps the shallower level first among equal counts.
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return counts[a] > counts[b]; });

  auto level_of = [](std::size_t i) { return to_level(static_cast<PredictTarget>(i)); };

  LevelSet picked{level_of(order[0])};
  std::uint64_t covered = counts[order[0]];
  if (covered * 1'000'000 >= std::uint64_t{thresholds.single_ppm} * sum)
    return picked;

  picked.insert(level_of(order[1]));
  covered += counts[order[1]];
  if (covered * 1'000'000 >= std::uint64_t{thresholds.double_ppm} * sum)
    return picked;

  picked.insert(level_of(order[2]));
  return picked;
}

void PldCounters::update(PredictTarget resolved)
{
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i == static_cast<std::size_t>(resolved)) {
      if (counts_[i] != max_count)
        ++counts_[i];
    } else if (counts_[i] != 0) {
      --counts_[i];
    }
  }
}

Prediction PldCounters::predict(PopularityThresholds thresholds) const
{
  return {select_popular_levels({counts_[0], counts_[1], counts_[2]}, thresholds), PredictionSource::pld};
}

} // namespace levelsim
