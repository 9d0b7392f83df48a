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

#ifndef LEVELSIM_TAGE_H
#define LEVELSIM_TAGE_H

#include <array>
#include <cstdint>
#include <vector>

#include "levelsim/pld.h"

namespace levelsim
{
// Address + level-history TAGE variant whose entries carry one counter per
// prediction target instead of a single taken/not-taken counter.
struct TageConfig {
  std::uint32_t budget_bytes = 2048;
  std::array<std::uint32_t, 4> history_lengths{0, 4, 8, 16};
  PopularityThresholds thresholds{};

  static constexpr unsigned tag_bits = 8;
  static constexpr unsigned counter_bits = 6;
  static constexpr unsigned useful_bits = 2;
  static constexpr unsigned entry_bits = tag_bits + 3 * counter_bits + useful_bits;
};

class TagePredictor
{
public:
  explicit TagePredictor(TageConfig config);

  Prediction predict(BlockAddr block) const;
  void update(BlockAddr block, PredictTarget resolved);

  std::uint32_t entries_per_table() const { return entries_per_table_; }
  std::uint64_t storage_bits() const { return std::uint64_t{TageConfig::entry_bits} * entries_per_table_ * tables_.size(); }
  std::uint64_t history() const { return history_; }

private:
  static constexpr std::uint8_t counter_max = (1u << TageConfig::counter_bits) - 1;
  static constexpr std::uint8_t useful_max = (1u << TageConfig::useful_bits) - 1;

  struct Entry {
    bool valid = false;
    std::uint8_t tag = 0;
    std::array<std::uint8_t, 3> counters{};
    std::uint8_t useful = 0;
  };

  struct Slot {
    std::size_t index;
    std::uint8_t tag;
  };

  Slot slot_for(std::size_t table, BlockAddr block) const;
  int provider(BlockAddr block) const;

  TageConfig config_;
  std::uint32_t entries_per_table_;
  std::array<std::vector<Entry>, 4> tables_;
  std::uint64_t history_ = 0; // 2 bits per resolved level, newest in the low bits
};

} // namespace levelsim

#endif
