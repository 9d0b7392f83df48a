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

#include "levelsim/tage.h"

#include <bit>
#include <stdexcept>

namespace levelsim
{
namespace
{
constexpr std::uint64_t mix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t history_mask(std::uint32_t records)
{
  return records >= 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << (2 * records)) - 1;
}
} // namespace

TagePredictor::TagePredictor(TageConfig config) : config_(config)
{
  const std::uint64_t budget_bits = std::uint64_t{config.budget_bytes} * 8;
  const std::uint64_t per_table = budget_bits / (TageConfig::entry_bits * tables_.size());
  if (per_table == 0)
    throw std::invalid_argument("TAGE budget too small for one entry per table");
  entries_per_table_ = static_cast<std::uint32_t>(std::bit_floor(per_table));
  for (auto& t : tables_)
    t.resize(entries_per_table_);
}

TagePredictor::Slot TagePredictor::slot_for(std::size_t table, BlockAddr block) const
{
  const auto hist = history_ & history_mask(config_.history_lengths[table]);
  const auto h = mix(block.value ^ mix(hist + (std::uint64_t{table} << 56)));
  return {static_cast<std::size_t>(h & (entries_per_table_ - 1)), static_cast<std::uint8_t>(h >> 56)};
}

int TagePredictor::provider(BlockAddr block) const
{
  for (int t = static_cast<int>(tables_.size()) - 1; t >= 0; --t) {
    auto [index, tag] = slot_for(static_cast<std::size_t>(t), block);
    const auto& e = tables_[static_cast<std::size_t>(t)][index];
    if (e.valid && e.tag == tag)
      return t;
  }
  return -1;
}

Prediction TagePredictor::predict(BlockAddr block) const
{
  const int p = provider(block);
  if (p < 0)
    return {LevelSet{MemLevel::L2}, PredictionSource::tage};
  const auto& e = tables_[static_cast<std::size_t>(p)][slot_for(static_cast<std::size_t>(p), block).index];
  return {select_popular_levels({e.counters[0], e.counters[1], e.counters[2]}, config_.thresholds), PredictionSource::tage};
}

void TagePredictor::update(BlockAddr block, PredictTarget resolved)
{
  const auto r = static_cast<std::size_t>(resolved);
  const int p = provider(block);
  bool correct = false;

  if (p >= 0) {
    auto& e = tables_[static_cast<std::size_t>(p)][slot_for(static_cast<std::size_t>(p), block).index];
    auto picked = select_popular_levels({e.counters[0], e.counters[1], e.counters[2]}, config_.thresholds);
    correct = picked == LevelSet{to_level(resolved)};
    for (std::size_t i = 0; i < 3; ++i) {
      if (i == r) {
        if (e.counters[i] < counter_max)
          ++e.counters[i];
      } else if (e.counters[i] > 0) {
        --e.counters[i];
      }
    }
    if (correct && e.useful < useful_max)
      ++e.useful;
    else if (!correct && e.useful > 0)
      --e.useful;
  }

  if (!correct) {
    // Allocate in the first longer-history table with a non-useful victim,
    // otherwise age the candidates.
    bool allocated = false;
    for (std::size_t t = static_cast<std::size_t>(p + 1); t < tables_.size(); ++t) {
      auto [index, tag] = slot_for(t, block);
      auto& e = tables_[t][index];
      if (!e.valid || e.useful == 0) {
        e = Entry{true, tag, {}, 0};
        e.counters[r] = 1;
        allocated = true;
        break;
      }
    }
    if (!allocated) {
      for (std::size_t t = static_cast<std::size_t>(p + 1); t < tables_.size(); ++t) {
        auto& e = tables_[t][slot_for(t, block).index];
        if (e.useful > 0)
          --e.useful;
      }
    }
  }

  history_ = ((history_ << 2) | r) & history_mask(32);
}

} // namespace levelsim
