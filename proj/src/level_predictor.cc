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

#include "levelsim/level_predictor.h"

#include <algorithm>

namespace levelsim
{
LevelPredictor::LevelPredictor(LevelPredictorConfig config) : config_(config), table_(config.locmap_base), meta_(config.metadata) {}

void LevelPredictor::install_line(std::uint64_t table_block)
{
  ++stats_.meta_fills;
  if (auto evicted = meta_.install(table_block, table_.read_line(table_block)); evicted && evicted->dirty) {
    table_.write_line(evicted->table_block, evicted->data);
    ++stats_.meta_writebacks;
  }
}

void LevelPredictor::complete_fills(std::uint64_t now)
{
  if (pending_.empty())
    return;
  auto due = std::stable_partition(pending_.begin(), pending_.end(), [now](const PendingFill& f) { return f.ready_at <= now; });
  for (auto it = pending_.begin(); it != due; ++it)
    install_line(it->table_block);
  pending_.erase(pending_.begin(), due);
}

bool LevelPredictor::fill_pending(BlockAddr block) const
{
  auto line = locmap_index(block, config_.locmap_base).table_block;
  return std::any_of(pending_.begin(), pending_.end(), [line](const PendingFill& f) { return f.table_block == line; });
}

PredictResult LevelPredictor::predict(BlockAddr block, std::uint64_t now)
{
  complete_fills(now);

  auto idx = locmap_index(block, config_.locmap_base);
  ++stats_.meta_accesses;
  if (auto* line = meta_.access(idx.table_block)) {
    ++stats_.meta_predict_hits;
    return {Prediction{LevelSet{decode_level(read_code(*line, idx.bit_offset))}, PredictionSource::locmap}, true,
            config_.metadata.access_latency};
  }

  ++stats_.meta_predict_misses;
  if (!fill_pending(block))
    pending_.push_back({idx.table_block, now + config_.metadata_fill_latency});

  ++stats_.pld_predictions;
  return {pld_predict(), false, config_.metadata.access_latency};
}

void LevelPredictor::notify(LocMapEvent event, MemLevel level, BlockAddr block, std::uint64_t now)
{
  complete_fills(now);

  auto idx = locmap_index(block, config_.locmap_base);
  auto code = encode_level(level);
  ++stats_.meta_accesses;
  if (auto* line = meta_.access(idx.table_block)) {
    write_code(*line, idx.bit_offset, code);
    meta_.mark_dirty(idx.table_block);
    return;
  }

  if (event == LocMapEvent::prefetch_fill && config_.prefetch_fills == PrefetchFillPolicy::metadata_hit) {
    ++stats_.dropped_prefetch_updates;
    return;
  }

  // Metadata miss on the update path: write the backing table without
  // fetching the line.
  table_.set(block, level);
  ++stats_.table_writes;
}

void LevelPredictor::pld_update(PredictTarget resolved)
{
  ++stats_.pld_updates;
  pld_.update(resolved);
}

std::optional<MemLevel> LevelPredictor::cached_level(BlockAddr block) const
{
  auto idx = locmap_index(block, config_.locmap_base);
  const auto* line = meta_.peek(idx.table_block);
  if (line == nullptr)
    return std::nullopt;
  return decode_level(read_code(*line, idx.bit_offset));
}

} // namespace levelsim
