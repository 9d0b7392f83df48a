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

#ifndef LEVELSIM_LEVEL_PREDICTOR_H
#define LEVELSIM_LEVEL_PREDICTOR_H

#include <cstdint>
#include <vector>

#include "levelsim/locmap.h"
#include "levelsim/pld.h"

namespace levelsim
{
enum class PrefetchFillPolicy : std::uint8_t {
  metadata_hit, // prefetch fills update the LocMap only when the line is cached
  always        // every prefetch fill updates (sensitivity setting)
};

struct LevelPredictorConfig {
  MetadataCacheConfig metadata{};
  PopularityThresholds thresholds{};
  std::uint64_t locmap_base = 0;
  std::uint64_t metadata_fill_latency = 0;
  PrefetchFillPolicy prefetch_fills = PrefetchFillPolicy::metadata_hit;
};

enum class LocMapEvent : std::uint8_t { demand_fill, dirty_eviction, prefetch_fill };

struct PredictResult {
  Prediction prediction;
  bool meta_hit = false;
  std::uint32_t latency = 1;
};

struct LevelPredictorStats {
  std::uint64_t meta_accesses = 0;   // every metadata-cache probe (predict and update)
  std::uint64_t meta_predict_hits = 0;
  std::uint64_t meta_predict_misses = 0;
  std::uint64_t meta_fills = 0;      // LocMap lines fetched into the metadata cache
  std::uint64_t meta_writebacks = 0; // dirty lines written back to the table
  std::uint64_t table_writes = 0;    // updates applied directly to the backing table
  std::uint64_t dropped_prefetch_updates = 0;
  std::uint64_t pld_predictions = 0;
  std::uint64_t pld_updates = 0;
};

// LocMap + metadata cache + Popular Levels Detector.
class LevelPredictor
{
public:
  explicit LevelPredictor(LevelPredictorConfig config);

  // Called on an L1 miss at simulated cycle `now`. On a metadata miss the
  // PLD answers and the covering LocMap line is fetched in the background.
  PredictResult predict(BlockAddr block, std::uint64_t now);

  void notify(LocMapEvent event, MemLevel level, BlockAddr block, std::uint64_t now);

  void pld_update(PredictTarget resolved);
  Prediction pld_predict() const { return pld_.predict(config_.thresholds); }

  // Installs every background metadata fill that is due by `now`.
  void complete_fills(std::uint64_t now);

  // Code a metadata-hit predict would return, without side effects.
  std::optional<MemLevel> cached_level(BlockAddr block) const;
  MemLevel table_level(BlockAddr block) const { return table_.get(block); }
  bool fill_pending(BlockAddr block) const;

  const PldCounters& pld() const { return pld_; }
  PldCounters& pld() { return pld_; }
  const LevelPredictorStats& stats() const { return stats_; }
  const LevelPredictorConfig& config() const { return config_; }

private:
  struct PendingFill {
    std::uint64_t table_block;
    std::uint64_t ready_at;
  };

  void install_line(std::uint64_t table_block);

  LevelPredictorConfig config_;
  LocMapTable table_;
  MetadataCache meta_;
  PldCounters pld_;
  std::vector<PendingFill> pending_;
  LevelPredictorStats stats_;
};

} // namespace levelsim

#endif
