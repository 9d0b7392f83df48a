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

#ifndef LEVELSIM_HIERARCHY_H
#define LEVELSIM_HIERARCHY_H

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "levelsim/cache.h"
#include "levelsim/directory.h"
#include "levelsim/mshr.h"
#include "levelsim/types.h"

namespace levelsim
{
struct HierarchyConfig {
  std::array<CacheConfig, 3> caches{};
  double mshr_demand_reserve = 0.25;

  const CacheConfig& at(MemLevel level) const { return caches.at(index_of(level)); }
  CacheConfig& at(MemLevel level) { return caches.at(index_of(level)); }

  static HierarchyConfig defaults();
};

// Side effects produced by fills, consumed by the engine for energy
// accounting and predictor notifications.
struct HierarchyEvent {
  enum class Kind : std::uint8_t {
    fill,           // block installed at `level`
    writeback,      // dirty data written into `level` (L2, L3 or MEM)
    back_invalidate // L1 copy dropped because L2 evicted the block
  };
  Kind kind;
  MemLevel level;
  BlockAddr block;
};

struct FillResult {
  std::optional<Victim> victim;
};

struct LineSnapshot {
  BlockAddr block;
  bool dirty;
  bool prefetched;
  friend bool operator==(const LineSnapshot&, const LineSnapshot&) = default;
};

// L1/L2/L3 storage plus MSHRs and the directory. L2 is inclusive of L1
// (back-invalidation on L2 eviction); L3 is non-inclusive.
class Hierarchy
{
public:
  explicit Hierarchy(const HierarchyConfig& config);

  LookupResult lookup(MemLevel level, BlockAddr block, bool touch_lru);
  bool contains(MemLevel level, BlockAddr block) const { return cache(level).contains(block); }

  FillResult fill(MemLevel level, BlockAddr block, bool dirty, bool prefetched);
  void mark_dirty(MemLevel level, BlockAddr block);

  MshrFile& mshr(MemLevel level) { return mshrs_.at(index_of(level)); }
  const MshrFile& mshr(MemLevel level) const { return mshrs_.at(index_of(level)); }

  DirectoryResult directory_query(BlockAddr block) const { return directory_.query(block); }

  // Shallowest level holding the block (MEM when it is nowhere on chip).
  MemLevel locate(BlockAddr block) const;

  const Cache& cache(MemLevel level) const { return caches_.at(index_of(level)); }

  // Full-scan consistency check of directory, inclusion and MSHR bounds.
  // Returns a description of every violation found.
  std::vector<std::string> audit() const;

  std::vector<LineSnapshot> snapshot(MemLevel level) const;

  const std::vector<HierarchyEvent>& events() const { return events_; }
  void clear_events() { events_.clear(); }

private:
  Cache& cache_mut(MemLevel level) { return caches_.at(index_of(level)); }
  void write_back(MemLevel into, BlockAddr block);

  std::array<Cache, 3> caches_;
  std::array<MshrFile, 3> mshrs_;
  Directory directory_;
  std::vector<HierarchyEvent> events_;
};

} // namespace levelsim

#endif
