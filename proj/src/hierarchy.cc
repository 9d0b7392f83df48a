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

#include "levelsim/hierarchy.h"

#include <algorithm>

#include <fmt/core.h>

namespace levelsim
{
HierarchyConfig HierarchyConfig::defaults()
{
  HierarchyConfig cfg;
  cfg.at(MemLevel::L1) = CacheConfig{32 * 1024, 4, 64, 4, 4, false, 1, 16, false};
  cfg.at(MemLevel::L2) = CacheConfig{256 * 1024, 8, 64, 12, 12, false, 2, 32, true};
  cfg.at(MemLevel::L3) = CacheConfig{2 * 1024 * 1024, 16, 64, 20, 35, true, 4, 64, false};
  return cfg;
}

Hierarchy::Hierarchy(const HierarchyConfig& config)
    : caches_{Cache{config.at(MemLevel::L1)}, Cache{config.at(MemLevel::L2)}, Cache{config.at(MemLevel::L3)}},
      mshrs_{MshrFile{config.at(MemLevel::L1).mshr_entries, config.mshr_demand_reserve},
             MshrFile{config.at(MemLevel::L2).mshr_entries, config.mshr_demand_reserve},
             MshrFile{config.at(MemLevel::L3).mshr_entries, config.mshr_demand_reserve}}
{
  events_.reserve(16);
}

LookupResult Hierarchy::lookup(MemLevel level, BlockAddr block, bool touch_lru) { return cache_mut(level).lookup(block, touch_lru); }

MemLevel Hierarchy::locate(BlockAddr block) const
{
  auto dir = directory_.query(block);
  return dir.on_chip ? dir.levels.shallowest() : MemLevel::MEM;
}

FillResult Hierarchy::fill(MemLevel level, BlockAddr block, bool dirty, bool prefetched)
{
  auto victim = cache_mut(level).install(block, dirty, prefetched);
  directory_.on_fill(level, block, dirty);
  events_.push_back({HierarchyEvent::Kind::fill, level, block});

  if (!victim)
    return {};

  directory_.on_evict(level, victim->block);
  if (cache(level).config().inclusive_of_upper) {
    for (auto upper : cache_levels) {
      if (!shallower(upper, level))
        continue;
      if (auto dropped = cache_mut(upper).invalidate(victim->block)) {
        directory_.on_evict(upper, victim->block);
        victim->dirty = victim->dirty || dropped->dirty;
        events_.push_back({HierarchyEvent::Kind::back_invalidate, upper, victim->block});
      }
    }
  }

  if (victim->dirty)
    write_back(next_level(level), victim->block);
  return {victim};
}

void Hierarchy::write_back(MemLevel into, BlockAddr block)
{
  events_.push_back({HierarchyEvent::Kind::writeback, into, block});
  if (into == MemLevel::MEM)
    return;
  if (cache_mut(into).set_dirty(block))
    directory_.on_dirty(into, block);
  else
    fill(into, block, true, false);
}

void Hierarchy::mark_dirty(MemLevel level, BlockAddr block)
{
  if (cache_mut(level).set_dirty(block))
    directory_.on_dirty(level, block);
}

std::vector<std::string> Hierarchy::audit() const
{
  std::vector<std::string> errors;

  for (auto level : cache_levels) {
    cache(level).for_each_valid([&](BlockAddr block, const CacheLine& line) {
      auto dir = directory_.query(block);
      if (!dir.levels.contains(level))
        errors.push_back(fmt::format("{} holds block {:#x} but the directory does not list it", to_string(level), block.value));
      if (dir.dirty.contains(level) != line.dirty)
        errors.push_back(fmt::format("dirty state of block {:#x} at {} disagrees with the directory", block.value, to_string(level)));
      if (line.prefetched && !line.valid)
        errors.push_back("prefetched bit on an invalid line");
    });
  }

  directory_.for_each([&](BlockAddr block, LevelSet presence, LevelSet) {
    presence.for_each([&](MemLevel level) {
      if (level == MemLevel::MEM || !cache(level).contains(block))
        errors.push_back(fmt::format("directory lists block {:#x} at {} but the cache does not hold it", block.value, to_string(level)));
    });
  });

  for (auto level : cache_levels) {
    if (!cache(level).config().inclusive_of_upper)
      continue;
    for (auto upper : cache_levels) {
      if (!shallower(upper, level))
        continue;
      cache(upper).for_each_valid([&](BlockAddr block, const CacheLine&) {
        if (!cache(level).contains(block))
          errors.push_back(fmt::format("inclusion violated: block {:#x} in {} but not in {}", block.value, to_string(upper), to_string(level)));
      });
    }
  }

  for (auto level : cache_levels)
    if (mshr(level).occupancy() > mshr(level).capacity())
      errors.push_back(fmt::format("{} MSHR occupancy exceeds capacity", to_string(level)));

  return errors;
}

std::vector<LineSnapshot> Hierarchy::snapshot(MemLevel level) const
{
  std::vector<LineSnapshot> lines;
  cache(level).for_each_valid([&](BlockAddr block, const CacheLine& line) { lines.push_back({block, line.dirty, line.prefetched}); });
  std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.block < b.block; });
  return lines;
}

} // namespace levelsim
