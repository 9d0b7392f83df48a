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

#ifndef LEVELSIM_MSHR_H
#define LEVELSIM_MSHR_H

#include <cstdint>
#include <vector>

#include "levelsim/types.h"

namespace levelsim
{
struct MshrEntry {
  BlockAddr block;
  bool demand = false;
  std::vector<std::uint64_t> targets;
  std::uint64_t issued_at = 0;
};

enum class MshrResult { allocated, coalesced, rejected };

// Miss status holding registers for one cache. Prefetch allocations must
// leave `reserved()` entries free for demand misses.
class MshrFile
{
public:
  MshrFile(std::uint32_t capacity, double demand_reserve_fraction);

  MshrResult allocate(BlockAddr block, bool demand, std::uint64_t requestor = 0, std::uint64_t now = 0);
  bool deallocate(BlockAddr block);

  const MshrEntry* find(BlockAddr block) const;
  bool pending(BlockAddr block) const { return find(block) != nullptr; }

  std::uint32_t capacity() const { return capacity_; }
  std::uint32_t reserved() const { return reserved_; }
  std::uint32_t occupancy() const { return static_cast<std::uint32_t>(entries_.size()); }
  std::uint32_t free_entries() const { return capacity_ - occupancy(); }
  std::uint32_t peak_occupancy() const { return peak_; }
  std::uint64_t allocations() const { return allocations_; }
  std::uint64_t deallocations() const { return deallocations_; }

private:
  std::uint32_t capacity_;
  std::uint32_t reserved_;
  std::uint32_t peak_ = 0;
  std::uint64_t allocations_ = 0;
  std::uint64_t deallocations_ = 0;
  std::vector<MshrEntry> entries_;
};

} // namespace levelsim

#endif
