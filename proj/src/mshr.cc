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

#include "levelsim/mshr.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levelsim
{
MshrFile::MshrFile(std::uint32_t capacity, double demand_reserve_fraction)
    : capacity_(capacity), reserved_(static_cast<std::uint32_t>(std::ceil(demand_reserve_fraction * capacity)))
{
  if (capacity == 0)
    throw std::invalid_argument("mshr capacity must be positive");
  if (demand_reserve_fraction < 0.0 || demand_reserve_fraction > 1.0)
    throw std::invalid_argument("mshr demand reserve must lie in [0, 1]");
  entries_.reserve(capacity);
}

const MshrEntry* MshrFile::find(BlockAddr block) const
{
  auto it = std::find_if(std::begin(entries_), std::end(entries_), [block](const MshrEntry& e) { return e.block == block; });
  return it == std::end(entries_) ? nullptr : &*it;
}

MshrResult MshrFile::allocate(BlockAddr block, bool demand, std::uint64_t requestor, std::uint64_t now)
{
  auto it = std::find_if(std::begin(entries_), std::end(entries_), [block](const MshrEntry& e) { return e.block == block; });
  if (it != std::end(entries_)) {
    it->targets.push_back(requestor);
    it->demand = it->demand || demand;
    return MshrResult::coalesced;
  }

  if (free_entries() == 0 || (!demand && free_entries() <= reserved_))
    return MshrResult::rejected;

  entries_.push_back(MshrEntry{block, demand, {requestor}, now});
  ++allocations_;
  peak_ = std::max(peak_, occupancy());
  return MshrResult::allocated;
}

bool MshrFile::deallocate(BlockAddr block)
{
  auto it = std::find_if(std::begin(entries_), std::end(entries_), [block](const MshrEntry& e) { return e.block == block; });
  if (it == std::end(entries_))
    return false;
  entries_.erase(it);
  ++deallocations_;
  return true;
}

} // namespace levelsim
