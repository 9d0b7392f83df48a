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

#ifndef LEVELSIM_CACHE_H
#define LEVELSIM_CACHE_H

#include <cstdint>
#include <optional>
#include <vector>

#include "levelsim/types.h"

namespace levelsim
{
struct CacheConfig {
  std::uint64_t capacity_bytes = 32 * 1024;
  std::uint32_t associativity = 4;
  std::uint32_t block_bytes = 64;
  std::uint32_t tag_latency = 4;
  std::uint32_t data_latency = 4;
  bool sequential_tag_data = false;
  std::uint32_t ports = 1;
  std::uint32_t mshr_entries = 16;
  bool inclusive_of_upper = false;

  std::uint64_t set_count() const { return capacity_bytes / (std::uint64_t{associativity} * block_bytes); }

  // Parallel caches read tag and data together; a sequential cache pays both.
  std::uint32_t hit_latency() const { return sequential_tag_data ? tag_latency + data_latency : data_latency; }

  // Throws std::invalid_argument describing the first violated constraint.
  void validate(std::string_view name) const;
};

struct CacheLine {
  std::uint64_t tag = 0;
  bool valid = false;
  bool dirty = false;
  bool prefetched = false;
  std::uint64_t lru_stamp = 0;
};

struct LookupResult {
  bool hit = false;
  bool dirty = false;
  bool prefetched_first_touch = false;
};

struct Victim {
  BlockAddr block;
  bool dirty = false;
  bool prefetched = false;
};

// Set-associative, LRU, write-back storage for one level. No timing and no
// knowledge of neighbouring levels; the Hierarchy wires levels together.
class Cache
{
public:
  explicit Cache(CacheConfig config);

  const CacheConfig& config() const { return config_; }
  std::uint64_t sets() const { return sets_; }

  LookupResult lookup(BlockAddr block, bool touch_lru);
  bool contains(BlockAddr block) const { return find(block) != nullptr; }
  const CacheLine* find(BlockAddr block) const;

  // Installs the block, returning the evicted LRU line if the set was full.
  // Installing a block that is already present merges the dirty bit instead.
  std::optional<Victim> install(BlockAddr block, bool dirty, bool prefetched);

  // Removes the block; returns its final state if it was present.
  std::optional<Victim> invalidate(BlockAddr block);

  bool set_dirty(BlockAddr block);

  std::uint64_t set_index(BlockAddr block) const { return block.value & (sets_ - 1); }
  std::uint64_t tag_of(BlockAddr block) const { return block.value >> set_bits_; }
  BlockAddr block_of(std::uint64_t set, std::uint64_t tag) const { return BlockAddr{(tag << set_bits_) | set}; }

  template <typename F>
  void for_each_valid(F&& f) const
  {
    for (std::uint64_t s = 0; s < sets_; ++s)
      for (std::uint32_t w = 0; w < ways_; ++w) {
        const auto& line = lines_[s * ways_ + w];
        if (line.valid)
          f(block_of(s, line.tag), line);
      }
  }

  std::uint64_t valid_lines() const;

private:
  CacheLine* find(BlockAddr block);

  CacheConfig config_;
  std::uint64_t sets_;
  unsigned set_bits_;
  std::uint32_t ways_;
  std::uint64_t access_clock_ = 0;
  std::vector<CacheLine> lines_;
};

} // namespace levelsim

#endif
