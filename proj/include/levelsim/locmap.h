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

#ifndef LEVELSIM_LOCMAP_H
#define LEVELSIM_LOCMAP_H

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "levelsim/types.h"

namespace levelsim
{
// One 64-byte LocMap line holds 2-bit codes for 256 consecutive data blocks,
// i.e. 16 KiB of physical address space.
inline constexpr unsigned locmap_code_bits = 2;
inline constexpr std::uint64_t locmap_blocks_per_line = 256;
inline constexpr unsigned locmap_region_shift = 14;

using LocMapLine = std::array<std::uint8_t, 64>;

// Encoding: 0 -> MEM, 1 -> L2, 2 -> L3, 3 -> reserved (decodes as MEM).
std::uint8_t encode_level(MemLevel level);
MemLevel decode_level(std::uint8_t code);

struct LocMapIndex {
  std::uint64_t table_block = 0;
  unsigned bit_offset = 0;
  friend bool operator==(const LocMapIndex&, const LocMapIndex&) = default;
};

constexpr LocMapIndex locmap_index(BlockAddr block, std::uint64_t base_index)
{
  return {base_index + (block.address() >> locmap_region_shift),
          static_cast<unsigned>(locmap_code_bits * (block.value % locmap_blocks_per_line))};
}

std::uint8_t read_code(const LocMapLine& line, unsigned bit_offset);
void write_code(LocMapLine& line, unsigned bit_offset, std::uint8_t code);

// Backing table in simulated reserved memory. Lines are materialized on first
// write; untouched lines read as all-zero (every block in MEM).
class LocMapTable
{
public:
  explicit LocMapTable(std::uint64_t base_index = 0) : base_index_(base_index) {}

  std::uint64_t base_index() const { return base_index_; }

  LocMapLine read_line(std::uint64_t table_block) const;
  void write_line(std::uint64_t table_block, const LocMapLine& line);

  MemLevel get(BlockAddr block) const;
  void set(BlockAddr block, MemLevel level);

  static std::uint64_t storage_bits(std::uint64_t physical_bytes) { return locmap_code_bits * (physical_bytes / block_bytes); }
  // 2 bits of metadata per 512-bit block.
  static constexpr double overhead_ratio() { return static_cast<double>(locmap_code_bits) / (block_bytes * 8); }

private:
  std::uint64_t base_index_;
  std::unordered_map<std::uint64_t, LocMapLine> lines_;
};

struct MetadataCacheConfig {
  std::uint64_t capacity_bytes = 2048;
  std::uint32_t associativity = 2;
  std::uint32_t access_latency = 1;
};

// Small write-back cache of LocMap lines, LRU within each set.
class MetadataCache
{
public:
  struct Evicted {
    std::uint64_t table_block;
    LocMapLine data;
    bool dirty;
  };

  explicit MetadataCache(MetadataCacheConfig config);

  // Returns the cached copy and updates LRU, or nullptr on a miss.
  LocMapLine* access(std::uint64_t table_block);
  bool contains(std::uint64_t table_block) const;
  // Read without touching replacement state.
  const LocMapLine* peek(std::uint64_t table_block) const;
  void mark_dirty(std::uint64_t table_block);

  std::optional<Evicted> install(std::uint64_t table_block, const LocMapLine& data);

  std::uint64_t lines() const { return entries_.size(); }
  std::uint64_t sets() const { return sets_; }
  const MetadataCacheConfig& config() const { return config_; }

private:
  struct Entry {
    bool valid = false;
    bool dirty = false;
    std::uint64_t table_block = 0;
    std::uint64_t lru_stamp = 0;
    LocMapLine data{};
  };
  Entry* find(std::uint64_t table_block);
  const Entry* find(std::uint64_t table_block) const;

  MetadataCacheConfig config_;
  std::uint64_t sets_;
  std::uint32_t ways_;
  std::uint64_t clock_ = 0;
  std::vector<Entry> entries_;
};

} // namespace levelsim

#endif
