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

#include "levelsim/locmap.h"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace levelsim
{
std::uint8_t encode_level(MemLevel level)
{
  switch (level) {
  case MemLevel::L2:
    return 1;
  case MemLevel::L3:
    return 2;
  default:
    return 0;
  }
}

MemLevel decode_level(std::uint8_t code)
{
  switch (code & 0x3) {
  case 1:
    return MemLevel::L2;
  case 2:
    return MemLevel::L3;
  default:
    return MemLevel::MEM;
  }
}

std::uint8_t read_code(const LocMapLine& line, unsigned bit_offset)
{
  return static_cast<std::uint8_t>((line[bit_offset / 8] >> (bit_offset % 8)) & 0x3);
}

void write_code(LocMapLine& line, unsigned bit_offset, std::uint8_t code)
{
  auto& byte = line[bit_offset / 8];
  auto shift = bit_offset % 8;
  byte = static_cast<std::uint8_t>((byte & ~(0x3u << shift)) | ((code & 0x3u) << shift));
}

LocMapLine LocMapTable::read_line(std::uint64_t table_block) const
{
  auto it = lines_.find(table_block);
  return it == lines_.end() ? LocMapLine{} : it->second;
}

void LocMapTable::write_line(std::uint64_t table_block, const LocMapLine& line) { lines_[table_block] = line; }

MemLevel LocMapTable::get(BlockAddr block) const
{
  auto idx = locmap_index(block, base_index_);
  auto it = lines_.find(idx.table_block);
  return it == lines_.end() ? MemLevel::MEM : decode_level(read_code(it->second, idx.bit_offset));
}

void LocMapTable::set(BlockAddr block, MemLevel level)
{
  auto idx = locmap_index(block, base_index_);
  write_code(lines_[idx.table_block], idx.bit_offset, encode_level(level));
}

MetadataCache::MetadataCache(MetadataCacheConfig config) : config_(config), ways_(config.associativity)
{
  if (config.associativity == 0 || config.capacity_bytes % (std::uint64_t{config.associativity} * 64) != 0)
    throw std::invalid_argument("metadata cache capacity must be a multiple of associativity x 64 bytes");
  sets_ = config.capacity_bytes / (std::uint64_t{config.associativity} * 64);
  if (!std::has_single_bit(sets_))
    throw std::invalid_argument("metadata cache set count must be a power of two");
  entries_.resize(sets_ * ways_);
}

const MetadataCache::Entry* MetadataCache::find(std::uint64_t table_block) const
{
  auto begin = std::next(entries_.begin(), static_cast<std::ptrdiff_t>((table_block & (sets_ - 1)) * ways_));
  auto end = std::next(begin, ways_);
  auto it = std::find_if(begin, end, [&](const Entry& e) { return e.valid && e.table_block == table_block; });
  return it == end ? nullptr : &*it;
}

MetadataCache::Entry* MetadataCache::find(std::uint64_t table_block) { return const_cast<Entry*>(std::as_const(*this).find(table_block)); }

LocMapLine* MetadataCache::access(std::uint64_t table_block)
{
  auto* e = find(table_block);
  if (e == nullptr)
    return nullptr;
  e->lru_stamp = ++clock_;
  return &e->data;
}

bool MetadataCache::contains(std::uint64_t table_block) const { return find(table_block) != nullptr; }

const LocMapLine* MetadataCache::peek(std::uint64_t table_block) const
{
  const auto* e = find(table_block);
  return e == nullptr ? nullptr : &e->data;
}

void MetadataCache::mark_dirty(std::uint64_t table_block)
{
  if (auto* e = find(table_block))
    e->dirty = true;
}

std::optional<MetadataCache::Evicted> MetadataCache::install(std::uint64_t table_block, const LocMapLine& data)
{
  if (auto* e = find(table_block)) {
    e->lru_stamp = ++clock_;
    return std::nullopt;
  }

  auto begin = std::next(entries_.begin(), static_cast<std::ptrdiff_t>((table_block & (sets_ - 1)) * ways_));
  auto end = std::next(begin, ways_);
  auto slot = std::find_if(begin, end, [](const Entry& e) { return !e.valid; });

  std::optional<Evicted> evicted;
  if (slot == end) {
    slot = std::min_element(begin, end, [](const Entry& a, const Entry& b) { return a.lru_stamp < b.lru_stamp; });
    evicted = Evicted{slot->table_block, slot->data, slot->dirty};
  }
  *slot = Entry{true, false, table_block, ++clock_, data};
  return evicted;
}

} // namespace levelsim
