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

#include "levelsim/cache.h"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace levelsim
{
std::string_view to_string(MemLevel level)
{
  switch (level) {
  case MemLevel::L1:
    return "L1";
  case MemLevel::L2:
    return "L2";
  case MemLevel::L3:
    return "L3";
  case MemLevel::MEM:
    return "MEM";
  }
  return "?";
}

std::string to_string(LevelSet set)
{
  std::string out = "[";
  set.for_each([&](MemLevel l) {
    if (out.size() > 1)
      out += ",";
    out += to_string(l);
  });
  return out + "]";
}

void CacheConfig::validate(std::string_view name) const
{
  auto fail = [&](const std::string& what) { throw std::invalid_argument(std::string{name} + ": " + what); };
  if (block_bytes != levelsim::block_bytes)
    fail("block size must be 64 bytes");
  if (associativity == 0)
    fail("associativity must be positive");
  if (capacity_bytes == 0 || capacity_bytes % (std::uint64_t{associativity} * block_bytes) != 0)
    fail("capacity must be a multiple of associativity x block size");
  if (!std::has_single_bit(set_count()))
    fail("set count must be a power of two");
  if (mshr_entries == 0)
    fail("mshr entry count must be positive");
}

namespace
{
CacheConfig validated(CacheConfig config)
{
  config.validate("cache");
  return config;
}
} // namespace

Cache::Cache(CacheConfig config)
    : config_(validated(config)), sets_(config.set_count()), set_bits_(static_cast<unsigned>(std::countr_zero(sets_))), ways_(config.associativity),
      lines_(sets_ * ways_)
{
}

const CacheLine* Cache::find(BlockAddr block) const
{
  auto set_begin = std::next(std::begin(lines_), static_cast<std::ptrdiff_t>(set_index(block) * ways_));
  auto set_end = std::next(set_begin, ways_);
  auto tag = tag_of(block);
  auto it = std::find_if(set_begin, set_end, [tag](const CacheLine& l) { return l.valid && l.tag == tag; });
  return it == set_end ? nullptr : &*it;
}

CacheLine* Cache::find(BlockAddr block) { return const_cast<CacheLine*>(std::as_const(*this).find(block)); }

LookupResult Cache::lookup(BlockAddr block, bool touch_lru)
{
  auto* line = find(block);
  if (line == nullptr)
    return {};

  LookupResult result{true, line->dirty, false};
  if (touch_lru) {
    line->lru_stamp = ++access_clock_;
    if (line->prefetched) {
      line->prefetched = false;
      result.prefetched_first_touch = true;
    }
  }
  return result;
}

std::optional<Victim> Cache::install(BlockAddr block, bool dirty, bool prefetched)
{
  if (auto* line = find(block); line != nullptr) {
    line->dirty = line->dirty || dirty;
    line->lru_stamp = ++access_clock_;
    return std::nullopt;
  }

  auto set = set_index(block);
  auto set_begin = std::next(std::begin(lines_), static_cast<std::ptrdiff_t>(set * ways_));
  auto set_end = std::next(set_begin, ways_);

  std::optional<Victim> victim;
  auto slot = std::find_if(set_begin, set_end, [](const CacheLine& l) { return !l.valid; });
  if (slot == set_end) {
    slot = std::min_element(set_begin, set_end, [](const CacheLine& a, const CacheLine& b) { return a.lru_stamp < b.lru_stamp; });
    victim = Victim{block_of(set, slot->tag), slot->dirty, slot->prefetched};
  }

  *slot = CacheLine{tag_of(block), true, dirty, prefetched, ++access_clock_};
  return victim;
}

std::optional<Victim> Cache::invalidate(BlockAddr block)
{
  auto* line = find(block);
  if (line == nullptr)
    return std::nullopt;
  Victim v{block, line->dirty, line->prefetched};
  *line = CacheLine{};
  return v;
}

bool Cache::set_dirty(BlockAddr block)
{
  auto* line = find(block);
  if (line == nullptr)
    return false;
  line->dirty = true;
  return true;
}

std::uint64_t Cache::valid_lines() const
{
  return static_cast<std::uint64_t>(std::count_if(std::begin(lines_), std::end(lines_), [](const CacheLine& l) { return l.valid; }));
}

} // namespace levelsim
