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

#include <doctest.h>

#include <list>
#include <map>
#include <random>
#include <set>

#include "levelsim/cache.h"
#include "levelsim/directory.h"
#include "levelsim/hierarchy.h"
#include "levelsim/mshr.h"
#include "support.h"

using namespace levelsim;

namespace
{
CacheConfig four_way(std::uint64_t sets)
{
  CacheConfig c;
  c.capacity_bytes = sets * 4 * 64;
  c.associativity = 4;
  return c;
}

// Reference LRU: per set, a list of blocks with the most recent at the front.
struct LruOracle {
  std::uint64_t sets;
  std::uint32_t ways;
  std::map<std::uint64_t, std::list<std::uint64_t>> lists;

  std::list<std::uint64_t>& set_of(std::uint64_t b) { return lists[b % sets]; }

  bool lookup(std::uint64_t b)
  {
    auto& l = set_of(b);
    for (auto it = l.begin(); it != l.end(); ++it)
      if (*it == b) {
        l.splice(l.begin(), l, it);
        return true;
      }
    return false;
  }

  std::optional<std::uint64_t> install(std::uint64_t b)
  {
    if (lookup(b))
      return std::nullopt;
    auto& l = set_of(b);
    std::optional<std::uint64_t> victim;
    if (l.size() == ways) {
      victim = l.back();
      l.pop_back();
    }
    l.push_front(b);
    return victim;
  }
};

LevelSet scan(const Hierarchy& h, BlockAddr b)
{
  LevelSet s;
  for (auto level : cache_levels)
    if (h.contains(level, b))
      s.insert(level);
  return s;
}
} // namespace

TEST_CASE("MemLevel order and BlockAddr arithmetic")
{
  CHECK(shallower(MemLevel::L1, MemLevel::L2));
  CHECK(deeper(MemLevel::MEM, MemLevel::L3));
  CHECK(BlockAddr::from_address(0x12345).value == 0x12345 / 64);
  CHECK(BlockAddr::from_address(0x12345).address() == 0x12340);
  LevelSet s{MemLevel::MEM, MemLevel::L2};
  CHECK(s.shallowest() == MemLevel::L2);
  CHECK(s.deepest() == MemLevel::MEM);
  CHECK(s.size() == 2);
}

TEST_CASE("cache config validation")
{
  auto c = four_way(8);
  CHECK_NOTHROW(c.validate("l1"));
  c.capacity_bytes = 3 * 4 * 64;
  CHECK_THROWS_AS(c.validate("l1"), std::invalid_argument);
  c = four_way(8);
  c.block_bytes = 32;
  CHECK_THROWS_AS(c.validate("l1"), std::invalid_argument);

  auto h = HierarchyConfig::defaults();
  CHECK(h.at(MemLevel::L1).hit_latency() == 4);
  CHECK(h.at(MemLevel::L2).hit_latency() == 12);
  CHECK(h.at(MemLevel::L3).hit_latency() == 55);
}

TEST_CASE("lookup and fill basics")
{
  Cache cache(four_way(4));
  CHECK_FALSE(cache.lookup(BlockAddr{7}, true).hit);
  CHECK_FALSE(cache.install(BlockAddr{7}, false, false).has_value());
  CHECK(cache.lookup(BlockAddr{7}, true).hit);

  Hierarchy h(HierarchyConfig::defaults());
  h.fill(MemLevel::L2, BlockAddr{99}, false, false);
  CHECK(h.lookup(MemLevel::L2, BlockAddr{99}, true).hit);
  CHECK_FALSE(h.lookup(MemLevel::L1, BlockAddr{99}, true).hit);
}

TEST_CASE("associativity+1 fills into one set evict the first under LRU")
{
  Cache cache(four_way(4));
  // blocks 0, 4, 8, 12, 16 share set 0
  std::optional<Victim> last;
  for (std::uint64_t i = 0; i < 5; ++i)
    last = cache.install(BlockAddr{i * 4}, false, false);
  REQUIRE(last.has_value());
  CHECK(last->block == BlockAddr{0});
  CHECK_FALSE(cache.lookup(BlockAddr{0}, true).hit);
  for (std::uint64_t i = 1; i < 5; ++i)
    CHECK(cache.lookup(BlockAddr{i * 4}, false).hit);
}

TEST_CASE("touching a line protects it from eviction")
{
  Cache cache(four_way(1));
  for (std::uint64_t b = 0; b < 4; ++b)
    cache.install(BlockAddr{b}, false, false);
  cache.lookup(BlockAddr{0}, true);
  auto v = cache.install(BlockAddr{4}, false, false);
  REQUIRE(v.has_value());
  CHECK(v->block == BlockAddr{1});
  // an untouched probe does not change the order
  cache.lookup(BlockAddr{2}, false);
  v = cache.install(BlockAddr{5}, false, false);
  REQUIRE(v.has_value());
  CHECK(v->block == BlockAddr{2});
}

TEST_CASE("prefetched bit reports the first demand touch only")
{
  Cache cache(four_way(2));
  cache.install(BlockAddr{3}, false, true);
  CHECK(cache.lookup(BlockAddr{3}, true).prefetched_first_touch);
  CHECK_FALSE(cache.lookup(BlockAddr{3}, true).prefetched_first_touch);
}

TEST_CASE("dirty merge on reinstall")
{
  Cache cache(four_way(2));
  cache.install(BlockAddr{5}, true, false);
  cache.install(BlockAddr{5}, false, false);
  CHECK(cache.lookup(BlockAddr{5}, false).dirty);
  CHECK(cache.valid_lines() == 1);
}

TEST_CASE("property: LRU matches a list-based reference")
{
  std::mt19937_64 rng(11);
  Cache cache(four_way(8));
  LruOracle ref{8, 4, {}};
  for (int i = 0; i < 20000; ++i) {
    std::uint64_t b = rng() % 96;
    if (rng() % 2) {
      CHECK(cache.lookup(BlockAddr{b}, true).hit == ref.lookup(b));
    } else {
      auto got = cache.install(BlockAddr{b}, false, false);
      auto want = ref.install(b);
      REQUIRE(got.has_value() == want.has_value());
      if (got)
        CHECK(got->block.value == *want);
    }
  }
}

TEST_CASE("property: eviction picks the minimal lru stamp in the set")
{
  std::mt19937_64 rng(5);
  Cache cache(four_way(4));
  for (int i = 0; i < 5000; ++i) {
    BlockAddr b{rng() % 64};
    if (rng() % 3 == 0) {
      cache.lookup(b, true);
      continue;
    }
    std::optional<std::uint64_t> oldest;
    std::uint64_t min_stamp = ~0ull;
    std::size_t in_set = 0;
    bool present = cache.contains(b);
    cache.for_each_valid([&](BlockAddr blk, const CacheLine& line) {
      if (cache.set_index(blk) != cache.set_index(b))
        return;
      ++in_set;
      if (line.lru_stamp < min_stamp) {
        min_stamp = line.lru_stamp;
        oldest = blk.value;
      }
    });
    auto victim = cache.install(b, false, false);
    if (!present && in_set == 4) {
      REQUIRE(victim.has_value());
      CHECK(victim->block.value == *oldest);
    } else {
      CHECK_FALSE(victim.has_value());
    }
  }
}

TEST_CASE("dirty L2 victim is written back to L3 and leaves the directory")
{
  Hierarchy h(test::tiny_hierarchy());
  // L2 has 4 sets x 4 ways: blocks 0, 4, 8, 12, 16 share L2 set 0.
  h.fill(MemLevel::L2, BlockAddr{0}, true, false);
  for (std::uint64_t i = 1; i <= 4; ++i)
    h.fill(MemLevel::L2, BlockAddr{i * 4}, false, false);

  CHECK_FALSE(h.contains(MemLevel::L2, BlockAddr{0}));
  CHECK(h.contains(MemLevel::L3, BlockAddr{0}));
  CHECK(h.cache(MemLevel::L3).find(BlockAddr{0})->dirty);
  auto dir = h.directory_query(BlockAddr{0});
  CHECK(dir.levels == LevelSet{MemLevel::L3});
  CHECK(dir.dirty == LevelSet{MemLevel::L3});
  CHECK(h.audit().empty());

  bool saw_writeback = false;
  for (const auto& e : h.events())
    saw_writeback |= e.kind == HierarchyEvent::Kind::writeback && e.level == MemLevel::L3 && e.block == BlockAddr{0};
  CHECK(saw_writeback);
}

TEST_CASE("L2 eviction back-invalidates L1 and carries its dirty data")
{
  Hierarchy h(test::tiny_hierarchy());
  h.fill(MemLevel::L2, BlockAddr{0}, false, false);
  h.fill(MemLevel::L1, BlockAddr{0}, true, false);
  for (std::uint64_t i = 1; i <= 4; ++i)
    h.fill(MemLevel::L2, BlockAddr{i * 4}, false, false);
  CHECK_FALSE(h.contains(MemLevel::L1, BlockAddr{0}));
  CHECK(h.cache(MemLevel::L3).find(BlockAddr{0})->dirty);
  CHECK(h.audit().empty());
}

TEST_CASE("dirty L3 victim goes to memory")
{
  Hierarchy h(test::tiny_hierarchy());
  // L3: 8 sets x 4 ways, blocks 0, 8, 16, 24, 32 share set 0
  h.fill(MemLevel::L3, BlockAddr{0}, true, false);
  h.clear_events();
  for (std::uint64_t i = 1; i <= 4; ++i)
    h.fill(MemLevel::L3, BlockAddr{i * 8}, false, false);
  bool to_mem = false;
  for (const auto& e : h.events())
    to_mem |= e.kind == HierarchyEvent::Kind::writeback && e.level == MemLevel::MEM && e.block == BlockAddr{0};
  CHECK(to_mem);
  CHECK(h.locate(BlockAddr{0}) == MemLevel::MEM);
}

TEST_CASE("MSHR allocation, coalescing and the demand reserve")
{
  MshrFile f(16, 0.25);
  CHECK(f.reserved() == 4);
  CHECK(f.allocate(BlockAddr{1}, true) == MshrResult::allocated);
  CHECK(f.allocate(BlockAddr{1}, true) == MshrResult::coalesced);
  CHECK(f.find(BlockAddr{1})->targets.size() == 2);

  MshrFile g(16, 0.25);
  for (std::uint64_t b = 0; b < 12; ++b)
    REQUIRE(g.allocate(BlockAddr{b}, true) == MshrResult::allocated);
  CHECK(g.free_entries() == 4);
  CHECK(g.allocate(BlockAddr{100}, false) == MshrResult::rejected);
  CHECK(g.allocate(BlockAddr{100}, true) == MshrResult::allocated);
  for (std::uint64_t b = 200; b < 203; ++b)
    REQUIRE(g.allocate(BlockAddr{b}, true) == MshrResult::allocated);
  CHECK(g.occupancy() == 16);
  CHECK(g.allocate(BlockAddr{300}, true) == MshrResult::rejected);
  CHECK(g.deallocate(BlockAddr{0}));
  CHECK_FALSE(g.deallocate(BlockAddr{0}));
  CHECK(g.allocate(BlockAddr{300}, true) == MshrResult::allocated);
}

TEST_CASE("property: MSHR occupancy bounded and demand succeeds while free > 0")
{
  std::mt19937_64 rng(3);
  MshrFile f(16, 0.25);
  std::set<std::uint64_t> live;
  for (int i = 0; i < 50000; ++i) {
    const auto b = rng() % 40;
    switch (rng() % 3) {
    case 0: {
      const bool had_room = f.free_entries() > 0;
      auto r = f.allocate(BlockAddr{b}, true);
      if (live.count(b))
        CHECK(r == MshrResult::coalesced);
      else if (had_room)
        CHECK(r == MshrResult::allocated);
      if (r == MshrResult::allocated)
        live.insert(b);
      break;
    }
    case 1: {
      const auto free_before = f.free_entries();
      auto r = f.allocate(BlockAddr{b}, false);
      if (r == MshrResult::allocated) {
        CHECK(free_before > f.reserved());
        live.insert(b);
      }
      break;
    }
    default:
      CHECK(f.deallocate(BlockAddr{b}) == (live.erase(b) == 1));
    }
    REQUIRE(f.occupancy() <= f.capacity());
    REQUIRE(f.occupancy() == live.size());
  }
  CHECK(f.allocations() == f.deallocations() + f.occupancy());
}

TEST_CASE("directory queries")
{
  Hierarchy h(test::tiny_hierarchy());
  auto none = h.directory_query(BlockAddr{42});
  CHECK(none.levels.empty());
  CHECK_FALSE(none.on_chip);
  CHECK(h.locate(BlockAddr{42}) == MemLevel::MEM);

  h.fill(MemLevel::L3, BlockAddr{1}, false, false);
  h.fill(MemLevel::L2, BlockAddr{1}, false, false);
  h.fill(MemLevel::L1, BlockAddr{1}, false, false);
  auto all = h.directory_query(BlockAddr{1});
  CHECK(all.levels == LevelSet{MemLevel::L1, MemLevel::L2, MemLevel::L3});
  CHECK(all.on_chip);
  CHECK(h.locate(BlockAddr{1}) == MemLevel::L1);

  // Push block 1 out of L3 only: its L3 set (1 of 8) also holds 9, 17, 25, 33.
  for (std::uint64_t i = 1; i <= 4; ++i)
    h.fill(MemLevel::L3, BlockAddr{1 + 8 * i}, false, false);
  auto dir = h.directory_query(BlockAddr{1});
  CHECK(dir.levels == scan(h, BlockAddr{1}));
  CHECK(dir.levels == LevelSet{MemLevel::L1, MemLevel::L2});
  CHECK(h.audit().empty());
}

TEST_CASE("property: directory audit and inclusion hold through random replay")
{
  std::mt19937_64 rng(17);
  Hierarchy h(test::tiny_hierarchy());
  std::set<std::uint64_t> touched;
  for (int i = 0; i < 20000; ++i) {
    BlockAddr b{rng() % 128};
    touched.insert(b.value);
    switch (rng() % 4) {
    case 0: { // demand miss commit
      auto where = h.locate(b);
      const bool write = rng() % 3 == 0;
      if (where == MemLevel::L1) {
        h.lookup(MemLevel::L1, b, true);
        if (write)
          h.mark_dirty(MemLevel::L1, b);
        break;
      }
      if (where == MemLevel::MEM)
        h.fill(MemLevel::L3, b, false, false);
      if (where != MemLevel::L2)
        h.fill(MemLevel::L2, b, false, false);
      h.fill(MemLevel::L1, b, write, false);
      break;
    }
    case 1: // L3 prefetch
      h.fill(MemLevel::L3, b, false, true);
      break;
    case 2: // L2 prefetch
      if (h.locate(b) == MemLevel::MEM)
        h.fill(MemLevel::L3, b, false, false);
      h.fill(MemLevel::L2, b, false, true);
      break;
    default:
      if (h.contains(MemLevel::L1, b))
        h.mark_dirty(MemLevel::L1, b);
    }
    h.clear_events();

    auto errors = h.audit();
    REQUIRE_MESSAGE(errors.empty(), errors.front());
    if (i % 97 == 0)
      for (auto t : touched)
        REQUIRE(h.directory_query(BlockAddr{t}).levels == scan(h, BlockAddr{t}));
  }
  for (auto t : touched)
    CHECK(h.directory_query(BlockAddr{t}).levels == scan(h, BlockAddr{t}));
}

TEST_CASE("snapshots are sorted and carry dirty and prefetched bits")
{
  Hierarchy h(test::tiny_hierarchy());
  h.fill(MemLevel::L3, BlockAddr{9}, true, false);
  h.fill(MemLevel::L3, BlockAddr{2}, false, true);
  auto snap = h.snapshot(MemLevel::L3);
  REQUIRE(snap.size() == 2);
  CHECK(snap[0] == LineSnapshot{BlockAddr{2}, false, true});
  CHECK(snap[1] == LineSnapshot{BlockAddr{9}, true, false});
}
