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

#include <algorithm>
#include <random>
#include <set>

#include "levelsim/level_predictor.h"
#include "levelsim/locmap.h"
#include "levelsim/pld.h"
#include "levelsim/tage.h"

using namespace levelsim;

namespace
{
LevelPredictorConfig instant_fills()
{
  LevelPredictorConfig cfg;
  cfg.metadata_fill_latency = 0;
  return cfg;
}

// Reference selection written directly from the rule: sort descending with
// shallower-first ties, then compare partial sums against theta * s using
// exact rationals (thresholds given in percent).
LevelSet reference_select(std::array<std::uint64_t, 3> c, std::uint64_t single_pct, std::uint64_t double_pct)
{
  const auto s = c[0] + c[1] + c[2];
  if (s == 0)
    return {MemLevel::L2};
  std::vector<std::pair<std::uint64_t, int>> v{{c[0], 0}, {c[1], 1}, {c[2], 2}};
  std::sort(v.begin(), v.end(), [](auto a, auto b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  auto lvl = [](int i) { return static_cast<MemLevel>(i + 1); };
  if (v[0].first * 100 >= single_pct * s)
    return {lvl(v[0].second)};
  if ((v[0].first + v[1].first) * 100 >= double_pct * s)
    return {lvl(v[0].second), lvl(v[1].second)};
  return {MemLevel::L2, MemLevel::L3, MemLevel::MEM};
}
} // namespace

TEST_CASE("locmap index examples")
{
  CHECK(locmap_index(BlockAddr::from_address(0x0000), 0) == LocMapIndex{0, 0});
  CHECK(locmap_index(BlockAddr::from_address(0x4000), 0) == LocMapIndex{1, 0});
  CHECK(locmap_index(BlockAddr::from_address(0x40), 0) == LocMapIndex{0, 2});
  CHECK(locmap_index(BlockAddr::from_address(0x3FC0), 0) == LocMapIndex{0, 510});
  CHECK(locmap_index(BlockAddr::from_address(0x4000), 1000) == LocMapIndex{1001, 0});
}

TEST_CASE("locmap storage identity")
{
  CHECK(LocMapTable::storage_bits(16ull << 30) == 2 * ((16ull << 30) / 64));
  CHECK(LocMapTable::overhead_ratio() == 2.0 / 512.0);
}

TEST_CASE("property: locmap index is injective over distinct blocks")
{
  std::set<std::pair<std::uint64_t, unsigned>> seen;
  for (std::uint64_t b = 0; b < (1u << 16); ++b) {
    auto idx = locmap_index(BlockAddr{b}, 7);
    CHECK(idx.bit_offset < 512);
    CHECK(idx.bit_offset % 2 == 0);
    REQUIRE(seen.emplace(idx.table_block, idx.bit_offset).second);
  }
}

TEST_CASE("code encoding")
{
  for (auto l : {MemLevel::L2, MemLevel::L3, MemLevel::MEM})
    CHECK(decode_level(encode_level(l)) == l);
  CHECK(encode_level(MemLevel::MEM) == 0);
  CHECK(decode_level(3) == MemLevel::MEM);

  LocMapLine line{};
  write_code(line, 6, 2);
  write_code(line, 8, 1);
  CHECK(read_code(line, 6) == 2);
  CHECK(read_code(line, 8) == 1);
  CHECK(read_code(line, 4) == 0);
  CHECK(line[0] == (2 << 6));
  CHECK(line[1] == 1);
}

TEST_CASE("table starts with every block in memory")
{
  LocMapTable t;
  CHECK(t.get(BlockAddr{12345}) == MemLevel::MEM);
  t.set(BlockAddr{12345}, MemLevel::L3);
  CHECK(t.get(BlockAddr{12345}) == MemLevel::L3);
  CHECK(t.get(BlockAddr{12344}) == MemLevel::MEM);
}

TEST_CASE("metadata cache is 2-way LRU with write-back")
{
  MetadataCache m({256, 2, 1}); // 2 sets x 2 ways
  CHECK(m.sets() == 2);
  CHECK(m.access(0) == nullptr);
  LocMapLine line{};
  line[0] = 9;
  CHECK_FALSE(m.install(0, line).has_value());
  CHECK_FALSE(m.install(2, {}).has_value());
  m.mark_dirty(0);
  m.access(2);
  auto ev = m.install(4, {});
  REQUIRE(ev.has_value());
  CHECK(ev->table_block == 0);
  CHECK(ev->dirty);
  CHECK(ev->data[0] == 9);
}

TEST_CASE("predict on a metadata hit decodes the cached code")
{
  LevelPredictor p(instant_fills());
  auto first = p.predict(BlockAddr{0}, 0);
  CHECK_FALSE(first.meta_hit);
  CHECK(first.prediction.source == PredictionSource::pld);
  p.notify(LocMapEvent::demand_fill, MemLevel::L3, BlockAddr{5}, 0);
  auto hit = p.predict(BlockAddr{5}, 0);
  CHECK(hit.meta_hit);
  CHECK(hit.prediction.source == PredictionSource::locmap);
  CHECK(hit.prediction.targets == LevelSet{MemLevel::L3});
  CHECK_FALSE(hit.prediction.multiway());
}

TEST_CASE("cold metadata cache answers from the PLD and schedules a fill")
{
  LevelPredictorConfig cfg;
  cfg.metadata_fill_latency = 239;
  LevelPredictor p(cfg);
  auto r = p.predict(BlockAddr::from_address(0x8000), 100);
  CHECK_FALSE(r.meta_hit);
  CHECK(r.prediction.source == PredictionSource::pld);
  CHECK(p.fill_pending(BlockAddr::from_address(0x8000)));
  CHECK(p.fill_pending(BlockAddr::from_address(0xBFC0)));
  CHECK_FALSE(p.fill_pending(BlockAddr::from_address(0xC000)));

  // still in flight one cycle early, installed once due
  CHECK_FALSE(p.predict(BlockAddr::from_address(0x8040), 338).meta_hit);
  CHECK(p.stats().meta_fills == 0);
  CHECK(p.predict(BlockAddr::from_address(0x8040), 339).meta_hit);
  CHECK(p.stats().meta_fills == 1);
}

TEST_CASE("blocks 0 and 1 from cold: PLD then LocMap")
{
  LevelPredictor p(instant_fills());
  auto a = p.predict(BlockAddr{0}, 0);
  auto b = p.predict(BlockAddr{1}, 0);
  CHECK(a.prediction.source == PredictionSource::pld);
  CHECK(b.prediction.source == PredictionSource::locmap);
  CHECK(b.prediction.targets == LevelSet{MemLevel::MEM});
}

TEST_CASE("PLD selection examples")
{
  const PopularityThresholds th{};
  CHECK(select_popular_levels({0, 0, 0}, th) == LevelSet{MemLevel::L2});
  CHECK(select_popular_levels({0, 0, 100}, th) == LevelSet{MemLevel::MEM});
  CHECK(select_popular_levels({40, 35, 25}, th) == LevelSet{MemLevel::L2, MemLevel::L3, MemLevel::MEM});
  CHECK(reference_select({40, 35, 25}, 80, 95) == LevelSet{MemLevel::L2, MemLevel::L3, MemLevel::MEM});
  CHECK(select_popular_levels({10, 80, 10}, th) == LevelSet{MemLevel::L3});
  CHECK(select_popular_levels({5, 60, 35}, th) == LevelSet{MemLevel::L3, MemLevel::MEM});
  // tie between L3 and MEM at the top resolves toward the shallower level
  CHECK(select_popular_levels({0, 50, 50}, PopularityThresholds{500'000, 950'000}) == LevelSet{MemLevel::L3});
  CHECK(PldCounters{}.predict(th).source == PredictionSource::pld);
}

TEST_CASE("PLD update examples")
{
  PldCounters c;
  c.update(PredictTarget::MEM);
  CHECK(c.counts() == std::array<std::uint32_t, 3>{0, 0, 1});

  PldCounters d({5, 5, 5});
  d.update(PredictTarget::L2);
  CHECK(d.counts() == std::array<std::uint32_t, 3>{6, 4, 4});

  PldCounters e;
  for (int i = 0; i < 10; ++i)
    e.update(PredictTarget::L3);
  CHECK(e.counts() == std::array<std::uint32_t, 3>{0, 10, 0});

  PldCounters full({PldCounters::max_count, 3, 0});
  full.update(PredictTarget::L2);
  CHECK(full.counts() == std::array<std::uint32_t, 3>{PldCounters::max_count, 2, 0});
}

TEST_CASE("property: selection matches the reference and is scale invariant")
{
  std::mt19937_64 rng(23);
  const PopularityThresholds th{};
  for (int i = 0; i < 10000; ++i) {
    std::array<std::uint64_t, 3> c{rng() % 1000, rng() % 1000, rng() % 1000};
    const auto k = 1 + rng() % 100000;
    auto base = select_popular_levels(c, th);
    CHECK(base == reference_select(c, 80, 95));
    CHECK(select_popular_levels({c[0] * k, c[1] * k, c[2] * k}, th) == base);
  }
}

TEST_CASE("property: theta_single = 0 is always single-way")
{
  std::mt19937_64 rng(29);
  const auto th = PopularityThresholds::from_fractions(0.0, 0.95);
  for (int i = 0; i < 2000; ++i)
    CHECK(select_popular_levels({rng() % 50, rng() % 50, rng() % 50}, th).size() == 1);
}

TEST_CASE("property: theta 1/1 goes three-way only when the top two miss the sum")
{
  std::mt19937_64 rng(31);
  const auto th = PopularityThresholds::from_fractions(1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    std::array<std::uint64_t, 3> c{rng() % 50, rng() % 50, rng() % 50};
    auto sorted = c;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto s = c[0] + c[1] + c[2];
    auto picked = select_popular_levels(c, th);
    if (picked.size() == 3)
      CHECK(sorted[0] + sorted[1] < s);
  }
}

TEST_CASE("property: pld_update touches exactly the three counters")
{
  std::mt19937_64 rng(37);
  LevelPredictor p(instant_fills());
  for (int i = 0; i < 1000; ++i) {
    const auto before = p.pld().counts();
    const auto stats_before = p.stats();
    const auto r = static_cast<PredictTarget>(rng() % 3);
    p.pld_update(r);
    const auto after = p.pld().counts();
    for (std::size_t k = 0; k < 3; ++k) {
      if (k == static_cast<std::size_t>(r))
        CHECK(after[k] == before[k] + 1);
      else
        CHECK(after[k] == (before[k] == 0 ? 0 : before[k] - 1));
    }
    CHECK(p.stats().meta_accesses == stats_before.meta_accesses);
    CHECK(p.stats().pld_updates == stats_before.pld_updates + 1);
    CHECK(p.pld_predict().targets == p.pld_predict().targets);
  }
}

TEST_CASE("notify updates follow the metadata hit policy")
{
  LevelPredictor p(instant_fills());
  const BlockAddr b{300};
  p.predict(b, 0); // bring the line in
  p.notify(LocMapEvent::demand_fill, MemLevel::L2, b, 0);
  CHECK(p.predict(b, 0).prediction.targets == LevelSet{MemLevel::L2});

  // metadata miss: a prefetch fill is dropped
  LevelPredictor q(instant_fills());
  q.notify(LocMapEvent::prefetch_fill, MemLevel::L3, b, 0);
  CHECK(q.table_level(b) == MemLevel::MEM);
  CHECK(q.stats().dropped_prefetch_updates == 1);
  // ...but a demand fill or dirty eviction writes the table directly
  q.notify(LocMapEvent::dirty_eviction, MemLevel::L3, b, 0);
  CHECK(q.table_level(b) == MemLevel::L3);
  CHECK_FALSE(q.cached_level(b).has_value());

  // forcing prefetch fills on writes the table even on a miss
  auto cfg = instant_fills();
  cfg.prefetch_fills = PrefetchFillPolicy::always;
  LevelPredictor r(cfg);
  r.notify(LocMapEvent::prefetch_fill, MemLevel::L3, b, 0);
  CHECK(r.table_level(b) == MemLevel::L3);
}

TEST_CASE("clean eviction leaves a stale code behind")
{
  LevelPredictor p(instant_fills());
  const BlockAddr b{77};
  p.predict(b, 0);
  p.notify(LocMapEvent::demand_fill, MemLevel::L3, b, 0);
  // The block is dropped from L3 without a write-back: nothing tells the LocMap.
  CHECK(p.predict(b, 0).prediction.targets == LevelSet{MemLevel::L3});
}

TEST_CASE("property: read-your-write on the next metadata hit")
{
  std::mt19937_64 rng(41);
  LevelPredictor p(instant_fills());
  const MemLevel levels[] = {MemLevel::L2, MemLevel::L3, MemLevel::MEM};
  const LocMapEvent events[] = {LocMapEvent::demand_fill, LocMapEvent::dirty_eviction, LocMapEvent::prefetch_fill};
  for (int i = 0; i < 20000; ++i) {
    BlockAddr b{rng() % (1u << 20)};
    auto level = levels[rng() % 3];
    auto ev = events[rng() % 3];
    const bool cached = p.cached_level(b).has_value();
    p.notify(ev, level, b, 0);
    auto r = p.predict(b, 0);
    if (r.meta_hit && (cached || ev != LocMapEvent::prefetch_fill))
      CHECK(r.prediction.targets == LevelSet{level});
  }
}

TEST_CASE("evicted dirty metadata survives in the table")
{
  LevelPredictorConfig cfg = instant_fills();
  cfg.metadata = {128, 1, 1}; // 2 direct-mapped lines
  LevelPredictor p(cfg);
  const BlockAddr a{0}, b{2 * 256}, c{4 * 256}; // table blocks 0, 2, 4 share set 0
  p.predict(a, 0);
  p.notify(LocMapEvent::demand_fill, MemLevel::L3, a, 0);
  p.predict(b, 0);
  p.predict(c, 0);
  CHECK(p.stats().meta_writebacks == 1);
  CHECK(p.table_level(a) == MemLevel::L3);
  p.predict(a, 0);
  CHECK(p.predict(a, 0).prediction.targets == LevelSet{MemLevel::L3});
}

TEST_CASE("TAGE: empty tables fall back to L2")
{
  TagePredictor t({});
  auto p = t.predict(BlockAddr{5});
  CHECK(p.targets == LevelSet{MemLevel::L2});
  CHECK(p.source == PredictionSource::tage);
}

TEST_CASE("TAGE: repeated training converges")
{
  TagePredictor t({});
  for (int i = 0; i < 20; ++i)
    t.update(BlockAddr{9}, PredictTarget::MEM);
  CHECK(t.predict(BlockAddr{9}).targets == LevelSet{MemLevel::MEM});
}

TEST_CASE("TAGE: storage stays within the budget")
{
  for (std::uint32_t budget : {2048u, 8192u}) {
    TagePredictor t({budget});
    CHECK(t.storage_bits() <= std::uint64_t{budget} * 8);
    CHECK(t.entries_per_table() > 0);
  }
  CHECK(TagePredictor({8192}).entries_per_table() > TagePredictor({2048}).entries_per_table());
}

TEST_CASE("TAGE: capacity pressure loses some trained blocks")
{
  TagePredictor t({2048});
  const std::uint64_t n = 4 * t.entries_per_table() * 4;
  for (std::uint64_t b = 0; b < n; ++b)
    for (int k = 0; k < 3; ++k)
      t.update(BlockAddr{b}, PredictTarget::L3);
  std::uint64_t reverted = 0;
  for (std::uint64_t b = 0; b < n; ++b)
    reverted += t.predict(BlockAddr{b}).targets == LevelSet{MemLevel::L2};
  CHECK(reverted > 0);
  CHECK(reverted < n);
}
