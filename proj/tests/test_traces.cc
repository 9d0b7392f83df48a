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

#include <set>
#include <sstream>

#include "levelsim/engine.h"
#include "levelsim/trace.h"
#include "support.h"

using namespace levelsim;

namespace
{
constexpr std::uint64_t mem = 16ull << 30;

std::vector<TraceEvent> parse(const std::string& text, std::uint64_t bytes = mem)
{
  std::istringstream in(text);
  return parse_trace(in, bytes);
}

TraceError parse_error(const std::string& text, std::uint64_t bytes = mem)
{
  try {
    parse(text, bytes);
  } catch (const TraceError& e) {
    return e;
  }
  FAIL("expected a trace error");
  return TraceError(TraceError::Kind::io, 0, "");
}
} // namespace

TEST_CASE("parse well-formed lines")
{
  auto t = parse("R 0x1000\nW 0xFF40 0x400123\n");
  REQUIRE(t.size() == 2);
  CHECK(t[0] == TraceEvent{AccessOp::read, 0x1000, std::nullopt});
  CHECK(t[1] == TraceEvent{AccessOp::write, 0xFF40, 0x400123});
}

TEST_CASE("comments, blank lines and case")
{
  auto t = parse("# header\n\n  r 1000   # trailing\nw ff 10\n");
  REQUIRE(t.size() == 2);
  CHECK(t[0].addr == 0x1000);
  CHECK(t[1] == TraceEvent{AccessOp::write, 0xff, 0x10});
}

TEST_CASE("malformed lines report their line number")
{
  auto e = parse_error("Q 0x10");
  CHECK(e.kind() == TraceError::Kind::parse);
  CHECK(e.line() == 1);

  e = parse_error("R 0x10\n# ok\nR zz\n");
  CHECK(e.kind() == TraceError::Kind::parse);
  CHECK(e.line() == 3);
  CHECK(std::string(e.what()).find("3") != std::string::npos);

  CHECK(parse_error("R\n").line() == 1);
  CHECK(parse_error("R 0x10 0x20 0x30\n").kind() == TraceError::Kind::parse);
}

TEST_CASE("addresses beyond physical memory are range errors")
{
  auto e = parse_error("R 0x0\nR 0x10000\n", 0x10000);
  CHECK(e.kind() == TraceError::Kind::range);
  CHECK(e.line() == 2);
  CHECK(parse("R 0xFFFF\n", 0x10000).size() == 1);
}

TEST_CASE("text and binary round trips")
{
  SyntheticSpec spec;
  spec.kind = TraceKind::random_uniform;
  spec.count = 500;
  spec.write_ratio = 0.4;
  auto events = generate(spec);
  events.push_back({AccessOp::read, 0x40, std::nullopt});

  std::stringstream text;
  write_trace_text(text, events);
  CHECK(parse_trace(text, mem) == events);

  std::stringstream bin;
  write_trace_binary(bin, events);
  CHECK(bin.str().substr(0, 4) == "LVTR");
  CHECK(bin.str().size() == 4 + 1 + 8 + events.size() * 18);
  CHECK(read_trace_binary(bin, mem) == events);
}

TEST_CASE("binary reader rejects damage")
{
  std::stringstream bin;
  write_trace_binary(bin, test::reads({0, 64}));
  auto bytes = bin.str();

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_trace_binary(truncated, mem), TraceError);

  auto bad_version = bytes;
  bad_version[4] = 9;
  std::istringstream v(bad_version);
  CHECK_THROWS_AS(read_trace_binary(v, mem), TraceError);

  std::istringstream small(bytes);
  CHECK_THROWS_AS(read_trace_binary(small, 64), TraceError);
}

TEST_CASE("load_trace sniffs the format and reports missing files")
{
  test::TempDir dir("traces");
  auto events = test::reads({0x100, 0x200});
  {
    std::ofstream out(dir / "t.bin", std::ios::binary);
    write_trace_binary(out, events);
  }
  test::spit(dir / "t.txt", "R 0x100\nR 0x200\n");
  CHECK(load_trace(dir / "t.bin", mem) == events);
  CHECK(load_trace(dir / "t.txt", mem) == events);
  try {
    load_trace(dir / "missing.txt", mem);
    FAIL("expected an error");
  } catch (const TraceError& e) {
    CHECK(e.kind() == TraceError::Kind::io);
    CHECK(std::string(e.what()).find("missing.txt") != std::string::npos);
  }
}

TEST_CASE("stream generator")
{
  SyntheticSpec spec;
  spec.kind = TraceKind::stream;
  spec.footprint_bytes = 256;
  spec.count = 4;
  auto t = generate(spec);
  REQUIRE(t.size() == 4);
  CHECK(t[0].addr == 0);
  CHECK(t[1].addr == 64);
  CHECK(t[2].addr == 128);
  CHECK(t[3].addr == 192);
  CHECK(t[0].pc.has_value());
}

TEST_CASE("property: stream addresses are block aligned, consecutive and wrap")
{
  SyntheticSpec spec;
  spec.kind = TraceKind::stream;
  spec.footprint_bytes = 64 * 100;
  spec.count = 1000;
  auto t = generate(spec);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i].addr % 64 == 0);
    CHECK(t[i].addr == (i % 100) * 64);
  }
}

TEST_CASE("property: generation is a pure function of the spec")
{
  for (auto kind : {TraceKind::stream, TraceKind::random_uniform, TraceKind::pointer_chase, TraceKind::strided}) {
    SyntheticSpec spec;
    spec.kind = kind;
    spec.footprint_bytes = 1 << 20;
    spec.count = 5000;
    spec.seed = 99;
    spec.write_ratio = 0.25;
    auto a = generate(spec);
    CHECK(a == generate(spec));
    for (const auto& e : a)
      CHECK(e.addr < spec.footprint_bytes);
    spec.seed = 100;
    if (kind == TraceKind::random_uniform || kind == TraceKind::pointer_chase)
      CHECK(a != generate(spec));
  }
}

TEST_CASE("write ratio")
{
  SyntheticSpec spec;
  spec.kind = TraceKind::random_uniform;
  spec.count = 20000;
  spec.write_ratio = 0.3;
  std::size_t writes = 0;
  for (const auto& e : generate(spec))
    writes += e.is_write();
  CHECK(writes > 5400);
  CHECK(writes < 6600);
}

TEST_CASE("pointer chase walks one cycle through every block")
{
  SyntheticSpec spec;
  spec.kind = TraceKind::pointer_chase;
  spec.footprint_bytes = 64 * 1000;
  spec.count = 2000;
  auto t = generate(spec);
  std::set<std::uint64_t> first_lap;
  for (std::size_t i = 0; i < 1000; ++i)
    first_lap.insert(t[i].addr);
  CHECK(first_lap.size() == 1000);
  for (std::size_t i = 0; i < 1000; ++i)
    CHECK(t[i].addr == t[i + 1000].addr);
}

TEST_CASE("strided generator")
{
  SyntheticSpec spec;
  spec.kind = TraceKind::strided;
  spec.footprint_bytes = 4096;
  spec.stride_bytes = 256;
  spec.count = 20;
  auto t = generate(spec);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(t[i].addr == (i * 256) % 4096);
}

TEST_CASE("spec validation")
{
  SyntheticSpec spec;
  spec.footprint_bytes = 32;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.footprint_bytes = 64;
  CHECK_NOTHROW(spec.validate());
  spec.write_ratio = 1.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.write_ratio = 0;
  spec.kind = TraceKind::mixed_phase;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("phase lists")
{
  auto p = parse_phases("stream:100,random:50");
  REQUIRE(p.size() == 2);
  CHECK(p[0] == TracePhase{TraceKind::stream, 100});
  CHECK(p[1] == TracePhase{TraceKind::random_uniform, 50});
  CHECK(format_phases(p) == "stream:100,random_uniform:50");
  CHECK_THROWS_AS(parse_phases("stream"), std::invalid_argument);
  CHECK_THROWS_AS(parse_phases("warp:10"), std::invalid_argument);
  CHECK(parse_trace_kind("gups") == TraceKind::random_uniform);
  CHECK(parse_trace_kind("chase") == TraceKind::pointer_chase);
  CHECK_FALSE(parse_trace_kind("nope").has_value());
}

TEST_CASE("random footprint far beyond the LLC defeats L2 and L3")
{
  SyntheticSpec spec;
  spec.kind = TraceKind::random_uniform;
  spec.footprint_bytes = 256ull << 20; // 128x the LLC
  spec.count = 50000;
  auto cfg = test::quiet_config();
  auto r = run(generate(spec), cfg, EngineMode::baseline);
  const double l2_rate = static_cast<double>(r.l2_hits) / r.l1_misses;
  const double l3_rate = static_cast<double>(r.l3_hits) / r.l2_misses;
  // expected hit rates are about capacity / footprint: 1/1024 and 1/128
  CHECK(l2_rate < 0.01);
  CHECK(l3_rate < 0.03);
}

TEST_CASE("mixed phases shift the windowed miss counts at the boundary")
{
  SyntheticSpec spec;
  spec.kind = TraceKind::mixed_phase;
  spec.footprint_bytes = 64ull << 20;
  spec.phases = {{TraceKind::stream, 20000}, {TraceKind::random_uniform, 20000}};
  auto events = generate(spec);
  REQUIRE(events.size() == 40000);

  auto cfg = test::quiet_config();
  cfg.prefetch.l1_enable = true;
  cfg.prefetch.l2_enable = true;
  cfg.run.window = 5000;
  auto r = run(events, cfg, EngineMode::baseline);
  REQUIRE(r.windows.size() == 8);
  // streaming half: next-line prefetching keeps L3 misses rare
  for (std::size_t w = 0; w < 4; ++w)
    CHECK(r.windows[w].l3_misses < 100);
  // random half: nearly every access misses the whole hierarchy
  for (std::size_t w = 4; w < 8; ++w)
    CHECK(r.windows[w].l3_misses > 4000);
}
