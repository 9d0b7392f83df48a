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

#include "levelsim/trace.h"

#include <array>
#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/core.h>

#include "levelsim/types.h"

namespace levelsim
{
namespace
{
constexpr std::array<char, 4> binary_magic{'L', 'V', 'T', 'R'};

std::optional<std::uint64_t> parse_hex(std::string_view token)
{
  if (token.size() > 2 && token[0] == '0' && (token[1] == 'x' || token[1] == 'X'))
    token.remove_prefix(2);
  if (token.empty())
    return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, 16);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    return std::nullopt;
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    auto start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start)
      out.push_back(line.substr(start, i - start));
  }
  return out;
}

void check_range(std::uint64_t addr, std::uint64_t memory_bytes, std::size_t line)
{
  if (addr >= memory_bytes)
    throw TraceError(TraceError::Kind::range, line, fmt::format("line {}: address {:#x} outside {}-byte physical memory", line, addr, memory_bytes));
}

template <typename T>
void put_le(std::ostream& out, T value)
{
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
bool get_le(std::istream& in, T& value)
{
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    return false;
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= std::uint64_t{bytes[i]} << (8 * i);
  value = static_cast<T>(v);
  return true;
}

// Unbiased draw in [0, bound) that does not depend on the standard
// library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound)
{
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    auto r = rng();
    if (r >= threshold)
      return r % bound;
  }
}

std::uint64_t pc_for(TraceKind kind)
{
  switch (kind) {
  case TraceKind::stream:
    return 0x401000;
  case TraceKind::random_uniform:
    return 0x402000;
  case TraceKind::pointer_chase:
    return 0x403000;
  case TraceKind::strided:
    return 0x404000;
  case TraceKind::mixed_phase:
    break;
  }
  return 0x400000;
}

void append_phase(std::vector<TraceEvent>& out, TraceKind kind, std::uint64_t count, const SyntheticSpec& spec, std::uint64_t seed)
{
  std::mt19937_64 rng{seed};
  std::mt19937_64 op_rng{seed ^ 0x5bd1e995ull};
  const std::uint64_t blocks = spec.footprint_bytes / block_bytes;
  const auto write_ppm = static_cast<std::uint64_t>(spec.write_ratio * 1'000'000.0 + 0.5);
  const auto pc = pc_for(kind);

  std::vector<std::uint64_t> next;
  std::uint64_t cursor = 0;
  if (kind == TraceKind::pointer_chase) {
    // Sattolo's algorithm: a single cycle through every block.
    next.resize(blocks);
    std::iota(next.begin(), next.end(), std::uint64_t{0});
    for (std::uint64_t i = blocks - 1; i > 0; --i)
      std::swap(next[i], next[bounded(rng, i)]);
  }

  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t addr = 0;
    switch (kind) {
    case TraceKind::stream:
      addr = (i % blocks) * block_bytes;
      break;
    case TraceKind::random_uniform:
      addr = bounded(rng, blocks) * block_bytes;
      break;
    case TraceKind::pointer_chase:
      addr = cursor * block_bytes;
      cursor = next[cursor];
      break;
    case TraceKind::strided:
      addr = ((i * spec.stride_bytes) % spec.footprint_bytes) & ~(block_bytes - 1);
      break;
    case TraceKind::mixed_phase:
      throw std::invalid_argument("mixed_phase cannot be nested");
    }
    auto op = write_ppm > 0 && bounded(op_rng, 1'000'000) < write_ppm ? AccessOp::write : AccessOp::read;
    out.push_back({op, addr, pc});
  }
}

} // namespace

std::vector<TraceEvent> parse_trace(std::istream& in, std::uint64_t memory_bytes)
{
  std::vector<TraceEvent> events;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line{raw};
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto tokens = split_ws(line);
    if (tokens.empty())
      continue;

    auto fail = [&](std::string_view why) { return TraceError(TraceError::Kind::parse, lineno, fmt::format("line {}: {}: '{}'", lineno, why, raw)); };
    if (tokens.size() < 2 || tokens.size() > 3)
      throw fail("expected '<R|W> <hex-addr> [<hex-pc>]'");

    TraceEvent ev;
    if (tokens[0] == "R" || tokens[0] == "r")
      ev.op = AccessOp::read;
    else if (tokens[0] == "W" || tokens[0] == "w")
      ev.op = AccessOp::write;
    else
      throw fail("unknown operation");

    auto addr = parse_hex(tokens[1]);
    if (!addr)
      throw fail("bad address");
    ev.addr = *addr;
    if (tokens.size() == 3) {
      auto pc = parse_hex(tokens[2]);
      if (!pc)
        throw fail("bad pc");
      ev.pc = *pc;
    }
    check_range(ev.addr, memory_bytes, lineno);
    events.push_back(ev);
  }
  if (in.bad())
    throw TraceError(TraceError::Kind::io, lineno, "read error");
  return events;
}

void write_trace_text(std::ostream& out, const std::vector<TraceEvent>& events)
{
  for (const auto& ev : events) {
    if (ev.pc)
      out << fmt::format("{} {:#x} {:#x}\n", ev.is_write() ? 'W' : 'R', ev.addr, *ev.pc);
    else
      out << fmt::format("{} {:#x}\n", ev.is_write() ? 'W' : 'R', ev.addr);
  }
}

std::vector<TraceEvent> read_trace_binary(std::istream& in, std::uint64_t memory_bytes)
{
  std::array<char, 4> magic{};
  std::uint8_t version = 0;
  std::uint64_t count = 0;
  if (!in.read(magic.data(), magic.size()) || magic != binary_magic)
    throw TraceError(TraceError::Kind::parse, 0, "not a binary trace (bad magic)");
  if (!get_le(in, version) || version != binary_trace_version)
    throw TraceError(TraceError::Kind::parse, 0, fmt::format("unsupported binary trace version {}", version));
  if (!get_le(in, count))
    throw TraceError(TraceError::Kind::parse, 0, "truncated binary trace header");

  std::vector<TraceEvent> events;
  events.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint8_t op = 0;
    std::uint8_t flags = 0;
    std::uint64_t addr = 0;
    std::uint64_t pc = 0;
    if (!get_le(in, op) || !get_le(in, flags) || !get_le(in, addr) || !get_le(in, pc))
      throw TraceError(TraceError::Kind::parse, i + 1, fmt::format("record {}: truncated binary trace", i + 1));
    if (op > 1)
      throw TraceError(TraceError::Kind::parse, i + 1, fmt::format("record {}: unknown operation {}", i + 1, op));
    check_range(addr, memory_bytes, i + 1);
    TraceEvent ev{static_cast<AccessOp>(op), addr, std::nullopt};
    if (flags & 1u)
      ev.pc = pc;
    events.push_back(ev);
  }
  return events;
}

void write_trace_binary(std::ostream& out, const std::vector<TraceEvent>& events)
{
  out.write(binary_magic.data(), binary_magic.size());
  put_le(out, binary_trace_version);
  put_le(out, static_cast<std::uint64_t>(events.size()));
  for (const auto& ev : events) {
    put_le(out, static_cast<std::uint8_t>(ev.op));
    put_le(out, static_cast<std::uint8_t>(ev.pc ? 1 : 0));
    put_le(out, ev.addr);
    put_le(out, ev.pc.value_or(0));
  }
}

std::vector<TraceEvent> load_trace(const std::string& path, std::uint64_t memory_bytes)
{
  auto from_stream = [&](std::istream& in) {
    std::array<char, 4> head{};
    in.read(head.data(), head.size());
    auto got = static_cast<std::size_t>(in.gcount());
    std::string buffered(head.data(), got);
    if (got == head.size() && head == binary_magic) {
      std::stringstream rest;
      rest << buffered << in.rdbuf();
      return read_trace_binary(rest, memory_bytes);
    }
    in.clear();
    std::stringstream rest;
    rest << buffered;
    if (in.peek() != std::char_traits<char>::eof())
      rest << in.rdbuf();
    return parse_trace(rest, memory_bytes);
  };

  if (path == "-")
    return from_stream(std::cin);
  std::ifstream file(path, std::ios::binary);
  if (!file)
    throw TraceError(TraceError::Kind::io, 0, fmt::format("cannot open trace '{}': {}", path, std::strerror(errno)));
  return from_stream(file);
}

std::string to_string(TraceKind kind)
{
  switch (kind) {
  case TraceKind::stream:
    return "stream";
  case TraceKind::random_uniform:
    return "random_uniform";
  case TraceKind::pointer_chase:
    return "pointer_chase";
  case TraceKind::strided:
    return "strided";
  case TraceKind::mixed_phase:
    return "mixed_phase";
  }
  return "?";
}

std::optional<TraceKind> parse_trace_kind(std::string_view name)
{
  if (name == "stream")
    return TraceKind::stream;
  if (name == "random_uniform" || name == "random" || name == "gups")
    return TraceKind::random_uniform;
  if (name == "pointer_chase" || name == "chase")
    return TraceKind::pointer_chase;
  if (name == "strided")
    return TraceKind::strided;
  if (name == "mixed_phase" || name == "mixed")
    return TraceKind::mixed_phase;
  return std::nullopt;
}

void SyntheticSpec::validate() const
{
  if (footprint_bytes < block_bytes)
    throw std::invalid_argument(fmt::format("footprint {} bytes is smaller than one {}-byte block", footprint_bytes, block_bytes));
  if (write_ratio < 0.0 || write_ratio > 1.0)
    throw std::invalid_argument("write_ratio must be within [0, 1]");
  if (kind == TraceKind::strided && stride_bytes == 0)
    throw std::invalid_argument("strided trace needs a non-zero stride");
  if (kind == TraceKind::mixed_phase) {
    if (phases.empty())
      throw std::invalid_argument("mixed_phase needs at least one phase");
    for (const auto& p : phases)
      if (p.kind == TraceKind::mixed_phase)
        throw std::invalid_argument("mixed_phase phases cannot themselves be mixed_phase");
  }
}

std::vector<TraceEvent> generate(const SyntheticSpec& spec)
{
  spec.validate();
  SyntheticSpec s = spec;
  s.footprint_bytes &= ~(block_bytes - 1);

  std::vector<TraceEvent> out;
  if (s.kind != TraceKind::mixed_phase) {
    out.reserve(s.count);
    append_phase(out, s.kind, s.count, s, s.seed);
    return out;
  }
  std::uint64_t total = 0;
  for (const auto& p : s.phases)
    total += p.count;
  out.reserve(total);
  for (std::size_t i = 0; i < s.phases.size(); ++i)
    append_phase(out, s.phases[i].kind, s.phases[i].count, s, s.seed + 0x9e3779b97f4a7c15ull * (i + 1));
  return out;
}

std::vector<TracePhase> parse_phases(std::string_view text)
{
  std::vector<TracePhase> phases;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

    auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw std::invalid_argument(fmt::format("phase '{}' is not kind:count", item));
    auto kind = parse_trace_kind(item.substr(0, colon));
    if (!kind)
      throw std::invalid_argument(fmt::format("unknown trace kind '{}'", item.substr(0, colon)));
    auto num = item.substr(colon + 1);
    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), count);
    if (ec != std::errc{} || ptr != num.data() + num.size())
      throw std::invalid_argument(fmt::format("bad phase count '{}'", num));
    phases.push_back({*kind, count});
  }
  return phases;
}

std::string format_phases(const std::vector<TracePhase>& phases)
{
  std::string out;
  for (const auto& p : phases) {
    if (!out.empty())
      out += ',';
    out += fmt::format("{}:{}", to_string(p.kind), p.count);
  }
  return out;
}

} // namespace levelsim
