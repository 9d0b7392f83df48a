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

#ifndef LEVELSIM_TRACE_H
#define LEVELSIM_TRACE_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace levelsim
{
enum class AccessOp : std::uint8_t { read, write };

struct TraceEvent {
  AccessOp op = AccessOp::read;
  std::uint64_t addr = 0;
  std::optional<std::uint64_t> pc;

  bool is_write() const { return op == AccessOp::write; }
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

class TraceError : public std::runtime_error
{
public:
  enum class Kind { parse, range, io };

  TraceError(Kind kind, std::size_t line, const std::string& what) : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  // 1-based line (text) or record (binary) number; 0 when not applicable.
  std::size_t line() const { return line_; }

private:
  Kind kind_;
  std::size_t line_;
};

// Text format, one event per line:  <R|W> <hex-addr> [<hex-pc>]
// '#' starts a comment; blank lines are skipped.
std::vector<TraceEvent> parse_trace(std::istream& in, std::uint64_t memory_bytes);
void write_trace_text(std::ostream& out, const std::vector<TraceEvent>& events);

// Binary container: "LVTR", version byte, u64 count, then per record
// {u8 op, u8 flags (bit 0: pc present), u64 addr, u64 pc}, little-endian.
inline constexpr std::uint8_t binary_trace_version = 1;
std::vector<TraceEvent> read_trace_binary(std::istream& in, std::uint64_t memory_bytes);
void write_trace_binary(std::ostream& out, const std::vector<TraceEvent>& events);

// Reads a text or binary trace (sniffed by magic). "-" reads stdin.
std::vector<TraceEvent> load_trace(const std::string& path, std::uint64_t memory_bytes);

enum class TraceKind : std::uint8_t { stream, random_uniform, pointer_chase, strided, mixed_phase };
std::string to_string(TraceKind kind);
std::optional<TraceKind> parse_trace_kind(std::string_view name);

struct TracePhase {
  TraceKind kind = TraceKind::stream;
  std::uint64_t count = 0;
  friend bool operator==(const TracePhase&, const TracePhase&) = default;
};

struct SyntheticSpec {
  TraceKind kind = TraceKind::stream;
  std::uint64_t footprint_bytes = 64ull << 20;
  std::uint64_t count = 100'000;
  std::uint64_t seed = 1;
  std::uint64_t stride_bytes = 256; // strided only
  double write_ratio = 0.0;
  std::vector<TracePhase> phases;   // mixed_phase only

  // Throws std::invalid_argument.
  void validate() const;
};

// Pure function of the spec.
std::vector<TraceEvent> generate(const SyntheticSpec& spec);

// "stream:50000,random_uniform:50000"
std::vector<TracePhase> parse_phases(std::string_view text);
std::string format_phases(const std::vector<TracePhase>& phases);

} // namespace levelsim

#endif
