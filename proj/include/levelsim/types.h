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

#ifndef LEVELSIM_TYPES_H
#define LEVELSIM_TYPES_H

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>

namespace levelsim
{
inline constexpr unsigned block_offset_bits = 6;
inline constexpr std::uint64_t block_bytes = std::uint64_t{1} << block_offset_bits;

// Hierarchy levels, shallowest first. The underlying values give the
// "deeper than" order used throughout the simulator.
enum class MemLevel : std::uint8_t { L1 = 0, L2 = 1, L3 = 2, MEM = 3 };

inline constexpr std::array<MemLevel, 4> all_levels{MemLevel::L1, MemLevel::L2, MemLevel::L3, MemLevel::MEM};
inline constexpr std::array<MemLevel, 3> cache_levels{MemLevel::L1, MemLevel::L2, MemLevel::L3};
inline constexpr std::array<MemLevel, 3> target_levels{MemLevel::L2, MemLevel::L3, MemLevel::MEM};

constexpr auto index_of(MemLevel level) { return static_cast<std::size_t>(level); }
constexpr bool deeper(MemLevel a, MemLevel b) { return index_of(a) > index_of(b); }
constexpr bool shallower(MemLevel a, MemLevel b) { return index_of(a) < index_of(b); }
constexpr MemLevel next_level(MemLevel level) { return static_cast<MemLevel>(index_of(level) + 1); }

std::string_view to_string(MemLevel level);

// Physical address right-shifted by the block offset.
struct BlockAddr {
  std::uint64_t value = 0;

  static constexpr BlockAddr from_address(std::uint64_t paddr) { return BlockAddr{paddr >> block_offset_bits}; }
  constexpr std::uint64_t address() const { return value << block_offset_bits; }
  constexpr BlockAddr offset(std::int64_t delta) const { return BlockAddr{value + static_cast<std::uint64_t>(delta)}; }

  friend constexpr auto operator<=>(BlockAddr, BlockAddr) = default;
};

// A small set of hierarchy levels. Iteration order is shallowest first.
class LevelSet
{
  std::uint8_t bits_ = 0;

public:
  constexpr LevelSet() = default;
  constexpr LevelSet(std::initializer_list<MemLevel> levels)
  {
    for (auto l : levels)
      insert(l);
  }

  constexpr void insert(MemLevel l) { bits_ = static_cast<std::uint8_t>(bits_ | (1u << index_of(l))); }
  constexpr void erase(MemLevel l) { bits_ = static_cast<std::uint8_t>(bits_ & ~(1u << index_of(l))); }
  constexpr bool contains(MemLevel l) const { return (bits_ >> index_of(l)) & 1u; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr std::uint8_t bits() const { return bits_; }

  // Precondition: !empty()
  constexpr MemLevel shallowest() const { return static_cast<MemLevel>(std::countr_zero(bits_)); }
  constexpr MemLevel deepest() const { return static_cast<MemLevel>(7 - std::countl_zero(bits_)); }

  template <typename F>
  constexpr void for_each(F&& f) const
  {
    for (auto l : all_levels)
      if (contains(l))
        f(l);
  }

  friend constexpr bool operator==(LevelSet, LevelSet) = default;
};

std::string to_string(LevelSet set);

} // namespace levelsim

template <>
struct std::hash<levelsim::BlockAddr> {
  std::size_t operator()(levelsim::BlockAddr b) const noexcept { return std::hash<std::uint64_t>{}(b.value); }
};

#endif
