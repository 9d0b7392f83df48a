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

#ifndef LEVELSIM_TESTS_SUPPORT_H
#define LEVELSIM_TESTS_SUPPORT_H

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "levelsim/config.h"
#include "levelsim/trace.h"

namespace levelsim::test
{
// Tiny hierarchy that exercises evictions quickly: L1 2 sets x 2 ways,
// L2 4 x 4, L3 8 x 4.
inline HierarchyConfig tiny_hierarchy()
{
  auto h = HierarchyConfig::defaults();
  h.at(MemLevel::L1).capacity_bytes = 2 * 2 * 64;
  h.at(MemLevel::L1).associativity = 2;
  h.at(MemLevel::L2).capacity_bytes = 4 * 4 * 64;
  h.at(MemLevel::L2).associativity = 4;
  h.at(MemLevel::L3).capacity_bytes = 8 * 4 * 64;
  h.at(MemLevel::L3).associativity = 4;
  return h;
}

inline SimConfig quiet_config()
{
  SimConfig cfg;
  cfg.prefetch.l1_enable = false;
  cfg.prefetch.l2_enable = false;
  cfg.prefetch.l3_enable = false;
  return cfg;
}

inline std::vector<TraceEvent> reads(std::initializer_list<std::uint64_t> addrs)
{
  std::vector<TraceEvent> out;
  for (auto a : addrs)
    out.push_back({AccessOp::read, a, std::nullopt});
  return out;
}

// Random reads/writes over `blocks` blocks, with a handful of pcs.
inline std::vector<TraceEvent> random_trace(std::uint64_t seed, std::size_t n, std::uint64_t blocks, double write_ratio = 0.3)
{
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, blocks - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<TraceEvent> out;
  out.reserve(n);
  std::uint64_t cursor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t block = coin(rng) < 0.5 ? pick(rng) : (cursor++ % blocks);
    out.push_back({coin(rng) < write_ratio ? AccessOp::write : AccessOp::read, block * 64 + (rng() % 64), 0x400000 + (rng() % 4) * 0x10});
  }
  return out;
}

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& name)
  {
    path = std::filesystem::temp_directory_path() / ("levelsim_" + name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

inline std::string slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
}

} // namespace levelsim::test

#endif
