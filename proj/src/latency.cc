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

#include "levelsim/latency.h"

#include <algorithm>
#include <stdexcept>

namespace levelsim
{
LatencyModel LatencyModel::from(const HierarchyConfig& hierarchy, std::uint32_t mem_fixed, std::uint32_t predictor_cycle, std::uint32_t bus_hop,
                                bool serial_mem_launch)
{
  const auto& l3 = hierarchy.at(MemLevel::L3);
  return {hierarchy.at(MemLevel::L1).hit_latency(),
          hierarchy.at(MemLevel::L2).hit_latency(),
          l3.tag_latency,
          l3.sequential_tag_data ? l3.data_latency : 0,
          mem_fixed,
          predictor_cycle,
          bus_hop,
          serial_mem_launch};
}

std::uint32_t LatencyModel::full_miss() const { return l1_hit + bus_hop + l2_hit + bus_hop + l3_tag + bus_hop + mem_fixed; }

Stage Stage::parallel(std::vector<Path> branches)
{
  Stage s{StageKind::parallel};
  s.branches = std::move(branches);
  return s;
}

namespace
{
std::uint64_t stage_cycles(const Stage& stage, const LatencyModel& m)
{
  switch (stage.kind) {
  case StageKind::l1_lookup:
    return m.l1_hit;
  case StageKind::l2_lookup:
    return m.l2_hit;
  case StageKind::l3_tag:
    return m.l3_tag;
  case StageKind::l3_data:
    return m.l3_data;
  case StageKind::memory:
    return m.mem_fixed;
  case StageKind::bus:
    return m.bus_hop;
  case StageKind::predictor:
    return m.predictor_cycle;
  case StageKind::parallel: {
    if (stage.branches.empty())
      throw std::invalid_argument("parallel stage without branches");
    std::uint64_t slowest = 0;
    for (const auto& branch : stage.branches)
      slowest = std::max(slowest, compose_latency(branch, m));
    return slowest;
  }
  }
  throw std::invalid_argument("unknown stage kind");
}
} // namespace

std::uint64_t compose_latency(const Path& path, const LatencyModel& model)
{
  if (path.empty())
    throw std::invalid_argument("empty latency path");
  std::uint64_t total = 0;
  for (const auto& stage : path)
    total += stage_cycles(stage, model);
  return total;
}

AccessPlan plan_baseline(MemLevel served)
{
  using enum StageKind;
  AccessPlan plan;
  switch (served) {
  case MemLevel::L1:
    plan.path = {l1_lookup};
    break;
  case MemLevel::L2:
    plan.path = {l1_lookup, bus, l2_lookup};
    plan.l2_lookups = 1;
    plan.mshr_levels = {MemLevel::L1};
    break;
  case MemLevel::L3:
    plan.path = {l1_lookup, bus, l2_lookup, bus, l3_tag, l3_data};
    plan.l2_lookups = 1;
    plan.l3_tag_lookups = 1;
    plan.l3_data_reads = 1;
    plan.mshr_levels = {MemLevel::L1, MemLevel::L2};
    break;
  case MemLevel::MEM:
    plan.path = {l1_lookup, bus, l2_lookup, bus, l3_tag, bus, memory};
    plan.l2_lookups = 1;
    plan.l3_tag_lookups = 1;
    plan.mem_reads = 1;
    plan.mshr_levels = {MemLevel::L1, MemLevel::L2, MemLevel::L3};
    break;
  }
  return plan;
}

AccessPlan plan_predicted(LevelSet targets, MemLevel served, bool serial_mem_launch)
{
  using enum StageKind;
  if (served == MemLevel::L1 || targets.empty() || targets.contains(MemLevel::L1))
    throw std::invalid_argument("predicted plan needs an L1 miss and non-empty non-L1 targets");

  if (targets == LevelSet{MemLevel::L2}) {
    // Sequential prediction: the baseline walk plus the predictor cycle.
    auto plan = plan_baseline(served);
    plan.path.insert(std::next(plan.path.begin()), predictor);
    return plan;
  }

  const bool l2_in = targets.contains(MemLevel::L2);
  const bool l3_in = targets.contains(MemLevel::L3);
  const bool mem_in = targets.contains(MemLevel::MEM);
  const bool speculative_mem = mem_in && !serial_mem_launch;

  AccessPlan plan;
  plan.path = {l1_lookup, predictor, bus};
  plan.mshr_levels = {MemLevel::L1};
  plan.l2_lookups = l2_in ? 1 : 0;
  // Every non-sequential prediction reaches the LLC tags, where the
  // directory confirms or redirects.
  plan.l3_tag_lookups = 1;
  plan.mem_reads = speculative_mem ? 1 : 0;
  if (speculative_mem)
    plan.mshr_levels.insert(MemLevel::L3);

  // L2 probe racing the LLC tag check when L2 is among the targets.
  auto with_l2 = [&](Path llc) -> Stage {
    if (!l2_in)
      return Stage::parallel({std::move(llc)});
    return Stage::parallel({Path{l2_lookup}, std::move(llc)});
  };

  switch (served) {
  case MemLevel::L2:
    if (l2_in) {
      plan.path.push_back(l2_lookup);
    } else {
      plan.path.insert(plan.path.end(), {l3_tag, bus, l2_lookup});
      plan.l2_lookups = 1;
      plan.recovered = true;
      plan.mshr_levels.insert(MemLevel::L2);
    }
    break;

  case MemLevel::L3:
    plan.mshr_levels.insert(MemLevel::L2);
    plan.l3_data_reads = 1;
    if (l3_in) {
      plan.path.push_back(with_l2({l3_tag, l3_data}));
    } else {
      plan.path.push_back(with_l2({l3_tag}));
      plan.path.insert(plan.path.end(), {bus, l3_data});
      plan.recovered = true;
    }
    break;

  case MemLevel::MEM:
    plan.mshr_levels.insert(MemLevel::L2);
    plan.mshr_levels.insert(MemLevel::L3);
    plan.mem_reads = 1;
    if (speculative_mem) {
      Path llc_and_mem{Stage::parallel({Path{l3_tag}, Path{memory}})};
      plan.path.push_back(with_l2(std::move(llc_and_mem)));
    } else if (mem_in) {
      // Collocated directory forwards to memory as soon as the tags miss.
      plan.path.push_back(with_l2({l3_tag}));
      plan.path.push_back(memory);
    } else {
      plan.path.push_back(with_l2({l3_tag}));
      plan.path.insert(plan.path.end(), {bus, memory});
    }
    break;

  case MemLevel::L1:
    break;
  }
  return plan;
}

std::uint32_t recovery_penalty(MemLevel actual, const LatencyModel& model)
{
  switch (actual) {
  case MemLevel::L2:
    return model.bus_hop + model.l2_hit;
  case MemLevel::L3:
    return model.bus_hop + model.l3_data;
  default:
    return 0;
  }
}

} // namespace levelsim
