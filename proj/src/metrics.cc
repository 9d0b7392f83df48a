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

#include "levelsim/metrics.h"

#include <algorithm>

namespace levelsim
{
std::string_view to_string(PredictionCategory c)
{
  switch (c) {
  case PredictionCategory::sequential_correct:
    return "sequential_correct";
  case PredictionCategory::useful_skip:
    return "useful_skip";
  case PredictionCategory::opportunity_loss:
    return "opportunity_loss";
  case PredictionCategory::harmful:
    return "harmful";
  }
  return "?";
}

PredictionCategory classify(LevelSet targets, MemLevel actual)
{
  if (targets.contains(actual)) {
    for (auto level : {MemLevel::L2, MemLevel::L3})
      if (shallower(level, actual) && !targets.contains(level))
        return PredictionCategory::useful_skip;
    return PredictionCategory::sequential_correct;
  }
  return shallower(actual, targets.deepest()) ? PredictionCategory::harmful : PredictionCategory::opportunity_loss;
}

std::string_view to_string(EnergyEvent e)
{
  switch (e) {
  case EnergyEvent::l1_lookup:
    return "l1_lookup";
  case EnergyEvent::l1_fill:
    return "l1_fill";
  case EnergyEvent::l2_lookup:
    return "l2_lookup";
  case EnergyEvent::l2_fill:
    return "l2_fill";
  case EnergyEvent::l3_tag:
    return "l3_tag";
  case EnergyEvent::l3_data:
    return "l3_data";
  case EnergyEvent::l3_fill:
    return "l3_fill";
  case EnergyEvent::dir:
    return "dir";
  case EnergyEvent::mem_read:
    return "mem_read";
  case EnergyEvent::mem_write:
    return "mem_write";
  case EnergyEvent::meta_access:
    return "meta_access";
  case EnergyEvent::pld:
    return "pld";
  case EnergyEvent::locmap_fill:
    return "locmap_fill";
  case EnergyEvent::tage_access:
    return "tage_access";
  case EnergyEvent::count_:
    break;
  }
  return "?";
}

double unit_energy(EnergyEvent e, const EnergyModel& m, double tage_unit)
{
  switch (e) {
  case EnergyEvent::l1_lookup:
  case EnergyEvent::l1_fill:
    return m.tag[0] + m.data[0];
  case EnergyEvent::l2_lookup:
  case EnergyEvent::l2_fill:
    return m.tag[1] + m.data[1];
  case EnergyEvent::l3_tag:
    return m.tag[2];
  case EnergyEvent::l3_data:
    return m.data[2];
  case EnergyEvent::l3_fill:
    return m.tag[2] + m.data[2];
  case EnergyEvent::dir:
    return m.dir;
  case EnergyEvent::mem_read:
  case EnergyEvent::mem_write:
    return m.mem_access;
  case EnergyEvent::meta_access:
    return m.meta_access;
  case EnergyEvent::pld:
    return m.pld;
  case EnergyEvent::locmap_fill:
    return m.locmap_fill;
  case EnergyEvent::tage_access:
    return tage_unit;
  case EnergyEvent::count_:
    break;
  }
  return 0.0;
}

std::vector<EnergyItem> energy_breakdown(const EnergyCounters& counters, const EnergyModel& model, double tage_unit)
{
  std::vector<EnergyItem> items;
  items.reserve(energy_event_count);
  for (std::size_t i = 0; i < energy_event_count; ++i) {
    auto e = static_cast<EnergyEvent>(i);
    auto unit = unit_energy(e, model, tage_unit);
    items.push_back({std::string{to_string(e)}, counters.counts[i], unit, static_cast<double>(counters.counts[i]) * unit});
  }
  return items;
}

double energy_total(const std::vector<EnergyItem>& items)
{
  double total = 0.0;
  for (const auto& item : items)
    total += item.energy;
  return total;
}

std::string_view to_string(WorkloadClass c)
{
  switch (c) {
  case WorkloadClass::sequential_friendly:
    return "sequential_friendly";
  case WorkloadClass::skip_friendly:
    return "skip_friendly";
  case WorkloadClass::mixed:
    return "mixed";
  }
  return "?";
}

Effectiveness effectiveness(std::uint64_t l1_misses, std::uint64_t l2_misses, std::uint64_t l3_misses, const EffectivenessThresholds& th)
{
  auto ratio = [](std::uint64_t num, std::uint64_t den) { return den == 0 ? ratio_sentinel : static_cast<double>(num) / static_cast<double>(den); };
  Effectiveness e{ratio(l1_misses, l2_misses), ratio(l2_misses, l3_misses), WorkloadClass::mixed};
  if (e.x < th.skip_x && e.y < th.skip_y)
    e.cls = WorkloadClass::skip_friendly;
  else if (e.x > th.seq_x && e.y > th.seq_y)
    e.cls = WorkloadClass::sequential_friendly;
  return e;
}

double RunReport::energy_of(std::string_view name) const
{
  auto it = std::find_if(energy.begin(), energy.end(), [&](const EnergyItem& i) { return i.name == name; });
  return it == energy.end() ? 0.0 : it->energy;
}

} // namespace levelsim
