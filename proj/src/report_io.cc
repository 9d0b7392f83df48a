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

#include "levelsim/report_io.h"

#include <cmath>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

namespace levelsim
{
namespace
{
using json = nlohmann::ordered_json;

json ratio_to_json(double v)
{
  if (std::isinf(v))
    return "inf";
  return v;
}

double ratio_from_json(const json& j)
{
  if (j.is_string()) {
    if (j.get<std::string>() != "inf")
      throw std::invalid_argument("ratio must be a number or \"inf\"");
    return ratio_sentinel;
  }
  return j.get<double>();
}

json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& pairs)
{
  json j = json::object();
  for (const auto& [k, v] : pairs)
    j[k] = v;
  return j;
}

std::vector<std::pair<std::string, std::string>> pairs_from_json(const json& j)
{
  std::vector<std::pair<std::string, std::string>> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out.emplace_back(it.key(), it.value().get<std::string>());
  return out;
}

template <std::size_t N>
json array_to_json(const std::array<std::uint64_t, N>& a)
{
  json j = json::array();
  for (auto v : a)
    j.push_back(v);
  return j;
}

template <std::size_t N>
std::array<std::uint64_t, N> array_from_json(const json& j)
{
  if (!j.is_array() || j.size() != N)
    throw std::invalid_argument(fmt::format("expected an array of {} counters", N));
  std::array<std::uint64_t, N> a{};
  for (std::size_t i = 0; i < N; ++i)
    a[i] = j.at(i).get<std::uint64_t>();
  return a;
}

json to_json(const RunReport& r)
{
  json j;
  j["mode"] = r.mode;
  j["accesses"] = r.accesses;
  j["reads"] = r.reads;
  j["writes"] = r.writes;
  j["levels"] = {
      {"l1", {{"hits", r.l1_hits}, {"misses", r.l1_misses}, {"mshr_hits", r.l1_mshr_hits}}},
      {"l2", {{"hits", r.l2_hits}, {"misses", r.l2_misses}}},
      {"l3", {{"hits", r.l3_hits}, {"misses", r.l3_misses}}},
  };

  json cats = json::object();
  for (auto c : all_categories)
    cats[std::string(to_string(c))] = r.category(c);
  j["predictions"] = {
      {"predicted", r.predicted},          {"categories", cats}, {"target_ways", array_to_json(r.target_ways)},
      {"pld_target_ways", array_to_json(r.pld_target_ways)}, {"recoveries", r.recoveries},
  };
  j["predictor"] = {
      {"meta_accesses", r.meta_accesses},     {"meta_hits", r.meta_hits},     {"meta_misses", r.meta_misses},
      {"meta_hit_ratio", r.meta_hit_ratio},   {"pld_predictions", r.pld_predictions}, {"pld_correct", r.pld_correct},
      {"pld_accuracy", r.pld_accuracy},
  };
  j["latency"] = {{"total", r.total_latency}, {"amat", r.amat}};

  json items = json::array();
  for (const auto& e : r.energy)
    items.push_back({{"name", e.name}, {"count", e.count}, {"unit", e.unit}, {"energy", e.energy}});
  j["energy"] = {{"items", items}, {"total", r.energy_total}};

  json pf = json::array();
  for (const auto& p : r.prefetch)
    pf.push_back({{"name", p.name},
                  {"issued", p.issued},
                  {"useful", p.useful},
                  {"rejected", p.rejected},
                  {"redundant", p.redundant},
                  {"late", p.late},
                  {"throttled", p.throttled}});
  j["prefetch"] = pf;

  json ms = json::array();
  for (const auto& m : r.mshr)
    ms.push_back({{"level", m.level},
                  {"demand_allocations", m.demand_allocations},
                  {"prefetch_allocations", m.prefetch_allocations},
                  {"deallocations", m.deallocations},
                  {"demand_rejections", m.demand_rejections},
                  {"peak_occupancy", m.peak_occupancy}});
  j["mshr"] = ms;

  j["effectiveness"] = {{"x", ratio_to_json(r.effectiveness.x)}, {"y", ratio_to_json(r.effectiveness.y)}, {"class", to_string(r.effectiveness.cls)}};

  json series = json::array();
  for (const auto& w : r.windows)
    series.push_back({{"accesses", w.accesses}, {"l1_misses", w.l1_misses}, {"l2_misses", w.l2_misses}, {"l3_misses", w.l3_misses}});
  j["windows"] = {{"length", r.window_len}, {"series", series}};

  j["locmap"] = {{"storage_bits", r.locmap_storage_bits}, {"overhead_ratio", r.locmap_overhead_ratio}};
  j["config"] = pairs_to_json(r.config);
  j["notes"] = pairs_to_json(r.notes);
  return j;
}

RunReport from_json(const json& j)
{
  RunReport r;
  r.mode = j.at("mode").get<std::string>();
  r.accesses = j.at("accesses").get<std::uint64_t>();
  r.reads = j.at("reads").get<std::uint64_t>();
  r.writes = j.at("writes").get<std::uint64_t>();

  const auto& lv = j.at("levels");
  r.l1_hits = lv.at("l1").at("hits").get<std::uint64_t>();
  r.l1_misses = lv.at("l1").at("misses").get<std::uint64_t>();
  r.l1_mshr_hits = lv.at("l1").at("mshr_hits").get<std::uint64_t>();
  r.l2_hits = lv.at("l2").at("hits").get<std::uint64_t>();
  r.l2_misses = lv.at("l2").at("misses").get<std::uint64_t>();
  r.l3_hits = lv.at("l3").at("hits").get<std::uint64_t>();
  r.l3_misses = lv.at("l3").at("misses").get<std::uint64_t>();

  const auto& p = j.at("predictions");
  r.predicted = p.at("predicted").get<std::uint64_t>();
  for (auto c : all_categories)
    r.categories[static_cast<std::size_t>(c)] = p.at("categories").at(std::string(to_string(c))).get<std::uint64_t>();
  r.target_ways = array_from_json<3>(p.at("target_ways"));
  r.pld_target_ways = array_from_json<3>(p.at("pld_target_ways"));
  r.recoveries = p.at("recoveries").get<std::uint64_t>();

  const auto& pr = j.at("predictor");
  r.meta_accesses = pr.at("meta_accesses").get<std::uint64_t>();
  r.meta_hits = pr.at("meta_hits").get<std::uint64_t>();
  r.meta_misses = pr.at("meta_misses").get<std::uint64_t>();
  r.meta_hit_ratio = pr.at("meta_hit_ratio").get<double>();
  r.pld_predictions = pr.at("pld_predictions").get<std::uint64_t>();
  r.pld_correct = pr.at("pld_correct").get<std::uint64_t>();
  r.pld_accuracy = pr.at("pld_accuracy").get<double>();

  r.total_latency = j.at("latency").at("total").get<std::uint64_t>();
  r.amat = j.at("latency").at("amat").get<double>();

  for (const auto& e : j.at("energy").at("items"))
    r.energy.push_back({e.at("name").get<std::string>(), e.at("count").get<std::uint64_t>(), e.at("unit").get<double>(), e.at("energy").get<double>()});
  r.energy_total = j.at("energy").at("total").get<double>();

  for (const auto& x : j.at("prefetch"))
    r.prefetch.push_back({x.at("name").get<std::string>(), x.at("issued").get<std::uint64_t>(), x.at("useful").get<std::uint64_t>(),
                          x.at("rejected").get<std::uint64_t>(), x.at("redundant").get<std::uint64_t>(), x.at("late").get<std::uint64_t>(),
                          x.at("throttled").get<std::uint64_t>()});
  for (const auto& m : j.at("mshr"))
    r.mshr.push_back({m.at("level").get<std::string>(), m.at("demand_allocations").get<std::uint64_t>(), m.at("prefetch_allocations").get<std::uint64_t>(),
                      m.at("deallocations").get<std::uint64_t>(), m.at("demand_rejections").get<std::uint64_t>(),
                      m.at("peak_occupancy").get<std::uint64_t>()});

  const auto& eff = j.at("effectiveness");
  r.effectiveness.x = ratio_from_json(eff.at("x"));
  r.effectiveness.y = ratio_from_json(eff.at("y"));
  auto cls = parse_workload_class(eff.at("class").get<std::string>());
  if (!cls)
    throw std::invalid_argument("unknown workload class");
  r.effectiveness.cls = *cls;

  r.window_len = j.at("windows").at("length").get<std::uint64_t>();
  for (const auto& w : j.at("windows").at("series"))
    r.windows.push_back({w.at("accesses").get<std::uint64_t>(), w.at("l1_misses").get<std::uint64_t>(), w.at("l2_misses").get<std::uint64_t>(),
                         w.at("l3_misses").get<std::uint64_t>()});

  r.locmap_storage_bits = j.at("locmap").at("storage_bits").get<std::uint64_t>();
  r.locmap_overhead_ratio = j.at("locmap").at("overhead_ratio").get<double>();
  r.config = pairs_from_json(j.at("config"));
  r.notes = pairs_from_json(j.at("notes"));
  return r;
}

std::string csv_number(double v)
{
  if (std::isinf(v))
    return "inf";
  return fmt::format("{}", v);
}

std::vector<std::pair<std::string, std::string>> metric_rows(const RunReport& r)
{
  std::vector<std::pair<std::string, std::string>> rows{
      {"mode", r.mode},
      {"accesses", std::to_string(r.accesses)},
      {"reads", std::to_string(r.reads)},
      {"writes", std::to_string(r.writes)},
      {"l1_hits", std::to_string(r.l1_hits)},
      {"l1_misses", std::to_string(r.l1_misses)},
      {"l1_mshr_hits", std::to_string(r.l1_mshr_hits)},
      {"l2_hits", std::to_string(r.l2_hits)},
      {"l2_misses", std::to_string(r.l2_misses)},
      {"l3_hits", std::to_string(r.l3_hits)},
      {"l3_misses", std::to_string(r.l3_misses)},
      {"predicted", std::to_string(r.predicted)},
  };
  for (auto c : all_categories)
    rows.emplace_back(std::string(to_string(c)), std::to_string(r.category(c)));
  for (std::size_t i = 0; i < 3; ++i)
    rows.emplace_back(fmt::format("targets_{}way", i + 1), std::to_string(r.target_ways[i]));
  rows.insert(rows.end(), {
                              {"recoveries", std::to_string(r.recoveries)},
                              {"meta_hit_ratio", csv_number(r.meta_hit_ratio)},
                              {"pld_accuracy", csv_number(r.pld_accuracy)},
                              {"total_latency", std::to_string(r.total_latency)},
                              {"amat", csv_number(r.amat)},
                              {"energy_total", csv_number(r.energy_total)},
                              {"effectiveness_x", csv_number(r.effectiveness.x)},
                              {"effectiveness_y", csv_number(r.effectiveness.y)},
                              {"workload_class", std::string(to_string(r.effectiveness.cls))},
                              {"locmap_overhead_ratio", csv_number(r.locmap_overhead_ratio)},
                          });
  return rows;
}

} // namespace

std::optional<WorkloadClass> parse_workload_class(std::string_view name)
{
  for (auto c : {WorkloadClass::sequential_friendly, WorkloadClass::skip_friendly, WorkloadClass::mixed})
    if (to_string(c) == name)
      return c;
  return std::nullopt;
}

std::string emit_json(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

RunReport parse_json(const std::string& text)
{
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("malformed report: {}", e.what()));
  }
}

std::size_t csv_metric_rows() { return metric_rows(RunReport{}).size(); }

std::string emit_csv(const RunReport& report)
{
  std::string out = "metric,value\n";
  for (const auto& [k, v] : metric_rows(report))
    out += fmt::format("{},{}\n", k, v);
  return out;
}

std::string emit_windows_csv(const RunReport& report)
{
  std::string out = "window,accesses,l1_misses,l2_misses,l3_misses,x,y\n";
  EffectivenessThresholds th;
  for (std::size_t i = 0; i < report.windows.size(); ++i) {
    const auto& w = report.windows[i];
    auto e = effectiveness(w.l1_misses, w.l2_misses, w.l3_misses, th);
    out += fmt::format("{},{},{},{},{},{},{}\n", i, w.accesses, w.l1_misses, w.l2_misses, w.l3_misses, csv_number(e.x), csv_number(e.y));
  }
  return out;
}

std::string emit_summary_json(const std::vector<RunReport>& reports)
{
  const RunReport* base = nullptr;
  for (const auto& r : reports)
    if (r.mode == "baseline")
      base = &r;

  json modes = json::array();
  for (const auto& r : reports) {
    json m;
    m["mode"] = r.mode;
    m["amat"] = r.amat;
    m["energy_total"] = r.energy_total;
    m["accuracy"] = r.accuracy();
    json shares = json::object();
    for (auto c : all_categories)
      shares[std::string(to_string(c))] = r.category_share(c);
    m["category_share"] = shares;
    if (base != nullptr) {
      m["amat_delta"] = r.amat - base->amat;
      m["amat_improvement"] = base->amat == 0.0 ? 0.0 : (base->amat - r.amat) / base->amat;
      m["energy_delta"] = r.energy_total - base->energy_total;
      m["energy_saving"] = base->energy_total == 0.0 ? 0.0 : (base->energy_total - r.energy_total) / base->energy_total;
    }
    modes.push_back(m);
  }
  json j;
  j["reference"] = base != nullptr ? json("baseline") : json(nullptr);
  j["modes"] = modes;
  return j.dump(2) + "\n";
}

} // namespace levelsim
