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

#include "levelsim/engine.h"

#include <algorithm>

#include <fmt/core.h>

namespace levelsim
{
namespace
{
EnergyEvent fill_event(MemLevel level)
{
  switch (level) {
  case MemLevel::L1:
    return EnergyEvent::l1_fill;
  case MemLevel::L2:
    return EnergyEvent::l2_fill;
  default:
    return EnergyEvent::l3_fill;
  }
}

std::uint64_t delta(std::uint64_t now, std::uint64_t then) { return now - then; }
} // namespace

Engine::Engine(const SimConfig& config, EngineMode mode, RecordOptions record)
    : config_(config), mode_(mode), record_(record), latency_(config.latency_model()), hierarchy_(config.hierarchy),
      l1_next_(MemLevel::L1, config.prefetch.l1_degree), l2_next_(MemLevel::L2, config.prefetch.l2_degree), dcpt_(config.prefetch.dcpt),
      throttle_(config.prefetch.throttle(), 3)
{
  config_.validate();
  if (mode == EngineMode::locmap)
    predictor_ = std::make_unique<LevelPredictor>(config.predictor_config());
  if (mode == EngineMode::tage2k || mode == EngineMode::tage8k) {
    tage_ = std::make_unique<TagePredictor>(config.tage_config(mode));
    tage_unit_ = config.tage_energy(mode);
  }
  tally_.prefetch = {PrefetchStats{"l1_next_line"}, PrefetchStats{"l2_next_line"}, PrefetchStats{"l3_dcpt"}};
}

AccessOutcome Engine::access(const TraceEvent& event)
{
  const auto block = BlockAddr::from_address(event.addr);
  const bool write = event.is_write();

  if (measuring() && !predictor_snapshotted_) {
    if (predictor_)
      predictor_at_warmup_ = predictor_->stats();
    predictor_snapshotted_ = true;
  }

  throttle_.advance(tick_);
  land_due();

  std::uint64_t wait = 0;
  bool late = false;
  if (inflight_.count(block.value)) {
    wait = land_now(block);
    late = true;
  }

  AccessOutcome out;
  count(EnergyEvent::l1_lookup);
  auto l1 = hierarchy_.lookup(MemLevel::L1, block, true);
  if (l1.hit) {
    out.served_by = MemLevel::L1;
    out.latency = latency_.l1_hit + wait;
    out.mshr_hit = late;
    if (write)
      hierarchy_.mark_dirty(MemLevel::L1, block);
    if (l1.prefetched_first_touch)
      record_useful(MemLevel::L1);
    run_prefetchers(event, block, late || l1.prefetched_first_touch, false, false);
  } else {
    const auto actual = hierarchy_.locate(block);
    out.served_by = actual;

    AccessPlan plan;
    if (mode_ == EngineMode::baseline) {
      plan = plan_baseline(actual);
    } else {
      auto prediction = predict(block, actual);
      plan = plan_predicted(prediction.targets, actual, latency_.serial_mem_launch);
      out.category = classify(prediction.targets, actual);
      out.prediction = prediction;
      out.recovered = plan.recovered;
      train_predictor(block, actual);
    }
    out.latency = compose_latency(plan.path, latency_) + wait;

    count(EnergyEvent::l2_lookup, plan.l2_lookups);
    count(EnergyEvent::l3_tag, plan.l3_tag_lookups);
    count(EnergyEvent::dir, plan.l3_tag_lookups);
    count(EnergyEvent::l3_data, plan.l3_data_reads);
    count(EnergyEvent::mem_read, plan.mem_reads);
    demand_mshrs(block, plan.mshr_levels);

    // State changes below depend only on the functional outcome, never on
    // the prediction.
    bool l2_first_touch = false;
    if (actual == MemLevel::L2) {
      l2_first_touch = hierarchy_.lookup(MemLevel::L2, block, true).prefetched_first_touch;
      if (l2_first_touch)
        record_useful(MemLevel::L2);
    } else if (actual == MemLevel::L3) {
      if (hierarchy_.lookup(MemLevel::L3, block, true).prefetched_first_touch)
        record_useful(MemLevel::L3);
    }
    commit_miss(block, actual, write);

    const bool reached_l3 = actual == MemLevel::L3 || actual == MemLevel::MEM;
    run_prefetchers(event, block, true, reached_l3 || l2_first_touch, reached_l3);
  }

  cycle_ += out.latency;
  tally(out, write);
  if (record_.outcomes)
    outcomes_.push_back(out);
  if (record_.audit_each_access)
    for (auto& e : hierarchy_.audit())
      audit_failures_.push_back(fmt::format("access {}: {}", tick_, e));
  ++tick_;
  return out;
}

Prediction Engine::predict(BlockAddr block, MemLevel actual)
{
  switch (mode_) {
  case EngineMode::locmap:
    return predictor_->predict(block, cycle_).prediction;
  case EngineMode::tage2k:
  case EngineMode::tage8k:
    count(EnergyEvent::tage_access);
    return tage_->predict(block);
  case EngineMode::oracle:
    return Prediction{LevelSet{actual}, PredictionSource::oracle};
  case EngineMode::baseline:
    break;
  }
  return Prediction{};
}

void Engine::train_predictor(BlockAddr block, MemLevel actual)
{
  if (predictor_)
    predictor_->pld_update(to_target(actual));
  if (tage_) {
    count(EnergyEvent::tage_access);
    tage_->update(block, to_target(actual));
  }
}

void Engine::commit_miss(BlockAddr block, MemLevel actual, bool write)
{
  hierarchy_.clear_events();
  if (actual == MemLevel::MEM)
    hierarchy_.fill(MemLevel::L3, block, false, false);
  if (actual != MemLevel::L2)
    hierarchy_.fill(MemLevel::L2, block, false, false);
  hierarchy_.fill(MemLevel::L1, block, write, false);
  account_events();

  if (predictor_ && actual != MemLevel::L2)
    predictor_->notify(LocMapEvent::demand_fill, MemLevel::L2, block, cycle_);
}

void Engine::account_events()
{
  const auto& events = hierarchy_.events();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    switch (ev.kind) {
    case HierarchyEvent::Kind::fill: {
      // A write-back that missed its destination shows up as a write-back
      // followed by a fill of the same block; charge it once.
      const bool after_writeback = i > 0 && events[i - 1].kind == HierarchyEvent::Kind::writeback && events[i - 1].level == ev.level &&
                                   events[i - 1].block == ev.block;
      if (!after_writeback)
        count(fill_event(ev.level));
      break;
    }
    case HierarchyEvent::Kind::writeback:
      count(ev.level == MemLevel::MEM ? EnergyEvent::mem_write : fill_event(ev.level));
      if (predictor_ && (ev.level == MemLevel::L3 || ev.level == MemLevel::MEM))
        predictor_->notify(LocMapEvent::dirty_eviction, ev.level, ev.block, cycle_);
      break;
    case HierarchyEvent::Kind::back_invalidate:
      break;
    }
  }
  hierarchy_.clear_events();
}

void Engine::demand_mshrs(BlockAddr block, LevelSet levels)
{
  levels.for_each([&](MemLevel level) {
    auto& file = hierarchy_.mshr(level);
    const auto i = index_of(level);
    switch (file.allocate(block, true, tick_, tick_)) {
    case MshrResult::allocated:
      ++demand_allocs_[i];
      // Blocking core: the entry retires when the access completes.
      if (file.deallocate(block))
        ++demand_deallocs_[i];
      break;
    case MshrResult::coalesced:
      break;
    case MshrResult::rejected:
      ++demand_rejects_[i];
      break;
    }
  });
}

bool Engine::mshr_balanced() const
{
  for (auto level : cache_levels) {
    const auto i = index_of(level);
    if (demand_allocs_[i] != demand_deallocs_[i])
      return false;
    if (hierarchy_.mshr(level).allocations() != hierarchy_.mshr(level).deallocations() + hierarchy_.mshr(level).occupancy())
      return false;
  }
  return true;
}

void Engine::record_useful(MemLevel level)
{
  const auto id = index_of(level);
  throttle_.record_useful(id);
  if (measuring())
    ++tally_.prefetch[id].useful;
}

void Engine::run_prefetchers(const TraceEvent& event, BlockAddr block, bool l1_trigger, bool l2_trigger, bool l3_trigger)
{
  auto pending = [&](BlockAddr b) { return inflight_.count(b.value) != 0; };

  auto l2_next = [&](BlockAddr trigger) {
    auto cands = l2_next_.propose(trigger, PrefetchTrigger::miss, [&](BlockAddr b) { return hierarchy_.contains(MemLevel::L2, b) || pending(b); });
    for (auto c : cands)
      try_prefetch(prefetcher_l2, c, MemLevel::L2);
  };

  if (config_.prefetch.l1_enable && l1_trigger) {
    auto cands = l1_next_.propose(block, PrefetchTrigger::miss, [&](BlockAddr b) { return hierarchy_.contains(MemLevel::L1, b) || pending(b); });
    for (auto c : cands) {
      const bool l2_miss = !hierarchy_.contains(MemLevel::L2, c);
      // An L1 prefetch that misses L2 is an L2 access too and trains its prefetcher.
      if (try_prefetch(prefetcher_l1, c, MemLevel::L1) && l2_miss && config_.prefetch.l2_enable)
        l2_next(c);
    }
  }
  if (config_.prefetch.l2_enable && l2_trigger)
    l2_next(block);
  if (config_.prefetch.l3_enable && l3_trigger && event.pc) {
    for (auto c : dcpt_.propose(*event.pc, block)) {
      if (pending(c) || hierarchy_.locate(c) != MemLevel::MEM)
        continue;
      try_prefetch(prefetcher_l3, c, MemLevel::L3);
    }
  }
}

bool Engine::try_prefetch(std::size_t id, BlockAddr candidate, MemLevel target)
{
  if (candidate.address() >= config_.physical_bytes)
    return false;

  auto log = [&](PrefetchVerdict v) {
    if (record_.prefetches)
      prefetch_log_.push_back({tick_, static_cast<std::uint8_t>(id), candidate, v});
  };

  if (!throttle_.enabled(id)) {
    if (measuring())
      ++tally_.prefetch[id].throttled;
    log(PrefetchVerdict::throttled);
    return false;
  }

  if (hierarchy_.mshr(target).allocate(candidate, false, id, tick_) != MshrResult::allocated) {
    if (measuring())
      ++tally_.prefetch[id].rejected;
    log(PrefetchVerdict::rejected);
    return false;
  }
  ++prefetch_allocs_[index_of(target)];

  const auto latency = prefetch_cost(target, hierarchy_.locate(candidate), false);
  const auto cpa = config_.prefetch.cycles_per_access;
  const auto ticks = std::max<std::uint64_t>(1, (latency + cpa - 1) / cpa);
  const auto seq = prefetch_seq_++;
  inflight_.emplace(candidate.value, InFlight{candidate, target, id, tick_, tick_ + ticks, latency, seq});
  due_.push({tick_ + ticks, seq, candidate.value});

  throttle_.record_issue(id);
  if (measuring())
    ++tally_.prefetch[id].issued;
  log(PrefetchVerdict::issued);
  return true;
}

std::uint64_t Engine::prefetch_cost(MemLevel target, MemLevel source, bool charge)
{
  std::uint64_t cycles = 0;
  for (auto level = next_level(target); !deeper(level, source); level = next_level(level)) {
    cycles += latency_.bus_hop;
    const bool at_source = level == source;
    switch (level) {
    case MemLevel::L2:
      cycles += latency_.l2_hit;
      if (charge)
        count(EnergyEvent::l2_lookup);
      break;
    case MemLevel::L3:
      cycles += latency_.l3_tag + (at_source ? latency_.l3_data : 0);
      if (charge) {
        count(EnergyEvent::l3_tag);
        count(EnergyEvent::dir);
        if (at_source)
          count(EnergyEvent::l3_data);
      }
      break;
    case MemLevel::MEM:
      cycles += latency_.mem_fixed;
      if (charge)
        count(EnergyEvent::mem_read);
      break;
    case MemLevel::L1:
      break;
    }
    if (level == MemLevel::MEM)
      break;
  }
  return cycles;
}

void Engine::land_due()
{
  while (!due_.empty() && due_.top()[0] <= tick_) {
    auto top = due_.top();
    due_.pop();
    auto it = inflight_.find(top[2]);
    if (it == inflight_.end() || it->second.seq != top[1])
      continue;
    auto p = it->second;
    inflight_.erase(it);
    land(p);
  }
}

std::uint64_t Engine::land_now(BlockAddr block)
{
  auto it = inflight_.find(block.value);
  auto p = it->second;
  inflight_.erase(it);
  const auto elapsed = (tick_ - p.issued_at) * config_.prefetch.cycles_per_access;
  if (measuring())
    ++tally_.prefetch[p.prefetcher].late;
  land(p);
  return p.latency > elapsed ? p.latency - elapsed : 0;
}

void Engine::land(const InFlight& p)
{
  hierarchy_.mshr(p.target).deallocate(p.block);

  // The block may have moved while the request was in flight.
  const auto source = hierarchy_.locate(p.block);
  if (!deeper(source, p.target)) {
    if (measuring())
      ++tally_.prefetch[p.prefetcher].redundant;
    return;
  }
  prefetch_cost(p.target, source, true);

  hierarchy_.clear_events();
  bool l2_filled = false;
  bool l3_filled = false;
  if (source == MemLevel::MEM) {
    hierarchy_.fill(MemLevel::L3, p.block, false, p.target == MemLevel::L3);
    l3_filled = true;
  }
  if (p.target != MemLevel::L3 && deeper(source, MemLevel::L2)) {
    hierarchy_.fill(MemLevel::L2, p.block, false, p.target == MemLevel::L2);
    l2_filled = true;
  }
  if (p.target == MemLevel::L1)
    hierarchy_.fill(MemLevel::L1, p.block, false, true);
  account_events();

  if (predictor_ && (l2_filled || l3_filled))
    predictor_->notify(LocMapEvent::prefetch_fill, l2_filled ? MemLevel::L2 : MemLevel::L3, p.block, cycle_);
}

void Engine::drain()
{
  while (!due_.empty()) {
    auto top = due_.top();
    due_.pop();
    auto it = inflight_.find(top[2]);
    if (it == inflight_.end() || it->second.seq != top[1])
      continue;
    auto p = it->second;
    inflight_.erase(it);
    land(p);
  }
}

void Engine::tally(const AccessOutcome& out, bool write)
{
  if (!measuring())
    return;
  auto& r = tally_;
  ++r.accesses;
  ++(write ? r.writes : r.reads);

  const bool l1_hit = out.served_by == MemLevel::L1 && !out.mshr_hit;
  if (l1_hit) {
    ++r.l1_hits;
  } else {
    ++r.l1_misses;
    if (out.mshr_hit) {
      ++r.l1_mshr_hits;
    } else if (out.served_by == MemLevel::L2) {
      ++r.l2_hits;
    } else {
      ++r.l2_misses;
      ++(out.served_by == MemLevel::L3 ? r.l3_hits : r.l3_misses);
    }
  }
  r.total_latency += out.latency;

  if (out.prediction) {
    ++r.predicted;
    ++r.categories[static_cast<std::size_t>(*out.category)];
    const auto ways = static_cast<std::size_t>(out.prediction->targets.size() - 1);
    ++r.target_ways[ways];
    if (out.prediction->source == PredictionSource::pld) {
      ++r.pld_target_ways[ways];
      ++r.pld_predictions;
      if (out.prediction->targets.contains(out.served_by))
        ++r.pld_correct;
    }
    if (out.recovered)
      ++r.recoveries;
  }

  const auto index = (tick_ - config_.run.warmup) / config_.run.window;
  if (r.windows.size() <= index)
    r.windows.resize(index + 1);
  auto& w = r.windows[index];
  ++w.accesses;
  if (!l1_hit) {
    ++w.l1_misses;
    if (!out.mshr_hit && out.served_by != MemLevel::L2) {
      ++w.l2_misses;
      if (out.served_by == MemLevel::MEM)
        ++w.l3_misses;
    }
  }
}

RunReport Engine::report() const
{
  RunReport r = tally_;
  r.mode = std::string(to_string(mode_));
  r.amat = r.accesses == 0 ? 0.0 : static_cast<double>(r.total_latency) / static_cast<double>(r.accesses);

  auto counters = energy_;
  if (predictor_) {
    const auto& now = predictor_->stats();
    const auto& then = predictor_at_warmup_;
    const bool started = predictor_snapshotted_;
    auto since = [&](std::uint64_t a, std::uint64_t b) { return started ? delta(a, b) : 0; };
    r.meta_accesses = since(now.meta_accesses, then.meta_accesses);
    r.meta_hits = since(now.meta_predict_hits, then.meta_predict_hits);
    r.meta_misses = since(now.meta_predict_misses, then.meta_predict_misses);
    counters[EnergyEvent::meta_access] = r.meta_accesses;
    counters[EnergyEvent::pld] = since(now.pld_predictions, then.pld_predictions) + since(now.pld_updates, then.pld_updates);
    counters[EnergyEvent::locmap_fill] = since(now.meta_fills, then.meta_fills);
    const auto probes = r.meta_hits + r.meta_misses;
    r.meta_hit_ratio = probes == 0 ? 0.0 : static_cast<double>(r.meta_hits) / static_cast<double>(probes);
  }
  r.pld_accuracy = r.pld_predictions == 0 ? 0.0 : static_cast<double>(r.pld_correct) / static_cast<double>(r.pld_predictions);

  r.energy = energy_breakdown(counters, config_.energy, tage_unit_);
  r.energy_total = energy_total(r.energy);

  constexpr std::array<const char*, 3> names{"L1", "L2", "L3"};
  for (auto level : cache_levels) {
    const auto i = index_of(level);
    const auto& file = hierarchy_.mshr(level);
    r.mshr.push_back({names[i], demand_allocs_[i], prefetch_allocs_[i], file.deallocations(), demand_rejects_[i], file.peak_occupancy()});
  }

  r.window_len = config_.run.window;
  r.effectiveness = effectiveness(r.l1_misses, r.l2_misses, r.l3_misses, config_.analysis);
  r.locmap_storage_bits = LocMapTable::storage_bits(config_.physical_bytes);
  r.locmap_overhead_ratio = static_cast<double>(r.locmap_storage_bits) / static_cast<double>(config_.physical_bytes * 8);

  r.config = config_.echo();
  r.notes = {
      {"energy_units", "relative per-access constants from the configuration; not CACTI-derived"},
      {"classification_thresholds", fmt::format("skip_friendly if x < {} and y < {}; sequential_friendly if x > {} and y > {}; heuristic defaults",
                                                config_.analysis.skip_x, config_.analysis.skip_y, config_.analysis.seq_x, config_.analysis.seq_y)},
      {"warmup_accesses", std::to_string(config_.run.warmup)},
      {"mshr_counts", "whole run, including warm-up"},
  };
  return r;
}

RunReport run(const std::vector<TraceEvent>& events, const SimConfig& config, EngineMode mode)
{
  Engine engine(config, mode);
  for (const auto& ev : events)
    engine.access(ev);
  engine.drain();
  return engine.report();
}

} // namespace levelsim
