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

#ifndef LEVELSIM_ENGINE_H
#define LEVELSIM_ENGINE_H

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "levelsim/config.h"
#include "levelsim/hierarchy.h"
#include "levelsim/latency.h"
#include "levelsim/level_predictor.h"
#include "levelsim/metrics.h"
#include "levelsim/prefetch.h"
#include "levelsim/tage.h"
#include "levelsim/trace.h"

namespace levelsim
{
struct AccessOutcome {
  MemLevel served_by = MemLevel::L1;
  std::uint64_t latency = 0;
  std::optional<Prediction> prediction;
  std::optional<PredictionCategory> category;
  bool recovered = false;
  bool mshr_hit = false; // L1 miss merged into an in-flight L1 prefetch
};

inline constexpr std::size_t prefetcher_l1 = 0;
inline constexpr std::size_t prefetcher_l2 = 1;
inline constexpr std::size_t prefetcher_l3 = 2;

enum class PrefetchVerdict : std::uint8_t { issued, rejected, throttled };

struct PrefetchDecision {
  std::uint64_t tick = 0;
  std::uint8_t prefetcher = 0;
  BlockAddr block{};
  PrefetchVerdict verdict = PrefetchVerdict::issued;
  friend bool operator==(const PrefetchDecision&, const PrefetchDecision&) = default;
};

struct RecordOptions {
  bool outcomes = false;
  bool prefetches = false;
  bool audit_each_access = false; // full hierarchy audit after every access (slow)
};

class Engine
{
public:
  Engine(const SimConfig& config, EngineMode mode, RecordOptions record = {});

  AccessOutcome access(const TraceEvent& event);

  // Lands every in-flight prefetch, in completion order.
  void drain();

  RunReport report() const;

  EngineMode mode() const { return mode_; }
  std::uint64_t tick() const { return tick_; }
  const Hierarchy& hierarchy() const { return hierarchy_; }
  const LevelPredictor* predictor() const { return predictor_.get(); }
  const TagePredictor* tage() const { return tage_.get(); }
  const PrefetchThrottle& throttle() const { return throttle_; }
  const LatencyModel& latency() const { return latency_; }

  const std::vector<AccessOutcome>& outcomes() const { return outcomes_; }
  const std::vector<PrefetchDecision>& prefetch_log() const { return prefetch_log_; }
  // Violations found by per-access audits (RecordOptions::audit_each_access).
  const std::vector<std::string>& audit_failures() const { return audit_failures_; }

  // Demand MSHR bookkeeping: every allocation was matched by a deallocation.
  bool mshr_balanced() const;
  std::size_t prefetches_in_flight() const { return inflight_.size(); }

private:
  struct InFlight {
    BlockAddr block;
    MemLevel target;
    std::size_t prefetcher;
    std::uint64_t issued_at;
    std::uint64_t complete_at;
    std::uint64_t latency;
    std::uint64_t seq;
  };

  // {complete_at, seq, block}; stale entries are skipped when popped.
  using DueEntry = std::array<std::uint64_t, 3>;

  bool measuring() const { return tick_ >= config_.run.warmup; }
  void count(EnergyEvent e, std::uint64_t n = 1)
  {
    if (measuring())
      energy_[e] += n;
  }

  void land_due();
  // Lands the in-flight prefetch for `block` now; returns the cycles the
  // demand still has to wait for it.
  std::uint64_t land_now(BlockAddr block);
  void land(const InFlight& p);

  Prediction predict(BlockAddr block, MemLevel actual);
  void train_predictor(BlockAddr block, MemLevel actual);
  void commit_miss(BlockAddr block, MemLevel actual, bool write);
  void account_events();
  void demand_mshrs(BlockAddr block, LevelSet levels);

  void record_useful(MemLevel level);
  void run_prefetchers(const TraceEvent& event, BlockAddr block, bool l1_trigger, bool l2_trigger, bool l3_trigger);
  bool try_prefetch(std::size_t id, BlockAddr candidate, MemLevel target);
  std::uint64_t prefetch_cost(MemLevel target, MemLevel source, bool charge);

  void tally(const AccessOutcome& outcome, bool write);

  SimConfig config_;
  EngineMode mode_;
  RecordOptions record_;
  LatencyModel latency_;
  Hierarchy hierarchy_;
  std::unique_ptr<LevelPredictor> predictor_;
  std::unique_ptr<TagePredictor> tage_;
  double tage_unit_ = 0.0;

  NextLinePrefetcher l1_next_;
  NextLinePrefetcher l2_next_;
  DcptPrefetcher dcpt_;
  PrefetchThrottle throttle_;

  std::unordered_map<std::uint64_t, InFlight> inflight_;
  std::priority_queue<DueEntry, std::vector<DueEntry>, std::greater<>> due_;
  std::uint64_t prefetch_seq_ = 0;

  std::uint64_t tick_ = 0;
  std::uint64_t cycle_ = 0;
  LevelPredictorStats predictor_at_warmup_{};
  bool predictor_snapshotted_ = false;

  RunReport tally_;
  EnergyCounters energy_;
  std::array<std::uint64_t, 3> demand_allocs_{};
  std::array<std::uint64_t, 3> demand_deallocs_{};
  std::array<std::uint64_t, 3> prefetch_allocs_{};
  std::array<std::uint64_t, 3> demand_rejects_{};
  std::vector<AccessOutcome> outcomes_;
  std::vector<PrefetchDecision> prefetch_log_;
  std::vector<std::string> audit_failures_;
};

// Replays `events` through one engine and returns its report. The engine is
// drained before reporting.
RunReport run(const std::vector<TraceEvent>& events, const SimConfig& config, EngineMode mode);

} // namespace levelsim

#endif
