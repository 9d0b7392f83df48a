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

#ifndef LEVELSIM_PREFETCH_H
#define LEVELSIM_PREFETCH_H

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "levelsim/types.h"

namespace levelsim
{
enum class PrefetchTrigger : std::uint8_t { miss, tagged_first_hit };

// Tagged next-line prefetcher: fires on a demand miss or on the first demand
// hit to a line it brought in.
class NextLinePrefetcher
{
public:
  NextLinePrefetcher(MemLevel level, std::uint32_t degree) : level_(level), degree_(degree) {}

  MemLevel level() const { return level_; }
  std::uint32_t degree() const { return degree_; }

  // `already_there(b)` reports blocks present at the level or pending in its MSHRs.
  template <typename Pred>
  std::vector<BlockAddr> propose(BlockAddr block, PrefetchTrigger, Pred&& already_there) const
  {
    std::vector<BlockAddr> out;
    for (std::uint32_t d = 1; d <= degree_; ++d) {
      auto candidate = block.offset(d);
      if (!already_there(candidate))
        out.push_back(candidate);
    }
    return out;
  }

private:
  MemLevel level_;
  std::uint32_t degree_;
};

struct DcptConfig {
  std::uint32_t entries = 128;
  std::uint32_t deltas = 16;
  std::uint32_t degree = 2;
};

// Delta-correlating prediction table: per-PC history of block deltas; the
// most recent delta pair is matched against older history and the deltas
// that followed it are replayed.
class DcptPrefetcher
{
public:
  struct Entry {
    bool valid = false;
    std::uint64_t pc = 0;
    BlockAddr last_addr{};
    std::vector<std::int64_t> delta_buffer; // oldest first, at most `deltas` long
    std::optional<BlockAddr> last_prefetch;
  };

  explicit DcptPrefetcher(DcptConfig config = {});

  std::vector<BlockAddr> propose(std::uint64_t pc, BlockAddr block);

  const Entry& entry_for(std::uint64_t pc) const { return table_[pc % table_.size()]; }
  const DcptConfig& config() const { return config_; }

private:
  DcptConfig config_;
  std::vector<Entry> table_;
};

struct ThrottleConfig {
  std::uint64_t epoch_len = 10'000'000;
  std::uint64_t sample_len = 1'000'000;
  std::uint32_t accuracy_threshold_ppm = 400'000;
};

// Accuracy-epoch gating: every prefetcher runs during the sample window at
// the start of each epoch; at the sample boundary its accuracy decides
// whether it stays on for the rest of the epoch.
class PrefetchThrottle
{
public:
  PrefetchThrottle(ThrottleConfig config, std::size_t prefetchers);

  // Moves the throttle to `access_count` (monotonic). Resets counters at
  // epoch boundaries and evaluates accuracy at the sample boundary.
  void advance(std::uint64_t access_count);
  bool enabled(std::size_t id) const { return in_sample_ || state_.at(id).enabled; }

  bool gate(std::size_t id, std::uint64_t access_count)
  {
    advance(access_count);
    return enabled(id);
  }

  void record_issue(std::size_t id);
  void record_useful(std::size_t id);

  bool sampling() const { return in_sample_; }
  std::uint64_t issued(std::size_t id) const { return state_.at(id).issued; }
  std::uint64_t useful(std::size_t id) const { return state_.at(id).useful; }

private:
  struct State {
    std::uint64_t issued = 0;
    std::uint64_t useful = 0;
    bool enabled = true;
  };

  ThrottleConfig config_;
  std::vector<State> state_;
  std::optional<std::uint64_t> epoch_;
  bool in_sample_ = true;
  bool evaluated_ = false;
};

} // namespace levelsim

#endif
