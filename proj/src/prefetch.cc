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

#include "levelsim/prefetch.h"

#include <algorithm>
#include <stdexcept>

namespace levelsim
{
DcptPrefetcher::DcptPrefetcher(DcptConfig config) : config_(config), table_(config.entries)
{
  if (config.entries == 0 || config.deltas < 3 || config.degree == 0)
    throw std::invalid_argument("DCPT needs at least one entry, three deltas and degree >= 1");
}

std::vector<BlockAddr> DcptPrefetcher::propose(std::uint64_t pc, BlockAddr block)
{
  auto& e = table_[pc % table_.size()];
  if (!e.valid || e.pc != pc) {
    e = Entry{true, pc, block, {}, std::nullopt};
    e.delta_buffer.reserve(config_.deltas);
    return {};
  }

  const auto delta = static_cast<std::int64_t>(block.value - e.last_addr.value);
  if (delta == 0)
    return {};

  if (e.delta_buffer.size() == config_.deltas)
    e.delta_buffer.erase(e.delta_buffer.begin());
  e.delta_buffer.push_back(delta);
  e.last_addr = block;

  const auto& buf = e.delta_buffer;
  const auto n = buf.size();
  if (n < 3)
    return {};

  const auto d1 = buf[n - 2];
  const auto d2 = buf[n - 1];
  std::optional<std::size_t> match;
  for (std::size_t i = n - 2; i-- > 0;) {
    if (buf[i] == d1 && buf[i + 1] == d2) {
      match = i;
      break;
    }
  }
  if (!match)
    return {};

  // The deltas after the matched pair form one period of the pattern.
  const auto first = *match + 2;
  const auto period = n - first;
  std::vector<BlockAddr> candidates;
  candidates.reserve(config_.degree);
  auto addr = block;
  for (std::size_t k = 0; k < config_.degree; ++k) {
    addr = addr.offset(buf[first + (k % period)]);
    candidates.push_back(addr);
  }

  // Drop everything up to and including the last block already prefetched.
  if (e.last_prefetch) {
    auto it = std::find(candidates.begin(), candidates.end(), *e.last_prefetch);
    if (it != candidates.end())
      candidates.erase(candidates.begin(), std::next(it));
  }
  if (!candidates.empty())
    e.last_prefetch = candidates.back();
  return candidates;
}

PrefetchThrottle::PrefetchThrottle(ThrottleConfig config, std::size_t prefetchers) : config_(config), state_(prefetchers)
{
  if (config.epoch_len == 0 || config.sample_len > config.epoch_len)
    throw std::invalid_argument("throttle epoch must be positive and no shorter than the sample window");
}

void PrefetchThrottle::advance(std::uint64_t access_count)
{
  const auto epoch = access_count / config_.epoch_len;
  const auto pos = access_count % config_.epoch_len;
  if (!epoch_ || *epoch_ != epoch) {
    epoch_ = epoch;
    std::fill(state_.begin(), state_.end(), State{});
    evaluated_ = false;
  }

  in_sample_ = pos < config_.sample_len;
  if (!in_sample_ && !evaluated_) {
    for (auto& s : state_)
      s.enabled = s.issued == 0 || s.useful * 1'000'000 >= std::uint64_t{config_.accuracy_threshold_ppm} * s.issued;
    evaluated_ = true;
  }
}

void PrefetchThrottle::record_issue(std::size_t id)
{
  if (in_sample_)
    ++state_.at(id).issued;
}

void PrefetchThrottle::record_useful(std::size_t id)
{
  if (in_sample_)
    ++state_.at(id).useful;
}

} // namespace levelsim
