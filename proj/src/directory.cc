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

#include "levelsim/directory.h"

namespace levelsim
{
void Directory::on_fill(MemLevel level, BlockAddr block, bool dirty)
{
  auto& entry = entries_[block.value];
  entry.presence.insert(level);
  if (dirty)
    entry.dirty.insert(level);
}

void Directory::on_evict(MemLevel level, BlockAddr block)
{
  auto it = entries_.find(block.value);
  if (it == entries_.end())
    return;
  it->second.presence.erase(level);
  it->second.dirty.erase(level);
  if (it->second.presence.empty())
    entries_.erase(it);
}

void Directory::on_dirty(MemLevel level, BlockAddr block)
{
  auto it = entries_.find(block.value);
  if (it != entries_.end() && it->second.presence.contains(level))
    it->second.dirty.insert(level);
}

DirectoryResult Directory::query(BlockAddr block) const
{
  auto it = entries_.find(block.value);
  if (it == entries_.end())
    return {};
  return {it->second.presence, it->second.dirty, !it->second.presence.empty()};
}

} // namespace levelsim
