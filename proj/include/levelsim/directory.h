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

#ifndef LEVELSIM_DIRECTORY_H
#define LEVELSIM_DIRECTORY_H

#include <cstdint>
#include <unordered_map>

#include "levelsim/types.h"

namespace levelsim
{
struct DirectoryResult {
  LevelSet levels;
  LevelSet dirty;
  bool on_chip = false;
};

// Precise block-location tracker collocated with the LLC tags. Only the
// Hierarchy mutates it, through fill/evict/dirty notifications.
class Directory
{
public:
  void on_fill(MemLevel level, BlockAddr block, bool dirty);
  void on_evict(MemLevel level, BlockAddr block);
  void on_dirty(MemLevel level, BlockAddr block);

  DirectoryResult query(BlockAddr block) const;

  std::size_t tracked_blocks() const { return entries_.size(); }

  template <typename F>
  void for_each(F&& f) const
  {
    for (const auto& [block, entry] : entries_)
      f(BlockAddr{block}, entry.presence, entry.dirty);
  }

private:
  struct Entry {
    LevelSet presence;
    LevelSet dirty;
  };
  std::unordered_map<std::uint64_t, Entry> entries_;
};

} // namespace levelsim

#endif
