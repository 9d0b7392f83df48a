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

#include "levelsim/config.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>

#include <fmt/core.h>

namespace levelsim
{
std::string_view to_string(EngineMode mode)
{
  switch (mode) {
  case EngineMode::baseline:
    return "baseline";
  case EngineMode::locmap:
    return "locmap";
  case EngineMode::tage2k:
    return "tage2k";
  case EngineMode::tage8k:
    return "tage8k";
  case EngineMode::oracle:
    return "oracle";
  }
  return "?";
}

std::optional<EngineMode> parse_mode(std::string_view name)
{
  for (auto m : all_modes)
    if (to_string(m) == name)
      return m;
  return std::nullopt;
}

namespace
{
std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v)
{
  try {
    return parse_size(v);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", key, e.what()));
  }
}

template <typename T>
T narrow(std::string_view key, std::uint64_t v)
{
  if (v > std::numeric_limits<T>::max())
    throw ConfigError(fmt::format("{}: value {} out of range", key, v));
  return static_cast<T>(v);
}

bool parse_bool(std::string_view key, std::string_view v)
{
  auto s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on")
    return true;
  if (s == "false" || s == "0" || s == "no" || s == "off")
    return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, v));
}

double parse_double(std::string_view key, std::string_view v)
{
  std::string s(v);
  char* end = nullptr;
  errno = 0;
  double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno != 0 || !std::isfinite(d))
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
  return d;
}

std::string format_double(double d) { return fmt::format("{}", d); }

struct Field {
  std::string name;
  std::function<std::string(const SimConfig&)> get;
  std::function<void(SimConfig&, std::string_view)> set;
};

template <typename A>
Field size_field(std::string name, A access)
{
  return {name, [access](const SimConfig& c) { return format_size(access(c)); },
          [access, name](SimConfig& c, std::string_view v) { access(c) = parse_uint(name, v); }};
}

template <typename T, typename A>
Field uint_field(std::string name, A access)
{
  return {name, [access](const SimConfig& c) { return std::to_string(access(c)); },
          [access, name](SimConfig& c, std::string_view v) { access(c) = narrow<T>(name, parse_uint(name, v)); }};
}

template <typename A>
Field bool_field(std::string name, A access)
{
  return {name, [access](const SimConfig& c) { return std::string(access(c) ? "true" : "false"); },
          [access, name](SimConfig& c, std::string_view v) { access(c) = parse_bool(name, v); }};
}

template <typename A>
Field double_field(std::string name, A access)
{
  return {name, [access](const SimConfig& c) { return format_double(access(c)); },
          [access, name](SimConfig& c, std::string_view v) { access(c) = parse_double(name, v); }};
}

template <typename A>
Field string_field(std::string name, A access)
{
  return {name, [access](const SimConfig& c) { return access(c); }, [access](SimConfig& c, std::string_view v) { access(c) = std::string(v); }};
}

std::vector<Field> build_registry()
{
  std::vector<Field> f;
  f.push_back(size_field("memory.physical_bytes", [](auto& c) -> auto& { return c.physical_bytes; }));

  constexpr std::array<const char*, 3> names{"l1", "l2", "l3"};
  for (std::size_t i = 0; i < 3; ++i) {
    std::string p = names[i];
    f.push_back(size_field(p + ".capacity", [i](auto& c) -> auto& { return c.hierarchy.caches[i].capacity_bytes; }));
    f.push_back(uint_field<std::uint32_t>(p + ".assoc", [i](auto& c) -> auto& { return c.hierarchy.caches[i].associativity; }));
    f.push_back(uint_field<std::uint32_t>(p + ".block", [i](auto& c) -> auto& { return c.hierarchy.caches[i].block_bytes; }));
    f.push_back(uint_field<std::uint32_t>(p + ".tag_latency", [i](auto& c) -> auto& { return c.hierarchy.caches[i].tag_latency; }));
    f.push_back(uint_field<std::uint32_t>(p + ".data_latency", [i](auto& c) -> auto& { return c.hierarchy.caches[i].data_latency; }));
    f.push_back(bool_field(p + ".sequential", [i](auto& c) -> auto& { return c.hierarchy.caches[i].sequential_tag_data; }));
    f.push_back(uint_field<std::uint32_t>(p + ".ports", [i](auto& c) -> auto& { return c.hierarchy.caches[i].ports; }));
    f.push_back(uint_field<std::uint32_t>(p + ".mshr", [i](auto& c) -> auto& { return c.hierarchy.caches[i].mshr_entries; }));
    f.push_back(bool_field(p + ".inclusive", [i](auto& c) -> auto& { return c.hierarchy.caches[i].inclusive_of_upper; }));
  }

  f.push_back(uint_field<std::uint32_t>("latency.mem_fixed", [](auto& c) -> auto& { return c.latency.mem_fixed; }));
  f.push_back(uint_field<std::uint32_t>("latency.predictor", [](auto& c) -> auto& { return c.latency.predictor; }));
  f.push_back(uint_field<std::uint32_t>("latency.bus_hop", [](auto& c) -> auto& { return c.latency.bus_hop; }));
  f.push_back({"latency.metadata_fill",
               [](const SimConfig& c) { return c.latency.metadata_fill ? std::to_string(*c.latency.metadata_fill) : std::string("auto"); },
               [](SimConfig& c, std::string_view v) {
                 if (lower(v) == "auto")
                   c.latency.metadata_fill.reset();
                 else
                   c.latency.metadata_fill = parse_uint("latency.metadata_fill", v);
               }});
  f.push_back(bool_field("latency.serial_mem_launch", [](auto& c) -> auto& { return c.latency.serial_mem_launch; }));

  for (std::size_t i = 0; i < 3; ++i) {
    std::string p = std::string("energy.") + names[i];
    f.push_back(double_field(p + "_tag", [i](auto& c) -> auto& { return c.energy.tag[i]; }));
    f.push_back(double_field(p + "_data", [i](auto& c) -> auto& { return c.energy.data[i]; }));
  }
  f.push_back(double_field("energy.dir", [](auto& c) -> auto& { return c.energy.dir; }));
  f.push_back(double_field("energy.meta_access", [](auto& c) -> auto& { return c.energy.meta_access; }));
  f.push_back(double_field("energy.pld", [](auto& c) -> auto& { return c.energy.pld; }));
  f.push_back(double_field("energy.locmap_fill", [](auto& c) -> auto& { return c.energy.locmap_fill; }));
  f.push_back(double_field("energy.mem_access", [](auto& c) -> auto& { return c.energy.mem_access; }));
  f.push_back(double_field("energy.tage_2k", [](auto& c) -> auto& { return c.energy.tage_2k; }));
  f.push_back(double_field("energy.tage_8k", [](auto& c) -> auto& { return c.energy.tage_8k; }));

  f.push_back(size_field("predictor.meta_capacity", [](auto& c) -> auto& { return c.predictor.metadata.capacity_bytes; }));
  f.push_back(uint_field<std::uint32_t>("predictor.meta_assoc", [](auto& c) -> auto& { return c.predictor.metadata.associativity; }));
  f.push_back(uint_field<std::uint32_t>("predictor.meta_latency", [](auto& c) -> auto& { return c.predictor.metadata.access_latency; }));
  f.push_back(double_field("predictor.theta_single", [](auto& c) -> auto& { return c.predictor.theta_single; }));
  f.push_back(double_field("predictor.theta_double", [](auto& c) -> auto& { return c.predictor.theta_double; }));
  f.push_back(uint_field<std::uint64_t>("predictor.locmap_base", [](auto& c) -> auto& { return c.predictor.locmap_base; }));
  f.push_back({"predictor.prefetch_fill_updates",
               [](const SimConfig& c) { return std::string(c.predictor.prefetch_fills == PrefetchFillPolicy::always ? "always" : "metadata_hit"); },
               [](SimConfig& c, std::string_view v) {
                 if (v == "always")
                   c.predictor.prefetch_fills = PrefetchFillPolicy::always;
                 else if (v == "metadata_hit")
                   c.predictor.prefetch_fills = PrefetchFillPolicy::metadata_hit;
                 else
                   throw ConfigError(fmt::format("predictor.prefetch_fill_updates: expected metadata_hit or always, got '{}'", v));
               }});

  f.push_back(bool_field("prefetch.l1_enable", [](auto& c) -> auto& { return c.prefetch.l1_enable; }));
  f.push_back(uint_field<std::uint32_t>("prefetch.l1_degree", [](auto& c) -> auto& { return c.prefetch.l1_degree; }));
  f.push_back(bool_field("prefetch.l2_enable", [](auto& c) -> auto& { return c.prefetch.l2_enable; }));
  f.push_back(uint_field<std::uint32_t>("prefetch.l2_degree", [](auto& c) -> auto& { return c.prefetch.l2_degree; }));
  f.push_back(bool_field("prefetch.l3_enable", [](auto& c) -> auto& { return c.prefetch.l3_enable; }));
  f.push_back(uint_field<std::uint32_t>("prefetch.l3_degree", [](auto& c) -> auto& { return c.prefetch.dcpt.degree; }));
  f.push_back(uint_field<std::uint32_t>("prefetch.dcpt_entries", [](auto& c) -> auto& { return c.prefetch.dcpt.entries; }));
  f.push_back(uint_field<std::uint32_t>("prefetch.dcpt_deltas", [](auto& c) -> auto& { return c.prefetch.dcpt.deltas; }));
  f.push_back(uint_field<std::uint64_t>("prefetch.epoch", [](auto& c) -> auto& { return c.prefetch.epoch; }));
  f.push_back(uint_field<std::uint64_t>("prefetch.sample", [](auto& c) -> auto& { return c.prefetch.sample; }));
  f.push_back(double_field("prefetch.accuracy_threshold", [](auto& c) -> auto& { return c.prefetch.accuracy_threshold; }));
  f.push_back(double_field("prefetch.mshr_reserve", [](auto& c) -> auto& { return c.hierarchy.mshr_demand_reserve; }));
  f.push_back(uint_field<std::uint32_t>("prefetch.cycles_per_access", [](auto& c) -> auto& { return c.prefetch.cycles_per_access; }));

  f.push_back({"run.modes",
               [](const SimConfig& c) {
                 std::string out;
                 for (auto m : c.run.modes)
                   out += (out.empty() ? "" : ",") + std::string(to_string(m));
                 return out;
               },
               [](SimConfig& c, std::string_view v) {
                 std::vector<EngineMode> modes;
                 while (!v.empty()) {
                   auto comma = v.find(',');
                   auto name = trim(v.substr(0, comma));
                   v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
                   auto m = parse_mode(name);
                   if (!m)
                     throw ConfigError(fmt::format("run.modes: unknown mode '{}'", name));
                   modes.push_back(*m);
                 }
                 c.run.modes = std::move(modes);
               }});
  f.push_back(uint_field<std::uint64_t>("run.window", [](auto& c) -> auto& { return c.run.window; }));
  f.push_back(uint_field<std::uint64_t>("run.warmup", [](auto& c) -> auto& { return c.run.warmup; }));
  f.push_back(string_field("run.out", [](auto& c) -> auto& { return c.run.out; }));

  f.push_back(string_field("trace.path", [](auto& c) -> auto& { return c.trace_path; }));
  f.push_back({"trace.kind", [](const SimConfig& c) { return to_string(c.synthetic.kind); },
               [](SimConfig& c, std::string_view v) {
                 auto k = parse_trace_kind(v);
                 if (!k)
                   throw ConfigError(fmt::format("trace.kind: unknown kind '{}'", v));
                 c.synthetic.kind = *k;
               }});
  f.push_back(size_field("trace.footprint", [](auto& c) -> auto& { return c.synthetic.footprint_bytes; }));
  f.push_back(uint_field<std::uint64_t>("trace.count", [](auto& c) -> auto& { return c.synthetic.count; }));
  f.push_back(uint_field<std::uint64_t>("trace.seed", [](auto& c) -> auto& { return c.synthetic.seed; }));
  f.push_back(size_field("trace.stride", [](auto& c) -> auto& { return c.synthetic.stride_bytes; }));
  f.push_back(double_field("trace.write_ratio", [](auto& c) -> auto& { return c.synthetic.write_ratio; }));
  f.push_back({"trace.phases", [](const SimConfig& c) { return format_phases(c.synthetic.phases); },
               [](SimConfig& c, std::string_view v) {
                 try {
                   c.synthetic.phases = parse_phases(v);
                 } catch (const std::invalid_argument& e) {
                   throw ConfigError(fmt::format("trace.phases: {}", e.what()));
                 }
               }});

  f.push_back(double_field("analysis.skip_x", [](auto& c) -> auto& { return c.analysis.skip_x; }));
  f.push_back(double_field("analysis.skip_y", [](auto& c) -> auto& { return c.analysis.skip_y; }));
  f.push_back(double_field("analysis.seq_x", [](auto& c) -> auto& { return c.analysis.seq_x; }));
  f.push_back(double_field("analysis.seq_y", [](auto& c) -> auto& { return c.analysis.seq_y; }));
  return f;
}

const std::vector<Field>& registry()
{
  static const std::vector<Field> fields = build_registry();
  return fields;
}

const Field& field(std::string_view key)
{
  const auto& fields = registry();
  auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.name == key; });
  if (it == fields.end())
    throw ConfigError(fmt::format("unknown configuration key '{}'", key));
  return *it;
}

} // namespace

std::uint64_t parse_size(std::string_view text)
{
  text = trim(text);
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + 2, text.data() + text.size(), v, 16);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw std::invalid_argument(fmt::format("bad hexadecimal value '{}'", text));
    return v;
  }
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr == text.data())
    throw std::invalid_argument(fmt::format("bad integer '{}'", text));
  auto suffix = lower(trim(std::string_view(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr))));
  unsigned shift = 0;
  if (suffix.empty() || suffix == "b")
    shift = 0;
  else if (suffix == "k" || suffix == "kb" || suffix == "kib")
    shift = 10;
  else if (suffix == "m" || suffix == "mb" || suffix == "mib")
    shift = 20;
  else if (suffix == "g" || suffix == "gb" || suffix == "gib")
    shift = 30;
  else
    throw std::invalid_argument(fmt::format("unknown size suffix in '{}'", text));
  if (shift > 0 && v > (std::numeric_limits<std::uint64_t>::max() >> shift))
    throw std::invalid_argument(fmt::format("size '{}' overflows", text));
  return v << shift;
}

std::string format_size(std::uint64_t bytes)
{
  if (bytes != 0 && bytes % (1ull << 30) == 0)
    return fmt::format("{}GiB", bytes >> 30);
  if (bytes != 0 && bytes % (1ull << 20) == 0)
    return fmt::format("{}MiB", bytes >> 20);
  if (bytes != 0 && bytes % (1ull << 10) == 0)
    return fmt::format("{}KiB", bytes >> 10);
  return std::to_string(bytes);
}

ThrottleConfig PrefetchConfig::throttle() const
{
  return {epoch, sample, static_cast<std::uint32_t>(std::llround(accuracy_threshold * 1e6))};
}

void SimConfig::set(std::string_view key, std::string_view value) { field(key).set(*this, trim(value)); }

std::string SimConfig::get(std::string_view key) const { return field(key).get(*this); }

std::vector<std::pair<std::string, std::string>> SimConfig::echo() const
{
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : registry())
    out.emplace_back(f.name, f.get(*this));
  return out;
}

std::vector<std::string> SimConfig::keys()
{
  std::vector<std::string> out;
  for (const auto& f : registry())
    out.push_back(f.name);
  return out;
}

void SimConfig::validate() const
{
  auto check = [](bool ok, const std::string& why) {
    if (!ok)
      throw ConfigError(why);
  };

  check(physical_bytes >= block_bytes && physical_bytes % block_bytes == 0, "memory.physical_bytes must be a positive multiple of 64");
  constexpr std::array<const char*, 3> names{"l1", "l2", "l3"};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& cc = hierarchy.caches[i];
    try {
      cc.validate(names[i]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    check(cc.block_bytes == block_bytes, fmt::format("{}.block must be 64", names[i]));
    check(cc.mshr_entries > 0, fmt::format("{}.mshr must be at least 1", names[i]));
  }
  check(!hierarchy.at(MemLevel::L1).inclusive_of_upper, "l1.inclusive has no upper level to include");
  check(hierarchy.mshr_demand_reserve >= 0.0 && hierarchy.mshr_demand_reserve < 1.0, "prefetch.mshr_reserve must lie in [0, 1)");

  const auto& meta = predictor.metadata;
  check(meta.associativity > 0 && meta.capacity_bytes % (std::uint64_t{meta.associativity} * 64) == 0 && meta.capacity_bytes > 0,
        "predictor.meta_capacity must be a positive multiple of meta_assoc x 64");
  check(std::has_single_bit(meta.capacity_bytes / (std::uint64_t{std::max(meta.associativity, 1u)} * 64)), "metadata cache set count must be a power of two");
  check(predictor.theta_single >= 0.0 && predictor.theta_single <= 1.0, "predictor.theta_single must lie in [0, 1]");
  check(predictor.theta_double >= 0.0 && predictor.theta_double <= 1.0, "predictor.theta_double must lie in [0, 1]");

  check(prefetch.l1_degree > 0 && prefetch.l2_degree > 0 && prefetch.dcpt.degree > 0, "prefetch degrees must be at least 1");
  check(prefetch.dcpt.entries > 0 && prefetch.dcpt.deltas >= 3, "prefetch.dcpt_entries >= 1 and prefetch.dcpt_deltas >= 3 required");
  check(prefetch.epoch > 0 && prefetch.sample <= prefetch.epoch, "prefetch.sample must not exceed a positive prefetch.epoch");
  check(prefetch.accuracy_threshold >= 0.0 && prefetch.accuracy_threshold <= 1.0, "prefetch.accuracy_threshold must lie in [0, 1]");
  check(prefetch.cycles_per_access > 0, "prefetch.cycles_per_access must be at least 1");

  check(!run.modes.empty(), "run.modes must name at least one mode");
  check(run.window > 0, "run.window must be at least 1");

  if (trace_path.empty()) {
    try {
      synthetic.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("trace: {}", e.what()));
    }
    check(synthetic.footprint_bytes <= physical_bytes, "trace.footprint exceeds memory.physical_bytes");
  }
}

LatencyModel SimConfig::latency_model() const
{
  return LatencyModel::from(hierarchy, latency.mem_fixed, latency.predictor, latency.bus_hop, latency.serial_mem_launch);
}

LevelPredictorConfig SimConfig::predictor_config() const
{
  LevelPredictorConfig cfg;
  cfg.metadata = predictor.metadata;
  cfg.thresholds = PopularityThresholds::from_fractions(predictor.theta_single, predictor.theta_double);
  cfg.locmap_base = predictor.locmap_base;
  cfg.metadata_fill_latency = latency.metadata_fill.value_or(latency_model().full_miss());
  cfg.prefetch_fills = predictor.prefetch_fills;
  return cfg;
}

TageConfig SimConfig::tage_config(EngineMode mode) const
{
  TageConfig cfg;
  cfg.budget_bytes = mode == EngineMode::tage8k ? 8192 : 2048;
  cfg.thresholds = PopularityThresholds::from_fractions(predictor.theta_single, predictor.theta_double);
  return cfg;
}

double SimConfig::tage_energy(EngineMode mode) const { return mode == EngineMode::tage8k ? energy.tage_8k : energy.tage_2k; }

SimConfig parse_config(std::istream& in, std::string_view origin)
{
  SimConfig cfg;
  std::string raw;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line{raw};
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(fmt::format("{}:{}: unterminated section header", origin, lineno));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", origin, lineno));
    auto key = std::string(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (!section.empty())
      key = section + "." + key;
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", origin, lineno, e.what()));
    }
  }
  return cfg;
}

SimConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error(fmt::format("cannot open config '{}'", path));
  return parse_config(in, path);
}

void apply_override(SimConfig& config, std::string_view assignment)
{
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(fmt::format("override '{}' is not key=value", assignment));
  config.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

} // namespace levelsim
