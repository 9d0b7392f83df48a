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

#include "levelsim/cli.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "levelsim/config.h"
#include "levelsim/engine.h"
#include "levelsim/report_io.h"
#include "levelsim/trace.h"

namespace levelsim
{
namespace
{
namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush())
    throw IoError(fmt::format("cannot write '{}'", path.string()));
}

SimConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides)
{
  SimConfig cfg = path.empty() ? SimConfig{} : load_config(path);
  for (const auto& o : overrides)
    apply_override(cfg, o);
  return cfg;
}

std::vector<TraceEvent> trace_for(const SimConfig& cfg)
{
  if (!cfg.trace_path.empty())
    return load_trace(cfg.trace_path, cfg.physical_bytes);
  return generate(cfg.synthetic);
}

std::vector<RunReport> run_modes(const std::vector<TraceEvent>& events, const SimConfig& cfg)
{
  const auto& modes = cfg.run.modes;
  std::vector<RunReport> reports(modes.size());
  std::vector<std::exception_ptr> errors(modes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < modes.size(); i = next++) {
      try {
        reports[i] = run(events, cfg, modes[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto n = worker_count(modes.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  return reports;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& modes, const std::vector<std::string>& overrides,
            const std::string& trace, const std::string& out_dir, std::ostream& out)
{
  auto cfg = resolve_config(config_path, overrides);
  if (!modes.empty()) {
    cfg.run.modes.clear();
    for (const auto& m : modes) {
      auto mode = parse_mode(m);
      if (!mode)
        throw ConfigError(fmt::format("unknown mode '{}'", m));
      cfg.run.modes.push_back(*mode);
    }
  }
  if (!trace.empty())
    cfg.trace_path = trace;
  if (!out_dir.empty())
    cfg.run.out = out_dir;
  cfg.validate();

  auto events = trace_for(cfg);
  auto reports = run_modes(events, cfg);

  fs::path dir(cfg.run.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  for (const auto& r : reports) {
    write_file(dir / fmt::format("report_{}.json", r.mode), emit_json(r));
    write_file(dir / fmt::format("report_{}.csv", r.mode), emit_csv(r));
    write_file(dir / fmt::format("windows_{}.csv", r.mode), emit_windows_csv(r));
  }
  write_file(dir / "summary.json", emit_summary_json(reports));

  out << fmt::format("{:<10} {:>10} {:>10} {:>14} {:>9}\n", "mode", "accesses", "amat", "energy", "accuracy");
  for (const auto& r : reports)
    out << fmt::format("{:<10} {:>10} {:>10.2f} {:>14.1f} {:>9.3f}\n", r.mode, r.accesses, r.amat, r.energy_total, r.accuracy());
  out << fmt::format("reports written to {}\n", dir.string());
  return exit_ok;
}

struct GenOptions {
  std::string kind = "stream";
  std::string footprint = "64MiB";
  std::uint64_t count = 100'000;
  std::uint64_t seed = 1;
  std::string stride = "256";
  double write_ratio = 0.0;
  std::string phases;
  std::string out;
  bool binary = false;
};

int cmd_gen(const GenOptions& o, std::ostream& out)
{
  SyntheticSpec spec;
  auto kind = parse_trace_kind(o.kind);
  if (!kind)
    throw ConfigError(fmt::format("unknown trace kind '{}'", o.kind));
  spec.kind = *kind;
  try {
    spec.footprint_bytes = parse_size(o.footprint);
    spec.stride_bytes = parse_size(o.stride);
    if (!o.phases.empty())
      spec.phases = parse_phases(o.phases);
    spec.count = o.count;
    spec.seed = o.seed;
    spec.write_ratio = o.write_ratio;
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto events = generate(spec);
  std::ostringstream buf;
  if (o.binary)
    write_trace_binary(buf, events);
  else
    write_trace_text(buf, events);
  if (o.out == "-")
    out << buf.str();
  else
    write_file(o.out, buf.str());
  return exit_ok;
}

std::string effectiveness_csv(const RunReport& r)
{
  return fmt::format("metric,value\naccesses,{}\nl1_misses,{}\nl2_misses,{}\nl3_misses,{}\nx,{}\ny,{}\nclass,{}\n", r.accesses, r.l1_misses,
                     r.l2_misses, r.l3_misses, std::isinf(r.effectiveness.x) ? "inf" : fmt::format("{}", r.effectiveness.x),
                     std::isinf(r.effectiveness.y) ? "inf" : fmt::format("{}", r.effectiveness.y), to_string(r.effectiveness.cls));
}

int cmd_analyze(const std::string& input, const std::string& config_path, const std::vector<std::string>& overrides, const std::string& out_dir,
                std::ostream& out, std::ostream& err)
{
  RunReport report;
  std::ifstream probe(input, std::ios::binary);
  if (input != "-" && !probe)
    throw TraceError(TraceError::Kind::io, 0, fmt::format("cannot open '{}'", input));
  char first = 0;
  if (input != "-")
    probe >> first;

  if (first == '{') {
    std::stringstream ss;
    probe.seekg(0);
    ss << probe.rdbuf();
    report = parse_json(ss.str());
  } else {
    auto cfg = resolve_config(config_path, overrides);
    cfg.trace_path = input;
    cfg.validate();
    auto events = load_trace(input, cfg.physical_bytes);
    if (events.empty()) {
      err << "error: no accesses in trace\n";
      return exit_usage;
    }
    report = run(events, cfg, EngineMode::baseline);
  }
  if (report.accesses == 0) {
    err << "error: no accesses\n";
    return exit_usage;
  }

  auto eff = effectiveness_csv(report);
  auto windows = emit_windows_csv(report);
  if (out_dir.empty()) {
    out << eff << "\n" << windows;
  } else {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "effectiveness.csv", eff);
    write_file(fs::path(out_dir) / "windows.csv", windows);
    out << fmt::format("class {} (x={}, y={})\n", to_string(report.effectiveness.cls), report.effectiveness.x, report.effectiveness.y);
  }
  return exit_ok;
}

} // namespace

unsigned worker_count(std::size_t jobs)
{
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LEVELSIM_THREADS")) {
    char* end = nullptr;
    auto v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1)
      n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"levelsim: cache hierarchy simulator with cache-level prediction", "levelsim"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> modes;
  std::vector<std::string> overrides;
  std::string trace;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "simulate one or more modes over a trace");
  run_cmd->add_option("--config", config_path, "configuration file");
  run_cmd->add_option("--mode", modes, "baseline, locmap, tage2k, tage8k or oracle (repeatable)");
  run_cmd->add_option("--override", overrides, "key=value configuration override (repeatable)");
  run_cmd->add_option("--trace", trace, "trace file ('-' for stdin); default: the configured synthetic trace");
  run_cmd->add_option("--out", out_dir, "output directory");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic trace");
  gen_cmd->add_option("--kind", gen.kind, "stream, random, pointer_chase, strided or mixed_phase");
  gen_cmd->add_option("--footprint", gen.footprint, "footprint, e.g. 64MiB");
  gen_cmd->add_option("--count", gen.count, "number of accesses");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--stride", gen.stride, "stride in bytes (strided)");
  gen_cmd->add_option("--write-ratio", gen.write_ratio, "fraction of writes");
  gen_cmd->add_option("--phases", gen.phases, "kind:count,... (mixed_phase)");
  gen_cmd->add_option("--out", gen.out, "output path ('-' for stdout)")->required();
  gen_cmd->add_flag("--binary", gen.binary, "write the binary container instead of text");

  std::string input;
  std::string analyze_config;
  std::vector<std::string> analyze_overrides;
  std::string analyze_out;
  auto* an_cmd = app.add_subcommand("analyze", "miss-filtering effectiveness of a trace or report");
  an_cmd->add_option("input", input, "trace file or JSON report")->required();
  an_cmd->add_option("--config", analyze_config, "configuration file");
  an_cmd->add_option("--override", analyze_overrides, "key=value configuration override (repeatable)");
  an_cmd->add_option("--out", analyze_out, "write effectiveness.csv and windows.csv here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (run_cmd->parsed())
      return cmd_run(config_path, modes, overrides, trace, out_dir, out);
    if (gen_cmd->parsed())
      return cmd_gen(gen, out);
    if (an_cmd->parsed())
      return cmd_analyze(input, analyze_config, analyze_overrides, analyze_out, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const TraceError& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == TraceError::Kind::io ? exit_io : exit_usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_io;
  }
  return exit_usage;
}

} // namespace levelsim
