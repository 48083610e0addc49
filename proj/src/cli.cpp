#include "cgla/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "cgla/config.hpp"
#include "cgla/error.hpp"
#include "cgla/offload.hpp"
#include "cgla/packing.hpp"
#include "cgla/perfmodel.hpp"
#include "cgla/report.hpp"
#include "cgla/workload.hpp"

namespace cgla {

std::vector<std::uint64_t> parse_size_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    std::string item(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    start = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
               item.end());
    std::string lower = item;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    std::uint64_t scale = 1;
    for (const std::string_view suffix : {"kib", "kb", "k"}) {
      if (lower.size() > suffix.size() && lower.ends_with(suffix)) {
        lower.resize(lower.size() - suffix.size());
        scale = 1024;
        break;
      }
    }
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(lower.data(), lower.data() + lower.size(), value);
    if (lower.empty() || ec != std::errc() || ptr != lower.data() + lower.size() || value == 0)
      throw ValidationError("bad size '" + item + "' in list '" + std::string(text) + "'");
    out.push_back(value * scale);
  }
  return out;
}

namespace {

struct Options {
  std::string config;
  std::string trace;
  std::string spec;
  std::string format;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t random_n = 0;
  std::string limits = "8K,16K,32K,64K,128K,256K";
  std::string sizes = "16K,32K,64K,128K,256K";
  std::string bursts = "1,2,4,8,16,32,64";
  std::string dtype;
  double target_exec = 0.0;
  bool detail = false;
  bool sweep = false;
};

WorkloadTrace read_trace(const std::string& path) {
  if (path.ends_with(".json")) return trace_from_json(json::parse(read_text_file(path), nullptr, false));
  return load_trace(path);
}

CglaConfig read_cgla(const std::string& path) { return path.empty() ? CglaConfig{} : load_config(path).cgla; }

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) out << text;
  else write_text_file(o.out, text);
}

void emit(const Options& o, std::ostream& out, const Table& table, const json& j) {
  switch (o.format.empty() ? Format::Csv : parse_format(o.format)) {
    case Format::Csv: return emit(o, out, render_csv(table));
    case Format::Markdown: return emit(o, out, render_markdown(table));
    case Format::Json: return emit(o, out, dump(j));
  }
}

DType trace_dtype(const WorkloadTrace& trace, const std::string& requested) {
  if (!requested.empty()) return parse_dtype(requested);
  if (trace.invocations.empty()) throw ValidationError("calibrate: empty trace and no --dtype");
  const DType d = trace.invocations.front().dtype;
  for (const auto& inv : trace.invocations)
    if (inv.dtype != d) throw ValidationError("calibrate: trace mixes dtypes, pass --dtype");
  return d;
}

void cmd_generate(const Options& o, std::ostream& out) {
  if (o.spec.empty() == (o.random_n == 0)) throw ValidationError("generate: give exactly one of --spec or --random");
  const WorkloadTrace trace = o.spec.empty() ? random_trace(o.seed, o.random_n) : generate_trace(load_model_spec(o.spec));
  if (o.format.empty()) return emit(o, out, format_trace(trace));
  emit(o, out, trace_table(trace), to_json(trace));
}

void cmd_coverage(const Options& o, std::ostream& out) {
  const auto limits = parse_size_list(o.limits);
  const CoverageTable c = coverage_cdf(read_trace(o.trace), limits);
  emit(o, out, coverage_table(c), to_json(c));
}

void cmd_offload(const Options& o, std::ostream& out) {
  const WorkloadTrace trace = read_trace(o.trace);
  const Assignment a = assign(trace, read_cgla(o.config));
  emit(o, out, o.detail ? assignment_detail_table(trace, a) : assignment_table(a), to_json(a));
}

void cmd_sweep_lmm(const Options& o, std::ostream& out) {
  const auto sizes = parse_size_list(o.sizes);
  const auto rows = lmm_sweep(read_trace(o.trace), read_cgla(o.config), sizes);
  emit(o, out, lmm_sweep_table(rows), to_json(rows));
}

void cmd_simulate(const Options& o, std::ostream& out) {
  if (o.sweep) return cmd_sweep_lmm(o, out);
  const SimReport r = simulate(read_trace(o.trace), read_cgla(o.config));
  emit(o, out, report_table(r), to_json(r));
}

void cmd_sweep_burst(const Options& o, std::ostream& out) {
  const auto bursts = parse_size_list(o.bursts);
  const auto rows = burst_sweep(read_trace(o.trace), read_cgla(o.config), bursts);
  emit(o, out, burst_sweep_table(rows), to_json(rows));
}

void cmd_compare(const Options& o, std::ostream& out) {
  const ToolkitConfig cfg = load_config(o.config);
  std::optional<WorkloadTrace> trace;
  if (!o.trace.empty()) trace = read_trace(o.trace);
  const Comparison c = compare_devices(trace ? &*trace : nullptr, cfg.devices, cfg.cgla, cfg.reference_device);
  emit(o, out, comparison_table(c), to_json(c));
}

void cmd_calibrate(const Options& o, std::ostream& out) {
  ToolkitConfig cfg = load_config(o.config);
  const WorkloadTrace trace = read_trace(o.trace);
  const DType dtype = trace_dtype(trace, o.dtype);
  const CalibrationResult fit = calibrate(trace, cfg.cgla, dtype, o.target_exec);
  cfg.cgla = fit.config;
  if (o.format.empty()) return emit(o, out, format_config(cfg));
  const double cpe = fit.config.costs(dtype).exec_cycles_per_element;
  Table t{{"dtype", "target_exec_pct", "achieved_exec_pct", "exec_cycles_per_element", "iterations"},
          {{std::string(to_string(dtype)), format_double(o.target_exec), format_double(fit.achieved_exec_pct),
            format_double(cpe), std::to_string(fit.iterations)}}};
  json j = {{"dtype", to_string(dtype)},
            {"target_exec_pct", o.target_exec},
            {"achieved_exec_pct", fit.achieved_exec_pct},
            {"exec_cycles_per_element", cpe},
            {"iterations", fit.iterations}};
  emit(o, out, t, j);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"CGLA dot-product offload simulator", "cglasim"};
  app.require_subcommand(1);

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "csv, markdown or json")->check(CLI::IsMember({"csv", "markdown", "json"}));
    sub->add_option("--out", o.out, "Write to this file instead of stdout");
  };
  auto add_trace = [&](CLI::App* sub) { sub->add_option("--trace", o.trace, "Trace file (.json accepted)")->required(); };

  auto* gen = app.add_subcommand("generate", "Synthesize a kernel trace from a model shape spec");
  gen->add_option("--spec", o.spec, "Model shape spec file");
  gen->add_option("--random", o.random_n, "Emit a random trace with this many invocations");
  gen->add_option("--seed", o.seed, "Seed for --random");
  add_format(gen);

  auto* cov = app.add_subcommand("coverage", "Cumulative LMM coverage, padded vs packed");
  add_trace(cov);
  cov->add_option("--limits", o.limits, "Comma-separated LMM sizes");
  add_format(cov);

  auto* off = app.add_subcommand("offload", "Assign invocations to the array or the host");
  add_trace(off);
  off->add_option("--config", o.config, "Config file");
  off->add_flag("--detail", o.detail, "One row per invocation");
  add_format(off);

  auto* sim = app.add_subcommand("simulate", "Latency, breakdown, energy and PDP");
  add_trace(sim);
  sim->add_option("--config", o.config, "Config file")->required();
  sim->add_flag("--sweep-lmm", o.sweep, "Sweep LMM sizes instead of one run");
  sim->add_option("--sizes", o.sizes, "LMM sizes for --sweep-lmm");
  add_format(sim);

  auto* slmm = app.add_subcommand("sweep-lmm", "PDP curve over LMM sizes");
  add_trace(slmm);
  slmm->add_option("--config", o.config, "Config file")->required();
  slmm->add_option("--sizes", o.sizes, "Comma-separated LMM sizes");
  add_format(slmm);

  auto* sb = app.add_subcommand("sweep-burst", "Offload rate over burst lengths");
  add_trace(sb);
  sb->add_option("--config", o.config, "Config file");
  sb->add_option("--bursts", o.bursts, "Comma-separated burst lengths");
  add_format(sb);

  auto* cmp = app.add_subcommand("compare", "PDP comparison across devices");
  cmp->add_option("--config", o.config, "Config file with device entries")->required();
  cmp->add_option("--trace", o.trace, "Trace for simulated devices");
  add_format(cmp);

  auto* cal = app.add_subcommand("calibrate", "Fit the exec cost to a target EXEC share");
  add_trace(cal);
  cal->add_option("--config", o.config, "Starting config file")->required();
  cal->add_option("--target-exec", o.target_exec, "Target EXEC percentage")->required();
  cal->add_option("--dtype", o.dtype, "Dtype whose exec cost is fitted");
  add_format(cal);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "cglasim: " << e.what() << "\n";
    return 1;
  }

  try {
    if (gen->parsed()) cmd_generate(o, out);
    else if (cov->parsed()) cmd_coverage(o, out);
    else if (off->parsed()) cmd_offload(o, out);
    else if (sim->parsed()) cmd_simulate(o, out);
    else if (slmm->parsed()) cmd_sweep_lmm(o, out);
    else if (sb->parsed()) cmd_sweep_burst(o, out);
    else if (cmp->parsed()) cmd_compare(o, out);
    else if (cal->parsed()) cmd_calibrate(o, out);
  } catch (const Error& e) {
    err << "cglasim: " << e.what() << "\n";
    return e.exit_code();
  } catch (const json::exception& e) {
    err << "cglasim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cgla
