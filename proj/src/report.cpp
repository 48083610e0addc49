#include "cgla/report.hpp"

#include <algorithm>
#include <sstream>

#include "cgla/error.hpp"

namespace cgla {

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::Csv;
  if (text == "markdown" || text == "md") return Format::Markdown;
  if (text == "json") return Format::Json;
  throw ValidationError("unknown format '" + std::string(text) + "' (expected csv, markdown or json)");
}

namespace {

std::string csv_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (const char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string num(double v) { return format_double(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::string render_csv(const Table& table) {
  std::ostringstream o;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) o << (i ? "," : "") << csv_cell(cells[i]);
    o << "\n";
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
  return o.str();
}

std::string render_markdown(const Table& table) {
  std::vector<std::size_t> width(table.columns.size(), 3);
  for (std::size_t c = 0; c < table.columns.size(); ++c) width[c] = std::max(width[c], table.columns[c].size());
  for (const auto& row : table.rows)
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream o;
  auto line = [&](const std::vector<std::string>& cells) {
    o << "|";
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string();
      o << " " << cell << std::string(width[c] - cell.size(), ' ') << " |";
    }
    o << "\n";
  };
  line(table.columns);
  o << "|";
  for (const auto w : width) o << " " << std::string(w, '-') << " |";
  o << "\n";
  for (const auto& row : table.rows) line(row);
  return o.str();
}

Table trace_table(const WorkloadTrace& trace) {
  Table t{{"kernel_id", "dtype", "vec_len", "rows", "padded_bytes", "packed_bytes", "count"}, {}};
  for (const auto& inv : trace.invocations)
    t.rows.push_back({inv.kernel_id, std::string(to_string(inv.dtype)), num(inv.vec_len), num(inv.rows),
                      num(inv.operand_bytes_padded), num(inv.operand_bytes_packed), num(inv.count)});
  return t;
}

Table coverage_table(const CoverageTable& coverage) {
  Table t{{"lmm_limit_bytes", "lmm_limit_kb", "baseline_pct", "optimized_pct"}, {}};
  for (std::size_t i = 0; i < coverage.limits.size(); ++i)
    t.rows.push_back({num(coverage.limits[i]), num(static_cast<double>(coverage.limits[i]) / 1024.0),
                      num(coverage.baseline_pct[i]), num(coverage.optimized_pct[i])});
  return t;
}

Table assignment_table(const Assignment& a) {
  return {{"offloaded_elements", "residual_elements", "host_only_elements", "host_only_count", "offload_rate",
           "residual_fraction", "host_only_fraction"},
          {{num(a.offloaded_elements), num(a.residual_elements), num(a.host_only_elements), num(a.host_only_count),
            num(a.offload_rate), num(a.residual_fraction), num(a.host_only_fraction)}}};
}

Table assignment_detail_table(const WorkloadTrace& trace, const Assignment& a) {
  Table t{{"kernel_id", "target", "main_len", "residual_len", "rows", "count"}, {}};
  for (std::size_t i = 0; i < a.per_invocation.size(); ++i) {
    const auto& ia = a.per_invocation[i];
    const auto& inv = trace.invocations[i];
    t.rows.push_back({ia.kernel_id, std::string(to_string(ia.target)), num(ia.partition.main_len),
                      num(ia.partition.residual_len), num(inv.rows), num(inv.count)});
  }
  return t;
}

Table burst_sweep_table(const std::vector<BurstSweepRow>& rows) {
  Table t{{"burst", "offload_rate", "residual_fraction", "host_only_fraction"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({num(r.burst), num(r.offload_rate), num(r.residual_fraction), num(r.host_only_fraction)});
  return t;
}

Table report_table(const SimReport& r) {
  const PhaseBreakdown& b = r.breakdown;
  return {{"model", "config", "lmm_bytes", "latency_s", "cgla_busy_s", "host_busy_s", "exec_s", "load_s", "drain_s",
           "conf_s", "exec_pct", "load_pct", "drain_pct", "conf_pct", "energy_j", "effective_power_w", "pdp_j",
           "cgla_calls", "host_only_calls", "fallback_calls", "offload_rate", "residual_fraction",
           "host_only_fraction"},
          {{r.model_name, r.config_name, num(r.lmm_bytes), num(r.latency_s), num(r.cgla_busy_s), num(r.host_busy_s),
            num(b.exec_s), num(b.load_s), num(b.drain_s), num(b.conf_s), num(b.exec_pct), num(b.load_pct),
            num(b.drain_pct), num(b.conf_pct), num(r.energy_j), num(r.effective_power_w), num(r.pdp_j),
            num(r.offload.cgla_calls), num(r.offload.host_only_calls), num(r.offload.fallback_calls),
            num(r.offload.offload_rate), num(r.offload.residual_fraction), num(r.offload.host_only_fraction)}}};
}

Table lmm_sweep_table(const std::vector<LmmSweepRow>& rows) {
  Table t{{"lmm_bytes", "lmm_kb", "latency_s", "effective_power_w", "pdp_j", "exec_pct", "offload_rate"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({num(r.lmm_bytes), num(static_cast<double>(r.lmm_bytes) / 1024.0), num(r.latency_s),
                      num(r.effective_power_w), num(r.pdp_j), num(r.exec_pct), num(r.offload_rate)});
  return t;
}

Table comparison_table(const Comparison& c) {
  Table t{{"device", "latency_s", "power_w", "effective_power_w", "pdp_j", "ratio_vs_" + c.reference}, {}};
  for (const auto& r : c.rows)
    t.rows.push_back({r.device, num(r.latency_s), num(r.power_w), num(r.effective_power_w), num(r.pdp_j),
                      format_significant(r.ratio, 3)});
  return t;
}

json to_json(const WorkloadTrace& trace) {
  json inv = json::array();
  for (const auto& i : trace.invocations)
    inv.push_back({{"kernel_id", i.kernel_id},
                   {"dtype", to_string(i.dtype)},
                   {"vec_len", i.vec_len},
                   {"rows", i.rows},
                   {"operand_bytes_padded", i.operand_bytes_padded},
                   {"operand_bytes_packed", i.operand_bytes_packed},
                   {"count", i.count}});
  return {{"model_name", trace.model_name},
          {"alignment_bytes", trace.alignment_bytes},
          {"total_dot_products", trace.total_dot_products()},
          {"invocations", inv}};
}

json to_json(const CoverageTable& c) {
  return {{"limits", c.limits}, {"baseline_pct", c.baseline_pct}, {"optimized_pct", c.optimized_pct}};
}

json to_json(const Assignment& a) {
  json per = json::array();
  for (const auto& ia : a.per_invocation)
    per.push_back({{"kernel_id", ia.kernel_id},
                   {"target", to_string(ia.target)},
                   {"main_len", ia.partition.main_len},
                   {"residual_len", ia.partition.residual_len}});
  return {{"offloaded_elements", a.offloaded_elements}, {"residual_elements", a.residual_elements},
          {"host_only_elements", a.host_only_elements}, {"host_only_count", a.host_only_count},
          {"offload_rate", a.offload_rate},             {"residual_fraction", a.residual_fraction},
          {"host_only_fraction", a.host_only_fraction}, {"per_invocation", per}};
}

json to_json(const std::vector<BurstSweepRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"burst", r.burst},
                   {"offload_rate", r.offload_rate},
                   {"residual_fraction", r.residual_fraction},
                   {"host_only_fraction", r.host_only_fraction}});
  return out;
}

json to_json(const SimReport& r) {
  const PhaseBreakdown& b = r.breakdown;
  return {{"model_name", r.model_name},
          {"config_name", r.config_name},
          {"lmm_bytes", r.lmm_bytes},
          {"latency_s", r.latency_s},
          {"cgla_busy_s", r.cgla_busy_s},
          {"host_busy_s", r.host_busy_s},
          {"breakdown",
           {{"exec_cycles", b.exec_cycles},
            {"load_cycles", b.load_cycles},
            {"drain_cycles", b.drain_cycles},
            {"conf_cycles", b.conf_cycles},
            {"exec_s", b.exec_s},
            {"load_s", b.load_s},
            {"drain_s", b.drain_s},
            {"conf_s", b.conf_s},
            {"exec_pct", b.exec_pct},
            {"load_pct", b.load_pct},
            {"drain_pct", b.drain_pct},
            {"conf_pct", b.conf_pct}}},
          {"energy_j", r.energy_j},
          {"effective_power_w", r.effective_power_w},
          {"pdp_j", r.pdp_j},
          {"offload",
           {{"cgla_calls", r.offload.cgla_calls},
            {"host_only_calls", r.offload.host_only_calls},
            {"fallback_calls", r.offload.fallback_calls},
            {"offload_rate", r.offload.offload_rate},
            {"residual_fraction", r.offload.residual_fraction},
            {"host_only_fraction", r.offload.host_only_fraction}}}};
}

json to_json(const std::vector<LmmSweepRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"lmm_bytes", r.lmm_bytes},
                   {"latency_s", r.latency_s},
                   {"effective_power_w", r.effective_power_w},
                   {"pdp_j", r.pdp_j},
                   {"exec_pct", r.exec_pct},
                   {"offload_rate", r.offload_rate}});
  return out;
}

json to_json(const Comparison& c) {
  json rows = json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"device", r.device},
                    {"latency_s", r.latency_s},
                    {"power_w", r.power_w},
                    {"effective_power_w", r.effective_power_w},
                    {"pdp_j", r.pdp_j},
                    {"ratio", r.ratio}});
  return {{"reference", c.reference}, {"rows", rows}};
}

namespace {

template <class Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + " JSON: " + e.what());
  }
}

}  // namespace

WorkloadTrace trace_from_json(const json& j) {
  return guarded("trace", [&] {
    WorkloadTrace t;
    t.model_name = j.at("model_name").get<std::string>();
    t.alignment_bytes = j.at("alignment_bytes").get<std::uint64_t>();
    for (const auto& i : j.at("invocations")) {
      KernelInvocation inv;
      inv.kernel_id = i.at("kernel_id").get<std::string>();
      inv.dtype = parse_dtype(i.at("dtype").get<std::string>());
      inv.vec_len = i.at("vec_len").get<std::uint64_t>();
      inv.rows = i.at("rows").get<std::uint64_t>();
      inv.operand_bytes_padded = i.at("operand_bytes_padded").get<std::uint64_t>();
      inv.operand_bytes_packed = i.at("operand_bytes_packed").get<std::uint64_t>();
      inv.count = i.at("count").get<std::uint64_t>();
      t.invocations.push_back(std::move(inv));
    }
    validate(t);
    if (j.contains("total_dot_products") && j["total_dot_products"].get<std::uint64_t>() != t.total_dot_products())
      throw ValidationError("trace JSON: total_dot_products does not match the invocations");
    return t;
  });
}

CoverageTable coverage_from_json(const json& j) {
  return guarded("coverage", [&] {
    CoverageTable c;
    c.limits = j.at("limits").get<std::vector<std::uint64_t>>();
    c.baseline_pct = j.at("baseline_pct").get<std::vector<double>>();
    c.optimized_pct = j.at("optimized_pct").get<std::vector<double>>();
    if (c.baseline_pct.size() != c.limits.size() || c.optimized_pct.size() != c.limits.size())
      throw ValidationError("coverage JSON: column lengths differ");
    return c;
  });
}

SimReport report_from_json(const json& j) {
  return guarded("report", [&] {
    SimReport r;
    r.model_name = j.at("model_name").get<std::string>();
    r.config_name = j.at("config_name").get<std::string>();
    r.lmm_bytes = j.at("lmm_bytes").get<std::uint64_t>();
    r.latency_s = j.at("latency_s").get<double>();
    r.cgla_busy_s = j.at("cgla_busy_s").get<double>();
    r.host_busy_s = j.at("host_busy_s").get<double>();
    const auto& b = j.at("breakdown");
    r.breakdown.exec_cycles = b.at("exec_cycles").get<std::uint64_t>();
    r.breakdown.load_cycles = b.at("load_cycles").get<std::uint64_t>();
    r.breakdown.drain_cycles = b.at("drain_cycles").get<std::uint64_t>();
    r.breakdown.conf_cycles = b.at("conf_cycles").get<std::uint64_t>();
    r.breakdown.exec_s = b.at("exec_s").get<double>();
    r.breakdown.load_s = b.at("load_s").get<double>();
    r.breakdown.drain_s = b.at("drain_s").get<double>();
    r.breakdown.conf_s = b.at("conf_s").get<double>();
    r.breakdown.exec_pct = b.at("exec_pct").get<double>();
    r.breakdown.load_pct = b.at("load_pct").get<double>();
    r.breakdown.drain_pct = b.at("drain_pct").get<double>();
    r.breakdown.conf_pct = b.at("conf_pct").get<double>();
    r.energy_j = j.at("energy_j").get<double>();
    r.effective_power_w = j.at("effective_power_w").get<double>();
    r.pdp_j = j.at("pdp_j").get<double>();
    const auto& o = j.at("offload");
    r.offload.cgla_calls = o.at("cgla_calls").get<std::uint64_t>();
    r.offload.host_only_calls = o.at("host_only_calls").get<std::uint64_t>();
    r.offload.fallback_calls = o.at("fallback_calls").get<std::uint64_t>();
    r.offload.offload_rate = o.at("offload_rate").get<double>();
    r.offload.residual_fraction = o.at("residual_fraction").get<double>();
    r.offload.host_only_fraction = o.at("host_only_fraction").get<double>();
    return r;
  });
}

std::vector<LmmSweepRow> lmm_sweep_from_json(const json& j) {
  return guarded("lmm sweep", [&] {
    std::vector<LmmSweepRow> rows;
    for (const auto& r : j)
      rows.push_back({r.at("lmm_bytes").get<std::uint64_t>(), r.at("latency_s").get<double>(),
                      r.at("effective_power_w").get<double>(), r.at("pdp_j").get<double>(),
                      r.at("exec_pct").get<double>(), r.at("offload_rate").get<double>()});
    return rows;
  });
}

Comparison comparison_from_json(const json& j) {
  return guarded("comparison", [&] {
    Comparison c;
    c.reference = j.at("reference").get<std::string>();
    for (const auto& r : j.at("rows"))
      c.rows.push_back({r.at("device").get<std::string>(), r.at("latency_s").get<double>(),
                        r.at("power_w").get<double>(), r.at("effective_power_w").get<double>(),
                        r.at("pdp_j").get<double>(), r.at("ratio").get<double>()});
    return c;
  });
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace cgla
