#include "cgla/perfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "cgla/error.hpp"

namespace cgla {

double pdp(double execution_time_s, double power_w) {
  if (!(execution_time_s >= 0.0) || !(power_w >= 0.0))
    throw ValidationError("pdp: time and power must be >= 0");
  return execution_time_s * power_w;
}

double lmm_power(DType dtype, std::uint64_t lmm_bytes, const CglaConfig& config) {
  const auto it = config.power_table.find({dtype, lmm_bytes});
  if (it == config.power_table.end())
    throw ModelError("config '" + config.name + "': no power entry for " + std::string(to_string(dtype)) +
                     " at " + std::to_string(lmm_bytes) + " bytes LMM");
  return it->second * static_cast<double>(config.lanes);
}

namespace {

std::uint64_t ceil_cycles(double cycles) {
  return cycles <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(cycles));
}

double host_seconds(std::uint64_t elements, const CglaConfig& config) {
  return static_cast<double>(elements) / config.host_dot_rate;
}

double pct(std::uint64_t part, std::uint64_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(total);
}

}  // namespace

CallCycles call_cycles(const KernelInvocation& inv, std::uint64_t main_len, const CglaConfig& config) {
  const PhaseCosts& pc = config.costs(inv.dtype);
  const double bytes = static_cast<double>(fit_bytes(inv, config.fit_layout));
  const double main_elems = static_cast<double>(main_len) * static_cast<double>(inv.rows);
  const double drained = static_cast<double>(inv.rows) * static_cast<double>(config.result_bytes);
  CallCycles c;
  c.conf = ceil_cycles(pc.conf_cycles);
  c.load = ceil_cycles(pc.load_cycles_per_byte * bytes);
  c.exec = ceil_cycles(pc.exec_cycles_per_element * main_elems / static_cast<double>(config.parallelism()));
  c.drain = ceil_cycles(pc.drain_cycles_per_byte * drained);
  return c;
}

SimReport simulate(const WorkloadTrace& trace, const CglaConfig& config) {
  validate(config);
  validate(trace);
  const Assignment assignment = assign(trace, config);

  std::map<DType, double> power;
  for (const auto& inv : trace.invocations)
    if (!power.contains(inv.dtype)) power[inv.dtype] = lmm_power(inv.dtype, config.lmm_bytes, config);

  SimReport r;
  r.model_name = trace.model_name;
  r.config_name = config.name;
  r.lmm_bytes = config.lmm_bytes;

  const double freq = static_cast<double>(config.freq_hz);
  std::map<DType, std::uint64_t> cycles_by_dtype;
  std::uint64_t main_elems = 0, residual_elems = 0, host_elems = 0;
  PhaseBreakdown& b = r.breakdown;

  for (std::size_t i = 0; i < trace.invocations.size(); ++i) {
    const KernelInvocation& inv = trace.invocations[i];
    const InvocationAssignment& ia = assignment.per_invocation[i];
    const std::uint64_t all_elems = inv.vec_len * inv.rows;
    const double host_only_s = host_seconds(all_elems, config);

    if (ia.target == Target::CglaWithResidual) {
      const CallCycles cyc = call_cycles(inv, ia.partition.main_len, config);
      const double cgla_s = static_cast<double>(cyc.total()) / freq;
      const double resid_s = host_seconds(ia.partition.residual_len * inv.rows, config);
      const double call_s = std::max(cgla_s, resid_s);
      if (!(config.fallback_unprofitable && call_s > host_only_s)) {
        b.conf_cycles += cyc.conf * inv.count;
        b.load_cycles += cyc.load * inv.count;
        b.exec_cycles += cyc.exec * inv.count;
        b.drain_cycles += cyc.drain * inv.count;
        cycles_by_dtype[inv.dtype] += cyc.total() * inv.count;
        r.latency_s += call_s * static_cast<double>(inv.count);
        r.host_busy_s += resid_s * static_cast<double>(inv.count);
        main_elems += ia.partition.main_len * inv.rows * inv.count;
        residual_elems += ia.partition.residual_len * inv.rows * inv.count;
        r.offload.cgla_calls += inv.count;
        continue;
      }
      r.offload.fallback_calls += inv.count;
    }
    r.offload.host_only_calls += inv.count;
    r.latency_s += host_only_s * static_cast<double>(inv.count);
    r.host_busy_s += host_only_s * static_cast<double>(inv.count);
    host_elems += all_elems * inv.count;
  }

  b.conf_s = static_cast<double>(b.conf_cycles) / freq;
  b.load_s = static_cast<double>(b.load_cycles) / freq;
  b.exec_s = static_cast<double>(b.exec_cycles) / freq;
  b.drain_s = static_cast<double>(b.drain_cycles) / freq;
  const std::uint64_t total = b.total_cycles();
  b.conf_pct = pct(b.conf_cycles, total);
  b.load_pct = pct(b.load_cycles, total);
  b.exec_pct = pct(b.exec_cycles, total);
  b.drain_pct = pct(b.drain_cycles, total);
  r.cgla_busy_s = static_cast<double>(total) / freq;

  r.energy_j = r.host_busy_s * config.host_power_w;
  for (const auto& [dtype, cycles] : cycles_by_dtype) r.energy_j += static_cast<double>(cycles) / freq * power[dtype];
  r.effective_power_w = r.latency_s > 0.0 ? r.energy_j / r.latency_s : 0.0;
  r.pdp_j = pdp(r.latency_s, r.effective_power_w);

  const std::uint64_t all = main_elems + residual_elems + host_elems;
  if (all > 0) {
    r.offload.offload_rate = static_cast<double>(main_elems) / static_cast<double>(all);
    r.offload.residual_fraction = static_cast<double>(residual_elems) / static_cast<double>(all);
    r.offload.host_only_fraction = static_cast<double>(host_elems) / static_cast<double>(all);
  }
  return r;
}

std::vector<LmmSweepRow> lmm_sweep(const WorkloadTrace& trace, const CglaConfig& config,
                                   std::span<const std::uint64_t> sizes) {
  std::vector<LmmSweepRow> rows;
  rows.reserve(sizes.size());
  CglaConfig c = config;
  for (const std::uint64_t size : sizes) {
    c.lmm_bytes = size;
    const SimReport r = simulate(trace, c);
    rows.push_back({size, r.latency_s, r.effective_power_w, r.pdp_j, r.breakdown.exec_pct, r.offload.offload_rate});
  }
  return rows;
}

std::uint64_t argmin_pdp(const std::vector<LmmSweepRow>& rows) {
  if (rows.empty()) throw ValidationError("argmin_pdp: empty sweep");
  const auto it = std::min_element(rows.begin(), rows.end(),
                                   [](const LmmSweepRow& a, const LmmSweepRow& b) { return a.pdp_j < b.pdp_j; });
  return it->lmm_bytes;
}

Comparison compare_devices(const WorkloadTrace* trace, std::span<const DeviceProfile> profiles,
                           const CglaConfig& config, const std::string& reference) {
  if (profiles.empty()) throw ValidationError("compare: no devices");
  std::set<std::string> names;
  for (const auto& d : profiles) {
    validate(d);
    if (!names.insert(d.name).second) throw ValidationError("compare: duplicate device '" + d.name + "'");
  }

  Comparison out;
  std::optional<SimReport> sim;
  for (const auto& d : profiles) {
    ComparisonRow row;
    row.device = d.name;
    row.power_w = d.power_w;
    if (d.latency_model == LatencyModel::CglaSim) {
      if (!trace) throw ValidationError("compare: device '" + d.name + "' is simulated but no trace was given");
      if (!sim) sim = simulate(*trace, config);
      row.latency_s = d.latency_s.value_or(sim->latency_s);
      row.pdp_j = d.pdp_j.value_or(sim->pdp_j);
    } else {
      row.latency_s = *d.latency_s;
      row.pdp_j = d.pdp_j.value_or(pdp(row.latency_s, d.power_w));
    }
    row.effective_power_w = row.latency_s > 0.0 ? row.pdp_j / row.latency_s : 0.0;
    out.rows.push_back(row);
  }

  out.reference = reference;
  if (out.reference.empty()) {
    const auto sim_dev = std::find_if(profiles.begin(), profiles.end(),
                                      [](const DeviceProfile& d) { return d.latency_model == LatencyModel::CglaSim; });
    out.reference = sim_dev != profiles.end() ? sim_dev->name : profiles.front().name;
  }
  const auto ref = std::find_if(out.rows.begin(), out.rows.end(),
                                [&](const ComparisonRow& r) { return r.device == out.reference; });
  if (ref == out.rows.end()) throw ValidationError("compare: reference device '" + out.reference + "' not listed");
  if (!(ref->pdp_j > 0.0)) throw ModelError("compare: reference device '" + out.reference + "' has zero PDP");
  const double ref_pdp = ref->pdp_j;
  for (auto& row : out.rows) row.ratio = row.pdp_j / ref_pdp;
  return out;
}

std::string format_significant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", std::max(0, digits - 1), value);
    return buf;
  }
  int magnitude = static_cast<int>(std::floor(std::log10(std::fabs(value))));
  char buf[64];
  for (int pass = 0; pass < 2; ++pass) {
    const int decimals = std::max(0, digits - 1 - magnitude);
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    // Rounding can carry into the next power of ten (9.996 -> 10.00).
    const double shown = std::fabs(std::strtod(buf, nullptr));
    if (shown < std::pow(10.0, magnitude + 1)) break;
    ++magnitude;
  }
  return buf;
}

CalibrationResult calibrate(const WorkloadTrace& trace, const CglaConfig& config, DType dtype,
                            double target_exec_pct) {
  if (!(target_exec_pct > 0.0 && target_exec_pct < 100.0))
    throw ModelError("calibrate: target EXEC percentage must lie in (0, 100)");
  CglaConfig c = config;
  c.costs(dtype);

  // No array work at all means the exec cost is too high to be profitable.
  auto exec_pct_at = [&](double cpe) {
    c.phase_costs[dtype].exec_cycles_per_element = cpe;
    const SimReport r = simulate(trace, c);
    return r.breakdown.total_cycles() == 0 ? 100.0 : r.breakdown.exec_pct;
  };

  double lo = std::log(1e-6), hi = std::log(1e9);
  if (exec_pct_at(std::exp(lo)) > target_exec_pct || exec_pct_at(std::exp(hi)) < target_exec_pct)
    throw ModelError("calibrate: EXEC target " + format_double(target_exec_pct) + " % is unreachable");
  CalibrationResult result;
  for (; result.iterations < 200 && hi - lo > 1e-12; ++result.iterations) {
    const double mid = 0.5 * (lo + hi);
    (exec_pct_at(std::exp(mid)) < target_exec_pct ? lo : hi) = mid;
  }
  const double cpe = std::exp(0.5 * (lo + hi));
  c.phase_costs[dtype].exec_cycles_per_element = cpe;
  const SimReport r = simulate(trace, c);
  if (r.breakdown.total_cycles() == 0)
    throw ModelError("calibrate: no work reaches the array at the fitted exec cost");
  result.achieved_exec_pct = r.breakdown.exec_pct;
  result.config = c;
  return result;
}

}  // namespace cgla
