#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgla/config.hpp"
#include "cgla/offload.hpp"
#include "cgla/workload.hpp"

namespace cgla {

/// Execution time times power.
double pdp(double execution_time_s, double power_w);

/// Table entry for (dtype, lmm_bytes) times the lane count. Throws ModelError
/// when the table has no such entry.
double lmm_power(DType dtype, std::uint64_t lmm_bytes, const CglaConfig& config);

/// Array time split into phases. Cycle totals are exact; seconds and percentages
/// derive from them. Percentages are all zero when no work reached the array.
struct PhaseBreakdown {
  std::uint64_t exec_cycles = 0;
  std::uint64_t load_cycles = 0;
  std::uint64_t drain_cycles = 0;
  std::uint64_t conf_cycles = 0;
  double exec_s = 0.0;
  double load_s = 0.0;
  double drain_s = 0.0;
  double conf_s = 0.0;
  double exec_pct = 0.0;
  double load_pct = 0.0;
  double drain_pct = 0.0;
  double conf_pct = 0.0;

  std::uint64_t total_cycles() const noexcept { return exec_cycles + load_cycles + drain_cycles + conf_cycles; }
  double total_s() const noexcept { return exec_s + load_s + drain_s + conf_s; }
};

/// Where the work ended up after admission and the profitability check.
/// Call counts are count-weighted, fractions element-weighted.
struct OffloadSummary {
  std::uint64_t cgla_calls = 0;
  std::uint64_t host_only_calls = 0;
  std::uint64_t fallback_calls = 0;  // admitted but kept on the host
  double offload_rate = 0.0;
  double residual_fraction = 0.0;
  double host_only_fraction = 0.0;
};

struct SimReport {
  std::string model_name;
  std::string config_name;
  std::uint64_t lmm_bytes = 0;
  double latency_s = 0.0;
  double cgla_busy_s = 0.0;
  double host_busy_s = 0.0;
  PhaseBreakdown breakdown;
  double energy_j = 0.0;
  double effective_power_w = 0.0;
  double pdp_j = 0.0;
  OffloadSummary offload;
};

/// Cycle cost of one call of `inv` on the array with the given main segment.
struct CallCycles {
  std::uint64_t conf = 0;
  std::uint64_t load = 0;
  std::uint64_t exec = 0;
  std::uint64_t drain = 0;

  std::uint64_t total() const noexcept { return conf + load + exec + drain; }
};
CallCycles call_cycles(const KernelInvocation& inv, std::uint64_t main_len, const CglaConfig& config);

/// Calls run back to back. An array call overlaps its residual on the host and
/// takes the longer of the two; HOST_ONLY calls run at host_dot_rate. Energy
/// charges array time at the LMM power of the call's dtype and host busy time
/// at host_power_w.
SimReport simulate(const WorkloadTrace& trace, const CglaConfig& config);

struct LmmSweepRow {
  std::uint64_t lmm_bytes = 0;
  double latency_s = 0.0;
  double effective_power_w = 0.0;
  double pdp_j = 0.0;
  double exec_pct = 0.0;
  double offload_rate = 0.0;
};

/// One simulate() per size with everything else held fixed.
std::vector<LmmSweepRow> lmm_sweep(const WorkloadTrace& trace, const CglaConfig& config,
                                   std::span<const std::uint64_t> sizes);
std::uint64_t argmin_pdp(const std::vector<LmmSweepRow>& rows);

struct ComparisonRow {
  std::string device;
  double latency_s = 0.0;
  double power_w = 0.0;            // nominal
  double effective_power_w = 0.0;  // pdp / latency
  double pdp_j = 0.0;
  double ratio = 0.0;  // pdp / reference pdp
};

struct Comparison {
  std::string reference;
  std::vector<ComparisonRow> rows;
};

/// CGLA_SIM devices take latency and PDP from simulate(trace, config); fixed
/// devices use their recorded values, with pdp_j preferred when present. The
/// reference defaults to the first CGLA_SIM device, else the first device.
Comparison compare_devices(const WorkloadTrace* trace, std::span<const DeviceProfile> profiles,
                           const CglaConfig& config, const std::string& reference = "");

/// `value` rounded to `digits` significant figures, trailing zeros kept.
std::string format_significant(double value, int digits);

struct CalibrationResult {
  CglaConfig config;
  double achieved_exec_pct = 0.0;
  int iterations = 0;
};

/// Fits `dtype`'s exec_cycles_per_element by bisection so the EXEC share of
/// array time on `trace` hits `target_exec_pct`. Throws ModelError when the
/// target is out of (0, 100) or unreachable with the other costs.
CalibrationResult calibrate(const WorkloadTrace& trace, const CglaConfig& config, DType dtype,
                            double target_exec_pct);

}  // namespace cgla
