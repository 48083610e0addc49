#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cgla/workload.hpp"

namespace cgla {

/// Per-call cost of each array phase, in cycles.
struct PhaseCosts {
  double conf_cycles = 0.0;
  double load_cycles_per_byte = 0.0;
  double exec_cycles_per_element = 1.0;
  double drain_cycles_per_byte = 0.0;

  friend bool operator==(const PhaseCosts&, const PhaseCosts&) = default;
};

/// Which footprint decides LMM admission and is streamed by LOAD.
enum class FitLayout { Packed, Padded };

struct CglaConfig {
  std::string name = "cgla";
  std::uint64_t lanes = 1;
  std::uint64_t pes_per_lane = 64;
  std::uint64_t lmm_bytes = 32 * 1024;
  std::uint64_t burst = 16;
  std::uint64_t freq_hz = 840'000'000;
  std::uint64_t simd_width = 2;
  std::uint64_t logical_threads = 4;
  std::uint64_t result_bytes = 4;  // drained per dot product
  FitLayout fit_layout = FitLayout::Packed;
  // An admitted call whose array path would be slower than running it on
  // the host stays on the host.
  bool fallback_unprofitable = true;

  // Per-lane synthesis power, keyed by (dtype, LMM bytes).
  std::map<std::pair<DType, std::uint64_t>, double> power_table;
  // Unit counts reported next to the power table; informational only.
  std::map<DType, std::uint64_t> power_units;

  double host_power_w = 0.6485;
  double host_dot_rate = 1.0e9;  // elements per second
  std::map<DType, PhaseCosts> phase_costs;

  std::uint64_t parallelism() const noexcept { return pes_per_lane * lanes * simd_width * logical_threads; }
  /// Throws ModelError when the dtype has no cost entry.
  const PhaseCosts& costs(DType dtype) const;

  friend bool operator==(const CglaConfig&, const CglaConfig&) = default;
};

/// Positive structure/rates, non-negative costs, positive exec cost, and a
/// power table that never decreases with LMM size. Throws ValidationError.
void validate(const CglaConfig& config);

enum class LatencyModel { MeasuredFixed, CglaSim };

struct DeviceProfile {
  std::string name;
  double power_w = 0.0;
  LatencyModel latency_model = LatencyModel::MeasuredFixed;
  std::optional<double> latency_s;  // required for MeasuredFixed
  std::optional<double> pdp_j;      // overrides latency * power when the source reports PDP

  friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

void validate(const DeviceProfile& device);

/// Everything a config file can carry.
struct ToolkitConfig {
  CglaConfig cgla;
  std::vector<DeviceProfile> devices;
  std::string reference_device;

  friend bool operator==(const ToolkitConfig&, const ToolkitConfig&) = default;
};

/// key=value lines with `#` comments. Unit-suffixed keys, for example
/// `freq_hz`, `host_dot_rate_elems_per_s`, `power.fp16.32768_bytes_w`,
/// `fp16.load_cycles_per_byte`, `device.<name>.latency_s`.
ToolkitConfig parse_config(std::string_view text, const std::string& source = "<config>");
ToolkitConfig load_config(const std::filesystem::path& path);
std::string format_config(const ToolkitConfig& config);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

std::string_view dtype_key(DType dtype) noexcept;  // "fp16" / "q8_0"

}  // namespace cgla
