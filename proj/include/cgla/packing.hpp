#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cgla/workload.hpp"

namespace cgla {

/// Smallest multiple of `alignment` that is >= raw_bytes.
constexpr std::uint64_t padded_size(std::uint64_t raw_bytes, std::uint64_t alignment) noexcept {
  return (raw_bytes + alignment - 1) / alignment * alignment;
}

/// Dense bytes of one row: 2 per element for FP16, 34 per 32-element block for Q8_0.
std::uint64_t dense_row_bytes(DType dtype, std::uint64_t elems) noexcept;

/// Which operand extent is the KV-cache length, if any.
enum class KvAxis { None, Rows, VecLen };

/// How operands sit in the source tensors before packing. The defaults
/// describe a plain row-major operand, so only row alignment applies.
struct StagingLayout {
  std::uint64_t row_stride_elems = 0;  // 0: rows are contiguous (stride = vec_len)
  KvAxis kv_axis = KvAxis::None;
  std::uint64_t kv_pad = 1;
};

struct Footprint {
  std::uint64_t padded_bytes = 0;
  std::uint64_t packed_bytes = 0;

  friend bool operator==(const Footprint&, const Footprint&) = default;
};

/// Packed: exact dense bytes of the shared vector plus `rows` vectors. Padded:
/// the same rows as laid out natively, each row padded to `alignment`.
Footprint footprint(DType dtype, std::uint64_t vec_len, std::uint64_t rows, std::uint64_t alignment,
                    const StagingLayout& layout = {});
Footprint footprint(const KernelInvocation& inv, std::uint64_t alignment);

struct KernelFootprint {
  std::string kernel_id;
  std::uint64_t padded_bytes = 0;
  std::uint64_t packed_bytes = 0;
};

struct FootprintReport {
  std::vector<KernelFootprint> per_kernel;
  std::uint64_t bytes_saved_total = 0;  // sum of (padded - packed), count-weighted
};

/// Uses the footprints recorded in the trace.
FootprintReport footprint_report(const WorkloadTrace& trace);

struct CoverageTable {
  std::vector<std::uint64_t> limits;
  std::vector<double> baseline_pct;
  std::vector<double> optimized_pct;
};

/// For each limit, the count-weighted percentage of invocations whose padded
/// (baseline) or packed (optimized) footprint fits. Throws ValidationError on
/// an empty trace or non-ascending limits.
CoverageTable coverage_cdf(const WorkloadTrace& trace, std::span<const std::uint64_t> limits);

}  // namespace cgla
