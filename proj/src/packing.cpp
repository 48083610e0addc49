#include "cgla/packing.hpp"

#include <algorithm>

#include "cgla/error.hpp"
#include "cgla/kernels.hpp"

namespace cgla {

std::uint64_t dense_row_bytes(DType dtype, std::uint64_t elems) noexcept {
  switch (dtype) {
    case DType::FP16:
      return 2 * elems;
    case DType::Q8_0:
      return kQ8BlockBytes * ((elems + kQ8BlockElems - 1) / kQ8BlockElems);
  }
  return 0;
}

Footprint footprint(DType dtype, std::uint64_t vec_len, std::uint64_t rows, std::uint64_t alignment,
                    const StagingLayout& layout) {
  if (alignment == 0) throw ValidationError("footprint: alignment must be >= 1");
  const std::uint64_t pad = std::max<std::uint64_t>(layout.kv_pad, 1);

  std::uint64_t native_vec = vec_len;
  std::uint64_t native_rows = rows;
  if (layout.kv_axis == KvAxis::VecLen) native_vec = padded_size(vec_len, pad);
  if (layout.kv_axis == KvAxis::Rows) native_rows = padded_size(rows, pad);
  native_vec = std::max(native_vec, layout.row_stride_elems);

  Footprint fp;
  fp.packed_bytes = (rows + 1) * dense_row_bytes(dtype, vec_len);
  fp.padded_bytes = (native_rows + 1) * padded_size(dense_row_bytes(dtype, native_vec), alignment);
  return fp;
}

Footprint footprint(const KernelInvocation& inv, std::uint64_t alignment) {
  return footprint(inv.dtype, inv.vec_len, inv.rows, alignment);
}

FootprintReport footprint_report(const WorkloadTrace& trace) {
  FootprintReport report;
  report.per_kernel.reserve(trace.invocations.size());
  for (const auto& inv : trace.invocations) {
    report.per_kernel.push_back({inv.kernel_id, inv.operand_bytes_padded, inv.operand_bytes_packed});
    report.bytes_saved_total += (inv.operand_bytes_padded - inv.operand_bytes_packed) * inv.count;
  }
  return report;
}

CoverageTable coverage_cdf(const WorkloadTrace& trace, std::span<const std::uint64_t> limits) {
  if (limits.empty()) throw ValidationError("coverage: limit list is empty");
  for (std::size_t i = 1; i < limits.size(); ++i)
    if (limits[i] <= limits[i - 1]) throw ValidationError("coverage: limits must be strictly ascending");
  const std::uint64_t total = trace.total_count();
  if (total == 0) throw ValidationError("coverage: trace has no invocations");

  CoverageTable table;
  table.limits.assign(limits.begin(), limits.end());
  for (std::uint64_t limit : limits) {
    std::uint64_t base = 0;
    std::uint64_t opt = 0;
    for (const auto& inv : trace.invocations) {
      if (inv.operand_bytes_padded <= limit) base += inv.count;
      if (inv.operand_bytes_packed <= limit) opt += inv.count;
    }
    table.baseline_pct.push_back(100.0 * static_cast<double>(base) / static_cast<double>(total));
    table.optimized_pct.push_back(100.0 * static_cast<double>(opt) / static_cast<double>(total));
  }
  return table;
}

}  // namespace cgla
