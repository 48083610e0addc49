#include "cgla/offload.hpp"

#include "cgla/error.hpp"

namespace cgla {

Partition partition_vector(std::uint64_t vec_len, std::uint64_t burst) {
  if (burst == 0) throw ValidationError("partition_vector: burst must be >= 1");
  const std::uint64_t main = vec_len / burst * burst;
  return {main, vec_len - main};
}

std::string_view to_string(Target target) noexcept {
  return target == Target::CglaWithResidual ? "CGLA_WITH_RESIDUAL" : "HOST_ONLY";
}

OffloadPolicy policy_of(const CglaConfig& config) noexcept {
  return {config.lmm_bytes, config.burst, config.fit_layout};
}

std::uint64_t fit_bytes(const KernelInvocation& inv, FitLayout layout) noexcept {
  return layout == FitLayout::Packed ? inv.operand_bytes_packed : inv.operand_bytes_padded;
}

Assignment assign(const WorkloadTrace& trace, const OffloadPolicy& policy) {
  if (policy.burst == 0) throw ValidationError("assign: burst must be >= 1");

  Assignment out;
  out.per_invocation.reserve(trace.invocations.size());
  for (const auto& inv : trace.invocations) {
    const Partition part = partition_vector(inv.vec_len, policy.burst);
    const bool fits = fit_bytes(inv, policy.fit_layout) <= policy.lmm_bytes;
    const Target target = (fits && part.main_len > 0) ? Target::CglaWithResidual : Target::HostOnly;
    out.per_invocation.push_back({inv.kernel_id, target, part});

    const std::uint64_t weight = inv.rows * inv.count;
    if (target == Target::CglaWithResidual) {
      out.offloaded_elements += part.main_len * weight;
      out.residual_elements += part.residual_len * weight;
    } else {
      out.host_only_elements += inv.vec_len * weight;
      out.host_only_count += inv.count;
    }
  }

  const std::uint64_t total = out.offloaded_elements + out.residual_elements + out.host_only_elements;
  if (total > 0) {
    const auto t = static_cast<double>(total);
    out.offload_rate = static_cast<double>(out.offloaded_elements) / t;
    out.residual_fraction = static_cast<double>(out.residual_elements) / t;
    out.host_only_fraction = static_cast<double>(out.host_only_elements) / t;
  }
  return out;
}

Assignment assign(const WorkloadTrace& trace, const CglaConfig& config) {
  return assign(trace, policy_of(config));
}

std::vector<BurstSweepRow> burst_sweep(const WorkloadTrace& trace, const CglaConfig& config,
                                       std::span<const std::uint64_t> bursts) {
  std::vector<BurstSweepRow> rows;
  rows.reserve(bursts.size());
  for (std::uint64_t burst : bursts) {
    if (burst == 0) throw ValidationError("burst sweep: burst values must be >= 1");
    OffloadPolicy policy = policy_of(config);
    policy.burst = burst;
    const Assignment a = assign(trace, policy);
    rows.push_back({burst, a.offload_rate, a.residual_fraction, a.host_only_fraction});
  }
  return rows;
}

}  // namespace cgla
