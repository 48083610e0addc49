#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cgla/config.hpp"
#include "cgla/partition.hpp"
#include "cgla/workload.hpp"

namespace cgla {

enum class Target { CglaWithResidual, HostOnly };

std::string_view to_string(Target target) noexcept;

struct OffloadPolicy {
  std::uint64_t lmm_bytes = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t burst = 16;
  FitLayout fit_layout = FitLayout::Packed;
};

OffloadPolicy policy_of(const CglaConfig& config) noexcept;

struct InvocationAssignment {
  std::string kernel_id;
  Target target = Target::HostOnly;
  Partition partition;
};

/// Element-weighted split of the trace. The three fractions sum to one for
/// any non-empty trace and are all zero for an empty one.
struct Assignment {
  std::vector<InvocationAssignment> per_invocation;
  std::uint64_t offloaded_elements = 0;
  std::uint64_t residual_elements = 0;
  std::uint64_t host_only_elements = 0;
  std::uint64_t host_only_count = 0;  // count-weighted invocations
  double offload_rate = 0.0;
  double residual_fraction = 0.0;
  double host_only_fraction = 0.0;
};

/// Bytes used for the admission test under the given layout.
std::uint64_t fit_bytes(const KernelInvocation& inv, FitLayout layout) noexcept;

/// HOST_ONLY iff the footprint exceeds the LMM or no full burst exists;
/// otherwise the main segment goes to the array and the residual to the host.
/// A footprint equal to the LMM size fits. Output order follows the trace.
Assignment assign(const WorkloadTrace& trace, const OffloadPolicy& policy);
Assignment assign(const WorkloadTrace& trace, const CglaConfig& config);

struct BurstSweepRow {
  std::uint64_t burst = 0;
  double offload_rate = 0.0;
  double residual_fraction = 0.0;
  double host_only_fraction = 0.0;
};

/// Throws ValidationError for a zero burst.
std::vector<BurstSweepRow> burst_sweep(const WorkloadTrace& trace, const CglaConfig& config,
                                       std::span<const std::uint64_t> bursts);

}  // namespace cgla
