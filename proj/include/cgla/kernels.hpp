#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cgla/partition.hpp"

namespace cgla {

/// IEEE 754 binary16 value held by its encoding. Every bit pattern is valid.
struct Half {
  std::uint16_t bits = 0;

  constexpr Half() = default;
  constexpr explicit Half(std::uint16_t b) : bits(b) {}
  friend constexpr bool operator==(Half, Half) = default;
};

/// Exact binary16 -> binary32 widening. NaNs come out quiet.
float f16_to_f32(Half h) noexcept;

/// binary32 -> binary16, round to nearest even. Overflow goes to infinity.
Half f32_to_f16(float f) noexcept;

/// Accumulation order of the offloaded FP16 dot product.
///
/// Two 32-bit FMAs share one 64-bit datapath (simd_width) and four logical
/// FMA threads are time-multiplexed onto each FPU (logical_threads), so the
/// hardware keeps simd_width * logical_threads independent partial sums.
/// Element j of a burst lands in slot j mod (simd_width * logical_threads):
/// lane = slot mod simd_width, thread = slot / simd_width. Each slot
/// accumulates sequentially with FMA across bursts. The final reduction is
/// thread-major (threads summed in order for each SIMD lane) and then the
/// SIMD pair is combined, lane 0 first.
struct AccumulationPlan {
  std::uint32_t simd_width = 2;
  std::uint32_t logical_threads = 4;
  std::uint64_t burst = 16;

  std::uint32_t slots() const noexcept { return simd_width * logical_threads; }
};

/// Plan-ordered FP16 dot product with FP32 products and accumulators.
/// Throws ValidationError on length mismatch or a degenerate plan.
float dot_f16(std::span<const Half> a, std::span<const Half> b,
              const AccumulationPlan& plan = {});

/// Plain left-to-right FP32 accumulation; what the host does with residuals.
float dot_f16_sequential(std::span<const Half> a, std::span<const Half> b);

inline constexpr std::size_t kQ8BlockElems = 32;
inline constexpr std::size_t kQ8BlockBytes = 34;

/// Q8_0 block: one binary16 scale and 32 signed 8-bit quants.
struct Q8Block {
  Half scale;
  std::array<std::int8_t, kQ8BlockElems> quants{};

  friend bool operator==(const Q8Block&, const Q8Block&) = default;
};

/// d = max|x| / 127, q = round-half-away(x / d) clamped to [-127, 127].
/// Throws ValidationError for non-finite input or a scale beyond binary16 range.
Q8Block quantize_q8_0(std::span<const float> x);

/// Quantizes a whole row; the tail block is zero-filled.
std::vector<Q8Block> quantize_row_q8_0(std::span<const float> x);

std::array<float, kQ8BlockElems> dequantize(const Q8Block& block) noexcept;

/// Sum over blocks of d_a * d_b * (integer dot of quants), block order, FP32.
float dot_q8_0(std::span<const Q8Block> a, std::span<const Q8Block> b);

/// Mixed execution of one dot product: the main segment in plan order (array
/// side) plus the residual accumulated sequentially (host side).
float execute_partitioned(std::span<const Half> a, std::span<const Half> b,
                          const Partition& partition, const AccumulationPlan& plan = {});

/// Little-endian 34-byte records: scale bits, then 32 quants.
std::vector<std::uint8_t> encode_q8_blocks(std::span<const Q8Block> blocks);
std::vector<Q8Block> decode_q8_blocks(std::span<const std::uint8_t> bytes);
void write_q8_blocks(const std::filesystem::path& path, std::span<const Q8Block> blocks);
std::vector<Q8Block> read_q8_blocks(const std::filesystem::path& path);

}  // namespace cgla
