#include "cgla/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include "cgla/error.hpp"

namespace cgla {

float f16_to_f32(Half h) noexcept {
  const std::uint32_t sign = static_cast<std::uint32_t>(h.bits & 0x8000u) << 16;
  std::uint32_t exp = (h.bits >> 10) & 0x1fu;
  std::uint32_t mant = h.bits & 0x3ffu;

  std::uint32_t out;
  if (exp == 0x1f) {
    out = sign | 0x7f800000u | (mant << 13);
    if (mant != 0) out |= 0x00400000u;
  } else if (exp != 0) {
    out = sign | ((exp + 112u) << 23) | (mant << 13);
  } else if (mant == 0) {
    out = sign;
  } else {
    // Subnormal: shift the leading one into the implicit bit position.
    std::uint32_t e = 0;
    while ((mant & 0x400u) == 0) {
      mant <<= 1;
      ++e;
    }
    mant &= 0x3ffu;
    out = sign | ((113u - e) << 23) | (mant << 13);
  }
  return std::bit_cast<float>(out);
}

Half f32_to_f16(float f) noexcept {
  const std::uint32_t u = std::bit_cast<std::uint32_t>(f);
  const auto sign = static_cast<std::uint16_t>((u >> 16) & 0x8000u);
  const std::uint32_t mag = u & 0x7fffffffu;

  if (mag >= 0x7f800000u) {
    if (mag == 0x7f800000u) return Half(sign | 0x7c00u);
    return Half(static_cast<std::uint16_t>(sign | 0x7e00u | ((mag >> 13) & 0x3ffu)));
  }
  // 65520 and above round to infinity.
  if (mag >= 0x477ff000u) return Half(sign | 0x7c00u);

  const std::uint32_t exp = mag >> 23;
  if (exp < 113) {
    // Result is subnormal (or rounds up to the smallest normal).
    const std::uint32_t shift = 126 - exp;
    if (shift > 24) return Half(sign);
    const std::uint32_t mant = (mag & 0x7fffffu) | 0x800000u;
    std::uint32_t h = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1u);
    const std::uint32_t halfway = 1u << (shift - 1);
    if (rem > halfway || (rem == halfway && (h & 1u))) ++h;
    return Half(static_cast<std::uint16_t>(sign | h));
  }

  std::uint32_t h = ((exp - 112u) << 10) | ((mag >> 13) & 0x3ffu);
  const std::uint32_t rem = mag & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (h & 1u))) ++h;
  return Half(static_cast<std::uint16_t>(sign | h));
}

namespace {

void check_plan(const AccumulationPlan& plan) {
  if (plan.simd_width == 0 || plan.logical_threads == 0 || plan.burst == 0)
    throw ValidationError("accumulation plan: simd_width, logical_threads and burst must be >= 1");
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ValidationError(std::string(what) + ": operand length mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
}

}  // namespace

float dot_f16(std::span<const Half> a, std::span<const Half> b, const AccumulationPlan& plan) {
  check_lengths(a.size(), b.size(), "dot_f16");
  check_plan(plan);

  const std::uint32_t slots = plan.slots();
  std::vector<float> acc(slots, 0.0f);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t slot = (i % plan.burst) % slots;
    acc[slot] = std::fma(f16_to_f32(a[i]), f16_to_f32(b[i]), acc[slot]);
  }

  float result = 0.0f;
  for (std::uint32_t lane = 0; lane < plan.simd_width; ++lane) {
    float lane_sum = 0.0f;
    for (std::uint32_t t = 0; t < plan.logical_threads; ++t) lane_sum += acc[t * plan.simd_width + lane];
    result = lane == 0 ? lane_sum : result + lane_sum;
  }
  return result;
}

float dot_f16_sequential(std::span<const Half> a, std::span<const Half> b) {
  check_lengths(a.size(), b.size(), "dot_f16_sequential");
  float sum = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) sum = std::fma(f16_to_f32(a[i]), f16_to_f32(b[i]), sum);
  return sum;
}

Q8Block quantize_q8_0(std::span<const float> x) {
  if (x.size() != kQ8BlockElems)
    throw ValidationError("quantize_q8_0: expected 32 inputs, got " + std::to_string(x.size()));

  float amax = 0.0f;
  for (float v : x) {
    if (!std::isfinite(v)) throw ValidationError("quantize_q8_0: non-finite input");
    amax = std::max(amax, std::fabs(v));
  }

  const float d = amax / 127.0f;
  Q8Block block;
  block.scale = f32_to_f16(d);
  if ((block.scale.bits & 0x7c00u) == 0x7c00u)
    throw ValidationError("quantize_q8_0: block scale exceeds binary16 range");
  if (d == 0.0f) return block;

  for (std::size_t i = 0; i < kQ8BlockElems; ++i) {
    const float q = std::clamp(std::round(x[i] / d), -127.0f, 127.0f);
    block.quants[i] = static_cast<std::int8_t>(q);
  }
  return block;
}

std::vector<Q8Block> quantize_row_q8_0(std::span<const float> x) {
  std::vector<Q8Block> blocks;
  blocks.reserve((x.size() + kQ8BlockElems - 1) / kQ8BlockElems);
  for (std::size_t off = 0; off < x.size(); off += kQ8BlockElems) {
    std::array<float, kQ8BlockElems> chunk{};
    const std::size_t n = std::min(kQ8BlockElems, x.size() - off);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(off), n, chunk.begin());
    blocks.push_back(quantize_q8_0(chunk));
  }
  return blocks;
}

std::array<float, kQ8BlockElems> dequantize(const Q8Block& block) noexcept {
  std::array<float, kQ8BlockElems> out{};
  const float d = f16_to_f32(block.scale);
  for (std::size_t i = 0; i < kQ8BlockElems; ++i) out[i] = static_cast<float>(block.quants[i]) * d;
  return out;
}

float dot_q8_0(std::span<const Q8Block> a, std::span<const Q8Block> b) {
  check_lengths(a.size(), b.size(), "dot_q8_0");
  float sum = 0.0f;
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::int32_t isum = 0;
    for (std::size_t i = 0; i < kQ8BlockElems; ++i)
      isum += static_cast<std::int32_t>(a[k].quants[i]) * static_cast<std::int32_t>(b[k].quants[i]);
    sum += static_cast<float>(isum) * (f16_to_f32(a[k].scale) * f16_to_f32(b[k].scale));
  }
  return sum;
}

float execute_partitioned(std::span<const Half> a, std::span<const Half> b,
                          const Partition& partition, const AccumulationPlan& plan) {
  check_lengths(a.size(), b.size(), "execute_partitioned");
  if (partition.length() != a.size())
    throw ValidationError("execute_partitioned: partition covers " + std::to_string(partition.length()) +
                          " elements, vectors have " + std::to_string(a.size()));

  const auto main = static_cast<std::size_t>(partition.main_len);
  const float on_array = dot_f16(a.first(main), b.first(main), plan);
  const float on_host = dot_f16_sequential(a.subspan(main), b.subspan(main));
  if (partition.residual_len == 0) return on_array;
  if (partition.main_len == 0) return on_host;
  return on_array + on_host;
}

std::vector<std::uint8_t> encode_q8_blocks(std::span<const Q8Block> blocks) {
  std::vector<std::uint8_t> out;
  out.reserve(blocks.size() * kQ8BlockBytes);
  for (const auto& block : blocks) {
    out.push_back(static_cast<std::uint8_t>(block.scale.bits & 0xffu));
    out.push_back(static_cast<std::uint8_t>(block.scale.bits >> 8));
    for (std::int8_t q : block.quants) out.push_back(static_cast<std::uint8_t>(q));
  }
  return out;
}

std::vector<Q8Block> decode_q8_blocks(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kQ8BlockBytes != 0)
    throw ValidationError("Q8_0 block stream length " + std::to_string(bytes.size()) +
                          " is not a multiple of 34");
  std::vector<Q8Block> blocks(bytes.size() / kQ8BlockBytes);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto* rec = bytes.data() + k * kQ8BlockBytes;
    blocks[k].scale = Half(static_cast<std::uint16_t>(rec[0] | (rec[1] << 8)));
    for (std::size_t i = 0; i < kQ8BlockElems; ++i) blocks[k].quants[i] = static_cast<std::int8_t>(rec[2 + i]);
  }
  return blocks;
}

void write_q8_blocks(const std::filesystem::path& path, std::span<const Q8Block> blocks) {
  const auto bytes = encode_q8_blocks(blocks);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Q8Block> read_q8_blocks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_q8_blocks(bytes);
}

}  // namespace cgla
