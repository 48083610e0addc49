#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cgla {

enum class DType { FP16, Q8_0 };

std::string_view to_string(DType dtype) noexcept;
/// Accepts "FP16"/"Q8_0" in any case. Throws ValidationError otherwise.
DType parse_dtype(std::string_view text);

inline constexpr std::uint64_t kDefaultAlignment = 32;

/// One dot-product kernel shape and how often it runs. The operand footprints
/// cover both operands: one shared vector plus `rows` vectors of vec_len.
struct KernelInvocation {
  std::string kernel_id;
  DType dtype = DType::FP16;
  std::uint64_t vec_len = 1;
  std::uint64_t rows = 1;
  std::uint64_t operand_bytes_padded = 0;
  std::uint64_t operand_bytes_packed = 0;
  std::uint64_t count = 1;

  std::uint64_t dot_products() const noexcept { return rows * count; }
  std::uint64_t elements() const noexcept { return vec_len * rows * count; }

  friend bool operator==(const KernelInvocation&, const KernelInvocation&) = default;
};

struct WorkloadTrace {
  std::string model_name;
  std::uint64_t alignment_bytes = kDefaultAlignment;
  std::vector<KernelInvocation> invocations;

  std::uint64_t total_dot_products() const noexcept;
  std::uint64_t total_elements() const noexcept;
  std::uint64_t total_count() const noexcept;

  friend bool operator==(const WorkloadTrace&, const WorkloadTrace&) = default;
};

/// Throws ValidationError naming the invocation and the violated invariant.
void validate(const KernelInvocation& inv, std::uint64_t alignment);
void validate(const WorkloadTrace& trace);

/// Transformer shape used to synthesize a Whisper-like trace.
///
/// row_tile, kv_tile and kv_pad describe how the host splits work into kernel
/// calls: projection outputs go out row_tile rows per call, attention scores
/// kv_tile keys per call, and the decoder self-attention KV cache is stored
/// padded to a multiple of kv_pad entries (the native, unpacked layout).
struct ModelShapeSpec {
  std::string name = "model";
  std::uint64_t d_model = 0;
  std::uint64_t n_heads = 0;
  std::uint64_t enc_layers = 0;
  std::uint64_t dec_layers = 0;
  std::uint64_t d_ffn = 0;
  std::uint64_t audio_ctx = 0;
  std::uint64_t text_tokens = 0;
  std::uint64_t vocab = 0;
  DType dtype = DType::FP16;
  std::uint64_t row_tile = 32;
  std::uint64_t kv_tile = 48;
  std::uint64_t kv_pad = 256;
  std::uint64_t alignment_bytes = kDefaultAlignment;

  std::uint64_t head_dim() const noexcept { return n_heads ? d_model / n_heads : 0; }
};

void validate(const ModelShapeSpec& spec);

/// One record per distinct matmul site per layer. Encoder sites run once per
/// pass; decoder sites once per generated token, with the self-attention KV
/// length growing by one each step (rows = current step for scores, vec_len =
/// current step for the value product).
WorkloadTrace generate_trace(const ModelShapeSpec& spec);

/// Uniform random trace for property tests and fuzzing; fully determined by
/// the seed.
WorkloadTrace random_trace(std::uint64_t seed, std::size_t n_invocations,
                           std::uint64_t alignment = kDefaultAlignment);

ModelShapeSpec parse_model_spec(std::string_view text, const std::string& source = "<spec>");
ModelShapeSpec load_model_spec(const std::filesystem::path& path);

/// Line format: `kernel_id dtype vec_len rows padded_bytes packed_bytes count`,
/// `#` comments, header `model_name=<s>` and optional `alignment_bytes=<n>`.
WorkloadTrace parse_trace(std::string_view text, const std::string& source = "<trace>");
std::string format_trace(const WorkloadTrace& trace);

WorkloadTrace load_trace(const std::filesystem::path& path);
void save_trace(const WorkloadTrace& trace, const std::filesystem::path& path);

// Shared by the text loaders.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace cgla
