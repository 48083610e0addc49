#include "cgla/workload.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "cgla/error.hpp"
#include "cgla/packing.hpp"

namespace cgla {

std::string_view to_string(DType dtype) noexcept {
  return dtype == DType::FP16 ? "FP16" : "Q8_0";
}

DType parse_dtype(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "FP16" || upper == "F16") return DType::FP16;
  if (upper == "Q8_0") return DType::Q8_0;
  throw ValidationError("unknown dtype '" + std::string(text) + "' (expected FP16 or Q8_0)");
}

std::uint64_t WorkloadTrace::total_dot_products() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& inv : invocations) sum += inv.dot_products();
  return sum;
}

std::uint64_t WorkloadTrace::total_elements() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& inv : invocations) sum += inv.elements();
  return sum;
}

std::uint64_t WorkloadTrace::total_count() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& inv : invocations) sum += inv.count;
  return sum;
}

void validate(const KernelInvocation& inv, std::uint64_t alignment) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("invocation '" + inv.kernel_id + "': " + what);
  };
  if (inv.kernel_id.empty()) throw ValidationError("invocation with empty kernel_id");
  if (inv.vec_len == 0) fail("vec_len must be >= 1");
  if (inv.rows == 0) fail("rows must be >= 1");
  if (inv.count == 0) fail("count must be >= 1");
  if (inv.operand_bytes_packed > inv.operand_bytes_padded) fail("packed_bytes exceeds padded_bytes");
  if (alignment == 0) fail("alignment must be >= 1");
  if (inv.operand_bytes_padded % alignment != 0)
    fail("padded_bytes is not a multiple of the alignment " + std::to_string(alignment));
}

void validate(const WorkloadTrace& trace) {
  for (const auto& inv : trace.invocations) validate(inv, trace.alignment_bytes);
}

void validate(const ModelShapeSpec& spec) {
  auto positive = [](std::uint64_t v, const char* field) {
    if (v == 0) throw ValidationError(std::string("model spec: field '") + field + "' must be >= 1");
  };
  positive(spec.d_model, "d_model");
  positive(spec.n_heads, "n_heads");
  positive(spec.enc_layers, "enc_layers");
  positive(spec.d_ffn, "d_ffn");
  positive(spec.audio_ctx, "audio_ctx");
  positive(spec.vocab, "vocab");
  positive(spec.row_tile, "row_tile");
  positive(spec.kv_tile, "kv_tile");
  positive(spec.kv_pad, "kv_pad");
  positive(spec.alignment_bytes, "alignment_bytes");
  if (spec.d_model % spec.n_heads != 0)
    throw ValidationError("model spec: field 'd_model' (" + std::to_string(spec.d_model) +
                          ") is not divisible by n_heads (" + std::to_string(spec.n_heads) + ")");
  if (spec.name.empty() || spec.name.find_first_of(" \t\r\n") != std::string::npos)
    throw ValidationError("model spec: field 'name' must be a non-empty token");
}

namespace {

class TraceBuilder {
 public:
  explicit TraceBuilder(const ModelShapeSpec& spec) : spec_(spec) {
    trace_.model_name = spec.name;
    trace_.alignment_bytes = spec.alignment_bytes;
  }

  void add(std::string id, std::uint64_t vec_len, std::uint64_t rows, std::uint64_t count,
           const StagingLayout& layout = {}) {
    const Footprint fp = footprint(spec_.dtype, vec_len, rows, spec_.alignment_bytes, layout);
    trace_.invocations.push_back(
        {std::move(id), spec_.dtype, vec_len, rows, fp.padded_bytes, fp.packed_bytes, count});
  }

  // Output rows split into row_tile-sized calls; a short last tile gets its own record.
  void projection(const std::string& id, std::uint64_t vec_len, std::uint64_t out_rows,
                  std::uint64_t repeat) {
    tiled(id, vec_len, out_rows, spec_.row_tile, repeat, {});
  }

  // Per-head q.k products over kv_len keys. Heads are interleaved in the
  // native tensors, so each staged row spans the full model width.
  void scores(const std::string& id, std::uint64_t kv_len, std::uint64_t repeat, bool kv_cache) {
    StagingLayout layout{spec_.d_model, kv_cache ? KvAxis::Rows : KvAxis::None, spec_.kv_pad};
    tiled(id, spec_.head_dim(), kv_len, spec_.kv_tile, repeat * spec_.n_heads, layout);
  }

  // Per-head probabilities . V^T: head_dim rows of kv_len elements.
  void attn_value(const std::string& id, std::uint64_t kv_len, std::uint64_t repeat, bool kv_cache) {
    StagingLayout layout{0, kv_cache ? KvAxis::VecLen : KvAxis::None, spec_.kv_pad};
    add(id, kv_len, spec_.head_dim(), repeat * spec_.n_heads, layout);
  }

  WorkloadTrace finish() && { return std::move(trace_); }

 private:
  void tiled(const std::string& id, std::uint64_t vec_len, std::uint64_t total_rows, std::uint64_t tile,
             std::uint64_t repeat, const StagingLayout& layout) {
    if (total_rows <= tile) {
      add(id, vec_len, total_rows, repeat, layout);
      return;
    }
    add(id, vec_len, tile, (total_rows / tile) * repeat, layout);
    if (total_rows % tile != 0) add(id + ".tail", vec_len, total_rows % tile, repeat, layout);
  }

  const ModelShapeSpec& spec_;
  WorkloadTrace trace_;
};

}  // namespace

WorkloadTrace generate_trace(const ModelShapeSpec& spec) {
  validate(spec);
  TraceBuilder b(spec);
  const std::uint64_t d = spec.d_model;
  const std::uint64_t steps = spec.text_tokens;

  for (std::uint64_t l = 0; l < spec.enc_layers; ++l) {
    const std::string p = "enc" + std::to_string(l) + ".";
    b.projection(p + "attn_q", d, d, 1);
    b.projection(p + "attn_k", d, d, 1);
    b.projection(p + "attn_v", d, d, 1);
    b.scores(p + "self_scores", spec.audio_ctx, 1, false);
    b.attn_value(p + "self_attn_v", spec.audio_ctx, 1, false);
    b.projection(p + "attn_o", d, d, 1);
    b.projection(p + "ffn_up", d, spec.d_ffn, 1);
    b.projection(p + "ffn_down", spec.d_ffn, d, 1);
  }

  if (steps > 0) {
    for (std::uint64_t l = 0; l < spec.dec_layers; ++l) {
      const std::string p = "dec" + std::to_string(l) + ".";
      // Cross-attention keys/values come from the encoder output once per run.
      b.projection(p + "cross_k", d, d, 1);
      b.projection(p + "cross_v", d, d, 1);
      b.projection(p + "attn_q", d, d, steps);
      b.projection(p + "attn_k", d, d, steps);
      b.projection(p + "attn_v", d, d, steps);
      for (std::uint64_t t = 1; t <= steps; ++t) {
        const std::string s = p + "t" + std::to_string(t) + ".";
        b.scores(s + "self_scores", t, 1, true);
        b.attn_value(s + "self_attn_v", t, 1, true);
      }
      b.projection(p + "attn_o", d, d, steps);
      b.projection(p + "cross_q", d, d, steps);
      b.scores(p + "cross_scores", spec.audio_ctx, steps, false);
      b.attn_value(p + "cross_attn_v", spec.audio_ctx, steps, false);
      b.projection(p + "cross_o", d, d, steps);
      b.projection(p + "ffn_up", d, spec.d_ffn, steps);
      b.projection(p + "ffn_down", spec.d_ffn, d, steps);
    }
    // Logits come from a single call over the whole vocabulary per step.
    b.add("output_head", d, spec.vocab, steps);
  }
  return std::move(b).finish();
}

WorkloadTrace random_trace(std::uint64_t seed, std::size_t n_invocations, std::uint64_t alignment) {
  // Raw engine output only: std distributions are not portable across standard libraries.
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };

  WorkloadTrace trace;
  trace.model_name = "random_" + std::to_string(seed);
  trace.alignment_bytes = alignment;
  for (std::size_t i = 0; i < n_invocations; ++i) {
    const DType dtype = (rng() & 1u) ? DType::Q8_0 : DType::FP16;
    const std::uint64_t vec_len = uniform(1, 2048);
    const std::uint64_t rows = uniform(1, 96);
    StagingLayout layout;
    layout.row_stride_elems = (rng() % 3 == 0) ? vec_len + uniform(0, 512) : 0;
    const Footprint fp = footprint(dtype, vec_len, rows, alignment, layout);
    trace.invocations.push_back({"k" + std::to_string(i), dtype, vec_len, rows, fp.padded_bytes,
                                 fp.packed_bytes, uniform(1, 64)});
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

std::uint64_t parse_u64(std::string_view tok, const std::string& source, std::size_t line,
                        const std::string& field) {
  std::uint64_t value = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (tok.empty() || ec != std::errc() || ptr != end)
    throw ParseError(source, line, field, "expected a non-negative integer, got '" + std::string(tok) + "'");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    const auto body = strip_comment(line);
    if (!body.empty()) fn(line_no, body);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

}  // namespace

ModelShapeSpec parse_model_spec(std::string_view text, const std::string& source) {
  ModelShapeSpec spec;
  const std::map<std::string, std::uint64_t ModelShapeSpec::*, std::less<>> numeric = {
      {"d_model", &ModelShapeSpec::d_model},     {"n_heads", &ModelShapeSpec::n_heads},
      {"enc_layers", &ModelShapeSpec::enc_layers}, {"dec_layers", &ModelShapeSpec::dec_layers},
      {"d_ffn", &ModelShapeSpec::d_ffn},         {"audio_ctx", &ModelShapeSpec::audio_ctx},
      {"text_tokens", &ModelShapeSpec::text_tokens}, {"vocab", &ModelShapeSpec::vocab},
      {"row_tile", &ModelShapeSpec::row_tile},   {"kv_tile", &ModelShapeSpec::kv_tile},
      {"kv_pad", &ModelShapeSpec::kv_pad},       {"alignment_bytes", &ModelShapeSpec::alignment_bytes},
  };
  std::map<std::string, std::size_t, std::less<>> seen;

  for_each_line(text, [&](std::size_t line, std::string_view body) {
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line, std::string(body), "expected key=value");
    const std::string key(trim(body.substr(0, eq)));
    const auto value = trim(body.substr(eq + 1));
    if (!seen.emplace(key, line).second) throw ParseError(source, line, key, "duplicate key");
    if (key == "name") {
      spec.name = std::string(value);
    } else if (key == "dtype") {
      try {
        spec.dtype = parse_dtype(value);
      } catch (const ValidationError& e) {
        throw ParseError(source, line, key, e.what());
      }
    } else if (auto it = numeric.find(key); it != numeric.end()) {
      spec.*(it->second) = parse_u64(value, source, line, key);
    } else {
      throw ParseError(source, line, key, "unknown key");
    }
  });

  for (const char* required : {"d_model", "n_heads", "enc_layers", "dec_layers", "d_ffn", "audio_ctx",
                               "text_tokens", "vocab", "dtype"})
    if (!seen.contains(required))
      throw ValidationError(source + ": model spec: missing field '" + required + "'");
  validate(spec);
  return spec;
}

ModelShapeSpec load_model_spec(const std::filesystem::path& path) {
  return parse_model_spec(read_text_file(path), path.string());
}

WorkloadTrace parse_trace(std::string_view text, const std::string& source) {
  WorkloadTrace trace;
  bool have_name = false;
  bool have_alignment = false;
  std::vector<std::size_t> record_lines;

  for_each_line(text, [&](std::size_t line, std::string_view body) {
    if (body.starts_with("model_name=")) {
      if (have_name) throw ParseError(source, line, "model_name", "duplicate header");
      trace.model_name = std::string(trim(body.substr(11)));
      have_name = true;
      return;
    }
    if (body.starts_with("alignment_bytes=")) {
      if (have_alignment) throw ParseError(source, line, "alignment_bytes", "duplicate header");
      trace.alignment_bytes = parse_u64(trim(body.substr(16)), source, line, "alignment_bytes");
      if (trace.alignment_bytes == 0) throw ParseError(source, line, "alignment_bytes", "must be >= 1");
      have_alignment = true;
      return;
    }
    const auto tok = split_ws(body);
    if (tok.size() != 7)
      throw ParseError(source, line, "record",
                       "expected 7 fields (kernel_id dtype vec_len rows padded_bytes packed_bytes count), got " +
                           std::to_string(tok.size()));
    KernelInvocation inv;
    inv.kernel_id = std::string(tok[0]);
    try {
      inv.dtype = parse_dtype(tok[1]);
    } catch (const ValidationError& e) {
      throw ParseError(source, line, "dtype", e.what());
    }
    inv.vec_len = parse_u64(tok[2], source, line, "vec_len");
    inv.rows = parse_u64(tok[3], source, line, "rows");
    inv.operand_bytes_padded = parse_u64(tok[4], source, line, "padded_bytes");
    inv.operand_bytes_packed = parse_u64(tok[5], source, line, "packed_bytes");
    inv.count = parse_u64(tok[6], source, line, "count");
    trace.invocations.push_back(std::move(inv));
    record_lines.push_back(line);
  });

  if (!have_name) throw ParseError(source, 1, "model_name", "missing header line model_name=<name>");
  for (std::size_t i = 0; i < trace.invocations.size(); ++i) {
    try {
      validate(trace.invocations[i], trace.alignment_bytes);
    } catch (const ValidationError& e) {
      throw ParseError(source, record_lines[i], trace.invocations[i].kernel_id, e.what());
    }
  }
  return trace;
}

std::string format_trace(const WorkloadTrace& trace) {
  std::ostringstream out;
  out << "# cgla workload trace\n";
  out << "model_name=" << trace.model_name << "\n";
  out << "alignment_bytes=" << trace.alignment_bytes << "\n";
  out << "# kernel_id dtype vec_len rows padded_bytes packed_bytes count\n";
  for (const auto& inv : trace.invocations) {
    out << inv.kernel_id << ' ' << to_string(inv.dtype) << ' ' << inv.vec_len << ' ' << inv.rows << ' '
        << inv.operand_bytes_padded << ' ' << inv.operand_bytes_packed << ' ' << inv.count << '\n';
  }
  return out.str();
}

WorkloadTrace load_trace(const std::filesystem::path& path) {
  return parse_trace(read_text_file(path), path.string());
}

void save_trace(const WorkloadTrace& trace, const std::filesystem::path& path) {
  validate(trace);
  write_text_file(path, format_trace(trace));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace cgla
