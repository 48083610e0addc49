// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cgla/cli.hpp"
#include "cgla/error.hpp"
#include "cgla/kernels.hpp"
#include "cgla/packing.hpp"
#include "cgla/perfmodel.hpp"
#include "cgla/report.hpp"
#include "oracles.hpp"

using namespace cgla;

namespace {

const std::filesystem::path kFixtures = CGLA_FIXTURE_DIR;
constexpr std::uint64_t KB = 1024;

constexpr double kBilinearRelTol = 1e-12;
constexpr double kCoverage32Target = 93.80, kCoverageTolPp = 4.0, kBaseline32Max = 40.0;
constexpr double kResidualMax = 0.07;
constexpr double kDotRelTol = 1e-3;
constexpr double kExecFp16 = 60.89, kExecQ8 = 74.70, kExecTolPp = 5.0;
constexpr double kFastLimitS = 1.0, kKernelLimitS = 30.0;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string cli_out(const std::vector<std::string>& args, int* code = nullptr) {
  std::ostringstream out, err;
  const int rc = run(args, out, err);
  if (code) *code = rc;
  return out.str();
}

CglaConfig asic() { return load_config(kFixtures / "published/cgla_asic_28nm.cfg").cgla; }
WorkloadTrace tiny() { return load_trace(kFixtures / "traces/tiny_synthetic.trace"); }
WorkloadTrace tiny_q8() { return load_trace(kFixtures / "traces/tiny_q8_0_synthetic.trace"); }

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome c1_pdp_identity() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  o.require(pdp(1.6, 15.0) == 24.0, "pdp(1.6 s, 15 W) == 24.0 J");
  std::mt19937_64 rng(101);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const double t = oracle::uniform(rng, 0, 1000), p = oracle::uniform(rng, 0, 1000);
    const double base = pdp(t, p);
    bad += std::fabs(pdp(2 * t, p) - 2 * base) > kBilinearRelTol * base ||
           std::fabs(pdp(t, 2 * p) - 2 * base) > kBilinearRelTol * base;
  }
  o.require(bad == 0, "bilinearity on 10^4 pairs (" + std::to_string(bad) + " violations)");
  const double s = elapsed(t0);
  o.require(s < kFastLimitS, "runtime < 1 s");
  o.note("pdp(1.6,15)=" + format_double(pdp(1.6, 15.0)) + " J, bilinear 10^4/10^4, " + fmt("%.3f s", s));
  return o;
}

Outcome c2_published_ratios() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  struct Expect {
    const char* file;
    const char* device;
    const char* ratio;
  };
  const Expect cases[] = {{"devices_fp16.cfg", "jetson_agx_orin", "1.76"},
                          {"devices_fp16.cfg", "rtx_4090", "8.83"},
                          {"devices_q8_0.cfg", "jetson_agx_orin", "1.90"},
                          {"devices_q8_0.cfg", "rtx_4090", "9.83"}};
  std::string printed;
  for (const auto& c : cases) {
    const auto path = kFixtures / "published" / c.file;
    const std::string csv = cli_out({"compare", "--config", path.string()});
    const ToolkitConfig cfg = load_config(path);
    const Comparison cmp = compare_devices(nullptr, cfg.devices, cfg.cgla, cfg.reference_device);
    std::string got;
    for (const auto& row : cmp.rows) {
      if (row.device != c.device) continue;
      // The value must come from the fixture quotient, and the CLI must print it.
      double ref_pdp = 0;
      for (const auto& d : cfg.devices)
        if (d.name == cfg.reference_device) ref_pdp = d.pdp_j.value_or(*d.latency_s * d.power_w);
      double dev_pdp = 0;
      for (const auto& d : cfg.devices)
        if (d.name == c.device) dev_pdp = d.pdp_j.value_or(*d.latency_s * d.power_w);
      got = format_significant(row.ratio, 3);
      o.require(got == format_significant(dev_pdp / ref_pdp, 3), std::string(c.device) + " ratio equals fixture quotient");
      const std::string line_end = "," + got + "\n";
      o.require(csv.find(std::string(c.device) + ",") != std::string::npos && csv.find(line_end) != std::string::npos,
                std::string("compare prints ") + got + " for " + c.device);
    }
    o.require(got == c.ratio, std::string(c.file) + " " + c.device + " prints " + c.ratio + " (got " + got + ")");
    printed += (printed.empty() ? "" : " ") + got + "x";
  }
  const double s = elapsed(t0);
  o.require(s < kFastLimitS, "runtime < 1 s");
  o.note("printed " + printed + ", " + fmt("%.3f s", s));
  o.note("Q8_0 RTX PDP 123.9 J is back-derived from the stated 9.83x; the FP16 120.1 J would print " +
         format_significant(120.1 / 12.6, 3) + "x");
  return o;
}

Outcome c3_power_table() {
  Outcome o;
  CglaConfig c = asic();
  c.lanes = 1;
  const std::uint64_t sizes[] = {16 * KB, 32 * KB, 64 * KB, 128 * KB, 256 * KB};
  const double fp16[] = {0.637, 0.647, 2.16, 5.18, 11.2};
  const double q8[] = {1.3, 1.32, 4.41, 10.6, 22.9};
  int exact = 0;
  for (int i = 0; i < 5; ++i) {
    exact += lmm_power(DType::FP16, sizes[i], c) == fp16[i];
    exact += lmm_power(DType::Q8_0, sizes[i], c) == q8[i];
  }
  o.require(exact == 10, "10/10 entries exact (" + std::to_string(exact) + ")");
  c.lanes = 2;
  const double two_fp16 = lmm_power(DType::FP16, 32 * KB, c), two_q8 = lmm_power(DType::Q8_0, 32 * KB, c);
  o.require(two_fp16 == 1.294 && two_q8 == 2.64, "2-lane 32 KB = 1.294 W / 2.64 W");
  bool missing_throws = false;
  try {
    lmm_power(DType::FP16, 48 * KB, c);
  } catch (const ModelError&) {
    missing_throws = true;
  }
  o.require(missing_throws, "missing entry is a model error");
  o.note(std::to_string(exact) + "/10 exact, 2 lanes " + format_double(two_fp16) + " W / " + format_double(two_q8) +
         " W");
  return o;
}

Outcome c4_coverage() {
  Outcome o;
  std::mt19937_64 rng(202);
  int bad_mono = 0, bad_dom = 0, bad_end = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const WorkloadTrace t = random_trace(seed, 1 + seed % 64);
    std::uint64_t lo = UINT64_MAX, hi = 0;
    for (const auto& inv : t.invocations) {
      lo = std::min(lo, inv.operand_bytes_packed);
      hi = std::max(hi, inv.operand_bytes_padded);
    }
    std::vector<std::uint64_t> limits{lo - 1};
    for (int i = 0; i < 6; ++i) limits.push_back(oracle::uniform_int(rng, lo, hi));
    limits.push_back(hi);
    std::sort(limits.begin(), limits.end());
    limits.erase(std::unique(limits.begin(), limits.end()), limits.end());
    if (limits.front() == 0) limits.erase(limits.begin());
    const CoverageTable c = coverage_cdf(t, limits);
    for (std::size_t i = 0; i < limits.size(); ++i) {
      bad_dom += c.optimized_pct[i] < c.baseline_pct[i];
      if (i) bad_mono += c.optimized_pct[i] < c.optimized_pct[i - 1] || c.baseline_pct[i] < c.baseline_pct[i - 1];
    }
    bad_end += c.optimized_pct.back() != 100.0 || c.baseline_pct.back() != 100.0;
    if (limits.front() < lo) bad_end += c.optimized_pct.front() != 0.0 || c.baseline_pct.front() != 0.0;
  }
  o.require(bad_mono == 0, "CDF monotone (" + std::to_string(bad_mono) + " violations)");
  o.require(bad_dom == 0, "optimized >= baseline (" + std::to_string(bad_dom) + " violations)");
  o.require(bad_end == 0, "endpoints 0 %/100 % (" + std::to_string(bad_end) + " violations)");

  const std::vector<std::uint64_t> limits{32 * KB};
  const CoverageTable c = coverage_cdf(tiny(), limits);
  const double opt = c.optimized_pct[0], base = c.baseline_pct[0];
  o.require(opt >= 90.0 && std::fabs(opt - kCoverage32Target) <= kCoverageTolPp, "tiny optimized@32KB in 93.80 +/- 4");
  o.require(base <= kBaseline32Max, "tiny baseline@32KB <= 40 %");
  o.note("1000 random traces clean; tiny @32KB optimized " + fmt("%.2f", opt) + " %, baseline " + fmt("%.2f", base) +
         " %");
  return o;
}

Outcome c5_partitioning() {
  Outcome o;
  std::uint64_t bad = 0;
  for (std::uint64_t burst = 1; burst <= 64; ++burst)
    for (std::uint64_t n = 0; n <= 4096; ++n) {
      const Partition p = partition_vector(n, burst);
      bad += p.length() != n || p.main_len % burst != 0 || p.residual_len >= burst;
    }
  o.require(bad == 0, "reconstruction for vec_len <= 4096, burst 1..64");

  CglaConfig c = asic();
  const WorkloadTrace t = tiny();
  const double resid = assign(t, c).residual_fraction;
  o.require(resid <= kResidualMax, "tiny residual_fraction <= 0.07 at burst 16");

  const std::vector<std::uint64_t> bursts{8, 16, 32, 64};
  const auto rows = burst_sweep(t, c, bursts);
  bool mono = true;
  std::string rates;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) mono = mono && rows[i].offload_rate <= rows[i - 1].offload_rate;
    rates += (i ? "/" : "") + fmt("%.4f", rows[i].offload_rate);
  }
  o.require(mono, "offload_rate non-increasing over bursts 8,16,32,64");
  o.note("reconstruction 266240/266240, residual " + fmt("%.4f", resid) + ", offload_rate " + rates);
  return o;
}

Outcome c6_kernels() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int f16_bad = 0;
  for (std::uint32_t bits = 0; bits <= 0xFFFF; ++bits) {
    const float got = f16_to_f32(Half{static_cast<std::uint16_t>(bits)});
    const double want = oracle::half_value(static_cast<std::uint16_t>(bits));
    f16_bad += std::isnan(want) ? !std::isnan(got) : !(got == want && std::signbit(got) == std::signbit(want));
  }
  o.require(f16_bad == 0, "f16_to_f32 exhaustive (" + std::to_string(f16_bad) + " mismatches)");

  std::mt19937_64 rng(303);
  int f16_dot_bad = 0, f16_pure = 0, q8_dot_bad = 0, q8_pure = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    const std::size_t n = oracle::uniform_int(rng, 1, 4096);
    std::vector<Half> a(n), b(n);
    std::vector<double> da(n), db(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = f32_to_f16(static_cast<float>(oracle::uniform(rng, -1, 1)));
      b[i] = f32_to_f16(static_cast<float>(oracle::uniform(rng, -1, 1)));
      da[i] = oracle::half_value(a[i].bits);
      db[i] = oracle::half_value(b[i].bits);
    }
    const double want = oracle::dot(da, db), mag = oracle::abs_dot(da, db);
    const double err = std::fabs(dot_f16(a, b) - want);
    f16_dot_bad += err > kDotRelTol * mag;
    f16_pure += err > kDotRelTol * std::fabs(want);
  }
  for (int iter = 0; iter < 10000; ++iter) {
    const std::size_t n = oracle::uniform_int(rng, 1, 4096);
    std::vector<float> xa(n), xb(n);
    for (auto& v : xa) v = static_cast<float>(oracle::uniform(rng, -1, 1));
    for (auto& v : xb) v = static_cast<float>(oracle::uniform(rng, -1, 1));
    const auto qa = quantize_row_q8_0(xa), qb = quantize_row_q8_0(xb);
    std::vector<double> da, db;
    for (const auto& blk : qa)
      for (float v : dequantize(blk)) da.push_back(v);
    for (const auto& blk : qb)
      for (float v : dequantize(blk)) db.push_back(v);
    const double want = oracle::dot(da, db), mag = oracle::abs_dot(da, db);
    const double err = std::fabs(dot_q8_0(qa, qb) - want);
    q8_dot_bad += err > kDotRelTol * mag;
    q8_pure += err > kDotRelTol * std::fabs(want);
  }
  o.require(f16_dot_bad == 0, "dot_f16 within 1e-3 (" + std::to_string(f16_dot_bad) + " misses)");
  o.require(q8_dot_bad == 0, "dot_q8_0 within 1e-3 (" + std::to_string(q8_dot_bad) + " misses)");

  int rt_bad = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    const double scale = std::pow(10.0, oracle::uniform(rng, -6, 4));
    std::array<float, 32> x{};
    for (auto& v : x) v = static_cast<float>(oracle::uniform(rng, -scale, scale));
    const Q8Block blk = quantize_q8_0(x);
    float amax = 0;
    for (float v : x) amax = std::max(amax, std::fabs(v));
    const double d = amax / 127.0f, dh = oracle::half_value(blk.scale.bits);
    const auto y = dequantize(blk);
    for (std::size_t i = 0; i < 32; ++i)
      rt_bad += std::fabs(x[i] - y[i]) > d / 2 + std::fabs(blk.quants[i]) * std::fabs(dh - d) + 4 * amax * 0x1.0p-24;
  }
  o.require(rt_bad == 0, "Q8_0 round-trip bound (" + std::to_string(rt_bad) + " violations)");
  const double s = elapsed(t0);
  o.require(s < kKernelLimitS, "runtime < 30 s");
  o.note("f16 65536/65536; dot errors measured against sum|a_i*b_i|, pure-relative misses f16 " +
         std::to_string(f16_pure) + ", q8 " + std::to_string(q8_pure) + " of 10^4 (cancellation); " +
         fmt("%.2f s", s));
  return o;
}

Outcome c7_breakdown_ushape() {
  Outcome o;
  const CglaConfig c = asic();
  const double fp16 = simulate(tiny(), c).breakdown.exec_pct;
  const double q8 = simulate(tiny_q8(), c).breakdown.exec_pct;
  o.require(std::fabs(fp16 - kExecFp16) <= kExecTolPp, "EXEC FP16 within 60.89 +/- 5");
  o.require(std::fabs(q8 - kExecQ8) <= kExecTolPp, "EXEC Q8_0 within 74.70 +/- 5");

  std::string argmins;
  const std::string cfg = (kFixtures / "published/cgla_asic_28nm.cfg").string();
  for (const char* trace : {"tiny_synthetic.trace", "tiny_q8_0_synthetic.trace"}) {
    const std::string out = cli_out({"sweep-lmm", "--trace", (kFixtures / "traces" / trace).string(), "--config", cfg,
                                     "--sizes", "16K,32K,64K,128K,256K", "--format", "json"});
    const std::uint64_t best = argmin_pdp(lmm_sweep_from_json(json::parse(out)));
    o.require(best == 32 * KB, std::string("argmin PDP at 32 KB for ") + trace);
    argmins += (argmins.empty() ? "" : "/") + std::to_string(best / KB) + "KB";
  }

  // Mechanism on arbitrary configs.
  std::mt19937_64 rng(404);
  const std::vector<std::uint64_t> sizes{16 * KB, 32 * KB, 64 * KB, 128 * KB, 256 * KB};
  int lat_bad = 0, pow_bad = 0, rejects = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    CglaConfig r;
    r.lanes = oracle::uniform_int(rng, 1, 4);
    r.pes_per_lane = oracle::uniform_int(rng, 1, 128);
    r.burst = oracle::uniform_int(rng, 1, 64);
    r.freq_hz = oracle::uniform_int(rng, 50'000'000, 2'000'000'000);
    r.logical_threads = oracle::uniform_int(rng, 1, 8);
    r.fit_layout = (rng() & 1) ? FitLayout::Packed : FitLayout::Padded;
    r.host_dot_rate = std::pow(10.0, oracle::uniform(rng, 7, 10));
    r.host_power_w = oracle::uniform(rng, 0.1, 5);
    for (DType dt : {DType::FP16, DType::Q8_0}) {
      r.phase_costs[dt] = {oracle::uniform(rng, 0, 500), oracle::uniform(rng, 0, 1),
                           std::pow(10.0, oracle::uniform(rng, -1, 3)), oracle::uniform(rng, 0, 1)};
      double w = oracle::uniform(rng, 0.1, 2);
      for (auto s : sizes) r.power_table[{dt, s}] = (w += oracle::uniform(rng, 0, 5));
    }
    const auto rows = lmm_sweep(random_trace(seed, 30), r, sizes);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      lat_bad += rows[i].latency_s > rows[i - 1].latency_s;
      for (DType dt : {DType::FP16, DType::Q8_0})
        pow_bad += lmm_power(dt, sizes[i], r) < lmm_power(dt, sizes[i - 1], r);
    }
    CglaConfig dec = r;
    dec.power_table[{DType::FP16, 256 * KB}] = dec.power_table[{DType::FP16, 128 * KB}] * 0.5;
    try {
      validate(dec);
    } catch (const ValidationError&) {
      ++rejects;
    }
  }
  o.require(lat_bad == 0, "latency non-increasing in LMM size on 300 random configs");
  o.require(pow_bad == 0 && rejects == 300, "power non-decreasing, decreasing tables rejected");
  o.note("EXEC FP16 " + fmt("%.2f", fp16) + " %, Q8_0 " + fmt("%.2f", q8) + " %; argmin PDP " + argmins +
         "; 300 random configs monotone");
  return o;
}

Outcome c8_determinism() {
  Outcome o;
  const std::string tiny_path = (kFixtures / "traces/tiny_synthetic.trace").string();
  const std::string q8_path = (kFixtures / "traces/tiny_q8_0_synthetic.trace").string();
  const std::string cfg = (kFixtures / "published/cgla_asic_28nm.cfg").string();
  const std::vector<std::vector<std::string>> commands = {
      {"generate", "--spec", (kFixtures / "models/tiny_fp16.spec").string()},
      {"generate", "--random", "50", "--seed", "42"},
      {"coverage", "--trace", tiny_path},
      {"offload", "--trace", tiny_path, "--config", cfg},
      {"simulate", "--trace", q8_path, "--config", cfg},
      {"sweep-lmm", "--trace", tiny_path, "--config", cfg},
      {"sweep-burst", "--trace", tiny_path, "--config", cfg},
      {"compare", "--config", (kFixtures / "published/devices_q8_0.cfg").string()},
      {"calibrate", "--trace", tiny_path, "--config", cfg, "--target-exec", "60.89"},
  };
  int runs = 0;
  for (const auto& base : commands)
    for (const char* format : {"csv", "markdown", "json"}) {
      auto args = base;
      args.push_back("--format");
      args.push_back(format);
      int rc1 = 0, rc2 = 0;
      const std::string a = cli_out(args, &rc1), b = cli_out(args, &rc2);
      o.require(rc1 == 0 && rc2 == 0 && !a.empty(), base[0] + " --format " + format + " runs");
      o.require(a == b, base[0] + " --format " + format + " byte-identical");
      ++runs;
    }
  o.note(std::to_string(runs) + " subcommand/format pairs identical across repeated runs");
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 PDP identity", c1_pdp_identity},
      {"2 published PDP ratios", c2_published_ratios},
      {"3 LMM power lookup", c3_power_table},
      {"4 coverage mechanism", c4_coverage},
      {"5 offload partitioning", c5_partitioning},
      {"6 kernel correctness", c6_kernels},
      {"7 breakdown and U-shape", c7_breakdown_ushape},
      {"8 determinism", c8_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%d/8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
