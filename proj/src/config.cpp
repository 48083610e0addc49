#include "cgla/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "cgla/error.hpp"

namespace cgla {

std::string_view dtype_key(DType dtype) noexcept { return dtype == DType::FP16 ? "fp16" : "q8_0"; }

const PhaseCosts& CglaConfig::costs(DType dtype) const {
  const auto it = phase_costs.find(dtype);
  if (it == phase_costs.end())
    throw ModelError("config '" + name + "': no phase costs for dtype " + std::string(to_string(dtype)));
  return it->second;
}

void validate(const CglaConfig& c) {
  auto positive = [&](std::uint64_t v, const char* field) {
    if (v == 0) throw ValidationError("config '" + c.name + "': " + field + " must be >= 1");
  };
  positive(c.lanes, "lanes");
  positive(c.pes_per_lane, "pes_per_lane");
  positive(c.lmm_bytes, "lmm_bytes");
  positive(c.burst, "burst");
  positive(c.freq_hz, "freq_hz");
  positive(c.simd_width, "simd_width");
  positive(c.logical_threads, "logical_threads");

  auto finite_positive = [&](double v, const std::string& field) {
    if (!std::isfinite(v) || v <= 0.0)
      throw ValidationError("config '" + c.name + "': " + field + " must be a finite value > 0");
  };
  auto finite_nonneg = [&](double v, const std::string& field) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("config '" + c.name + "': " + field + " must be a finite value >= 0");
  };
  finite_positive(c.host_dot_rate, "host_dot_rate_elems_per_s");
  finite_nonneg(c.host_power_w, "host_power_w");

  for (const auto& [dtype, pc] : c.phase_costs) {
    const std::string p(dtype_key(dtype));
    finite_nonneg(pc.conf_cycles, p + ".conf_cycles");
    finite_nonneg(pc.load_cycles_per_byte, p + ".load_cycles_per_byte");
    finite_positive(pc.exec_cycles_per_element, p + ".exec_cycles_per_element");
    finite_nonneg(pc.drain_cycles_per_byte, p + ".drain_cycles_per_byte");
  }

  // Keys are ordered by (dtype, size), so each dtype's entries are adjacent and ascending.
  const std::pair<DType, std::uint64_t>* prev_key = nullptr;
  double prev_w = 0.0;
  for (const auto& entry : c.power_table) {
    const auto& [key, watts] = entry;
    finite_nonneg(watts, "power table entry");
    if (prev_key && prev_key->first == key.first && watts < prev_w)
      throw ValidationError("config '" + c.name + "': power table for " + std::string(to_string(key.first)) +
                            " decreases at " + std::to_string(key.second) + " bytes");
    prev_key = &key;
    prev_w = watts;
  }
}

void validate(const DeviceProfile& d) {
  if (d.name.empty()) throw ValidationError("device with empty name");
  if (!std::isfinite(d.power_w) || d.power_w <= 0.0)
    throw ValidationError("device '" + d.name + "': power_w must be > 0");
  if (d.latency_model == LatencyModel::MeasuredFixed && !d.latency_s)
    throw ValidationError("device '" + d.name + "': measured_fixed device needs latency_s");
  if (d.latency_s && (!std::isfinite(*d.latency_s) || *d.latency_s < 0.0))
    throw ValidationError("device '" + d.name + "': latency_s must be >= 0");
  if (d.pdp_j && (!std::isfinite(*d.pdp_j) || *d.pdp_j < 0.0))
    throw ValidationError("device '" + d.name + "': pdp_j must be >= 0");
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct LineCtx {
  const std::string& source;
  std::size_t line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source, line, key, what); }

  std::uint64_t u64(std::string_view v) const {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
      fail("expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
  }

  double real(std::string_view v) const {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
      fail("expected a number, got '" + std::string(v) + "'");
    return out;
  }

  bool boolean(std::string_view v) const {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail("expected true or false, got '" + std::string(v) + "'");
  }

  DType dtype(std::string_view v) const {
    if (v == "fp16") return DType::FP16;
    if (v == "q8_0") return DType::Q8_0;
    fail("unknown dtype '" + std::string(v) + "' (expected fp16 or q8_0)");
  }
};

std::vector<std::string_view> split_dots(std::string_view key) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

}  // namespace

ToolkitConfig parse_config(std::string_view text, const std::string& source) {
  ToolkitConfig out;
  CglaConfig& c = out.cgla;
  std::set<std::string, std::less<>> seen;
  std::vector<std::string> device_order;
  std::map<std::string, DeviceProfile, std::less<>> devices;
  std::map<std::string, std::size_t, std::less<>> device_line;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto body = trim(raw);
    if (body.empty()) continue;

    const auto eq = body.find('=');
    const std::string key(trim(body.substr(0, eq == std::string_view::npos ? body.size() : eq)));
    const LineCtx ctx{source, line_no, key};
    if (eq == std::string_view::npos) ctx.fail("expected key=value");
    const auto value = trim(body.substr(eq + 1));
    if (!seen.insert(key).second) ctx.fail("duplicate key");

    const auto parts = split_dots(key);
    if (parts.size() == 1) {
      if (key == "name") c.name = std::string(value);
      else if (key == "lanes") c.lanes = ctx.u64(value);
      else if (key == "pes_per_lane") c.pes_per_lane = ctx.u64(value);
      else if (key == "lmm_bytes") c.lmm_bytes = ctx.u64(value);
      else if (key == "burst") c.burst = ctx.u64(value);
      else if (key == "freq_hz") c.freq_hz = ctx.u64(value);
      else if (key == "simd_width") c.simd_width = ctx.u64(value);
      else if (key == "logical_threads") c.logical_threads = ctx.u64(value);
      else if (key == "result_bytes") c.result_bytes = ctx.u64(value);
      else if (key == "host_power_w") c.host_power_w = ctx.real(value);
      else if (key == "host_dot_rate_elems_per_s") c.host_dot_rate = ctx.real(value);
      else if (key == "fallback_unprofitable") c.fallback_unprofitable = ctx.boolean(value);
      else if (key == "reference_device") out.reference_device = std::string(value);
      else if (key == "fit_layout") {
        if (value == "packed") c.fit_layout = FitLayout::Packed;
        else if (value == "padded") c.fit_layout = FitLayout::Padded;
        else ctx.fail("expected packed or padded");
      } else {
        ctx.fail("unknown key");
      }
    } else if (parts.size() == 2 && (parts[0] == "fp16" || parts[0] == "q8_0")) {
      PhaseCosts& pc = c.phase_costs[ctx.dtype(parts[0])];
      const double v = ctx.real(value);
      if (parts[1] == "conf_cycles") pc.conf_cycles = v;
      else if (parts[1] == "load_cycles_per_byte") pc.load_cycles_per_byte = v;
      else if (parts[1] == "exec_cycles_per_element") pc.exec_cycles_per_element = v;
      else if (parts[1] == "drain_cycles_per_byte") pc.drain_cycles_per_byte = v;
      else ctx.fail("unknown phase cost");
    } else if (parts.size() == 3 && parts[0] == "power") {
      const DType dt = ctx.dtype(parts[1]);
      const auto suffix = std::string_view("_bytes_w");
      if (!parts[2].ends_with(suffix)) ctx.fail("power entries are named power.<dtype>.<n>_bytes_w");
      const std::uint64_t bytes = ctx.u64(parts[2].substr(0, parts[2].size() - suffix.size()));
      c.power_table[{dt, bytes}] = ctx.real(value);
    } else if (parts.size() == 2 && parts[0] == "power_unit") {
      c.power_units[ctx.dtype(parts[1])] = ctx.u64(value);
    } else if (parts.size() == 3 && parts[0] == "device") {
      const std::string name(parts[1]);
      if (!devices.contains(name)) {
        device_order.push_back(name);
        devices[name].name = name;
        device_line[name] = line_no;
      }
      DeviceProfile& d = devices[name];
      if (parts[2] == "power_w") d.power_w = ctx.real(value);
      else if (parts[2] == "latency_s") d.latency_s = ctx.real(value);
      else if (parts[2] == "pdp_j") d.pdp_j = ctx.real(value);
      else if (parts[2] == "latency_model") {
        if (value == "measured_fixed") d.latency_model = LatencyModel::MeasuredFixed;
        else if (value == "cgla_sim") d.latency_model = LatencyModel::CglaSim;
        else ctx.fail("expected measured_fixed or cgla_sim");
      } else {
        ctx.fail("unknown device field");
      }
    } else {
      ctx.fail("unknown key");
    }
  }

  for (const auto& name : device_order) {
    try {
      validate(devices[name]);
    } catch (const ValidationError& e) {
      throw ParseError(source, device_line[name], "device." + name, e.what());
    }
    out.devices.push_back(devices[name]);
  }
  if (!out.reference_device.empty() &&
      std::none_of(out.devices.begin(), out.devices.end(),
                   [&](const DeviceProfile& d) { return d.name == out.reference_device; }))
    throw ValidationError(source + ": reference_device '" + out.reference_device + "' is not a listed device");
  validate(c);
  return out;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.string());
}

std::string format_config(const ToolkitConfig& config) {
  const CglaConfig& c = config.cgla;
  std::ostringstream o;
  o << "name=" << c.name << "\n"
    << "lanes=" << c.lanes << "\n"
    << "pes_per_lane=" << c.pes_per_lane << "\n"
    << "lmm_bytes=" << c.lmm_bytes << "\n"
    << "burst=" << c.burst << "\n"
    << "freq_hz=" << c.freq_hz << "\n"
    << "simd_width=" << c.simd_width << "\n"
    << "logical_threads=" << c.logical_threads << "\n"
    << "result_bytes=" << c.result_bytes << "\n"
    << "fit_layout=" << (c.fit_layout == FitLayout::Packed ? "packed" : "padded") << "\n"
    << "fallback_unprofitable=" << (c.fallback_unprofitable ? "true" : "false") << "\n"
    << "host_power_w=" << format_double(c.host_power_w) << "\n"
    << "host_dot_rate_elems_per_s=" << format_double(c.host_dot_rate) << "\n";
  for (const auto& [dtype, pc] : c.phase_costs) {
    const auto k = dtype_key(dtype);
    o << k << ".conf_cycles=" << format_double(pc.conf_cycles) << "\n"
      << k << ".load_cycles_per_byte=" << format_double(pc.load_cycles_per_byte) << "\n"
      << k << ".exec_cycles_per_element=" << format_double(pc.exec_cycles_per_element) << "\n"
      << k << ".drain_cycles_per_byte=" << format_double(pc.drain_cycles_per_byte) << "\n";
  }
  for (const auto& [key, watts] : c.power_table)
    o << "power." << dtype_key(key.first) << "." << key.second << "_bytes_w=" << format_double(watts) << "\n";
  for (const auto& [dtype, units] : c.power_units) o << "power_unit." << dtype_key(dtype) << "=" << units << "\n";
  for (const auto& d : config.devices) {
    o << "device." << d.name << ".latency_model="
      << (d.latency_model == LatencyModel::MeasuredFixed ? "measured_fixed" : "cgla_sim") << "\n"
      << "device." << d.name << ".power_w=" << format_double(d.power_w) << "\n";
    if (d.latency_s) o << "device." << d.name << ".latency_s=" << format_double(*d.latency_s) << "\n";
    if (d.pdp_j) o << "device." << d.name << ".pdp_j=" << format_double(*d.pdp_j) << "\n";
  }
  if (!config.reference_device.empty()) o << "reference_device=" << config.reference_device << "\n";
  return o.str();
}

}  // namespace cgla
