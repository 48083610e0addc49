#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "cgla/config.hpp"
#include "cgla/error.hpp"

using namespace cgla;

namespace {

const std::filesystem::path kFixtures = CGLA_FIXTURE_DIR;

void expect_field(const std::string& text, const std::string& field, std::size_t line) {
  try {
    parse_config(text, "c.cfg");
    ADD_FAILURE() << "no error for: " << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), field) << e.what();
    EXPECT_EQ(e.line(), line) << e.what();
  }
}

}  // namespace

TEST(Config, ShippedAsicPreset) {
  const ToolkitConfig cfg = load_config(kFixtures / "published/cgla_asic_28nm.cfg");
  const CglaConfig& c = cfg.cgla;
  EXPECT_EQ(c.lanes, 2u);
  EXPECT_EQ(c.pes_per_lane, 64u);
  EXPECT_EQ(c.freq_hz, 840'000'000u);
  EXPECT_EQ(c.burst, 16u);
  EXPECT_EQ(c.parallelism(), 64u * 2 * 2 * 4);
  EXPECT_EQ(c.power_table.size(), 10u);
  EXPECT_EQ(c.power_table.at({DType::FP16, 32768}), 0.647);
  EXPECT_EQ(c.power_units.at(DType::Q8_0), 46u);
  EXPECT_TRUE(c.fallback_unprofitable);
  EXPECT_EQ(c.host_power_w, 0.6485);
  EXPECT_NO_THROW(c.costs(DType::FP16));
  EXPECT_NO_THROW(c.costs(DType::Q8_0));
}

TEST(Config, FpgaPresetDiffersOnlyInClockAndName) {
  CglaConfig asic = load_config(kFixtures / "published/cgla_asic_28nm.cfg").cgla;
  const CglaConfig fpga = load_config(kFixtures / "published/cgla_fpga_140mhz.cfg").cgla;
  EXPECT_EQ(asic.freq_hz, 6 * fpga.freq_hz);
  asic.freq_hz = fpga.freq_hz;
  asic.name = fpga.name;
  EXPECT_EQ(asic, fpga);
}

TEST(Config, FormatRoundTrips) {
  for (const char* f : {"published/cgla_asic_28nm.cfg", "published/devices_fp16.cfg", "published/devices_q8_0.cfg"}) {
    const ToolkitConfig cfg = load_config(kFixtures / f);
    const std::string text = format_config(cfg);
    EXPECT_EQ(parse_config(text), cfg) << f;
    EXPECT_EQ(format_config(parse_config(text)), text) << f;
  }
}

TEST(Config, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(format_double(0.647), "0.647");
  EXPECT_EQ(format_double(840e6), "8.4e+08");
  EXPECT_EQ(format_double(1294), "1294");
  EXPECT_EQ(format_double(0.1 + 0.2), "0.30000000000000004");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::bit_cast<double>(rng() & 0x7fefffffffffffffull);
    ASSERT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(Config, Devices) {
  const ToolkitConfig cfg = load_config(kFixtures / "published/devices_fp16.cfg");
  ASSERT_EQ(cfg.devices.size(), 3u);
  EXPECT_EQ(cfg.devices[0].name, "jetson_agx_orin");
  EXPECT_EQ(cfg.devices[0].latency_s, 1.6);
  EXPECT_FALSE(cfg.devices[0].pdp_j.has_value());
  EXPECT_EQ(cfg.devices[1].pdp_j, 120.1);
  EXPECT_EQ(cfg.reference_device, "imax_asic_28nm");
}

TEST(Config, ErrorsNameTheField) {
  expect_field("lanes=two\n", "lanes", 1);
  expect_field("# c\nname=x\nfreq_hz=-5\n", "freq_hz", 3);
  expect_field("lanes=1\nlanes=2\n", "lanes", 2);
  expect_field("colour=red\n", "colour", 1);
  expect_field("fp16.warp_cycles=1\n", "fp16.warp_cycles", 1);
  expect_field("power.fp32.1024_bytes_w=1\n", "power.fp32.1024_bytes_w", 1);
  expect_field("power.fp16.1024_w=1\n", "power.fp16.1024_w", 1);
  expect_field("fit_layout=diagonal\n", "fit_layout", 1);
  expect_field("fallback_unprofitable=maybe\n", "fallback_unprofitable", 1);
  expect_field("device.gpu.latency_model=guess\n", "device.gpu.latency_model", 1);
  expect_field("device.gpu.power_w=5\n", "device.gpu", 1);  // measured but no latency
  expect_field("lanes\n", "lanes", 1);
  EXPECT_THROW(load_config(kFixtures / "published/missing.cfg"), IoError);
}

TEST(Config, Validation) {
  EXPECT_THROW(parse_config("lanes=0\n"), ValidationError);
  EXPECT_THROW(parse_config("burst=0\n"), ValidationError);
  EXPECT_THROW(parse_config("host_dot_rate_elems_per_s=0\n"), ValidationError);
  EXPECT_THROW(parse_config("fp16.exec_cycles_per_element=0\n"), ValidationError);
  EXPECT_THROW(parse_config("q8_0.load_cycles_per_byte=-1\n"), ValidationError);
  EXPECT_THROW(parse_config("power.fp16.16384_bytes_w=2\npower.fp16.32768_bytes_w=1\n"), ValidationError);
  EXPECT_NO_THROW(parse_config("power.fp16.16384_bytes_w=2\npower.q8_0.32768_bytes_w=1\n"));
  EXPECT_THROW(parse_config("device.a.latency_s=1\ndevice.a.power_w=1\nreference_device=b\n"), ValidationError);
  EXPECT_THROW(parse_config("device.a.latency_s=1\ndevice.a.power_w=0\n"), ValidationError);
  EXPECT_THROW(CglaConfig{}.costs(DType::FP16), ModelError);
}
