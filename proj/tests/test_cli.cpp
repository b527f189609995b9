#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cli.hpp"

using namespace snail;
using namespace snail::cli;

TEST(Cli, NumberFormattingRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -0.199615426894369, 1e-17, 846.0, 0.0}) EXPECT_EQ(std::stod(num(x)), x) << num(x);
  EXPECT_EQ(num(0.5), "0.5");
}

TEST(Cli, Linspace) {
  const auto v = linspace(0.0, 0.3, 21);
  ASSERT_EQ(v.size(), 21u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_EQ(v.back(), 0.3);
  EXPECT_NEAR(v[10], 0.15, 1e-15);
  EXPECT_EQ(linspace(2.0, 5.0, 1), std::vector<double>{2.0});
}

TEST(Cli, ScheduleJsonRoundTrip) {
  PulseSchedule s;
  DriveTone a;
  a.frequency = 0.846;
  a.phase = 0.3;
  a.envelope = PulseEnvelope::flat_top(0.23, 32.0, 3.0, 50.0);
  a.label = "swap";
  DriveTone b;
  b.frequency = 4.479;
  b.envelope = PulseEnvelope::gaussian(0.01, 18.6);
  b.start = 10.0;
  b.target = Port::Transmon;
  b.channel = Channel::Direct;
  s.tones = {a, b};
  s.cw = ContinuousTone{0.93, 0.43, 0.0};
  s.duration = 50.0;
  const json j = schedule_to_json(s);
  const PulseSchedule r = schedule_from_json(j);
  EXPECT_EQ(schedule_to_json(r).dump(), j.dump());
  ASSERT_EQ(r.tones.size(), 2u);
  EXPECT_EQ(r.tones[1].target, Port::Transmon);
  EXPECT_EQ(r.tones[1].channel, Channel::Direct);
  for (double t : {0.0, 5.0, 20.0, 49.0}) {
    EXPECT_EQ(r.tones[0].amplitude_at(t), s.tones[0].amplitude_at(t));
    EXPECT_EQ(r.tones[1].amplitude_at(t), s.tones[1].amplitude_at(t));
  }
  ASSERT_TRUE(r.cw.has_value());
  EXPECT_EQ(r.cw->amplitude, 0.43);
}

TEST(Cli, RunWritesManifest) {
  const auto dir = std::filesystem::temp_directory_path() / "snail_cli_test";
  std::filesystem::remove_all(dir);
  cli::Run run("effective", Config::defaults(), dir, 42, 1);
  run.write_json("thing", "snailsim.thing", json{{"x", 1}});
  run.write_csv("rows", {"a", "b"}, {{"1", "2"}});
  run.finish();
  std::ifstream in(dir / "manifest.json");
  const json m = json::parse(in);
  EXPECT_EQ(m["subcommand"], "effective");
  EXPECT_EQ(m["seed"], 42);
  EXPECT_EQ(m["version"], SNAIL_VERSION);
  EXPECT_EQ(m["config_hash"], "sha256:" + sha256_hex(Config::defaults().canonical()));
  EXPECT_EQ(m["outputs"].size(), 2u);
  EXPECT_TRUE(m.contains("wall_time_s"));
  EXPECT_EQ(m["parameters"]["circuit"]["flux_quanta"], 0.34);
  std::ifstream thing(dir / "thing.json");
  const json t = json::parse(thing);
  EXPECT_EQ(t["schema"], "snailsim.thing");
  EXPECT_EQ(t["schema_version"], kSchemaVersion);
}

TEST(Cli, CriterionLine) {
  const std::string line = format_criterion({3, true, "ok", 1.5});
  EXPECT_NE(line.find("3"), std::string::npos);
  EXPECT_NE(line.find("PASS"), std::string::npos);
  EXPECT_NE(format_criterion({7, false, "low", 2.0}).find("FAIL"), std::string::npos);
}
