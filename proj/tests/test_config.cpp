#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "cli.hpp"
#include "snail/config.hpp"
#include "snail/errors.hpp"

using namespace snail;
using nlohmann::json;

namespace {

std::string config_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError";
  return {};
}

}  // namespace

TEST(Config, DefaultsCoverDocumentedKeys) {
  const Config c = Config::defaults();
  for (const std::string& k : config_keys()) EXPECT_TRUE(c.has(k)) << k;
  EXPECT_EQ(c.values().size(), config_keys().size());
  EXPECT_DOUBLE_EQ(c.number("circuit.flux_quanta"), 0.34);
  EXPECT_EQ(c.integer("sweep.points"), 21);
  EXPECT_EQ(c.text("rb.mode"), "two_qubit");
}

TEST(Config, UnknownKeyIsNamed) {
  Config c = Config::defaults();
  const std::string msg = config_error([&] { c.set("circuit.kk=1"); });
  EXPECT_NE(msg.find("circuit.kk"), std::string::npos) << msg;
  const std::string nested = config_error([&] { c.merge(json{{"rb", {{"lenghts", {1, 2}}}}}, "test"); });
  EXPECT_NE(nested.find("rb.lenghts"), std::string::npos) << nested;
}

TEST(Config, TypeMismatchIsRejected) {
  Config c = Config::defaults();
  const std::string msg = config_error([&] { c.set("sweep.points=\"many\""); });
  EXPECT_NE(msg.find("sweep.points"), std::string::npos);
  config_error([&] { c.set("rb.lengths=3"); });
  config_error([&] { c.set("sweep.points=2.5"); });
  config_error([&] { c.set("decoherence.enabled=1"); });
}

TEST(Config, NestedAndDottedFormsAreEquivalent) {
  Config a = Config::defaults(), b = Config::defaults();
  a.merge(json{{"circuit", {{"k1", 0.08}, {"full", {{"junction_scale_ghz", 100.0}}}}}}, "a");
  b.merge(json{{"circuit.k1", 0.08}, {"circuit.full.junction_scale_ghz", 100}}, "b");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_DOUBLE_EQ(b.number("circuit.full.junction_scale_ghz"), 100.0);
}

TEST(Config, LaterSourcesWin) {
  const auto dir = std::filesystem::temp_directory_path() / "snail_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "one.json") << R"({"schema_version": 1, "sweep": {"points": 5, "flux_max": 0.2}})";
  std::ofstream(dir / "two.json") << R"({"sweep.points": 7, "description": "second"})";
  Config c = Config::defaults();
  c.merge_file((dir / "one.json").string());
  c.merge_file((dir / "two.json").string());
  EXPECT_EQ(c.integer("sweep.points"), 7);
  EXPECT_DOUBLE_EQ(c.number("sweep.flux_max"), 0.2);
  c.set("sweep.points=9");
  EXPECT_EQ(c.integer("sweep.points"), 9);
  c.set("device.mode=bare");
  EXPECT_EQ(c.text("device.mode"), "bare");

  std::ofstream(dir / "bad.json") << R"({"schema_version": 2})";
  config_error([&] { c.merge_file((dir / "bad.json").string()); });
  config_error([&] { c.merge_file((dir / "missing.json").string()); });
  std::ofstream(dir / "broken.json") << "{";
  config_error([&] { c.merge_file((dir / "broken.json").string()); });
}

TEST(Config, HashTracksContent) {
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const Config a = Config::defaults();
  Config b = Config::defaults();
  EXPECT_EQ(cli::sha256_hex(a.canonical()), cli::sha256_hex(b.canonical()));
  b.set("circuit.k1=0.0700001");
  EXPECT_NE(cli::sha256_hex(a.canonical()), cli::sha256_hex(b.canonical()));
  EXPECT_EQ(a.snapshot()["schema_version"], kConfigSchemaVersion);
}
