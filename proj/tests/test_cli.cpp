#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "otlab/config.hpp"

using namespace otlab;
using otlab::cli::ExperimentConfig;
namespace fs = std::filesystem;

TEST_CASE("config defaults, digest stability, canonical round trip") {
  const auto a = ExperimentConfig::defaults("suite");
  const auto b = ExperimentConfig::defaults("suite");
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 16);
  // round-trips losslessly through the canonical serialization
  ExperimentConfig c = a;
  c.data = cli::json::parse(a.canonical());
  CHECK(c.canonical() == a.canonical());
  CHECK(c.digest() == a.digest());
  const auto d = ExperimentConfig::defaults("envelope");
  CHECK(d.digest() != a.digest());  // command is part of the config
}

TEST_CASE("overrides address nested keys and are typed") {
  auto c = ExperimentConfig::defaults("transportnd");
  const auto before = c.digest();
  c.override_path("solver.epsilon", "0.01");
  CHECK(c.num("solver.epsilon", -1) == doctest::Approx(0.01));
  CHECK(c.digest() != before);
  c.override_path("measure.family", "huber");
  CHECK(c.str("measure.family", "") == "huber");
  c.override_path("concentrate.r", "[0.5,1]");
  CHECK(c.data["concentrate"]["r"].is_array());
  CHECK_THROWS_AS(c.override_path("", "1"), std::invalid_argument);
}

TEST_CASE("config file loading and seed validation") {
  const fs::path p = fs::temp_directory_path() / "otlab_cfg_test.json";
  {
    std::ofstream out(p);
    out << R"({"seed": 7, "solver": {"n": 123}})";
  }
  const auto c = ExperimentConfig::from_file(p, "suite");
  CHECK(c.seed() == 7);
  CHECK(c.num("solver.n", 0) == 123);
  CHECK(c.num("solver.m", 0) == 2000);  // default preserved by the merge
  fs::remove(p);
  CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/x.json", "suite"),
                  std::runtime_error);
}

TEST_CASE("measure and body spec parsing") {
  CHECK(cli::parse_measure("gaussian", 1).family() == measures::Family::Gaussian);
  CHECK(cli::parse_measure("gaussian:2", 1).sigma() == doctest::Approx(2.0));
  CHECK(cli::parse_measure("powerlaw:4", 2).beta() == doctest::Approx(4.0));
  CHECK(cli::parse_measure("huber", 2).family() ==
        measures::Family::Huber1DProduct);
  const auto u = cli::parse_measure("uniform:-1:1", 1);
  CHECK(u.family() == measures::Family::UniformBody);
  CHECK_THROWS_AS(cli::parse_measure("cauchy", 1), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_measure("powerlaw", 1), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_measure("uniform:0:1", 2), std::invalid_argument);

  const auto box = cli::parse_body("box:-1:1:-2:2");
  CHECK(box.dimension() == 2);
  CHECK(box.volume() == doctest::Approx(8.0));
  const auto ball = cli::parse_body("ball:0:0:1");
  CHECK(ball.dimension() == 2);
  CHECK_THROWS_AS(cli::parse_body("cone:1"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_body("box:-1"), std::invalid_argument);
}

TEST_CASE("atomic write and artifact header") {
  const fs::path p = fs::temp_directory_path() / "otlab_atomic_test" / "x.csv";
  cli::atomic_write(p, "hello\n");
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  CHECK(s == "hello");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
  fs::remove_all(p.parent_path());
  const auto h = cli::artifact_header("abcd", 7);
  CHECK(h.find("# config_digest=abcd seed=7") == 0);
}

TEST_CASE("svg plot is generated") {
  const auto svg = cli::svg_lineplot({0, 1, 2}, {{0, 1, 0}}, "demo");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}

#ifdef OTLAB_CLI_PATH
TEST_CASE("cli exit codes: config errors versus success") {
  const std::string cli = OTLAB_CLI_PATH;
  const fs::path out = fs::temp_directory_path() / "otlab_cli_test_out";
  fs::remove_all(out);
  // bad measure spec -> config error (2)
  int rc = std::system(
      (cli + " transport1d --source nosuch --target uniform:-1:1 --out " +
       out.string() + " > /dev/null 2>&1")
          .c_str());
  CHECK(WEXITSTATUS(rc) == 2);
  // envelope run succeeds and leaves artifacts with provenance headers
  rc = std::system(
      (cli + " envelope --p 1 --a 1 --nodes 64 --out " + out.string() +
       " > /dev/null 2>&1")
          .c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  std::ifstream in(out / "envelope.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first.find("# config_digest=") == 0);
  CHECK(fs::exists(out / "envelope_reports.json"));
  fs::remove_all(out);
}
#endif
