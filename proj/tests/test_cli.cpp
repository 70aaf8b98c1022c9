#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "lab_config.hpp"

namespace fs = std::filesystem;
using lab::parse_config;
using liouville::Error;
using liouville::ErrorKind;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::io;
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("liouville_lab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_lab(const std::string& args) {
  std::string cmd = std::string(LIOUVILLE_LAB_BIN) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, FlagOverridesFile) {
  auto cfg = parse_config({{"command", "family-sweep"}, {"alpha", "0"}}, {"--alpha=-0.5"});
  EXPECT_EQ(cfg.command, "family-sweep");
  EXPECT_DOUBLE_EQ(cfg.num("alpha", 0.0), -0.5);
}

TEST(Config, MissingCommand) {
  EXPECT_EQ(kind_of([] { parse_config({}, {"alpha=0"}); }), ErrorKind::usage);
}

TEST(Config, UnknownKeyNamed) {
  try {
    parse_config({}, {"family-sweep", "alpah=0"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
    EXPECT_NE(std::string(e.what()).find("alpah"), std::string::npos);
  }
}

TEST(Config, UnparseableScalar) {
  auto cfg = parse_config({}, {"family-sweep", "alpha=zero"});
  EXPECT_EQ(kind_of([&] { cfg.num("alpha", 0.0); }), ErrorKind::usage);
}

TEST(Config, GeometricLadder) {
  auto cfg = parse_config({}, {"family-sweep", "n=10..1e6", "steps=6"});
  auto ns = cfg.ladder("n", "1", 2);
  ASSERT_EQ(ns.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(ns[i], std::pow(10.0, i + 1));
}

TEST(Config, ListAndScalar) {
  auto cfg = parse_config({}, {"family-sweep", "n=3,7.5"});
  EXPECT_EQ(cfg.ladder("n", "1", 2), (std::vector<double>{3.0, 7.5}));
  EXPECT_EQ(cfg.ladder("a", "2", 2), (std::vector<double>{2.0}));
}

TEST(Config, FileWithComments) {
  auto d = scratch("cfg");
  std::ofstream(d / "run.cfg") << "# sweep\ncommand = family-sweep\nalpha=-0.25  # cone\n\n";
  auto cfg = parse_config(lab::read_config_file((d / "run.cfg").string()), {});
  EXPECT_DOUBLE_EQ(cfg.num("alpha", 0.0), -0.25);
}

TEST(Lab, FamilySweepReachesLog64) {
  auto d = scratch("sweep");
  ASSERT_EQ(run_lab("family-sweep alpha=0 a=1 b=1 n=10..1e6 steps=6 --out " + d.string()), 0);
  std::ifstream in(d / "family_sweep.csv");
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  std::vector<double> cols;
  std::stringstream ss(last);
  for (std::string tok; std::getline(ss, tok, ',');) cols.push_back(std::stod(tok));
  ASSERT_EQ(cols.size(), 6u);
  EXPECT_NEAR(cols[3], std::log(64.0), 1e-3);
  EXPECT_TRUE(fs::exists(d / "manifest.json"));
  EXPECT_NE(slurp(d / "manifest.json").find("sha256"), std::string::npos);
}

TEST(Lab, DeterministicCsv) {
  auto d1 = scratch("det1"), d2 = scratch("det2");
  ASSERT_EQ(run_lab("supinf-sweep alpha=-0.25 a=1 b=2 grid=65 --jobs 1 --out " + d1.string()), 0);
  ASSERT_EQ(run_lab("supinf-sweep alpha=-0.25 a=1 b=2 grid=65 --jobs 3 --out " + d2.string()), 0);
  EXPECT_EQ(slurp(d1 / "supinf_sweep.csv"), slurp(d2 / "supinf_sweep.csv"));
}

TEST(Lab, SelfIntersectingBoundary) {
  auto d = scratch("huber");
  std::ofstream(d / "fig8.txt") << "0 0\n2 0\n2 2\n1 2\n1 -1\n0 -1\n";
  std::string cmd = std::string(LIOUVILLE_LAB_BIN) + " audit-huber boundary=" + (d / "fig8.txt").string() + " --out " +
                    d.string() + " 2>" + (d / "err.txt").string();
  int rc = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(rc));
  EXPECT_NE(WEXITSTATUS(rc), 0);
  EXPECT_NE(slurp(d / "err.txt").find("invalid domain"), std::string::npos);
}

TEST(Lab, ExitCodes) {
  auto d = scratch("codes");
  EXPECT_EQ(run_lab("alpha=0 --out " + d.string()), 2);
  EXPECT_EQ(run_lab("family-sweep bogus=1 --out " + d.string()), 2);
  EXPECT_EQ(run_lab("family-sweep alpha=0.5 --out " + d.string()), 2);
}

TEST(Lab, EnvOutputDirectory) {
  auto d = scratch("env");
  std::string cmd = "LIOUVILLE_LAB_OUT=" + d.string() + " " + LIOUVILLE_LAB_BIN + " family-sweep >/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(d / "family_sweep.csv"));
}
