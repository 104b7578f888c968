#include "commands.hpp"
#include "config.hpp"

#include "fkq/errors.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace fs = std::filesystem;
using fkq::cli::parse_config;
using fkq::cli::run_cli;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fkq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fkq_cli_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t data_rows(const fs::path& p) {
  const auto text = slurp(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
}

// fk-classic solved once and shared by the read-only tests below.
const fs::path& classic_dir() {
  static const fs::path dir = [] {
    auto d = scratch("classic");
    const auto r = cli({"solve", "--preset", "fk-classic", "--out-dir", d.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return d;
  }();
  return dir;
}

const char* kMinimal = R"({
  "potential": {"kind": "one_minus_cos", "dim": 1},
  "interaction": {"family": "nn_quadratic_1d", "window": {"lo": [-5], "hi": [5]}},
  "type": {"sigma": [[1.0]]},
  "mode": {"kind": "magnified", "lambda": 40.0}
})";

}  // namespace

TEST(Config, MinimalConfigParses) {
  const auto c = parse_config(kMinimal, "mini.json");
  EXPECT_EQ(c.potential.kind, "one_minus_cos");
  EXPECT_EQ(c.mode.lambda, 40.0);
  EXPECT_EQ(c.interaction.lo[0], -5);
}

TEST(Config, UnknownKeyNamesItsLine) {
  const std::string text = R"({
  "potential": {"kind": "one_minus_cos", "dim": 1},
  "interaction": {"family": "nn_quadratic_1d", "window": {"lo": [-5], "hi": [5]}},
  "type": {"sigma": [[1.0]], "colour": 3},
  "mode": {"kind": "magnified", "lambda": 40.0}
})";
  try {
    parse_config(text, "bad.json");
    FAIL() << "accepted an unknown key";
  } catch (const fkq::ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("bad.json:4:"), std::string::npos) << what;
    EXPECT_NE(what.find("colour"), std::string::npos) << what;
  }
}

TEST(Config, MissingLambdaInMagnifiedMode) {
  std::string text = kMinimal;
  text.replace(text.find(", \"lambda\": 40.0"), std::string(", \"lambda\": 40.0").size(), "");
  try {
    parse_config(text, "nolambda.json");
    FAIL();
  } catch (const fkq::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("nolambda.json:5:"), std::string::npos) << e.what();
  }
}

TEST(Config, MalformedJsonNamesLine) {
  try {
    parse_config("{\n  \"potential\": {\n    \"kind\": ,\n  }\n}", "broken.json");
    FAIL();
  } catch (const fkq::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Config, AllPresetsParse) {
  for (const auto& entry : fs::directory_iterator(FKQ_TEST_CONFIG_DIR))
    EXPECT_NO_THROW(fkq::cli::load_config(entry.path().string())) << entry.path();
}

TEST(Cli, MissingLambdaExitsWithConfigError) {
  auto dir = scratch("nolambda");
  std::string text = kMinimal;
  text.replace(text.find(", \"lambda\": 40.0"), std::string(", \"lambda\": 40.0").size(), "");
  std::ofstream(dir / "c.json") << text;
  const auto r = cli({"solve", "--config", (dir / "c.json").string(), "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("lambda"), std::string::npos) << r.err;
}

TEST(Cli, ClassicPresetWritesAllRows) {
  const auto& dir = classic_dir();
  EXPECT_EQ(data_rows(dir / "report.csv"), 201u);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_LT(summary.at("residual_sup").get<double>(), 1e-10);
  EXPECT_TRUE(summary.at("verified").get<bool>());
  const auto constants = nlohmann::json::parse(slurp(dir / "constants.json"));
  for (const char* k : {"B", "R_V", "K_V", "lambda_star", "r_Z"}) EXPECT_TRUE(constants.contains(k)) << k;
}

TEST(Cli, VerifyUntouchedOutput) {
  const auto& dir = classic_dir();
  const auto r = cli({"verify", "--preset", "fk-classic", "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, VerifyDetectsPerturbedValue) {
  const auto& dir = classic_dir();
  auto copy = scratch("perturbed");
  fs::copy(dir, copy, fs::copy_options::overwrite_existing | fs::copy_options::recursive);
  // Perturb the u column of one row by 1e-3.
  std::istringstream in(slurp(copy / "report.csv"));
  std::string header, line;
  std::getline(in, header);
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  auto cols = [&](const std::string& l) {
    std::vector<std::string> v;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) v.push_back(c);
    return v;
  };
  const auto names = cols(header);
  const auto ucol = static_cast<std::size_t>(std::find(names.begin(), names.end(), "u0") - names.begin());
  ASSERT_LT(ucol, names.size());
  auto row = cols(lines[100]);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", std::stod(row[ucol]) + 1e-3);
  row[ucol] = buf;
  std::string joined;
  for (std::size_t k = 0; k < row.size(); ++k) joined += (k ? "," : "") + row[k];
  lines[100] = joined;
  {
    std::ofstream out(copy / "report.csv");
    out << header << '\n';
    for (const auto& l : lines) out << l << '\n';
  }
  const auto r = cli({"verify", "--preset", "fk-classic", "--out-dir", copy.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("residual"), std::string::npos) << r.err;
}

TEST(Cli, VerifyMissingFile) {
  auto dir = scratch("missing");
  const auto r = cli({"verify", "--preset", "fk-classic", "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 2);
  const auto r2 = cli({"solve", "--config", (dir / "nope.json").string()});
  EXPECT_EQ(r2.code, 2);
}

TEST(Cli, AutoModeRunsAtTwiceThreshold) {
  auto dir = scratch("auto");
  const auto r = cli({"solve", "--preset", "fk-auto", "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  const auto constants = nlohmann::json::parse(slurp(dir / "constants.json"));
  EXPECT_DOUBLE_EQ(summary.at("lambda").get<double>(), 2.0 * constants.at("lambda_star").get<double>());
}

TEST(Cli, DeterministicOutput) {
  auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(cli({"solve", "--preset", "fk-classic", "--out-dir", a.string(), "--seed", "7"}).code, 0);
  ASSERT_EQ(cli({"solve", "--preset", "fk-classic", "--out-dir", b.string(), "--seed", "7", "--threads", "3"}).code, 0);
  EXPECT_EQ(slurp(a / "report.csv"), slurp(b / "report.csv"));
}

TEST(Cli, ExportPlotData) {
  const auto& dir = classic_dir();
  const auto r = cli({"export-plot-data", "--preset", "fk-classic", "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(data_rows(dir / "plot_points.csv"), 201u);
  EXPECT_EQ(data_rows(dir / "residuals.csv"), 201u);
  EXPECT_GT(data_rows(dir / "delta_trace.csv"), 1u);
}

TEST(Cli, GenerateAndAtlas) {
  auto dir = scratch("gen");
  ASSERT_EQ(cli({"generate", "--preset", "fibonacci-address", "--out-dir", dir.string()}).code, 0);
  EXPECT_GT(data_rows(dir / "points.csv"), 50u);
  const auto r = cli({"atlas", "--preset", "fk-classic", "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "atlas.csv"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"solve"}).code, 2);
  EXPECT_EQ(cli({"solve", "--preset", "no-such-preset"}).code, 2);
}
