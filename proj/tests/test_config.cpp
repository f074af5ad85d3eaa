#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "strainlim/config.hpp"
#include "strainlim/errors.hpp"
#include "strainlim/runner.hpp"

using namespace strainlim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kConverge = R"({
  "command": "converge",
  "family": {"kind": "power_law", "a": 1.0, "p": 2.0},
  "stress": [0.5, 0.25, -0.125, 0.0, 0.0, 0.0],
  "rotation": {"axis": [0.0, 0.0, 1.0], "magnitude_coefficient": 1.0},
  "deltas": [0.015625, 0.0078125, 0.00390625, 0.001953125, 0.0009765625, 0.00048828125, 0.000244140625, 0.0001220703125]
})";

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("strainlim_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunOutcome run_config(ExperimentConfig c, const std::string& sub = "") {
    c.output_path = (dir_ / sub).string();
    std::ostringstream log;
    RunOutcome o = run(c, log);
    log_ = log.str();
    return o;
  }

  fs::path dir_;
  std::string log_;
};

ExperimentConfig certify_config() {
  ExperimentConfig c;
  c.command = Command::certify;
  c.family = FamilySpec::density_reciprocal(1, 0.3, 0.3, 0.5, 1);
  c.deltas = {0.01, 0.005, 0.001};
  c.samples = 200;
  c.seed = 42;
  return c;
}

}  // namespace

TEST(Config, RoundTrip) {
  const ExperimentConfig c = parse_config(kConverge);
  const std::string text = serialize_config(c);
  EXPECT_EQ(config_to_json(parse_config(text)), config_to_json(c));
  EXPECT_EQ(serialize_config(parse_config(text)), text);
  // Every field present in the input survives with the same value.
  const json in = json::parse(kConverge);
  const json out = json::parse(text);
  for (const auto& [key, value] : in.items()) {
    if (key == "family") {
      for (const auto& [k, v] : value.items()) EXPECT_EQ(out["family"][k], v) << k;
    } else {
      EXPECT_EQ(out[key], value) << key;
    }
  }
}

TEST(Config, RoundTripIsFieldOrderIndependent) {
  json j = json::parse(kConverge);
  std::string reordered = R"({"deltas": )" + j["deltas"].dump() + R"(, "stress": )" + j["stress"].dump() +
                          R"(, "family": {"p": 2.0, "kind": "power_law", "a": 1.0}, "command": "converge",
                             "rotation": {"magnitude_coefficient": 1.0, "axis": [0, 0, 1]}})";
  EXPECT_EQ(config_to_json(parse_config(reordered)), config_to_json(parse_config(kConverge)));
}

TEST(Config, FullRoundTripWithOptionalFields) {
  ExperimentConfig c = parse_config(kConverge);
  c.seed = 7;
  c.samples = 321;
  c.domain_policy = DomainPolicy::report;
  c.family.delta_max = 0.02;
  c.thresholds.C1_max = 3.5;
  c.thresholds.order_min = 1.8;
  const ExperimentConfig back = parse_config(serialize_config(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.samples, 321);
  EXPECT_EQ(back.domain_policy, DomainPolicy::report);
  EXPECT_EQ(back.family.delta_max, 0.02);
  EXPECT_EQ(back.thresholds.C1_max, 3.5);
  EXPECT_EQ(back.thresholds.order_min, 1.8);
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, RejectsUnknownKeysAndBadJson) {
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "converge", "colour": 1})"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "converge", "family": {"kind": "power_law", "q": 1}})"); }),
            ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "converge", "rotation": {"angle": 1}})"); }),
            ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "converge", "thresholds": {"order": 2}})"); }),
            ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "converge",)"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "plot"})"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_config(R"({"family": {}})"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "converge", "deltas": "small"})"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "converge", "family": {"kind": "cubic"}})"); }),
            ErrorCode::ConfigInvalid);
}

TEST(Config, ScalarStressForOned) {
  const ExperimentConfig c = parse_config(R"({"command": "oned", "stress": 0.25, "deltas": [0.001]})");
  ASSERT_EQ(c.stress.size(), 1u);
  EXPECT_EQ(c.stress[0], 0.25);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, Validation) {
  const auto invalid = [](const std::function<void(ExperimentConfig&)>& edit) {
    ExperimentConfig c = parse_config(kConverge);
    edit(c);
    return code_of([&] { c.validate(); });
  };
  EXPECT_NO_THROW(parse_config(kConverge).validate());
  EXPECT_EQ(invalid([](auto& c) { c.deltas.clear(); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) { c.deltas = {0.01, 0.02, 0.001, 0.0001}; }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) { c.deltas = {0.01, 0.005, 0.001}; }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) { c.deltas = {0.5, 0.01, 0.005, 0.001}; }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) { c.stress = {3, 0, 0, 0, 0, 0}; }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) { c.stress = {0.1, 0, 0}; }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) { c.family.a = -1; }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) { c.thresholds.order_min = 3; }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) {
              c.command = Command::certify;
              c.samples = 99;
            }),
            ErrorCode::ConfigInvalid);
  EXPECT_EQ(invalid([](auto& c) {
              c.command = Command::energy;
              c.family = FamilySpec::density_direct(1, 0.3, 0.3, 0.5, 1);
            }),
            ErrorCode::ConfigInvalid);
  // Reporting instead of enforcing the stress domain admits large stresses.
  ExperimentConfig c = parse_config(kConverge);
  c.stress = {3, 0, 0, 0, 0, 0};
  c.domain_policy = DomainPolicy::report;
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, SeedPrecedence) {
  ExperimentConfig c = parse_config(kConverge);
  ::unsetenv("STRAINLIM_SEED");
  EXPECT_EQ(resolve_seed(c), 0u);
  ::setenv("STRAINLIM_SEED", "1234", 1);
  EXPECT_EQ(resolve_seed(c), 1234u);
  c.seed = 9;
  EXPECT_EQ(resolve_seed(c), 9u);
  c.seed.reset();
  ::setenv("STRAINLIM_SEED", "12x", 1);
  EXPECT_EQ(code_of([&] { resolve_seed(c); }), ErrorCode::ConfigInvalid);
  ::unsetenv("STRAINLIM_SEED");
}

TEST(Config, ShortestRoundTripDoubles) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.015625), "0.015625");
  EXPECT_EQ(format_double(-2.0), "-2");
  const double third = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(third)), third);
}

TEST(CsvHeaders, Golden) {
  EXPECT_EQ(csv_header(Command::converge), "delta,delta0,residual_full,residual_leading,stress_gap,strain_gap");
  EXPECT_EQ(csv_header(Command::converge_hencky), "delta,delta0,residual_full,residual_leading,stress_gap,strain_gap");
  EXPECT_EQ(csv_header(Command::certify), "delta,C0_hat,C1_hat,D0_hat,C3_hat");
  EXPECT_EQ(csv_header(Command::oned), "Sbar,E,eps,delta0,sigma,gap");
  EXPECT_EQ(csv_header(Command::solve),
            "delta,E_xx,E_yy,E_zz,E_xy,E_xz,E_yz,residual,iterations,method,in_domain,interior_ball_ok");
  EXPECT_EQ(csv_header(Command::energy),
            "sample,Sbar_norm,gradient_error,Etilde_norm,fenchel_young_gap,inverse_pair_error");
}

TEST_F(RunnerTest, ConvergePowerLawPasses) {
  const RunOutcome o = run_config(parse_config(kConverge));
  EXPECT_EQ(o.status, kExitPass) << log_;
  EXPECT_EQ(log_.rfind("PASS converge", 0), 0u);
  const std::string csv = slurp(dir_ / "converge.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), csv_header(Command::converge));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  const json report = json::parse(slurp(dir_ / "converge.json"));
  EXPECT_GE(report["fitted_order_full"].get<double>(), 1.9);
  EXPECT_LE(report["fitted_order_full"].get<double>(), 2.1);
  EXPECT_TRUE(report["pass"].get<bool>());
  json expected = config_to_json(parse_config(kConverge));
  expected["output_path"] = (dir_ / "").string();
  EXPECT_EQ(report["config"], expected);
}

TEST_F(RunnerTest, EmptyDeltasIsConfigError) {
  ExperimentConfig c = parse_config(kConverge);
  c.deltas.clear();
  const RunOutcome o = run_config(c);
  EXPECT_EQ(o.status, kExitConfig);
  EXPECT_EQ(log_.rfind("ERROR", 0), 0u);
  EXPECT_FALSE(fs::exists(dir_ / "converge.csv"));
}

TEST_F(RunnerTest, ThresholdMissIsStudyFailure) {
  ExperimentConfig c = parse_config(kConverge);
  c.thresholds.order_min = 2.5;
  c.thresholds.order_max = 3.0;
  const RunOutcome o = run_config(c);
  EXPECT_EQ(o.status, kExitFail);
  EXPECT_EQ(log_.rfind("FAIL converge: fitted_order_full", 0), 0u) << log_;
  EXPECT_TRUE(fs::exists(dir_ / "converge.csv"));
}

TEST_F(RunnerTest, StudyFailureNamesFirstFailingRow) {
  ExperimentConfig c;
  c.command = Command::solve;
  c.family = FamilySpec::density_reciprocal(1, 0.3, 0.3, 0.5, 1);
  c.stress = {0.5, 0.25, -0.125, 0, 0, 0};
  c.deltas = {0.01, 0.005};
  const RunOutcome o = run_config(c);
  EXPECT_EQ(o.status, kExitFail);
  EXPECT_EQ(log_.rfind("FAIL solve: delta 0.01", 0), 0u) << log_;
}

TEST_F(RunnerTest, CertifyIsByteIdenticalForSeed) {
  const ExperimentConfig c = certify_config();
  EXPECT_EQ(run_config(c, "a").status, kExitPass) << log_;
  EXPECT_EQ(run_config(c, "b").status, kExitPass) << log_;
  const std::string first = slurp(dir_ / "a" / "certify.csv");
  EXPECT_EQ(first, slurp(dir_ / "b" / "certify.csv"));
  EXPECT_EQ(first.substr(0, first.find('\n')), csv_header(Command::certify));
  ExperimentConfig other = c;
  other.seed = 43;
  run_config(other, "c");
  EXPECT_NE(first, slurp(dir_ / "c" / "certify.csv"));
}

TEST_F(RunnerTest, SeedFromEnvironment) {
  ExperimentConfig c = certify_config();
  run_config(c, "a");
  c.seed.reset();
  ::setenv("STRAINLIM_SEED", "42", 1);
  run_config(c, "b");
  ::unsetenv("STRAINLIM_SEED");
  EXPECT_EQ(slurp(dir_ / "a" / "certify.csv"), slurp(dir_ / "b" / "certify.csv"));
}

TEST_F(RunnerTest, EnergyPowerLawPasses) {
  ExperimentConfig c;
  c.command = Command::energy;
  c.family = FamilySpec::power_law(1.0, 2.0);
  c.deltas = {0.001};
  c.samples = 20;
  c.seed = 5;
  EXPECT_EQ(run_config(c).status, kExitPass) << log_;
  const json report = json::parse(slurp(dir_ / "energy.json"));
  EXPECT_LE(report["max_gradient_error"].get<double>(), 1e-6);
  EXPECT_LE(report["max_fenchel_young_gap"].get<double>(), 1e-9);
  EXPECT_LE(report["max_inverse_pair_error"].get<double>(), 1e-8);
}

TEST_F(RunnerTest, OnedWritesStudy) {
  ExperimentConfig c = parse_config(R"({"command": "oned", "stress": [0.0, 0.1, 0.2, 0.3], "deltas": [0.001],
                                         "family": {"kind": "power_law", "a": 1.0, "p": 2.0}})");
  c.thresholds.slope_min = 2.9;
  c.thresholds.slope_max = 3.1;
  EXPECT_EQ(run_config(c).status, kExitPass) << log_;
  const std::string csv = slurp(dir_ / "oned.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), csv_header(Command::oned));
  EXPECT_NE(csv.find("\n0,0,0,0,0,0\n"), std::string::npos);
}

TEST_F(RunnerTest, AtomicWriteReplacesAndLeavesNoTemporary) {
  fs::create_directories(dir_);
  const fs::path target = dir_ / "out.csv";
  write_atomic(target, "old\n");
  write_atomic(target, "new\n");
  EXPECT_EQ(slurp(target), "new\n");
  EXPECT_FALSE(fs::exists(dir_ / "out.csv.tmp"));
  EXPECT_THROW(write_atomic(dir_ / "missing" / "x.csv", "x"), Error);
}
