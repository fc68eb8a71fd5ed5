#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_commands.hpp"

using namespace qfdiv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "qfdiv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qfdiv_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }

  std::string write_state(const std::string& name, const DensityState& s) {
    return write(name, density_to_json(s).dump());
  }

  std::string kl_rho() { return write_state("rho.json", DensityState::diagonal({0.7, 0.3})); }
  std::string kl_sigma() {
    Matrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    return write_state("sigma.json", DensityState::diagonal({0.6, 0.4}).conjugated_by(h));
  }

  fs::path dir_;
};

void expect_single_line_error(const Outcome& o, const std::string& code) {
  EXPECT_EQ(o.code, 2);
  ASSERT_EQ(std::count(o.err.begin(), o.err.end(), '\n'), 1) << o.err;
  const json j = json::parse(o.err);
  EXPECT_EQ(j.at("error"), code);
  EXPECT_TRUE(j.at("message").is_string());
}

}  // namespace

TEST_F(CliTest, ComputeIdenticalStates) {
  const auto rho = kl_rho();
  const auto o = run({"compute", "--rho", rho, "--sigma", rho, "--f", "t_log_t"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_NEAR(j.at("value").get<double>(), 0.0, 1e-12);
  EXPECT_EQ(j.at("method"), "direct");
}

TEST_F(CliTest, ComputeSingularSigmaRegularizes) {
  const auto rho = write_state("r.json", DensityState::maximally_mixed(2));
  const auto sigma = write_state("s.json", DensityState::diagonal({1.0, 0.0}));
  const auto o = run({"compute", "--rho", rho, "--sigma", sigma, "--f", "neg_log"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_EQ(j.at("method"), "regularized");
  EXPECT_EQ(j.at("epsilon_trace").size(), 7u);
  const auto csv = run({"compute", "--rho", rho, "--sigma", sigma, "--f", "neg_log", "--format", "csv"});
  EXPECT_NE(csv.out.find("epsilon,value\n"), std::string::npos);
}

TEST_F(CliTest, ComputeMethodsAgree) {
  const auto o1 = run({"compute", "--n", "3", "--seed", "5", "--f", "pure_kernel:1", "--method", "direct"});
  const auto o2 = run({"compute", "--n", "3", "--seed", "5", "--f", "pure_kernel:1", "--method", "integral"});
  ASSERT_EQ(o1.code, 0);
  ASSERT_EQ(o2.code, 0);
  EXPECT_NEAR(json::parse(o1.out)["value"].get<double>(), json::parse(o2.out)["value"].get<double>(), 1e-10);
  expect_single_line_error(run({"compute", "--n", "3", "--method", "magic"}), "InvalidArgument");
}

TEST_F(CliTest, MalformedJsonCitesLine) {
  const auto bad = write("bad.json", "{\n  \"dim\": 2,\n");
  const auto o = run({"compute", "--rho", bad, "--sigma", bad});
  expect_single_line_error(o, "ParseError");
  EXPECT_NE(json::parse(o.err)["message"].get<std::string>().find("line"), std::string::npos);
}

TEST_F(CliTest, InputErrors) {
  expect_single_line_error(run({"compute", "--rho", (dir_ / "missing.json").string(), "--sigma", "x"}), "ParseError");
  expect_single_line_error(run({"compute", "--rho", kl_rho()}), "InvalidArgument");
  const auto wrong = write("w.json", R"({"dim": 2, "re": [[0.9, 0], [0, 0.5]]})");
  const auto o = run({"compute", "--rho", wrong, "--sigma", wrong});
  expect_single_line_error(o, "InvalidState");
  expect_single_line_error(run({"compute", "--f", "nope"}), "UnknownFunction");
  expect_single_line_error(run({"compute", "--f", "power_alpha:1"}), "AlphaOutOfOperatorConvexRange");
  expect_single_line_error(run({"compute", "--n", "0"}), "InvalidArgument");
  expect_single_line_error(run({"verify", "--trials", "0"}), "InvalidArgument");
  expect_single_line_error(run({"compute", "--format", "xml"}), "UsageError");
  expect_single_line_error(run({"frobnicate"}), "UsageError");
  expect_single_line_error(run({}), "UsageError");
  expect_single_line_error(run({"sweep"}), "UsageError");
  expect_single_line_error(run({"sweep", "--axis", "beta"}), "InvalidArgument");
  expect_single_line_error(run({"verify", "--suites", "bogus"}), "InvalidArgument");
}

TEST_F(CliTest, HelpExitsZero) {
  const auto o = run({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("compute"), std::string::npos);
}

TEST_F(CliTest, ExtremalKlExample) {
  const auto o = run({"extremal", "--rho", kl_rho(), "--sigma", kl_sigma(), "--f", "t_log_t"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto rep = report_from_json(json::parse(o.out));
  EXPECT_NEAR(rep.min_value, 0.021600, 1e-6);
  EXPECT_NEAR(rep.max_value, 0.183787, 5e-7);
  EXPECT_LT(rep.min_certification, 1e-12);
}

TEST_F(CliTest, ExtremalDegenerateInterval) {
  const auto mm = write_state("mm.json", DensityState::maximally_mixed(2));
  const auto o = run({"extremal", "--rho", mm, "--sigma", mm, "--f", "square"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_NEAR(j["min_value"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(j["max_value"].get<double>(), 1.0, 1e-14);
}

TEST_F(CliTest, ExtremalReportRoundTrips) {
  const auto o = run({"extremal", "--n", "4", "--seed", "17", "--f", "pure_kernel:1"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  json stripped = j;
  stripped.erase("input");
  EXPECT_EQ(report_to_json(report_from_json(j)).dump(), stripped.dump());
}

TEST_F(CliTest, ExtremalCsvAndOptimizer) {
  const auto csv = run({"extremal", "--n", "3", "--f", "pure_kernel:1", "--format", "csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 3);
  const auto opt = run({"extremal", "--rho", kl_rho(), "--sigma", kl_sigma(), "--optimize", "--trials", "5"});
  ASSERT_EQ(opt.code, 0) << opt.err;
  const json j = json::parse(opt.out);
  EXPECT_NEAR(j["optimizer"]["min"]["best_value"].get<double>(), j["min_value"].get<double>(), 1e-6);
  EXPECT_NEAR(j["optimizer"]["max"]["best_value"].get<double>(), j["max_value"].get<double>(), 1e-6);
  EXPECT_EQ(j["optimizer"]["min"]["restarts"].size(), 5u);
}

TEST_F(CliTest, VerifySelectedSuites) {
  const auto o = run({"verify", "--suites", "claims,s-components", "--trials", "2"});
  ASSERT_EQ(o.code, 0) << o.out;
  const json j = json::parse(o.out);
  ASSERT_EQ(j["suites"].size(), 2u);
  EXPECT_EQ(j["suites"][0]["suite"], "claims");
  EXPECT_EQ(j["suites"][1]["suite"], "s-components");
  EXPECT_EQ(j["passed"], true);
}

TEST_F(CliTest, VerifyPerturbationIsCaught) {
  const auto o = run({"verify", "--suites", "sandwich", "--trials", "1", "--inject-perturbation", "--format", "csv"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("sandwich,fail,"), std::string::npos);
  const auto clean = run({"verify", "--suites", "sandwich", "--trials", "1", "--format", "csv"});
  EXPECT_EQ(clean.code, 0);
  EXPECT_NE(clean.out.find("sandwich,pass,"), std::string::npos);
}

TEST_F(CliTest, SweepDimensions) {
  const auto o = run({"sweep", "--axis", "n", "--f", "t_log_t", "--format", "csv"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 5);
  EXPECT_EQ(o.out.rfind("n,s_hat,min,max,d_f,", 0), 0u);
}

TEST_F(CliTest, SweepAlphaHasDiagnostics) {
  const auto o = run({"sweep", "--axis", "alpha", "--n", "3"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  ASSERT_EQ(j["rows"].size(), 9u);
  EXPECT_FALSE(j["rows"][0].contains("delta_min"));
  for (std::size_t i = 1; i < 9; ++i) {
    const auto& r = j["rows"][i];
    EXPECT_NEAR(r["delta_min"].get<double>(), r["min"].get<double>() - j["rows"][i - 1]["min"].get<double>(), 1e-15);
    EXPECT_LE(r["min"].get<double>(), r["max"].get<double>());
  }
}

TEST_F(CliTest, SweepScaleAttachesComponents) {
  const auto o = run({"sweep", "--axis", "s", "--n", "3", "--values", "0.5,2"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  ASSERT_EQ(j["rows"].size(), 2u);
  for (const auto& r : j["rows"]) {
    ASSERT_TRUE(r.contains("components"));
    EXPECT_LE(r["components"]["co_sorted"]["quotient"].get<double>(),
              r["components"]["anti_sorted"]["quotient"].get<double>());
  }
}

TEST_F(CliTest, CompareReportsBoth) {
  const auto o = run({"compare", "--rho", kl_rho(), "--sigma", kl_sigma()});
  ASSERT_EQ(o.code, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_TRUE(j.contains("s_hat"));
  EXPECT_TRUE(j.contains("d_f"));
  EXPECT_EQ(j["hockey_stick"].size(), 4u);
}

TEST_F(CliTest, OutputIsDeterministic) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"compute", "--n", "4", "--seed", "9"},
        std::vector<std::string>{"extremal", "--n", "3", "--seed", "9", "--optimize", "--trials", "3"},
        std::vector<std::string>{"sweep", "--axis", "n", "--seed", "9", "--format", "csv"}}) {
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
  }
}

TEST_F(CliTest, OutFlagWritesFile) {
  const auto path = (dir_ / "out.json").string();
  const auto o = run({"compute", "--n", "2", "--out", path});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(path);
  const json j = json::parse(in);
  EXPECT_TRUE(j.contains("value"));
}
