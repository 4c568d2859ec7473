#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "selbias/serialize.hpp"

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "selbias");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = selbias::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

const std::string kFixture = std::string(SELBIAS_DATA_DIR) + "/zika_learner.csv";

}  // namespace

TEST(Cli, SvParamsText) {
    const auto r = run({"--format", "text", "sv-params", "-e", "RR_sub", "--p1", "0.286", "--p0", "0.004", "--round", "4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out,
              "\"BF_U\"              1.5625\n"
              "\"RR_UY|S=1\"         2.7089\n"
              "\"RR_TU|S=1\"         2.3293\n"
              "\"Reverse treatment\" TRUE\n");
}

TEST(Cli, SvParamsJson) {
    const auto r = run({"sv-params", "--estimand", "RR_sub", "--p1", "0.286", "--p0", "0.004"});
    ASSERT_EQ(r.code, 0);
    const auto j = selbias::json::parse(r.out);
    EXPECT_NEAR(j.at("BF_U").get<double>(), 1.5625329603872766, 1e-15);
    EXPECT_TRUE(j.at("reversed").get<bool>());
}

TEST(Cli, SvBoundRounded) {
    const auto r = run({"--format", "text", "sv-bound", "-e", "RR_sub", "--rr-uy-s1", "2.71", "--rr-tu-s1", "2.33",
                        "--round", "2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "\"SV bound\" 1.56\n");
}

TEST(Cli, SharpVerdict) {
    const auto r = run({"--format", "text", "sharp", "--bf-u", "1.56", "--p0", "0.27", "--sv", "1.56", "--af", "3.5"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "\"SV bound is sharp.\"\n");
}

TEST(Cli, AfBoundFromFixture) {
    const auto r = run({"--format", "text", "af-bound", "-e", "RR_sub", "--csv", kFixture, "--reverse-treatment"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "\"AF bound\" 5.001725327812284\n");
}

TEST(Cli, AfBoundFromSummary) {
    const auto r = run({"--format", "text", "af-bound", "-e", "RR_sub", "--p1", "0.3", "--p0", "0.5", "--pt1", "0.5"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "\"AF bound\" 3\n");
}

TEST(Cli, SimulateMatchesFixture) {
    const auto path = std::filesystem::temp_directory_path() / "selbias_cli_sim.csv";
    const auto r = run({"simulate", "--n", "5000", "--seed", "1", "--out", path.string()});
    ASSERT_EQ(r.code, 0);
    std::ifstream a(path, std::ios::binary), b(kFixture, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
    std::filesystem::remove(path);
}

TEST(Cli, GridCsv) {
    const auto r = run({"--format", "text", "grid", "--uy-min", "1", "--uy-max", "3", "--uy-steps", "2", "--tu-min", "1",
                        "--tu-max", "3", "--tu-steps", "2", "--p0", "0.5", "--af", "1.5"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out,
              "rr_tu_s1,rr_uy_s1,bound,verdict\n"
              "1,1,1,sharp\n"
              "1,3,1,sharp\n"
              "3,1,1,sharp\n"
              "3,3,1.8,sharp\n");
}

TEST(Cli, Estimands) {
    const auto r = run({"estimands", "--stage", "1"});
    ASSERT_EQ(r.code, 0);
    const auto j = selbias::json::parse(r.out);
    EXPECT_NEAR(j.at("beta_R").get<double>(), 90.74491038597297, 1e-9);
    EXPECT_NEAR(j.at("beta_RS").get<double>(), 92.25073854882959, 1e-9);
}

TEST(Cli, ValidationErrorsExitTwo) {
    auto r = run({"--format", "text", "sv-bound", "-e", "RR_sub", "--rr-uy-s1", "0.5", "--rr-tu-s1", "2"});
    EXPECT_EQ(r.code, selbias::cli::kExitUsage);
    EXPECT_EQ(r.err, "selbias: domain_error: RR_UY|S=1: must be >= 1, got 0.500000\n");
    EXPECT_TRUE(r.out.empty());

    r = run({"sharp", "-e", "RR_tot", "--bf-u", "1.5", "--p0", "0.2"});
    EXPECT_EQ(r.code, selbias::cli::kExitUsage);
    EXPECT_EQ(selbias::json::parse(r.err).at("code"), "unsupported_estimand");

    EXPECT_EQ(run({"sv-bound", "-e", "OR_sub"}).code, selbias::cli::kExitUsage);
    EXPECT_EQ(run({"no-such-command"}).code, selbias::cli::kExitUsage);
    EXPECT_EQ(run({"sv-bound", "--rr-uy-s1", "abc"}).code, selbias::cli::kExitUsage);
    EXPECT_EQ(run({"af-bound", "--csv", "/nonexistent/file.csv"}).code, selbias::cli::kExitUsage);
}

TEST(Cli, ComputationErrorsExitOne) {
    const auto r = run({"af-bound", "-e", "RR_sub", "--p1", "0.3", "--p0", "0", "--pt1", "0.5"});
    EXPECT_EQ(r.code, selbias::cli::kExitComputation);
    EXPECT_EQ(selbias::json::parse(r.err).at("code"), "division_by_zero");
}

TEST(Cli, HelpExitsZero) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("sv-bound"), std::string::npos);
}
