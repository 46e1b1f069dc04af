#include "crtube/report_io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(CRTUBE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("crtube_cli_" + std::to_string(::getpid()) + "_" + name);
}

} // namespace

TEST(Cli, Example31Passes)
{
    EXPECT_EQ(run("example31"), 0);
    EXPECT_EQ(run("example31 --C 2.5 --grid -0.1:0.1:5,-0.1:0.1:5"), 0);
}

TEST(Cli, Theorem21Passes)
{
    EXPECT_EQ(run("verify theorem21 --trials 100 --seed 42"), 0);
}

TEST(Cli, CounterexampleAndProp32)
{
    EXPECT_EQ(run("verify counterexample --p 'exp(v) - 1' --C 1"), 0);
    EXPECT_EQ(run("verify prop32 --p 'exp(v) - 1' --C 1 --grid -0.1:0.1:5,-0.1:0.1:5"), 0);
    EXPECT_EQ(run("verify prop32 --p 'exp(v) - 1' --C 1 --grid -0.1:0.1:5,-0.1:0.1:5 --chi-perturbation 1e-6"), 1);
    EXPECT_EQ(run("verify counterexample --p 'v^2/2' --C 1"), 2);
}

TEST(Cli, ResidualRoutes)
{
    EXPECT_EQ(run("residuals --P 1,0,0 --Q 2,0,0 --grid -0.1:0.1:5,-0.1:0.1:5"), 0);
    EXPECT_EQ(run("residuals --p 'v^2/2' --q 'v' --grid -0.1:0.1:5,-0.1:0.1:5"), 0);
    EXPECT_EQ(run("residuals --rho '(t1 + C)*log((t1 + C)/(C - t2)) - (t1 + t2)' --C 1"), 0);
    EXPECT_EQ(run("residuals --rho 't1^2/(2*(a - t2))' --param a=1"), 0);
}

TEST(Cli, DegenerateSurfaceExitsTwo)
{
    EXPECT_EQ(run("residuals --rho 't1^2 + t2^2'"), 2);
}

TEST(Cli, BadInvocationsExitTwo)
{
    EXPECT_EQ(run("residuals --rho t1 --frobnicate"), 2);
    EXPECT_EQ(run("residuals --rho 't1^2/(2*(a - t2))'"), 2);
    EXPECT_EQ(run("residuals --rho '1 + * 2'"), 2);
    EXPECT_EQ(run("residuals --rho t1 --p v --q v"), 2);
    EXPECT_EQ(run("residuals --rho 't1^2/(2*(1 - t2))' --grid 0:1"), 2);
    EXPECT_EQ(run("residuals --rho 't1^2/(2*(1 - t2))' --param a"), 2);
    EXPECT_EQ(run("verify"), 2);
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("example31 --C -1"), 2);
}

TEST(Cli, SelftestPasses)
{
    EXPECT_EQ(run("selftest"), 0);
    EXPECT_EQ(run("selftest --seed 7"), 0);
}

TEST(Cli, CsvAndJsonAgree)
{
    const auto csv = scratch("out.csv");
    const auto json = scratch("out.json");
    const std::string common = "example31 --grid -0.2:0.2:6,-0.2:0.2:5 --out ";
    ASSERT_EQ(run(common + csv.string() + " --format csv"), 0);
    ASSERT_EQ(run(common + json.string()), 0);

    std::ifstream csv_in(csv);
    const auto rows = crtube::read_csv(csv_in);
    std::ifstream json_in(json);
    const auto report = nlohmann::json::parse(json_in);
    ASSERT_EQ(rows.size(), report.at("points").size());
    ASSERT_FALSE(rows.empty());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i], crtube::record_from_json(report.at("points")[i])) << i;
    }
    EXPECT_EQ(report.at("pass"), true);
    std::filesystem::remove(csv);
    std::filesystem::remove(json);
}

TEST(Cli, UnwritableOutputExitsTwo)
{
    EXPECT_EQ(run("example31 --out /nonexistent-dir/x.json"), 2);
}
