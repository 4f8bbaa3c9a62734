/*
 * Copyright 2026 The plmu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "fixtures.hpp"

namespace plmu {
namespace {

const std::string kData = PLMU_DATA_DIR;
const std::string kTwoState = kData + "/two_state.json";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "plmu");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& content)
{
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream(path) << content;
    return path;
}

TEST(CliEval, TwoStateExamples)
{
    auto r = run({"eval", kTwoState, "nu X. [a] X"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "p: 1\nq: 1\n");
    r = run({"eval", kTwoState, "mu X. <a> X"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "p: 0\nq: 0\n");
}

TEST(CliEval, JsonOutput)
{
    const auto r = run({"eval", kTwoState, "<a> R", "--rho", kData + "/rho_r.json", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["values"]["p"].get<double>(), 0.7 / 3 + 0.25 * 2 / 3, 1e-15);
    EXPECT_EQ(j["values"]["q"].get<double>(), 0.0);
}

TEST(CliEval, InputErrorsExitTwo)
{
    EXPECT_EQ(run({"eval", kData + "/missing.json", "X"}).code, 2);
    EXPECT_EQ(run({"eval", kTwoState, "mu X."}).code, 2);
    EXPECT_EQ(run({"eval", kTwoState, "<a> R"}).code, 2);
    EXPECT_EQ(run({"eval", kTwoState, "R", "--rho", write_temp("plmu_rho_bad.json", R"j({"R": {"p": 0.5}})j")}).code, 2);
    EXPECT_EQ(run({"eval", kTwoState, "R", "--rho", write_temp("plmu_rho_range.json", R"j({"R": {"p": 2, "q": 0}})j")}).code, 2);
    const auto bad_model = write_temp("plmu_bad_model.json", R"j({"states": ["p"], "labels": ["a"],
        "transitions": [{"from": "p", "label": "a", "dist": {"p": 0.5}}]})j");
    const auto r = run({"eval", bad_model, "X"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("distribution mass 0.5"), std::string::npos);
    EXPECT_EQ(run({"eval", kTwoState}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(CliEval, NonConvergenceExitsThree)
{
    EXPECT_EQ(run({"eval", kTwoState, "nu X. <a> X", "--max-iter", "2"}).code, 3);
}

TEST(CliEval, HelpExitsZero)
{
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliGame, DumpsArena)
{
    const auto r = run({"game", kTwoState, "mu X. <a> X"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("4 (p.a.0,F2) | N | 0 | - | 6:1/3 7:2/3\n"), std::string::npos);
    const auto j = nlohmann::json::parse(run({"game", kTwoState, "mu X. <a> X", "--format", "json"}).out);
    EXPECT_EQ(j["states"].size(), 8u);
    EXPECT_EQ(j["states"][4]["probabilities"][0], "1/3");
}

TEST(CliCheck, GameAndFixpointAgree)
{
    for (const char* f : {"mu X. <a> X", "nu X. [a] X | <a> (mu Y. Y)", "nu Y. mu X. <a> X | [a] Y"}) {
        const auto r = run({"check", kTwoState, f, "--format", "json"});
        EXPECT_EQ(r.code, 0) << f;
        const auto j = nlohmann::json::parse(r.out);
        EXPECT_LE(j["max_gap"].get<double>(), 1e-6);
        EXPECT_EQ(j["oracle"], "ok");
    }
}

TEST(CliCheck, AcyclicFormulaAgreesExactly)
{
    const auto j = nlohmann::json::parse(run({"check", kTwoState, "<a> (nu X. X)", "--format", "json"}).out);
    EXPECT_EQ(j["max_gap"].get<double>(), 0.0);
    EXPECT_EQ(j["states"][0]["lower"].get<double>(), 1.0);
    EXPECT_EQ(j["states"][1]["upper"].get<double>(), 0.0);
}

TEST(CliCheck, BudgetHandling)
{
    EXPECT_EQ(run({"check", kTwoState, "mu X. <a> X | [a] X", "--solver", "oracle", "--budget", "1"}).code, 2);
    const auto r = run({"check", kTwoState, "mu X. <a> X | [a] X", "--budget", "1", "--format", "json"});
    EXPECT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NE(j["oracle"].get<std::string>().find("skipped"), std::string::npos);
    EXPECT_TRUE(j["states"][0]["lower"].is_null());
}

TEST(CliCheck, OutputIsDeterministicWithoutTiming)
{
    const auto a = run({"check", kTwoState, "mu X. <a> X | [a] X", "--format", "json"});
    const auto b = run({"check", kTwoState, "mu X. <a> X | [a] X", "--format", "json"});
    EXPECT_EQ(a.out, b.out);
}

TEST(CliCheck, GapIsRecomputedFromValues)
{
    cli::CheckReport r;
    r.states = {"p"};
    r.denotational = {0.5};
    r.lower = ValueVector{0.5};
    r.upper = ValueVector{0.5 + 2e-6};
    EXPECT_NEAR(r.max_gap(), 2e-6, 1e-15);
    r.iteration = ValueVector{0.4};
    EXPECT_NEAR(r.max_gap(), 0.1, 1e-15);
}

TEST(CliSimulate, ExplicitProfile)
{
    const auto prof = write_temp("plmu_profile.json", R"j({"(p,F1)": "(p.a.0,F2)"})j");
    const auto r = run({"simulate", kTwoState, "mu X. <a> X", "--profile", prof, "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["estimate"].get<double>(), 0.0);
    EXPECT_EQ(j["expected_reward"].get<double>(), 0.0);
    EXPECT_EQ(j["z"].get<double>(), 0.0);
}

TEST(CliSimulate, InvalidProfileExitsTwo)
{
    EXPECT_EQ(run({"simulate", kTwoState, "mu X. <a> X", "--profile",
                   write_temp("plmu_profile_bad.json", R"j({"(p,F1)": "(q,F2)"})j")})
                  .code,
              2);
    EXPECT_EQ(run({"simulate", kTwoState, "mu X. <a> X", "--profile",
                   write_temp("plmu_profile_unknown.json", R"j({"(z,F1)": "(q,F2)"})j")})
                  .code,
              2);
    EXPECT_EQ(run({"simulate", kTwoState, "mu X. <a> X", "--profile", kData + "/nope.json"}).code, 2);
}

TEST(CliSimulate, TerminalAndLoop)
{
    auto j = nlohmann::json::parse(
        run({"simulate", kTwoState, "R", "--rho", kData + "/rho_r.json", "-n", "1000", "--format", "json"}).out);
    EXPECT_EQ(j["estimate"].get<double>(), 0.7);
    EXPECT_EQ(j["std_error"].get<double>(), 0.0);
    j = nlohmann::json::parse(run({"simulate", kTwoState, "mu X. X", "--format", "json"}).out);
    EXPECT_EQ(j["estimate"].get<double>(), 0.0);
}

TEST(CliSimulate, WitnessEstimateIsConsistent)
{
    const auto coin = kData + "/coin.json";
    const auto rho = write_temp("plmu_rho_coin.json", R"j({"H": {"s": 0, "heads": 1, "tails": "1/5"}})j");
    const auto r = run({"simulate", coin, "mu X. <flip> (H | <again> X)", "--rho", rho, "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["expected_reward"].get<double>(), 1.0, 1e-12);
    EXPECT_LE(std::abs(j["z"].get<double>()), 4.0);
}

TEST(CliRandomTest, EmptyRunPasses)
{
    const auto r = run({"random-test", "--count", "0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("0 instances", 0), 0u);
}

TEST(CliRandomTest, SameSeedSameStream)
{
    const auto a = run({"random-test", "--count", "10", "--seed", "5", "--format", "json"});
    const auto b = run({"random-test", "--count", "10", "--seed", "5", "--format", "json"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(CliRandomTest, SmallBatchPasses)
{
    const auto r = run({"random-test", "--count", "25", "--seed", "9", "--format", "json"});
    EXPECT_EQ(r.code, 0);
    EXPECT_LE(nlohmann::json::parse(r.out)["worst_gap"].get<double>(), 1e-6);
}

} // namespace
} // namespace plmu
