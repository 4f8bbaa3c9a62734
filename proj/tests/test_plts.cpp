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
#include <string>

#include "fixtures.hpp"

namespace plmu {
namespace {

bool contains(const std::vector<std::string>& v, const std::string& needle)
{
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

TEST(Dirac, HasSingletonSupport)
{
    const Distribution d = dirac(1);
    EXPECT_EQ(d.support(), std::vector<std::size_t>{1});
    EXPECT_EQ(d(1), 1.0);
    EXPECT_EQ(d(0), 0.0);
    EXPECT_TRUE(d.is_dirac());
    EXPECT_TRUE(d.exact());
    EXPECT_FALSE(dirac(0) == dirac(1));
}

TEST(Fraction, ParsesAndFormats)
{
    EXPECT_EQ(parse_fraction("1/3"), Rational(1, 3));
    EXPECT_EQ(parse_fraction("2/4"), Rational(1, 2));
    EXPECT_EQ(parse_fraction("1"), Rational(1));
    EXPECT_EQ(format_fraction(Rational(2, 3)), "2/3");
    EXPECT_EQ(format_fraction(Rational(1)), "1");
    for (const char* bad : {"", "1/0", "a/3", "1/", "/2", "-1/2", "1.5"})
        EXPECT_THROW(parse_fraction(bad), ModelError) << bad;
}

TEST(Validate, TwoStateModelIsValid)
{
    EXPECT_TRUE(validate(testing::two_state_model()).empty());
}

TEST(Validate, ReportsMissingMass)
{
    Plts m({"p"}, {"a"});
    m.add_transition(0, 0, Distribution({{0, Probability::of(0.5)}}));
    const auto v = validate(m);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], "distribution mass 0.5 ≠ 1 at (p,a)");
}

TEST(Validate, ReportsExactMassMismatch)
{
    Plts m({"p", "q"}, {"a"});
    m.add_transition(0, 0, Distribution({{0, Probability::of(Rational(1, 3))}, {1, Probability::of(Rational(1, 3))}}));
    EXPECT_EQ(validate(m), std::vector<std::string>{"distribution mass 2/3 ≠ 1 at (p,a)"});
}

TEST(Validate, ReportsZeroProbabilityEntry)
{
    Plts m({"p", "q", "r"}, {"a"});
    m.add_transition(0, 0,
                     Distribution({{0, Probability::of(Rational(1, 3))},
                                   {1, Probability::of(Rational(2, 3))},
                                   {2, Probability::of(Rational(0))}}));
    const auto v = validate(m);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_TRUE(contains(v, "zero-probability support entry r"));
}

TEST(Validate, ReportsStructuralProblems)
{
    Plts m({"p"}, {"a"});
    m.add_transition(0, 0, Distribution{});
    m.add_transition(0, 0, Distribution({{3, Probability::one()}}));
    const auto v = validate(m);
    EXPECT_TRUE(contains(v, "empty distribution at (p,a)#0"));
    EXPECT_TRUE(contains(v, "unknown state index 3"));
}

TEST(Validate, DoubleMassWithinTolerance)
{
    Plts m({"p", "q"}, {"a"});
    m.add_transition(0, 0, Distribution({{0, Probability::of(0.1)}, {1, Probability::of(0.9 + 1e-12)}}));
    EXPECT_TRUE(validate(m).empty());
}

TEST(EmbedLts, SingleEdge)
{
    const Plts m = embed_lts({"p", "q"}, {{"p", "a", "q"}});
    ASSERT_EQ(m.successors(0, "a").size(), 1u);
    EXPECT_EQ(m.successors(0, "a")[0], dirac(1));
    EXPECT_TRUE(m.successors(1, "a").empty());
}

TEST(EmbedLts, EmptyEdgeSet)
{
    const Plts m = embed_lts({"p"}, {});
    EXPECT_EQ(m.num_states(), 1u);
    EXPECT_EQ(m.num_labels(), 0u);
    EXPECT_TRUE(m.successors(0, "a").empty());
}

TEST(EmbedLts, KeepsEdgeOrder)
{
    const Plts m = embed_lts({"p", "q"}, {{"p", "a", "q"}, {"p", "a", "p"}});
    const auto ds = m.successors(0, "a");
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds[0], dirac(1));
    EXPECT_EQ(ds[1], dirac(0));
}

TEST(EmbedLts, RejectsDanglingState)
{
    EXPECT_THROW(embed_lts({"p"}, {{"p", "a", "z"}}), ModelError);
}

TEST(RandomPlts, SingleDeadlockedState)
{
    const Plts m = random_plts(1, {"a"}, 0, 3, 7);
    EXPECT_EQ(m.num_states(), 1u);
    EXPECT_TRUE(m.successors(0, 0).empty());
}

TEST(RandomPlts, Deterministic)
{
    EXPECT_EQ(random_plts(5, {"a", "b"}, 3, 3, 9), random_plts(5, {"a", "b"}, 3, 3, 9));
    EXPECT_FALSE(random_plts(5, {"a", "b"}, 3, 3, 9) == random_plts(5, {"a", "b"}, 3, 3, 10));
}

TEST(RandomPlts, ValidAcrossGrid)
{
    EXPECT_TRUE(validate(random_plts(4, {"a", "b"}, 3, 3, 42)).empty());
    std::uint64_t seed = 0;
    for (std::size_t n : {1, 2, 3, 6, 10})
        for (std::size_t branching : {0, 1, 3})
            for (std::size_t support : {1, 2, 3, 5})
                for (int rep = 0; rep < 4; ++rep) {
                    const Plts m = random_plts(n, {"a", "b"}, branching, support, ++seed);
                    EXPECT_TRUE(validate(m).empty());
                    EXPECT_TRUE(m.exact());
                    for (std::size_t p = 0; p < n; ++p)
                        for (std::size_t a = 0; a < 2; ++a) {
                            EXPECT_LE(m.successors(p, a).size(), branching);
                            for (const auto& d : m.successors(p, a)) EXPECT_LE(d.outcomes.size(), support);
                        }
                }
}

TEST(Json, LoadsTwoStateFile)
{
    const Plts m = load_plts(std::string(PLMU_DATA_DIR) + "/two_state.json");
    EXPECT_EQ(m, testing::two_state_model());
    EXPECT_TRUE(m.exact());
    EXPECT_TRUE(validate(m).empty());
}

TEST(Json, DecimalsMakeTheWholeModelInexact)
{
    const Plts m = plts_from_json(nlohmann::json::parse(R"({
        "states": ["p", "q"], "labels": ["a"],
        "transitions": [{"from": "p", "label": "a", "dist": {"p": "1/2", "q": 0.5}},
                        {"from": "q", "label": "a", "dist": {"q": "1/1"}}]})"));
    EXPECT_FALSE(m.exact());
    EXPECT_EQ(m.successors(0, 0)[0](0), 0.5);
    EXPECT_TRUE(validate(m).empty());
}

TEST(Json, RejectsUndeclaredNames)
{
    EXPECT_THROW(plts_from_json(nlohmann::json::parse(
                     R"({"states": ["p"], "labels": ["a"], "transitions": [{"from": "p", "label": "a", "dist": {"z": 1}}]})")),
                 ModelError);
    EXPECT_THROW(plts_from_json(nlohmann::json::parse(
                     R"({"states": ["p"], "labels": ["a"], "transitions": [{"from": "x", "label": "a", "dist": {"p": 1}}]})")),
                 ModelError);
    EXPECT_THROW(plts_from_json(nlohmann::json::parse(
                     R"({"states": ["p"], "labels": ["a"], "transitions": [{"from": "p", "label": "b", "dist": {"p": 1}}]})")),
                 ModelError);
    EXPECT_THROW(plts_from_json(nlohmann::json::parse(R"({"labels": []})")), ModelError);
}

TEST(Json, MissingFileIsModelError)
{
    EXPECT_THROW(load_plts("/nonexistent/model.json"), ModelError);
}

TEST(Json, RoundTrip)
{
    const auto dir = std::filesystem::temp_directory_path();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Plts m = random_plts(1 + seed % 5, {"a", "b"}, 3, 3, seed);
        EXPECT_EQ(plts_from_json(to_json(m)), m);
    }
    const Plts inexact = plts_from_json(nlohmann::json::parse(R"({
        "states": ["s", "t"], "labels": ["go"],
        "transitions": [{"from": "s", "label": "go", "dist": {"s": 0.1, "t": 0.9}}]})"));
    const auto path = (dir / "plmu_roundtrip.json").string();
    save_plts(inexact, path);
    EXPECT_EQ(load_plts(path), inexact);
    std::filesystem::remove(path);
}

TEST(Rng, SameSeedSameStream)
{
    Rng a(123), b(123), c(124);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        differs = differs || x != c.next();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, BelowAndUnitStayInRange)
{
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        EXPECT_LT(r.below(7), 7u);
        const double u = r.unit();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
}

} // namespace
} // namespace plmu
