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

#include <cmath>
#include <set>

#include "fixtures.hpp"

namespace plmu {
namespace {

using testing::find_state;
using testing::two_state_model;

struct Sampled {
    Arena arena;
    InducedChain chain;
};

Sampled chain_of(Arena ar, std::size_t start = 0)
{
    InducedChain ch = induce_chain(ar, first_choice_profile(ar), start);
    return {std::move(ar), std::move(ch)};
}

TEST(SamplePlay, ImmediateTerminal)
{
    Arena ar;
    ArenaState t;
    t.reward = 1.0;
    ar.add_state(t);
    const auto s = chain_of(ar);
    Rng rng(1);
    const auto out = sample_play(s.chain, classify(s.chain, s.arena), rng);
    EXPECT_EQ(out.payoff, 1.0);
    EXPECT_EQ(out.steps, 0u);
}

TEST(SamplePlay, OddSelfLoop)
{
    Arena ar;
    ArenaState a;
    a.successors = {1};
    ar.add_state(a);
    ArenaState loop;
    loop.priority = 1;
    loop.successors = {1};
    ar.add_state(loop);
    const auto s = chain_of(ar);
    Rng rng(1);
    const auto out = sample_play(s.chain, classify(s.chain, s.arena), rng);
    EXPECT_EQ(out.payoff, 0.0);
    EXPECT_EQ(out.steps, 1u);
}

TEST(SamplePlay, LeastFixpointLoopAlwaysPaysZero)
{
    Arena ar = build_arena(parse("mu X. <a> X"), two_state_model());
    const auto s = chain_of(ar, ar.start(0));
    const auto cc = classify(s.chain, s.arena);
    Rng rng(9);
    std::set<std::size_t> classes;
    for (int i = 0; i < 2000; ++i) {
        const auto out = sample_play(s.chain, cc, rng);
        EXPECT_EQ(out.payoff, 0.0);
        classes.insert(out.absorbing_class);
    }
    EXPECT_EQ(classes.size(), 1u); // only the stuck diamond at q absorbs
}

TEST(Estimate, ZeroVarianceTerminal)
{
    Arena ar;
    ArenaState t;
    t.reward = 0.7;
    ar.add_state(t);
    const auto s = chain_of(ar);
    const Estimate e = estimate(s.chain, s.arena, 1000, 3);
    EXPECT_EQ(e.mean, 0.7);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(e.samples, 1000u);
    EXPECT_THROW(estimate(s.chain, s.arena, 0, 3), Error);
}

TEST(Estimate, SameSeedSameResult)
{
    const Valuation rho{{"R", {0.7, 0.25}}};
    Arena ar = build_arena(parse("<a> R"), two_state_model(), rho);
    const auto s = chain_of(ar, ar.start(0));
    const Estimate a = estimate(s.chain, s.arena, 500, 77);
    const Estimate b = estimate(s.chain, s.arena, 500, 77);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Estimate, SampledPayoffsAreAchievable)
{
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const Instance inst = random_instance(seed);
        Arena ar = build_arena(inst.formula, inst.model, inst.rho);
        const auto s = chain_of(ar, ar.start(0));
        const auto cc = classify(s.chain, s.arena);
        std::set<double> allowed;
        for (const auto& c : cc.classes) allowed.insert(c.payoff);
        Rng rng(seed);
        for (int i = 0; i < 200; ++i) EXPECT_TRUE(allowed.count(sample_play(s.chain, cc, rng).payoff));
    }
}

TEST(Estimate, ConvergesToExpectedReward)
{
    // A chain with genuine randomness: coin flips until heads, where tails
    // may repeat the flip.
    const Plts coin = load_plts(std::string(PLMU_DATA_DIR) + "/coin.json");
    const Valuation rho{{"H", {0.0, 1.0, 0.2}}};
    Arena ar = build_arena(parse("mu X. <flip> (H | <again> X)"), coin, rho);
    const auto s = chain_of(ar, ar.start(0));
    const double exact = expected_reward(s.chain, s.arena).value;
    double previous_band = 1.0;
    for (std::size_t n : {100, 1000, 10000}) {
        const Estimate e = estimate(s.chain, s.arena, n, 2024);
        EXPECT_LE(std::abs(e.mean - exact), 4 * e.std_error + 1e-12) << n;
        EXPECT_LT(e.std_error, previous_band);
        previous_band = e.std_error;
    }
}

TEST(Estimate, StatisticalContractOnRandomChains)
{
    int within = 0, total = 0;
    for (std::uint64_t seed = 1; total < 60; ++seed) {
        const Instance inst = random_instance(seed);
        Arena ar = build_arena(inst.formula, inst.model, inst.rho);
        const auto s = chain_of(ar, ar.start(0));
        const double exact = expected_reward(s.chain, s.arena).value;
        const Estimate e = estimate(s.chain, s.arena, 2000, derive_seed(5, seed));
        ++total;
        if (std::abs(e.mean - exact) <= 4 * e.std_error + 1e-12) ++within;
    }
    EXPECT_GE(within, 58);
}

} // namespace
} // namespace plmu
