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

/*!
  \file solver.hpp
  \brief Lower and upper values of finite parity games.

  Two independent routes:
   - brute_force_values enumerates every pair of memoryless strategies and
     takes max-min / min-max of the exact chain payoffs;
   - value_iteration evaluates a nested fixpoint of the one-step functional,
     one mu/nu level per distinct priority, highest priority outermost.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "plmu/arena.hpp"
#include "plmu/chain.hpp"
#include "plmu/denotational.hpp"
#include "plmu/error.hpp"

namespace plmu {

/// One-step functional: terminal states pay their reward, Player 1 maximizes,
/// Player 2 minimizes, Nature averages.
inline double functional_at(const Arena& arena, const ValueVector& v, std::size_t s)
{
    const auto& st = arena[s];
    if (st.terminal()) return *st.reward;
    switch (st.owner) {
    case Owner::Player1: {
        double best = 0.0;
        for (std::size_t t : st.successors) best = std::max(best, v[t]);
        return best;
    }
    case Owner::Player2: {
        double best = 1.0;
        for (std::size_t t : st.successors) best = std::min(best, v[t]);
        return best;
    }
    case Owner::Nature: {
        double acc = 0.0;
        for (std::size_t k = 0; k < st.successors.size(); ++k)
            acc += st.probs[k].value * v[st.successors[k]];
        return acc;
    }
    }
    return 0.0;
}

inline ValueVector apply_functional(const Arena& arena, const ValueVector& v)
{
    ValueVector out(arena.size());
    for (std::size_t s = 0; s < arena.size(); ++s) out[s] = functional_at(arena, v, s);
    return out;
}

/// Sup-norm distance between v and the functional applied to v.
inline double check_functional_fixpoint(const Arena& arena, const ValueVector& v)
{
    if (v.size() != arena.size()) throw ModelError("value vector does not match the arena");
    return sup_distance(v, apply_functional(arena, v));
}

// ---------------------------------------------------------------------------
// Enumeration of memoryless profiles

/// Non-terminal states of one player, in state order, with their successor counts.
struct ChoicePoints {
    std::vector<std::size_t> states;
    std::vector<std::size_t> radix;

    /// Number of memoryless strategies, as a double to survive overflow.
    double count() const
    {
        double n = 1.0;
        for (std::size_t r : radix) n *= static_cast<double>(r);
        return n;
    }
};

inline ChoicePoints choice_points(const Arena& arena, Owner player)
{
    ChoicePoints cp;
    for (std::size_t s = 0; s < arena.size(); ++s) {
        if (arena[s].owner != player || arena[s].terminal()) continue;
        cp.states.push_back(s);
        cp.radix.push_back(arena[s].successors.size());
    }
    return cp;
}

/// Size of the memoryless profile space: product of |E(s)| over player states.
inline double profile_space_size(const Arena& arena)
{
    return choice_points(arena, Owner::Player1).count() * choice_points(arena, Owner::Player2).count();
}

struct BruteForceOptions {
    double budget = 1e6;
    /// Improvements smaller than this do not displace an earlier witness.
    double tie_tolerance = 1e-12;
};

struct BruteForceResult {
    /// max over Player 1 strategies of min over Player 2 strategies, per state.
    ValueVector lower;
    /// min over Player 2 strategies of max over Player 1 strategies, per state.
    ValueVector upper;
    std::size_t start = 0;
    /// Player 1 strategy attaining lower[start], with Player 2's best reply.
    Profile lower_witness;
    /// Player 2 strategy attaining upper[start], with Player 1's best reply.
    Profile upper_witness;
    double profiles_evaluated = 0;
};

namespace detail {

/// Strategies of one player are addressed by lexicographic rank over its
/// choice points (the last choice point varies fastest).
inline void decode_strategy(const Arena& arena, const ChoicePoints& cp, std::size_t rank, Profile& prof)
{
    for (std::size_t i = cp.states.size(); i-- > 0;) {
        const std::size_t digit = rank % cp.radix[i];
        rank /= cp.radix[i];
        prof.choice[cp.states[i]] = arena[cp.states[i]].successors[digit];
    }
}

struct PassResult {
    ValueVector value;
    std::size_t outer_rank = 0;
    std::size_t inner_rank = 0;
};

/// ext over outer strategies of the opposite ext over inner strategies,
/// pointwise at every state. Witness ranks are the first optimal ones at start.
inline PassResult enumerate_pass(const Arena& arena, ProfileEvaluator& eval, const ChoicePoints& outer,
                                 const ChoicePoints& inner, bool outer_maximizes, std::size_t start,
                                 double eps, double& evaluated)
{
    const std::size_t n = arena.size();
    const std::size_t n_outer = static_cast<std::size_t>(outer.count());
    const std::size_t n_inner = static_cast<std::size_t>(inner.count());
    const double inf = std::numeric_limits<double>::infinity();
    // better(a, b): a strictly improves on b for the player who picks.
    auto better = [eps](bool maximize, double a, double b) { return maximize ? a > b + eps : a < b - eps; };

    PassResult out;
    out.value.assign(n, outer_maximizes ? -inf : inf);
    double outer_best = outer_maximizes ? -inf : inf;

    Profile prof;
    prof.choice.resize(n);
    ValueVector reply(n);
    for (std::size_t ro = 0; ro < n_outer; ++ro) {
        decode_strategy(arena, outer, ro, prof);
        std::fill(reply.begin(), reply.end(), outer_maximizes ? inf : -inf);
        std::size_t reply_rank = 0;
        for (std::size_t ri = 0; ri < n_inner; ++ri) {
            decode_strategy(arena, inner, ri, prof);
            const ValueVector& v = eval.values(prof);
            evaluated += 1;
            if (better(!outer_maximizes, v[start], reply[start])) reply_rank = ri;
            for (std::size_t s = 0; s < n; ++s)
                reply[s] = outer_maximizes ? std::min(reply[s], v[s]) : std::max(reply[s], v[s]);
        }
        if (better(outer_maximizes, reply[start], outer_best)) {
            outer_best = reply[start];
            out.outer_rank = ro;
            out.inner_rank = reply_rank;
        }
        for (std::size_t s = 0; s < n; ++s)
            out.value[s] = outer_maximizes ? std::max(out.value[s], reply[s]) : std::min(out.value[s], reply[s]);
    }
    return out;
}

} // namespace detail

/// Exhaustive max-min / min-max over memoryless profiles. Throws BudgetExceeded
/// when the profile space is larger than opts.budget.
inline BruteForceResult brute_force_values(const Arena& arena, std::size_t start,
                                           const BruteForceOptions& opts = {})
{
    if (start >= arena.size()) throw ModelError("start state out of range");
    const ChoicePoints p1 = choice_points(arena, Owner::Player1);
    const ChoicePoints p2 = choice_points(arena, Owner::Player2);
    const double space = p1.count() * p2.count();
    if (space > opts.budget) throw BudgetExceeded(space, opts.budget);

    BruteForceResult out;
    out.start = start;
    ProfileEvaluator eval(arena);
    const auto lower = detail::enumerate_pass(arena, eval, p1, p2, true, start, opts.tie_tolerance,
                                              out.profiles_evaluated);
    const auto upper = detail::enumerate_pass(arena, eval, p2, p1, false, start, opts.tie_tolerance,
                                              out.profiles_evaluated);
    out.lower = lower.value;
    out.upper = upper.value;

    out.lower_witness.choice.resize(arena.size());
    detail::decode_strategy(arena, p1, lower.outer_rank, out.lower_witness);
    detail::decode_strategy(arena, p2, lower.inner_rank, out.lower_witness);
    out.upper_witness.choice.resize(arena.size());
    detail::decode_strategy(arena, p2, upper.outer_rank, out.upper_witness);
    detail::decode_strategy(arena, p1, upper.inner_rank, out.upper_witness);
    return out;
}

// ---------------------------------------------------------------------------
// Nested value iteration

struct IterationOptions {
    double tol = 1e-9;
    std::size_t max_iter = 1'000'000;
};

namespace detail {

class NestedIteration {
public:
    NestedIteration(const Arena& arena, const IterationOptions& opts) : arena_(arena), opts_(opts)
    {
        const auto prios = arena.priorities();
        levels_.assign(prios.rbegin(), prios.rend());
        for (std::size_t s = 0; s < arena.size(); ++s) {
            const auto it = std::find(levels_.begin(), levels_.end(), arena[s].priority);
            level_of_.push_back(static_cast<std::size_t>(it - levels_.begin()));
        }
        blocks_.resize(levels_.size());
        for (std::size_t s = 0; s < arena.size(); ++s) blocks_[level_of_[s]].push_back(s);
        v_.assign(arena.size(), 0.0);
    }

    ValueVector run()
    {
        if (!levels_.empty()) solve(0);
        return v_;
    }

private:
    void init_from(std::size_t level)
    {
        for (std::size_t l = level; l < levels_.size(); ++l) {
            const double start = levels_[l] % 2 == 0 ? 1.0 : 0.0;
            for (std::size_t s : blocks_[l]) v_[s] = start;
        }
    }

    // Fixpoint of block `level` with outer blocks frozen; inner blocks are
    // recomputed from their initial values at every step.
    void solve(std::size_t level)
    {
        init_from(level);
        double change = 0.0;
        for (std::size_t it = 1; it <= opts_.max_iter; ++it) {
            if (level + 1 < levels_.size()) solve(level + 1);
            change = 0.0;
            std::vector<double> next(blocks_[level].size());
            for (std::size_t k = 0; k < next.size(); ++k)
                next[k] = functional_at(arena_, v_, blocks_[level][k]);
            for (std::size_t k = 0; k < next.size(); ++k) {
                change = std::max(change, std::abs(next[k] - v_[blocks_[level][k]]));
                v_[blocks_[level][k]] = next[k];
            }
            if (change < opts_.tol) {
                // Inner blocks must match the final value of this block.
                if (level + 1 < levels_.size()) solve(level + 1);
                return;
            }
        }
        throw NonConvergence("value iteration at priority " + std::to_string(levels_[level]), change);
    }

    const Arena& arena_;
    const IterationOptions& opts_;
    std::vector<unsigned> levels_;
    std::vector<std::size_t> level_of_;
    std::vector<std::vector<std::size_t>> blocks_;
    ValueVector v_;
};

} // namespace detail

/// Game value at every arena state by nested fixpoint iteration.
inline ValueVector value_iteration(const Arena& arena, const IterationOptions& opts = {})
{
    if (!(opts.tol > 0.0)) throw Error("tolerance must be positive");
    return detail::NestedIteration(arena, opts).run();
}

} // namespace plmu
