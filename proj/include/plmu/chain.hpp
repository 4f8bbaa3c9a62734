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
  \file chain.hpp
  \brief Memoryless strategy profiles and the finite Markov chains they induce.

  Fixing a memoryless choice for both players turns an arena into a finite
  Markov chain. Almost every run of a finite chain ends in a terminal state
  or is trapped in a bottom strongly connected component (BSCC), where it
  visits every state infinitely often. The expected payoff is therefore
  the sum over absorbing classes of (absorption probability x payoff), with
  a BSCC paying 1 iff its largest priority is even.
*/

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "plmu/arena.hpp"
#include "plmu/error.hpp"
#include "plmu/linear.hpp"

namespace plmu {

/// Memoryless choices of both players: choice[s] is the successor picked at a
/// non-terminal player state s, and empty at terminal and Nature states.
struct Profile {
    std::vector<std::optional<std::size_t>> choice;

    friend bool operator==(const Profile&, const Profile&) = default;
};

/// Throws ModelError unless the profile picks a successor exactly at the
/// non-terminal player states.
inline void check_profile(const Arena& arena, const Profile& profile)
{
    if (profile.choice.size() != arena.size())
        throw ModelError("profile covers " + std::to_string(profile.choice.size()) +
                         " states, arena has " + std::to_string(arena.size()));
    for (std::size_t s = 0; s < arena.size(); ++s) {
        const auto& st = arena[s];
        const auto& c = profile.choice[s];
        const bool needs = st.owner != Owner::Nature && !st.terminal();
        if (needs != c.has_value())
            throw ModelError("profile " + std::string(needs ? "lacks a choice" : "has a stray choice") +
                             " at state " + std::to_string(s));
        if (c && std::find(st.successors.begin(), st.successors.end(), *c) == st.successors.end())
            throw ModelError("choice " + std::to_string(*c) + " at state " + std::to_string(s) +
                             " is not a successor");
    }
}

/// Profile choosing the first successor everywhere.
inline Profile first_choice_profile(const Arena& arena)
{
    Profile p;
    p.choice.resize(arena.size());
    for (std::size_t s = 0; s < arena.size(); ++s)
        if (arena[s].owner != Owner::Nature && !arena[s].terminal())
            p.choice[s] = arena[s].successors.front();
    return p;
}

/// The part of the arena reachable from `start` under a profile.
struct InducedChain {
    struct Edge {
        std::size_t to;
        Probability prob;
    };
    /// Arena state of each chain state; states[start] is the initial state.
    std::vector<std::size_t> states;
    std::vector<std::vector<Edge>> edges;
    std::size_t start = 0;

    std::size_t size() const { return states.size(); }

    bool exact() const
    {
        for (const auto& out : edges)
            for (const auto& e : out)
                if (!e.prob.exact) return false;
        return true;
    }
};

inline InducedChain induce_chain(const Arena& arena, const Profile& profile, std::size_t start)
{
    check_profile(arena, profile);
    if (start >= arena.size()) throw ModelError("start state out of range");
    InducedChain chain;
    std::map<std::size_t, std::size_t> local;
    std::queue<std::size_t> work;
    auto intern = [&](std::size_t s) {
        auto [it, fresh] = local.emplace(s, chain.states.size());
        if (fresh) {
            chain.states.push_back(s);
            chain.edges.emplace_back();
            work.push(s);
        }
        return it->second;
    };
    chain.start = intern(start);
    while (!work.empty()) {
        const std::size_t s = work.front();
        work.pop();
        const std::size_t from = local.at(s);
        const auto& st = arena[s];
        if (st.terminal()) continue;
        if (st.owner == Owner::Nature) {
            for (std::size_t k = 0; k < st.successors.size(); ++k) {
                const std::size_t to = intern(st.successors[k]);
                chain.edges[from].push_back({to, st.probs[k]});
            }
        } else {
            const std::size_t to = intern(*profile.choice[s]);
            chain.edges[from].push_back({to, Probability::one()});
        }
    }
    return chain;
}

/// A terminal state or a BSCC of a chain.
struct AbsorbingClass {
    bool terminal = false;
    std::vector<std::size_t> members; // chain-state indices
    unsigned max_priority = 0;
    double payoff = 0.0;
};

struct ChainClassification {
    /// Absorbing class of each chain state, or nullopt for transient states.
    std::vector<std::optional<std::size_t>> class_of;
    std::vector<AbsorbingClass> classes;
};

inline ChainClassification classify(const InducedChain& chain, const Arena& arena)
{
    const std::size_t n = chain.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& e : chain.edges[i]) succ[i].push_back(e.to);

    std::size_t count = 0;
    const auto comp = strongly_connected_components(
        n, [&](std::size_t v) -> const std::vector<std::size_t>& { return succ[v]; }, count);

    std::vector<std::vector<std::size_t>> members(count);
    for (std::size_t i = 0; i < n; ++i) members[comp[i]].push_back(i);
    std::vector<bool> leaves(count, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t : succ[i])
            if (comp[t] != comp[i]) leaves[comp[i]] = true;

    ChainClassification out;
    out.class_of.assign(n, std::nullopt);
    for (std::size_t c = 0; c < count; ++c) {
        if (leaves[c]) continue;
        AbsorbingClass cls;
        cls.members = members[c];
        const std::size_t first = cls.members.front();
        if (succ[first].empty()) {
            cls.terminal = true;
            cls.payoff = *arena[chain.states[first]].reward;
        } else {
            for (std::size_t i : cls.members)
                cls.max_priority = std::max(cls.max_priority, arena[chain.states[i]].priority);
            cls.payoff = cls.max_priority % 2 == 0 ? 1.0 : 0.0;
        }
        for (std::size_t i : cls.members) out.class_of[i] = out.classes.size();
        out.classes.push_back(std::move(cls));
    }
    return out;
}

struct RewardBreakdown {
    double value = 0.0;
    ChainClassification classification;
    /// Probability of ending in each absorbing class, from the chain start.
    std::vector<double> absorption;
    bool exact_arithmetic = false;
};

/// Transient systems below this size are solved in rational arithmetic when
/// every probability of the chain is exact.
inline constexpr std::size_t kExactSolveLimit = 200;

namespace detail {

template <class T>
std::vector<T> absorption_probabilities(const InducedChain& chain, const ChainClassification& cc,
                                        const std::vector<std::size_t>& transient,
                                        const std::vector<std::size_t>& slot,
                                        T (*prob)(const Probability&))
{
    const std::size_t k = transient.size();
    // Expected visits y solve (I - Q)^T y = e_start.
    Matrix<T> a(k, std::vector<T>(k, T(0)));
    std::vector<T> rhs(k, T(0));
    for (std::size_t r = 0; r < k; ++r) a[r][r] = T(1);
    for (std::size_t i = 0; i < k; ++i)
        for (const auto& e : chain.edges[transient[i]])
            if (!cc.class_of[e.to]) a[slot[e.to]][i] -= prob(e.prob);
    rhs[slot[chain.start]] = T(1);

    std::vector<T> visits;
    if constexpr (std::is_floating_point_v<T>) {
        visits = solve_linear_refined(a, rhs);
    } else {
        visits = solve_linear(std::move(a), std::move(rhs));
    }

    std::vector<T> absorb(cc.classes.size(), T(0));
    for (std::size_t i = 0; i < k; ++i)
        for (const auto& e : chain.edges[transient[i]])
            if (cc.class_of[e.to]) absorb[*cc.class_of[e.to]] += visits[i] * prob(e.prob);
    return absorb;
}

inline double as_double(const Probability& p) { return p.value; }
inline Rational as_rational(const Probability& p) { return *p.exact; }

} // namespace detail

/// Exact expected payoff of the chain from its start state.
inline RewardBreakdown expected_reward(const InducedChain& chain, const Arena& arena)
{
    RewardBreakdown out;
    out.classification = classify(chain, arena);
    const auto& cc = out.classification;
    out.absorption.assign(cc.classes.size(), 0.0);

    if (const auto c = cc.class_of[chain.start]) {
        out.absorption[*c] = 1.0;
        out.value = cc.classes[*c].payoff;
        out.exact_arithmetic = true;
        return out;
    }

    std::vector<std::size_t> transient;
    std::vector<std::size_t> slot(chain.size(), 0);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (cc.class_of[i]) continue;
        slot[i] = transient.size();
        transient.push_back(i);
    }

    if (chain.exact() && transient.size() < kExactSolveLimit) {
        const auto absorb = detail::absorption_probabilities<Rational>(chain, cc, transient, slot,
                                                                       &detail::as_rational);
        for (std::size_t c = 0; c < absorb.size(); ++c) out.absorption[c] = static_cast<double>(absorb[c]);
        out.exact_arithmetic = true;
    } else {
        out.absorption = detail::absorption_probabilities<double>(chain, cc, transient, slot,
                                                                  &detail::as_double);
    }
    for (std::size_t c = 0; c < cc.classes.size(); ++c)
        out.value += out.absorption[c] * cc.classes[c].payoff;
    return out;
}

/// Expected payoff from every arena state under a profile, computed component
/// by component on the profile's graph (sink components first). Used by the
/// enumeration oracle, which needs values at all states for many profiles.
class ProfileEvaluator {
public:
    explicit ProfileEvaluator(const Arena& arena) : arena_(arena), succ_(arena.size())
    {
        for (std::size_t s = 0; s < arena.size(); ++s)
            if (arena[s].owner == Owner::Nature) succ_[s] = arena[s].successors;
    }

    const ValueVector& values(const Profile& profile)
    {
        const std::size_t n = arena_.size();
        for (std::size_t s = 0; s < n; ++s) {
            const auto& st = arena_[s];
            if (st.owner != Owner::Nature && !st.terminal()) succ_[s].assign(1, *profile.choice[s]);
        }
        std::size_t count = 0;
        const auto comp = strongly_connected_components(
            n, [&](std::size_t v) -> const std::vector<std::size_t>& { return succ_[v]; }, count);
        members_.assign(count, {});
        for (std::size_t s = 0; s < n; ++s) members_[comp[s]].push_back(s);

        values_.assign(n, 0.0);
        for (std::size_t c = 0; c < count; ++c) solve_component(members_[c], comp, c);
        return values_;
    }

private:
    double step(std::size_t s) const
    {
        const auto& st = arena_[s];
        if (st.terminal()) return *st.reward;
        if (st.owner != Owner::Nature) return values_[succ_[s].front()];
        double acc = 0.0;
        for (std::size_t k = 0; k < st.successors.size(); ++k)
            acc += st.probs[k].value * values_[st.successors[k]];
        return acc;
    }

    void solve_component(const std::vector<std::size_t>& mem, const std::vector<std::size_t>& comp,
                         std::size_t c)
    {
        bool internal = mem.size() > 1;
        bool exits = false;
        for (std::size_t s : mem)
            for (std::size_t t : succ_[s]) {
                if (comp[t] == c) internal = true;
                else exits = true;
            }
        if (!internal) {
            values_[mem.front()] = step(mem.front());
            return;
        }
        if (!exits) {
            unsigned top = 0;
            for (std::size_t s : mem) top = std::max(top, arena_[s].priority);
            const double payoff = top % 2 == 0 ? 1.0 : 0.0;
            for (std::size_t s : mem) values_[s] = payoff;
            return;
        }
        // Transient component: v = P_inside v + P_outside v_known.
        const std::size_t k = mem.size();
        std::map<std::size_t, std::size_t> slot;
        for (std::size_t i = 0; i < k; ++i) slot[mem[i]] = i;
        Matrix<double> a(k, std::vector<double>(k, 0.0));
        std::vector<double> b(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t s = mem[i];
            const auto& st = arena_[s];
            a[i][i] += 1.0;
            for (std::size_t j = 0; j < succ_[s].size(); ++j) {
                const std::size_t t = succ_[s][j];
                const double p = st.owner == Owner::Nature ? st.probs[j].value : 1.0;
                if (comp[t] == c) {
                    a[i][slot.at(t)] -= p;
                } else {
                    b[i] += p * values_[t];
                }
            }
        }
        const auto x = solve_linear_refined(a, b);
        for (std::size_t i = 0; i < k; ++i) values_[mem[i]] = x[i];
    }

    const Arena& arena_;
    std::vector<std::vector<std::size_t>> succ_;
    std::vector<std::vector<std::size_t>> members_;
    ValueVector values_;
};

inline ValueVector profile_values(const Arena& arena, const Profile& profile)
{
    check_profile(arena, profile);
    ProfileEvaluator ev(arena);
    return ev.values(profile);
}

} // namespace plmu
