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
  \file arena.hpp
  \brief 2 1/2-player parity games and their compilation from (formula, PLTS).

  Game states pair a process state or a distribution with a subformula.
  Player 1 moves at diamonds, disjunctions, mu-binders and mu-variables;
  Player 2 at the duals; Nature resolves distributions. Plays that get stuck
  at a diamond pay 0, at a box pay 1; free variables pay their valuation.
*/

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "plmu/denotational.hpp"
#include "plmu/error.hpp"
#include "plmu/formula.hpp"
#include "plmu/plts.hpp"
#include "plmu/subformulas.hpp"

namespace plmu {

enum class Owner { Player1, Player2, Nature };

inline const char* to_string(Owner o)
{
    switch (o) {
    case Owner::Player1: return "P1";
    case Owner::Player2: return "P2";
    case Owner::Nature: return "N";
    }
    return "?";
}

struct ArenaState {
    Owner owner = Owner::Player1;
    unsigned priority = 0;
    /// Present exactly on terminal states.
    std::optional<double> reward;
    std::vector<std::size_t> successors;
    /// Nature states only: pi(s)(successors[i]) = probs[i].
    std::vector<Probability> probs;
    /// Human-readable name, e.g. "(p,F2)" or "(p.a.0,F3)".
    std::string name;

    bool terminal() const { return successors.empty(); }
};

/// A finite arena with its parity structure (priorities and terminal rewards).
class Arena {
public:
    std::size_t add_state(ArenaState s)
    {
        states_.push_back(std::move(s));
        return states_.size() - 1;
    }

    std::size_t size() const { return states_.size(); }
    const ArenaState& operator[](std::size_t i) const { return states_.at(i); }
    ArenaState& mutable_state(std::size_t i) { return states_.at(i); }
    auto begin() const { return states_.begin(); }
    auto end() const { return states_.end(); }

    std::set<unsigned> priorities() const
    {
        std::set<unsigned> out;
        for (const auto& s : states_) out.insert(s.priority);
        return out;
    }

    /// True when every Nature probability is an exact rational.
    bool exact() const
    {
        for (const auto& s : states_)
            for (const auto& p : s.probs)
                if (!p.exact) return false;
        return true;
    }

    /// Lists violated arena invariants; empty when well formed.
    std::vector<std::string> check() const
    {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < states_.size(); ++i) {
            const auto& s = states_[i];
            const std::string id = "state " + std::to_string(i);
            for (std::size_t t : s.successors)
                if (t >= states_.size()) out.push_back(id + " has an out-of-range successor");
            if (s.terminal() != s.reward.has_value())
                out.push_back(id + (s.terminal() ? " is terminal without a reward"
                                                 : " has a reward but successors"));
            if (s.reward && !(*s.reward >= 0.0 && *s.reward <= 1.0))
                out.push_back(id + " reward outside [0,1]");
            if (s.owner == Owner::Nature) {
                if (s.terminal()) out.push_back(id + " is a terminal Nature state");
                if (s.probs.size() != s.successors.size()) {
                    out.push_back(id + " successor/probability mismatch");
                    continue;
                }
                double mass = 0.0;
                std::set<std::size_t> seen;
                for (std::size_t k = 0; k < s.probs.size(); ++k) {
                    if (!(s.probs[k].value > 0.0))
                        out.push_back(id + " has a successor outside the support of pi");
                    if (!seen.insert(s.successors[k]).second)
                        out.push_back(id + " lists a successor twice");
                    mass += s.probs[k].value;
                }
                if (std::abs(mass - 1.0) > kMassTolerance) out.push_back(id + " pi mass != 1");
            } else if (!s.probs.empty()) {
                out.push_back(id + " is a player state with probabilities");
            }
        }
        return out;
    }

    /// Start state <p, F> of the compiled game, when this arena came from build_arena.
    std::size_t start(std::size_t process) const { return starts_.at(process); }
    const std::vector<std::size_t>& starts() const { return starts_; }
    void set_starts(std::vector<std::size_t> s) { starts_ = std::move(s); }

private:
    std::vector<ArenaState> states_;
    std::vector<std::size_t> starts_;
};

/// Priority of each bound variable: variables are handled innermost first and
/// get the least number >= 1 of their parity (odd for mu, even for nu) above
/// the priorities of every variable they subsume.
inline std::map<std::string, unsigned> variable_priorities(const SubformulaTable& table)
{
    std::map<std::string, unsigned> out;
    const auto vars = table.bound_variables();
    // Pre-order lists outer binders first; reversing puts every subsumed
    // variable before the variables subsuming it.
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        unsigned floor = 0;
        for (const auto& [y, py] : out)
            if (table.subsumes(*it, y)) floor = std::max(floor, py);
        const bool odd = table[table.binder_of(*it)].formula.kind() == Kind::Mu;
        unsigned pr = floor + 1;
        if ((pr % 2 == 1) != odd) ++pr;
        out.emplace(*it, pr);
    }
    return out;
}

/// The game for f on m under rho, restricted to states reachable from some <p, f>.
inline Arena build_arena(const Formula& f, const Plts& m, const Valuation& rho = {})
{
    const SubformulaTable table(f);
    for (const auto& x : free_vars(f)) {
        auto it = rho.find(x);
        if (it == rho.end()) throw UnboundVariable(x);
        if (it->second.size() != m.num_states())
            throw ModelError("valuation of " + x + " does not match the model");
        for (double v : it->second)
            if (!(v >= 0.0 && v <= 1.0)) throw ModelError("valuation of " + x + " leaves [0,1]");
    }
    const auto prio = variable_priorities(table);

    Arena arena;
    // Key: (is_distribution, process, label, transition index, subformula).
    using Key = std::tuple<bool, std::size_t, std::size_t, std::size_t, std::size_t>;
    std::map<Key, std::size_t> index;
    std::vector<Key> keys;
    std::queue<std::size_t> work;

    auto intern = [&](const Key& k) {
        auto [it, fresh] = index.emplace(k, arena.size());
        if (fresh) {
            const auto& [dist, p, a, t, g] = k;
            ArenaState s;
            s.name = dist ? "(" + m.state_name(p) + "." + m.label_name(a) + "." +
                                std::to_string(t) + ",F" + std::to_string(g) + ")"
                          : "(" + m.state_name(p) + ",F" + std::to_string(g) + ")";
            arena.add_state(std::move(s));
            keys.push_back(k);
            work.push(it->second);
        }
        return it->second;
    };

    std::vector<std::size_t> starts;
    for (std::size_t p = 0; p < m.num_states(); ++p) starts.push_back(intern({false, p, 0, 0, 0}));

    while (!work.empty()) {
        const std::size_t id = work.front();
        work.pop();
        const auto [dist, p, a, t, g] = keys[id];
        const auto& entry = table[g];
        const Formula& G = entry.formula;
        ArenaState s;
        s.name = arena[id].name;

        if (dist) {
            const Distribution& d = m.successors(p, a)[t];
            s.owner = Owner::Nature;
            for (const auto& o : d.outcomes) {
                if (!(o.prob.value > 0.0)) continue;
                s.successors.push_back(intern({false, o.state, 0, 0, g}));
                s.probs.push_back(o.prob);
            }
        } else {
            switch (G.kind()) {
            case Kind::Var:
                if (entry.binder) {
                    const Formula& B = table[*entry.binder].formula;
                    s.owner = B.kind() == Kind::Mu ? Owner::Player1 : Owner::Player2;
                    s.priority = prio.at(G.name());
                    s.successors.push_back(intern({false, p, 0, 0, table[*entry.binder].children[0]}));
                } else {
                    s.owner = Owner::Player1;
                    s.reward = rho.at(G.name())[p];
                }
                break;
            case Kind::Mu:
            case Kind::Nu:
                s.owner = G.kind() == Kind::Mu ? Owner::Player1 : Owner::Player2;
                s.successors.push_back(intern({false, p, 0, 0, entry.children[0]}));
                break;
            case Kind::Or:
            case Kind::And:
                s.owner = G.kind() == Kind::Or ? Owner::Player1 : Owner::Player2;
                for (std::size_t c : entry.children) {
                    const std::size_t succ = intern({false, p, 0, 0, c});
                    // X | X has a single successor state.
                    if (std::find(s.successors.begin(), s.successors.end(), succ) ==
                        s.successors.end())
                        s.successors.push_back(succ);
                }
                break;
            case Kind::Diamond:
            case Kind::Box: {
                s.owner = G.kind() == Kind::Diamond ? Owner::Player1 : Owner::Player2;
                const auto label = m.find_label(G.label());
                const std::size_t n = label ? m.successors(p, *label).size() : 0;
                for (std::size_t k = 0; k < n; ++k)
                    s.successors.push_back(intern({true, p, *label, k, entry.children[0]}));
                if (n == 0) s.reward = G.kind() == Kind::Diamond ? 0.0 : 1.0;
                break;
            }
            }
        }
        arena.mutable_state(id) = std::move(s);
    }
    arena.set_starts(std::move(starts));
    return arena;
}

/// Payoff of a completed play: the terminal reward for a finite play, and for
/// an infinite play 1 iff the largest priority seen infinitely often is even.
inline double classify_play_payoff(const std::set<unsigned>& infinitely_often,
                                   std::optional<double> terminal_reward)
{
    if (infinitely_often.empty() == !terminal_reward.has_value())
        throw Error("a play is either finite (terminal reward) or infinite (priorities), "
                    "not both or neither");
    if (terminal_reward) return *terminal_reward;
    return *infinitely_often.rbegin() % 2 == 0 ? 1.0 : 0.0;
}

/// Line-oriented dump: `id name | owner | priority | reward | successors`.
/// Nature successors carry their probability as `id:prob`.
inline void dump(std::ostream& os, const Arena& arena, const SubformulaTable* table = nullptr)
{
    if (table)
        for (std::size_t i = 0; i < table->size(); ++i)
            os << "# F" << i << " = " << table->formula(i) << '\n';
    for (std::size_t i = 0; i < arena.size(); ++i) {
        const auto& s = arena[i];
        os << i << ' ' << s.name << " | " << to_string(s.owner) << " | " << s.priority << " | ";
        if (s.reward) {
            os << *s.reward;
        } else {
            os << '-';
        }
        os << " |";
        for (std::size_t k = 0; k < s.successors.size(); ++k) {
            os << ' ' << s.successors[k];
            if (s.owner == Owner::Nature) {
                os << ':';
                if (s.probs[k].exact) {
                    os << format_fraction(*s.probs[k].exact);
                } else {
                    os << s.probs[k].value;
                }
            }
        }
        os << '\n';
    }
}

} // namespace plmu
