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
  \file random.hpp
  \brief Seeded generators for models, formulas, valuations and test instances.
*/

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "plmu/denotational.hpp"
#include "plmu/formula.hpp"
#include "plmu/plts.hpp"
#include "plmu/rng.hpp"

namespace plmu {

/// k distinct values from [0, n), in random order.
inline std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n, std::size_t k)
{
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
    pool.resize(k);
    return pool;
}

/// Random model with states s0..s{n-1}. Each (state, label) gets 0..max_branching
/// distributions, each over 1..max_support distinct states, with dyadic
/// probabilities (multiples of 1/2^k) summing to exactly 1.
inline Plts random_plts(std::size_t n_states, const std::vector<std::string>& labels,
                        std::size_t max_branching, std::size_t max_support, std::uint64_t seed)
{
    Rng rng(seed);
    Plts m;
    for (std::size_t i = 0; i < n_states; ++i) m.add_state("s" + std::to_string(i));
    for (const auto& a : labels) m.add_label(a);
    if (n_states == 0) return m;

    const std::size_t support_cap = std::max<std::size_t>(1, std::min(max_support, n_states));
    std::size_t denominator = 8;
    while (denominator < 2 * support_cap) denominator *= 2;

    for (std::size_t p = 0; p < n_states; ++p) {
        for (std::size_t a = 0; a < labels.size(); ++a) {
            const std::size_t branches = rng.below(max_branching + 1);
            for (std::size_t b = 0; b < branches; ++b) {
                const std::size_t k = 1 + rng.below(support_cap);
                const auto targets = sample_distinct(rng, n_states, k);
                // k positive parts of `denominator` from k-1 distinct cut points.
                auto cuts = sample_distinct(rng, denominator - 1, k - 1);
                for (auto& c : cuts) c += 1;
                std::sort(cuts.begin(), cuts.end());
                cuts.push_back(denominator);
                std::vector<Distribution::Outcome> outcomes;
                std::size_t prev = 0;
                for (std::size_t i = 0; i < k; ++i) {
                    const Rational pr(static_cast<long long>(cuts[i] - prev), static_cast<long long>(denominator));
                    outcomes.push_back({targets[i], Probability::of(pr)});
                    prev = cuts[i];
                }
                m.add_transition(p, a, Distribution(std::move(outcomes)));
            }
        }
    }
    return m;
}

struct FormulaShape {
    std::size_t max_binders = 2;
    /// Longest root-to-leaf path, counting nodes.
    std::size_t max_depth = 5;
    std::vector<std::string> labels{"a"};
    /// Free variable names available at the leaves; ignored when closed.
    std::vector<std::string> free_vars;
    bool closed = true;
};

/// Random normal-form formula within the shape. Closed formulas start with a
/// binder, since every leaf is a variable.
inline Formula random_formula(Rng& rng, const FormulaShape& shape)
{
    static const char* kNames[] = {"X", "Y", "U", "V", "T", "S"};
    std::size_t binders_used = 0;
    std::vector<std::string> scope;
    const bool open_leaves = !shape.closed && !shape.free_vars.empty();

    auto fresh_name = [&]() {
        const std::size_t i = binders_used++;
        return i < std::size(kNames) ? std::string(kNames[i]) : "B" + std::to_string(i);
    };

    auto leaf = [&]() {
        const std::size_t options = scope.size() + (open_leaves ? shape.free_vars.size() : 0);
        // Favour the innermost bound variable so binders tend to be used.
        if (!scope.empty() && rng.chance(0.5)) return Formula::var(scope.back());
        const std::size_t pick = rng.below(options);
        if (pick < scope.size()) return Formula::var(scope[pick]);
        return Formula::var(shape.free_vars[pick - scope.size()]);
    };

    auto gen = [&](auto&& self, std::size_t depth_left) -> Formula {
        const bool can_bind = binders_used < shape.max_binders && depth_left >= 2;
        const bool must_bind = scope.empty() && !open_leaves;
        if (must_bind && !can_bind) throw Error("random_formula: shape admits no closed formula");
        if (!must_bind && (depth_left <= 1 || rng.chance(0.15))) return leaf();

        // Weights: diamond, box, or, and, binder.
        const std::size_t binder_weight = can_bind ? 3 : 0;
        std::size_t pick = must_bind ? 99 : rng.below(8 + binder_weight);
        if (pick < 2) return Formula::diamond(shape.labels[rng.below(shape.labels.size())], self(self, depth_left - 1));
        if (pick < 4) return Formula::box(shape.labels[rng.below(shape.labels.size())], self(self, depth_left - 1));
        if (pick < 6 && depth_left >= 2) {
            Formula l = self(self, depth_left - 1);
            return Formula::disj(std::move(l), self(self, depth_left - 1));
        }
        if (pick < 8 && depth_left >= 2) {
            Formula l = self(self, depth_left - 1);
            return Formula::conj(std::move(l), self(self, depth_left - 1));
        }
        std::string name = fresh_name();
        const Kind kind = rng.chance(0.5) ? Kind::Mu : Kind::Nu;
        scope.push_back(name);
        Formula body = self(self, depth_left - 1);
        scope.pop_back();
        return Formula::binder(kind, std::move(name), std::move(body));
    };
    return normalize(gen(gen, shape.max_depth));
}

inline Valuation random_valuation(Rng& rng, const Plts& m, const std::vector<std::string>& names)
{
    Valuation rho;
    for (const auto& x : names) {
        ValueVector v(m.num_states());
        for (auto& e : v) e = rng.unit();
        rho[x] = std::move(v);
    }
    return rho;
}

struct InstanceBounds {
    std::size_t max_states = 6;
    std::size_t max_labels = 2;
    std::size_t max_branching = 3;
    std::size_t max_support = 3;
    std::size_t max_binders = 2;
    std::size_t max_depth = 5;
    /// Probability that the formula may use the free variable Z.
    double open_probability = 0.3;
};

struct Instance {
    Plts model;
    Formula formula = Formula::var("Z");
    Valuation rho;
};

/// Deterministic random (model, formula, valuation) triple for a seed.
inline Instance random_instance(std::uint64_t seed, const InstanceBounds& b = {})
{
    Rng rng(seed);
    const std::size_t n = 1 + rng.below(b.max_states);
    std::vector<std::string> labels;
    const std::size_t n_labels = 1 + rng.below(b.max_labels);
    for (std::size_t i = 0; i < n_labels; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i)));

    Instance inst;
    inst.model = random_plts(n, labels, b.max_branching, b.max_support, rng.next());
    FormulaShape shape;
    shape.max_binders = b.max_binders;
    shape.max_depth = b.max_depth;
    shape.labels = labels;
    shape.closed = !rng.chance(b.open_probability);
    if (!shape.closed) shape.free_vars = {"Z"};
    inst.formula = random_formula(rng, shape);
    const auto fv = free_vars(inst.formula);
    inst.rho = random_valuation(rng, inst.model, {fv.begin(), fv.end()});
    return inst;
}

} // namespace plmu
