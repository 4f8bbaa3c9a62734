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
  \file denotational.hpp
  \brief [0,1]-valued semantics of formulas over a finite PLTS.

  Fixpoints are computed by Kleene iteration from the bottom (mu) or top (nu)
  of [0,1]^P, stopping once the sup-norm change of one step drops below the
  tolerance. Nested fixpoints restart from scratch at every outer step.
*/

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "plmu/error.hpp"
#include "plmu/formula.hpp"
#include "plmu/plts.hpp"

namespace plmu {

/// Dense map from state index to a value in [0,1].
using ValueVector = std::vector<double>;

/// Interpretation of the free variables.
using Valuation = std::map<std::string, ValueVector>;

/// Slack allowed on the [0,1] range for accumulated rounding in convex sums.
inline constexpr double kRangeSlack = 1e-9;

inline double sup_distance(const ValueVector& a, const ValueVector& b)
{
    assert(a.size() == b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// One Kleene step of a fixpoint iteration, reported to EvalOptions::on_step.
struct FixpointStep {
    const Formula& binder;
    std::size_t iteration;
    const ValueVector& previous;
    const ValueVector& next;
};

struct EvalOptions {
    double tol = 1e-9;
    std::size_t max_iter = 1'000'000;
    std::function<void(const FixpointStep&)> on_step;
};

/// Expected value of v under d.
inline double expectation(const Distribution& d, const ValueVector& v)
{
    double sum = 0.0;
    for (const auto& o : d.outcomes) {
        if (o.state >= v.size())
            throw ModelError("distribution support state " + std::to_string(o.state) +
                             " outside the value vector domain");
        sum += o.prob.value * v[o.state];
    }
    return sum;
}

namespace detail {

class Evaluator {
public:
    Evaluator(const Plts& m, const Valuation& rho, const EvalOptions& opts)
        : m_(m), env_(rho), opts_(opts)
    {
    }

    ValueVector eval(const Formula& f)
    {
        const std::size_t n = m_.num_states();
        ValueVector out(n);
        switch (f.kind()) {
        case Kind::Var: {
            auto it = env_.find(f.name());
            if (it == env_.end()) throw UnboundVariable(f.name());
            out = it->second;
            break;
        }
        case Kind::Or:
        case Kind::And: {
            const ValueVector l = eval(f.left());
            const ValueVector r = eval(f.right());
            for (std::size_t p = 0; p < n; ++p)
                out[p] = f.kind() == Kind::Or ? std::max(l[p], r[p]) : std::min(l[p], r[p]);
            break;
        }
        case Kind::Diamond:
        case Kind::Box: {
            const ValueVector c = eval(f.child());
            const bool sup = f.kind() == Kind::Diamond;
            for (std::size_t p = 0; p < n; ++p) {
                // Join of the empty set is 0, meet is 1.
                double acc = sup ? 0.0 : 1.0;
                for (const auto& d : m_.successors(p, f.label())) {
                    const double e = expectation(d, c);
                    acc = sup ? std::max(acc, e) : std::min(acc, e);
                }
                out[p] = acc;
            }
            break;
        }
        case Kind::Mu:
        case Kind::Nu:
            out = fixpoint(f);
            break;
        }
        for ([[maybe_unused]] double x : out) assert(x >= -kRangeSlack && x <= 1.0 + kRangeSlack);
        return out;
    }

    /// Applies the functional of a binder once: body evaluated with X := v.
    ValueVector apply(const Formula& binder, const ValueVector& v)
    {
        env_[binder.name()] = v;
        ValueVector next = eval(binder.body());
        env_.erase(binder.name());
        return next;
    }

private:
    ValueVector fixpoint(const Formula& f)
    {
        ValueVector cur(m_.num_states(), f.kind() == Kind::Mu ? 0.0 : 1.0);
        double change = 0.0;
        for (std::size_t it = 1; it <= opts_.max_iter; ++it) {
            ValueVector next = apply(f, cur);
            if (opts_.on_step) opts_.on_step(FixpointStep{f, it, cur, next});
            change = sup_distance(cur, next);
            cur = std::move(next);
            if (change < opts_.tol) return cur;
        }
        throw NonConvergence(to_string(f), change);
    }

    const Plts& m_;
    Valuation env_;
    const EvalOptions& opts_;
};

inline void check_inputs(const Formula& f, const Plts& m, const Valuation& rho,
                         const EvalOptions& opts)
{
    if (!is_normal_form(f)) throw FormulaError("formula is not in normal form: " + to_string(f));
    if (!(opts.tol > 0.0)) throw Error("tolerance must be positive");
    for (const auto& x : free_vars(f)) {
        auto it = rho.find(x);
        if (it == rho.end()) throw UnboundVariable(x);
        if (it->second.size() != m.num_states())
            throw ModelError("valuation of " + x + " has " + std::to_string(it->second.size()) +
                             " entries, model has " + std::to_string(m.num_states()) + " states");
        for (double v : it->second)
            if (!(v >= 0.0 && v <= 1.0))
                throw ModelError("valuation of " + x + " leaves [0,1]");
    }
}

} // namespace detail

/// Value of f at every state of m under rho.
inline ValueVector evaluate(const Formula& f, const Plts& m, const Valuation& rho = {},
                            const EvalOptions& opts = {})
{
    detail::check_inputs(f, m, rho, opts);
    return detail::Evaluator(m, rho, opts).eval(f);
}

/// Sup-norm distance between v and one application of the functional of the
/// fixpoint formula f (children evaluated to opts.tol).
inline double residual(const Formula& f, const Plts& m, const Valuation& rho, const ValueVector& v,
                       const EvalOptions& opts = {})
{
    if (!f.is_binder()) throw FormulaError("residual needs a fixpoint formula: " + to_string(f));
    detail::check_inputs(f, m, rho, opts);
    if (v.size() != m.num_states()) throw ModelError("value vector does not match the model");
    return sup_distance(v, detail::Evaluator(m, rho, opts).apply(f, v));
}

} // namespace plmu
