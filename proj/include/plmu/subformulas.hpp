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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plmu/error.hpp"
#include "plmu/formula.hpp"

namespace plmu {

/// The distinct subformulas of a normal-form formula, indexed in pre-order of
/// first occurrence. Entry 0 is the formula itself.
class SubformulaTable {
public:
    struct Entry {
        Formula formula;
        std::vector<std::size_t> children;
        std::vector<std::size_t> parents;
        /// For a bound variable occurrence: the entry of its binder.
        std::optional<std::size_t> binder;
    };

    explicit SubformulaTable(const Formula& f)
    {
        if (!is_normal_form(f)) throw FormulaError("formula is not in normal form: " + to_string(f));
        insert(f);
        // Normal form makes binder names unique, so resolution is by name.
        for (auto& e : entries_) {
            if (!e.formula.is_var()) continue;
            auto it = binders_.find(e.formula.name());
            if (it != binders_.end()) e.binder = it->second;
        }
    }

    std::size_t size() const { return entries_.size(); }
    const Entry& operator[](std::size_t i) const { return entries_.at(i); }
    const Formula& formula(std::size_t i) const { return entries_.at(i).formula; }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    std::optional<std::size_t> find(const Formula& g) const
    {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].formula == g) return i;
        return std::nullopt;
    }

    bool is_bound(const std::string& x) const { return binders_.count(x) != 0; }

    /// Entry of the binder `*x.H`. Throws FormulaError if x is not bound.
    std::size_t binder_of(const std::string& x) const
    {
        auto it = binders_.find(x);
        if (it == binders_.end()) throw FormulaError("variable " + x + " is not bound");
        return it->second;
    }

    /// Bound variables in pre-order of their binders.
    std::vector<std::string> bound_variables() const
    {
        std::vector<std::string> out;
        for (const auto& e : entries_)
            if (e.formula.is_binder()) out.push_back(e.formula.name());
        return out;
    }

    /// True when entry `inner` is reachable from entry `outer` along child links.
    bool contains(std::size_t outer, std::size_t inner) const
    {
        std::vector<std::size_t> stack{outer};
        std::vector<bool> seen(entries_.size(), false);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            if (i == inner) return true;
            if (seen[i]) continue;
            seen[i] = true;
            for (std::size_t c : entries_[i].children) stack.push_back(c);
        }
        return false;
    }

    /// x subsumes y when the binder of y is a subformula of the body of the binder of x.
    bool subsumes(const std::string& x, const std::string& y) const
    {
        const std::size_t bx = binder_of(x);
        const std::size_t by = binder_of(y);
        if (bx == by) return false;
        return contains(entries_[bx].children.front(), by);
    }

private:
    std::size_t insert(const Formula& g)
    {
        // Linear lookup keeps the pre-order numbering; tables are small.
        if (auto found = find(g)) return *found;
        const std::size_t idx = entries_.size();
        entries_.push_back({g, {}, {}, std::nullopt});
        if (g.is_binder()) binders_.emplace(g.name(), idx);

        std::vector<Formula> kids;
        if (g.is_binary()) {
            kids = {g.left(), g.right()};
        } else if (!g.is_var()) {
            kids = {g.child()};
        }
        for (const auto& k : kids) {
            const std::size_t c = insert(k);
            entries_[idx].children.push_back(c);
            auto& parents = entries_[c].parents;
            if (parents.empty() || parents.back() != idx) parents.push_back(idx);
        }
        return idx;
    }

    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> binders_;
};

inline SubformulaTable subformulas(const Formula& f) { return SubformulaTable(f); }

inline bool subsumes(const Formula& f, const std::string& x, const std::string& y)
{
    return SubformulaTable(f).subsumes(x, y);
}

} // namespace plmu
