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
  \file plts.hpp
  \brief Finite probabilistic labeled transition systems.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "plmu/error.hpp"

namespace plmu {

using Rational = boost::multiprecision::cpp_rational;

/// A probability kept as a double, plus its exact value when known.
struct Probability {
    double value = 0.0;
    std::optional<Rational> exact;

    static Probability of(const Rational& r)
    {
        return {static_cast<double>(r), r};
    }
    static Probability of(double d) { return {d, std::nullopt}; }
    static Probability one() { return of(Rational(1)); }

    friend bool operator==(const Probability& a, const Probability& b)
    {
        return a.value == b.value && a.exact == b.exact;
    }
};

/// Parses "num/den" into an exact rational. Throws ModelError.
inline Rational parse_fraction(const std::string& text)
{
    const auto slash = text.find('/');
    auto parse_int = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw ModelError("malformed fraction \"" + text + "\"");
        return boost::multiprecision::cpp_int(s);
    };
    if (slash == std::string::npos) return Rational(parse_int(text));
    const auto num = parse_int(text.substr(0, slash));
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ModelError("zero denominator in \"" + text + "\"");
    return Rational(num, den);
}

inline std::string format_fraction(const Rational& r)
{
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

/// Discrete distribution over state indices, sparse and sorted by state.
struct Distribution {
    struct Outcome {
        std::size_t state;
        Probability prob;

        friend bool operator==(const Outcome&, const Outcome&) = default;
    };

    std::vector<Outcome> outcomes;

    Distribution() = default;
    explicit Distribution(std::vector<Outcome> o) : outcomes(std::move(o))
    {
        std::stable_sort(outcomes.begin(), outcomes.end(),
                         [](const Outcome& a, const Outcome& b) { return a.state < b.state; });
    }

    std::vector<std::size_t> support() const
    {
        std::vector<std::size_t> s;
        for (const auto& o : outcomes)
            if (o.prob.value > 0.0) s.push_back(o.state);
        return s;
    }

    double operator()(std::size_t state) const
    {
        for (const auto& o : outcomes)
            if (o.state == state) return o.prob.value;
        return 0.0;
    }

    bool exact() const
    {
        for (const auto& o : outcomes)
            if (!o.prob.exact) return false;
        return true;
    }

    bool is_dirac() const { return outcomes.size() == 1 && outcomes.front().prob.value == 1.0; }

    friend bool operator==(const Distribution&, const Distribution&) = default;
};

inline Distribution dirac(std::size_t state)
{
    return Distribution({{state, Probability::one()}});
}

/// States and labels are indexed in declaration order; transitions are kept
/// per (state, label) in insertion order.
class Plts {
public:
    Plts() = default;
    Plts(std::vector<std::string> states, std::vector<std::string> labels)
    {
        for (auto& s : states) add_state(std::move(s));
        for (auto& a : labels) add_label(std::move(a));
    }

    std::size_t add_state(std::string name)
    {
        if (state_index_.count(name)) throw ModelError("duplicate state " + name);
        state_index_.emplace(name, states_.size());
        states_.push_back(std::move(name));
        transitions_.emplace_back(labels_.size());
        return states_.size() - 1;
    }

    std::size_t add_label(std::string name)
    {
        if (label_index_.count(name)) throw ModelError("duplicate label " + name);
        label_index_.emplace(name, labels_.size());
        labels_.push_back(std::move(name));
        for (auto& row : transitions_) row.emplace_back();
        return labels_.size() - 1;
    }

    void add_transition(std::size_t from, std::size_t label, Distribution d)
    {
        transitions_.at(from).at(label).push_back(std::move(d));
    }

    void add_transition(const std::string& from, const std::string& label, Distribution d)
    {
        add_transition(state(from), this->label(label), std::move(d));
    }

    std::size_t num_states() const { return states_.size(); }
    std::size_t num_labels() const { return labels_.size(); }
    const std::vector<std::string>& states() const { return states_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& state_name(std::size_t i) const { return states_.at(i); }
    const std::string& label_name(std::size_t i) const { return labels_.at(i); }

    std::size_t state(const std::string& name) const
    {
        auto it = state_index_.find(name);
        if (it == state_index_.end()) throw ModelError("unknown state " + name);
        return it->second;
    }
    std::optional<std::size_t> find_label(const std::string& name) const
    {
        auto it = label_index_.find(name);
        if (it == label_index_.end()) return std::nullopt;
        return it->second;
    }
    std::size_t label(const std::string& name) const
    {
        auto l = find_label(name);
        if (!l) throw ModelError("unknown label " + name);
        return *l;
    }

    /// Distributions d with p -a-> d.
    std::span<const Distribution> successors(std::size_t p, std::size_t a) const
    {
        return transitions_.at(p).at(a);
    }

    /// Same, by label name; an undeclared label has no transitions.
    std::span<const Distribution> successors(std::size_t p, const std::string& a) const
    {
        auto l = find_label(a);
        if (!l) return {};
        return successors(p, *l);
    }

    /// True when every stored probability is an exact rational.
    bool exact() const
    {
        for (const auto& row : transitions_)
            for (const auto& ds : row)
                for (const auto& d : ds)
                    if (!d.exact()) return false;
        return true;
    }

    friend bool operator==(const Plts& a, const Plts& b)
    {
        return a.states_ == b.states_ && a.labels_ == b.labels_ &&
               a.transitions_ == b.transitions_;
    }

private:
    std::vector<std::string> states_;
    std::vector<std::string> labels_;
    std::map<std::string, std::size_t> state_index_;
    std::map<std::string, std::size_t> label_index_;
    std::vector<std::vector<std::vector<Distribution>>> transitions_;
};

inline constexpr double kMassTolerance = 1e-9;

/// Lists every violated model invariant; empty when the model is valid.
inline std::vector<std::string> validate(const Plts& m)
{
    std::vector<std::string> out;
    for (std::size_t p = 0; p < m.num_states(); ++p) {
        for (std::size_t a = 0; a < m.num_labels(); ++a) {
            const auto ds = m.successors(p, a);
            for (std::size_t i = 0; i < ds.size(); ++i) {
                const std::string where = "(" + m.state_name(p) + "," + m.label_name(a) + ")" +
                                          (ds.size() > 1 ? "#" + std::to_string(i) : "");
                const auto& d = ds[i];
                if (d.outcomes.empty()) {
                    out.push_back("empty distribution at " + where);
                    continue;
                }
                std::set<std::size_t> seen;
                bool in_range = true;
                for (const auto& o : d.outcomes) {
                    if (o.state >= m.num_states()) {
                        out.push_back("distribution at " + where + " refers to unknown state index " +
                                      std::to_string(o.state));
                        in_range = false;
                        continue;
                    }
                    const std::string& q = m.state_name(o.state);
                    if (!seen.insert(o.state).second)
                        out.push_back("duplicate support entry " + q + " at " + where);
                    if (o.prob.value < 0.0 || (o.prob.exact && *o.prob.exact < 0))
                        out.push_back("negative probability for " + q + " at " + where);
                    else if (o.prob.value == 0.0 && (!o.prob.exact || *o.prob.exact == 0))
                        out.push_back("zero-probability support entry " + q + " at " + where);
                    if (!std::isfinite(o.prob.value))
                        out.push_back("non-finite probability for " + q + " at " + where);
                }
                if (!in_range) continue;
                if (d.exact()) {
                    Rational mass = 0;
                    for (const auto& o : d.outcomes) mass += *o.prob.exact;
                    if (mass != 1)
                        out.push_back("distribution mass " + format_fraction(mass) + " ≠ 1 at " +
                                      where);
                } else {
                    double mass = 0.0;
                    for (const auto& o : d.outcomes) mass += o.prob.value;
                    if (std::abs(mass - 1.0) > kMassTolerance) {
                        std::ostringstream os;
                        os << "distribution mass " << mass << " ≠ 1 at " << where;
                        out.push_back(os.str());
                    }
                }
            }
        }
    }
    return out;
}

/// Views an ordinary LTS as a PLTS whose distributions are all Dirac.
/// Labels are declared in order of first appearance.
inline Plts embed_lts(const std::vector<std::string>& states,
                      const std::vector<std::tuple<std::string, std::string, std::string>>& edges)
{
    Plts m;
    for (const auto& s : states) m.add_state(s);
    for (const auto& [from, label, to] : edges) {
        if (!m.find_label(label)) m.add_label(label);
        std::size_t src, dst;
        try {
            src = m.state(from);
            dst = m.state(to);
        } catch (const ModelError&) {
            throw ModelError("edge " + from + " -" + label + "-> " + to +
                             " references an undeclared state");
        }
        m.add_transition(src, m.label(label), dirac(dst));
    }
    return m;
}

} // namespace plmu
