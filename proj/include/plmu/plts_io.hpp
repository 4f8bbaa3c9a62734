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
  \file plts_io.hpp
  \brief JSON model files.

      {"states": ["p", "q"], "labels": ["a"],
       "transitions": [{"from": "p", "label": "a", "dist": {"p": "1/3", "q": "2/3"}},
                       {"from": "p", "label": "a", "dist": {"q": 1}}]}

  Probabilities are JSON numbers or "num/den" strings. Fractions and integer
  literals are stored exactly; if any probability in the file is a decimal
  number, the whole model is stored in double precision.
*/

#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "plmu/error.hpp"
#include "plmu/plts.hpp"

namespace plmu {

namespace detail {

inline Probability probability_from_json(const nlohmann::json& v, const std::string& where)
{
    if (v.is_string()) return Probability::of(parse_fraction(v.get<std::string>()));
    if (v.is_number_integer() || v.is_number_unsigned()) return Probability::of(Rational(v.get<long long>()));
    if (v.is_number_float()) return Probability::of(v.get<double>());
    throw ModelError("probability at " + where + " must be a number or a \"num/den\" string");
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key))
        throw ModelError("missing \"" + std::string(key) + "\" in " + where);
    return obj.at(key);
}

} // namespace detail

/// Builds a model from its JSON form. Throws ModelError on schema errors
/// (including undeclared states); probability invariants are left to validate().
inline Plts plts_from_json(const nlohmann::json& j)
{
    Plts m;
    const auto& states = detail::require(j, "states", "model");
    if (!states.is_array()) throw ModelError("\"states\" must be an array");
    for (const auto& s : states) {
        if (!s.is_string()) throw ModelError("state names must be strings");
        m.add_state(s.get<std::string>());
    }
    if (j.contains("labels")) {
        const auto& labels = j.at("labels");
        if (!labels.is_array()) throw ModelError("\"labels\" must be an array");
        for (const auto& a : labels) {
            if (!a.is_string()) throw ModelError("labels must be strings");
            m.add_label(a.get<std::string>());
        }
    }
    if (!j.contains("transitions")) return m;
    const auto& ts = j.at("transitions");
    if (!ts.is_array()) throw ModelError("\"transitions\" must be an array");

    std::vector<std::tuple<std::size_t, std::size_t, Distribution>> parsed;
    bool all_exact = true;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::string where = "transition #" + std::to_string(i);
        const auto& t = ts[i];
        const auto& from = detail::require(t, "from", where);
        const auto& label = detail::require(t, "label", where);
        const auto& dist = detail::require(t, "dist", where);
        if (!from.is_string() || !label.is_string() || !dist.is_object())
            throw ModelError("malformed " + where);
        const std::size_t p = m.state(from.get<std::string>());
        const auto a = m.find_label(label.get<std::string>());
        if (!a) throw ModelError(where + " uses undeclared label " + label.get<std::string>());
        std::vector<Distribution::Outcome> outcomes;
        for (auto it = dist.begin(); it != dist.end(); ++it) {
            Probability pr = detail::probability_from_json(it.value(), where);
            all_exact = all_exact && pr.exact.has_value();
            try {
                outcomes.push_back({m.state(it.key()), std::move(pr)});
            } catch (const ModelError&) {
                throw ModelError(where + " refers to undeclared state " + it.key());
            }
        }
        parsed.emplace_back(p, *a, Distribution(std::move(outcomes)));
    }
    for (auto& [p, a, d] : parsed) {
        if (!all_exact)
            for (auto& o : d.outcomes) o.prob.exact.reset();
        m.add_transition(p, a, std::move(d));
    }
    return m;
}

inline nlohmann::json to_json(const Plts& m)
{
    nlohmann::json j;
    j["states"] = m.states();
    j["labels"] = m.labels();
    j["transitions"] = nlohmann::json::array();
    for (std::size_t p = 0; p < m.num_states(); ++p) {
        for (std::size_t a = 0; a < m.num_labels(); ++a) {
            for (const auto& d : m.successors(p, a)) {
                nlohmann::json dist = nlohmann::json::object();
                for (const auto& o : d.outcomes) {
                    if (o.prob.exact) {
                        dist[m.state_name(o.state)] = format_fraction(*o.prob.exact);
                    } else {
                        dist[m.state_name(o.state)] = o.prob.value;
                    }
                }
                j["transitions"].push_back(
                    {{"from", m.state_name(p)}, {"label", m.label_name(a)}, {"dist", dist}});
            }
        }
    }
    return j;
}

inline Plts load_plts(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(path + ": " + e.what());
    }
    return plts_from_json(j);
}

inline void save_plts(const Plts& m, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write model file " + path);
    out << to_json(m).dump(2) << '\n';
}

} // namespace plmu
