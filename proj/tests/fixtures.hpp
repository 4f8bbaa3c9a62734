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

// Models and helpers shared by the test binaries.

#pragma once

#include <cmath>
#include <string>

#include "plmu/plmu.hpp"

namespace plmu::testing {

/// Two states; p has two a-distributions {p:1/3, q:2/3} and {q:1}; q is stuck.
inline Plts two_state_model()
{
    Plts m;
    m.add_state("p");
    m.add_state("q");
    m.add_label("a");
    m.add_transition(0, 0, Distribution({{0, Probability::of(Rational(1, 3))}, {1, Probability::of(Rational(2, 3))}}));
    m.add_transition(0, 0, dirac(1));
    return m;
}

inline double max_abs_diff(const ValueVector& a, const ValueVector& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Index of the arena state with the given name, or arena.size().
inline std::size_t find_state(const Arena& arena, const std::string& name)
{
    for (std::size_t i = 0; i < arena.size(); ++i)
        if (arena[i].name == name) return i;
    return arena.size();
}

} // namespace plmu::testing
