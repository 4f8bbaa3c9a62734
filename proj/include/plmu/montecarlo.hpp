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
  \file montecarlo.hpp
  \brief Sampling estimates of the expected payoff of an induced chain.

  A sampled play stops at a terminal state or as soon as it enters a BSCC.
  Once inside a BSCC the play stays there and visits its largest priority
  infinitely often with probability 1, so the payoff is known exactly at
  that point and no truncation is involved.
*/

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "plmu/chain.hpp"
#include "plmu/error.hpp"
#include "plmu/rng.hpp"

namespace plmu {

inline constexpr std::size_t kMaxPlaySteps = 10'000'000;

struct PlayOutcome {
    double payoff = 0.0;
    std::size_t steps = 0;
    /// Index into ChainClassification::classes.
    std::size_t absorbing_class = 0;
};

inline PlayOutcome sample_play(const InducedChain& chain, const ChainClassification& cc, Rng& rng)
{
    std::size_t cur = chain.start;
    for (std::size_t steps = 0; steps <= kMaxPlaySteps; ++steps) {
        if (const auto c = cc.class_of[cur]) return {cc.classes[*c].payoff, steps, *c};
        const auto& out = chain.edges[cur];
        if (out.size() == 1) {
            cur = out.front().to;
            continue;
        }
        const double u = rng.unit();
        double acc = 0.0;
        std::size_t pick = out.size() - 1;
        for (std::size_t k = 0; k < out.size(); ++k) {
            acc += out[k].prob.value;
            if (u < acc) {
                pick = k;
                break;
            }
        }
        cur = out[pick].to;
    }
    throw Error("sampled play exceeded " + std::to_string(kMaxPlaySteps) +
                " steps without absorption; chain classification is inconsistent");
}

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Sample mean and standard error of n independent plays. The same seed
/// reproduces the same sample sequence.
inline Estimate estimate(const InducedChain& chain, const Arena& arena, std::size_t n, std::uint64_t seed)
{
    if (n == 0) throw Error("estimate needs at least one sample");
    const ChainClassification cc = classify(chain, arena);
    Rng rng(seed);
    // Welford's running mean and variance.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = sample_play(chain, cc, rng).payoff;
        const double delta = x - mean;
        mean += delta / static_cast<double>(i);
        m2 += delta * (x - mean);
    }
    Estimate e;
    e.mean = mean;
    e.samples = n;
    e.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return e;
}

} // namespace plmu
