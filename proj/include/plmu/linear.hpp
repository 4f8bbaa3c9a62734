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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <type_traits>
#include <utility>
#include <vector>

#include "plmu/error.hpp"

namespace plmu {

template <class T>
using Matrix = std::vector<std::vector<T>>;

/// Solves A x = b by Gaussian elimination. Doubles use partial pivoting;
/// exact scalar types take the first nonzero pivot.
template <class T>
std::vector<T> solve_linear(Matrix<T> a, std::vector<T> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        if constexpr (std::is_floating_point_v<T>) {
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
            if (a[pivot][col] == T(0)) throw Error("singular linear system");
        } else {
            while (pivot < n && a[pivot][col] == T(0)) ++pivot;
            if (pivot == n) throw Error("singular linear system");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col] == T(0)) continue;
            const T factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<T> x(n);
    for (std::size_t i = n; i-- > 0;) {
        T acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

inline double residual_norm(const Matrix<double>& a, const std::vector<double>& x,
                            const std::vector<double>& b)
{
    double r = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        double acc = -b[i];
        for (std::size_t j = 0; j < x.size(); ++j) acc += a[i][j] * x[j];
        r = std::max(r, std::abs(acc));
    }
    return r;
}

/// Double-precision solve; if the direct solution leaves a residual above
/// `target`, refines it iteratively.
inline std::vector<double> solve_linear_refined(const Matrix<double>& a, const std::vector<double>& b,
                                                double target = 1e-12, int max_rounds = 8)
{
    std::vector<double> x = solve_linear(a, b);
    for (int round = 0; round < max_rounds && residual_norm(a, x, b) > target; ++round) {
        std::vector<double> r(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            long double acc = b[i];
            for (std::size_t j = 0; j < x.size(); ++j) acc -= static_cast<long double>(a[i][j]) * x[j];
            r[i] = static_cast<double>(acc);
        }
        const std::vector<double> dx = solve_linear(a, r);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }
    return x;
}

/// Tarjan's algorithm, iterative. Components are numbered in reverse
/// topological order: a component only reaches components with smaller ids.
template <class Successors>
std::vector<std::size_t> strongly_connected_components(std::size_t n, Successors&& succ,
                                                       std::size_t& count)
{
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> frames; // (node, next edge position)
    std::size_t next_index = 0;
    count = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            const auto& out = succ(v);
            if (pos < out.size()) {
                const std::size_t w = out[pos++];
                if (index[w] == kUnset) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            frames.pop_back();
            if (!frames.empty()) {
                const std::size_t parent = frames.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != done);
                ++count;
            }
        }
    }
    return comp;
}

} // namespace plmu
