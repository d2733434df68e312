// Copyright 2026 The edgenas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>

#include "edgenas/error.hpp"
#include "edgenas/generators.hpp"

namespace edgenas {

namespace {

double dist(const std::pair<double, double>& a, const std::pair<double, double>& b) {
    return std::hypot(a.first - b.first, a.second - b.second);
}

}  // namespace

TourResult held_karp(const std::vector<std::pair<double, double>>& cities) {
    const std::size_t n = cities.size();
    if (n == 0 || n > kMaxTspCities) {
        throw DataError("held_karp: city count " + std::to_string(n) + " outside [1," +
                        std::to_string(kMaxTspCities) + "]");
    }
    if (n == 1) {
        return {{0}, 0.0};
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // cost[mask][j]: shortest path from city 0 through the cities in mask
    // (subset of 1..n-1, bit j-1) ending at j.
    const std::size_t m = n - 1;
    const std::size_t full = (std::size_t{1} << m);
    std::vector<double> cost(full * n, kInf);
    std::vector<std::size_t> parent(full * n, 0);
    for (std::size_t j = 1; j < n; ++j) {
        cost[(std::size_t{1} << (j - 1)) * n + j] = dist(cities[0], cities[j]);
    }
    for (std::size_t mask = 1; mask < full; ++mask) {
        for (std::size_t j = 1; j < n; ++j) {
            const std::size_t bit = std::size_t{1} << (j - 1);
            if (!(mask & bit)) {
                continue;
            }
            const double cur = cost[mask * n + j];
            if (cur == kInf) {
                continue;
            }
            for (std::size_t k = 1; k < n; ++k) {
                const std::size_t kbit = std::size_t{1} << (k - 1);
                if (mask & kbit) {
                    continue;
                }
                const std::size_t next = mask | kbit;
                const double cand = cur + dist(cities[j], cities[k]);
                if (cand < cost[next * n + k]) {
                    cost[next * n + k] = cand;
                    parent[next * n + k] = j;
                }
            }
        }
    }
    double best = kInf;
    std::size_t last = 1;
    for (std::size_t j = 1; j < n; ++j) {
        const double cand = cost[(full - 1) * n + j] + dist(cities[j], cities[0]);
        if (cand < best) {
            best = cand;
            last = j;
        }
    }
    std::vector<std::size_t> reversed;
    std::size_t mask = full - 1;
    std::size_t j = last;
    while (j != 0) {
        reversed.push_back(j);
        const std::size_t prev = parent[mask * n + j];
        mask &= ~(std::size_t{1} << (j - 1));
        j = mask == 0 ? 0 : prev;
    }
    TourResult result;
    result.order.push_back(0);
    result.order.insert(result.order.end(), reversed.rbegin(), reversed.rend());
    result.length = best;
    return result;
}

TourResult nearest_neighbor_tour(const std::vector<std::pair<double, double>>& cities) {
    const std::size_t n = cities.size();
    TourResult result;
    if (n == 0) {
        return result;
    }
    std::vector<bool> used(n, false);
    std::size_t cur = 0;
    used[0] = true;
    result.order.push_back(0);
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (!used[k] && dist(cities[cur], cities[k]) < best_d) {
                best_d = dist(cities[cur], cities[k]);
                best = k;
            }
        }
        used[best] = true;
        result.length += best_d;
        result.order.push_back(best);
        cur = best;
    }
    result.length += dist(cities[cur], cities[0]);
    return result;
}

}  // namespace edgenas
