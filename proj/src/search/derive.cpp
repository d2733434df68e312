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

#include <algorithm>
#include <cmath>

#include "edgenas/error.hpp"
#include "edgenas/search.hpp"

namespace edgenas {

namespace {

constexpr std::size_t kNonZero = kNumOps - 1;

bool beats(double candidate, double incumbent, double scale) {
    return candidate > incumbent + kDeriveTolerance * scale;
}

struct EdgePick {
    std::size_t op = 0;
    double strength = 0.0;
};

EdgePick pick(const Matrix& alpha, std::size_t row) {
    double scale = 1.0;
    double hi = alpha(row, 0);
    for (std::size_t k = 0; k < kNumOps; ++k) {
        scale = std::max(scale, std::abs(alpha(row, k)));
        hi = std::max(hi, alpha(row, k));
    }
    EdgePick p;
    for (std::size_t k = 1; k < kNonZero; ++k) {
        if (beats(alpha(row, k), alpha(row, p.op), scale)) {
            p.op = k;
        }
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < kNumOps; ++k) {
        denom += std::exp(alpha(row, k) - hi);
    }
    for (std::size_t k = 0; k < kNonZero; ++k) {
        p.strength = std::max(p.strength, std::exp(alpha(row, k) - hi) / denom);
    }
    return p;
}

std::size_t nodes_from_pairs(std::size_t pairs) {
    std::size_t n = 0;
    while (num_pairs(n) < pairs) {
        ++n;
    }
    if (num_pairs(n) != pairs || n == 0) {
        throw ShapeError("alpha matrix has " + std::to_string(pairs) +
                         " rows, not a triangular pair count");
    }
    return n;
}

struct Kept {
    std::size_t src;
    std::size_t dst;
    std::size_t op;
};

std::vector<Kept> derive_dag(const Matrix& alpha, std::size_t n) {
    if (alpha.cols() != kNumOps) {
        throw ShapeError("alpha matrix must have " + std::to_string(kNumOps) + " columns");
    }
    std::vector<Kept> kept;
    for (std::size_t j = 1; j <= n; ++j) {
        std::vector<EdgePick> picks;
        for (std::size_t i = 0; i < j; ++i) {
            picks.push_back(pick(alpha, pair_index(i, j)));
        }
        std::vector<bool> taken(j, false);
        const std::size_t keep = std::min<std::size_t>(2, j);
        std::vector<std::size_t> chosen;
        for (std::size_t round = 0; round < keep; ++round) {
            std::size_t best = j;
            for (std::size_t i = 0; i < j; ++i) {
                if (taken[i]) {
                    continue;
                }
                if (best == j || beats(picks[i].strength, picks[best].strength, 1.0)) {
                    best = i;
                }
            }
            taken[best] = true;
            chosen.push_back(best);
        }
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t i : chosen) {
            kept.push_back({i, j, picks[i].op});
        }
    }
    return kept;
}

}  // namespace

Genotype derive(const Alphas& alphas, std::size_t d_v, std::size_t d_e) {
    if (alphas.entity.size() != alphas.edge.size() || alphas.entity.empty()) {
        throw ShapeError("derive needs matching, non-empty entity and edge alphas");
    }
    Genotype g;
    g.d_v = d_v;
    g.d_e = d_e;
    for (std::size_t c = 0; c < alphas.entity.size(); ++c) {
        const std::size_t n = nodes_from_pairs(alphas.entity[c].rows());
        if (alphas.edge[c].rows() != alphas.entity[c].rows()) {
            throw ShapeError("entity and edge alphas disagree on N");
        }
        CellGenotype cell;
        for (const Kept& k : derive_dag(alphas.entity[c].value(), n)) {
            cell.entity.push_back({k.src, k.dst, kEntityOps[k.op]});
        }
        for (const Kept& k : derive_dag(alphas.edge[c].value(), n)) {
            cell.edge.push_back({k.src, k.dst, kEdgeOps[k.op]});
        }
        g.cells.push_back(std::move(cell));
    }
    return g;
}

}  // namespace edgenas
