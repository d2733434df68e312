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

#pragma once

// First-order differentiable search. Each step pairs an architecture update
// on a validation batch (Adam on the alphas, weights frozen) with a weight
// update on a training batch (momentum SGD, alphas frozen).

#include <cstdint>
#include <functional>
#include <vector>

#include "edgenas/genotype.hpp"
#include "edgenas/graph.hpp"
#include "edgenas/network.hpp"

namespace edgenas {

struct SearchConfig {
    std::size_t epochs = 40;
    std::size_t batch_size = 64;
    double w_lr = 0.025;
    double w_momentum = 0.9;
    double w_weight_decay = 3e-4;
    double alpha_lr = 3e-4;
    double alpha_beta1 = 0.5;
    double alpha_beta2 = 0.999;
    double alpha_weight_decay = 1e-3;
    NetworkConfig network;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SearchEpoch {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double metric = 0.0;
    double lr = 0.0;
    Genotype genotype;
};

struct SearchResult {
    std::vector<SearchEpoch> epochs;
    Genotype genotype;
    Alphas alphas;
};

/// Ties in raw alphas and in edge strengths are resolved within this
/// relative tolerance so that derive() ignores rounding noise.
inline constexpr double kDeriveTolerance = 1e-9;

/// Per DAG edge: the strongest non-Zero op (ties -> lowest op index).
/// Per node and DAG: the two incoming edges with the largest non-Zero
/// softmax weight (ties -> lower source index).
Genotype derive(const Alphas& alphas, std::size_t d_v, std::size_t d_e);

/// Runs the search; with epochs = 0 the genotype is derived from the initial
/// all-zero alphas. Throws DataError on empty splits, NumericError on a
/// non-finite loss.
SearchResult search(const Dataset& train_data, const Dataset& val_data,
                    const SearchConfig& config,
                    const std::function<void(const SearchEpoch&)>& on_epoch = {});

}  // namespace edgenas
