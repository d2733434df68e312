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

#include <string>
#include <utility>
#include <vector>

#include "edgenas/autodiff.hpp"
#include "edgenas/rng.hpp"

namespace edgenas {

/// A learnable tensor as seen by optimizers and checkpoints.
struct ParamRef {
    std::string name;
    Tensor tensor;
    bool decay = true;  // false for biases and normalization scale/shift
};

/// Non-learnable state that must survive a checkpoint (running statistics).
struct BufferRef {
    std::string name;
    Matrix* matrix = nullptr;
};

struct ParamCollector {
    std::vector<ParamRef> params;
    std::vector<BufferRef> buffers;

    void add(std::string name, const Tensor& t, bool decay) {
        params.push_back({std::move(name), t, decay});
    }
    void add_buffer(std::string name, Matrix& m) { buffers.push_back({std::move(name), &m}); }
};

/// y = x W + b, W stored in x out. Weights uniform in +-1/sqrt(in), bias 0.
class Linear {
public:
    Linear() = default;
    Linear(std::size_t in, std::size_t out, Rng& rng, bool bias = true);

    Tensor forward(const Tensor& x) const;

    std::size_t in_features() const { return weight.rows(); }
    std::size_t out_features() const { return weight.cols(); }
    bool has_bias() const { return bias.defined(); }

    Linear clone() const;
    void collect(const std::string& prefix, ParamCollector& out) const;

    Tensor weight;
    Tensor bias;
};

/// The FC -> ReLU -> BN block that follows every parametrized operation.
/// GRU outputs skip the ReLU so the gate's convex combination survives.
class FcReluBn {
public:
    FcReluBn() = default;
    FcReluBn(std::size_t width, Rng& rng, bool relu = true);

    Tensor forward(const Tensor& x, bool training);

    FcReluBn clone() const;
    void collect(const std::string& prefix, ParamCollector& out);

    Linear fc;
    BatchNormState bn;
    bool relu = true;
    /// Pass-through switch for unit tests of the bare update rules.
    bool bypass = false;
};

/// Conditioning vector -> (gamma, beta); gamma is the first `width` output
/// columns, beta the last `width`.
class FilmTransform {
public:
    FilmTransform() = default;
    FilmTransform(std::size_t cond_width, std::size_t width, Rng& rng);

    std::pair<Tensor, Tensor> forward(const Tensor& cond) const;

    std::size_t width() const { return g.out_features() / 2; }
    /// Forces gamma = 1, beta = 0 for every input (zero weights, unit gamma bias).
    void set_identity();

    FilmTransform clone() const;
    void collect(const std::string& prefix, ParamCollector& out) const;

    Linear g;
};

}  // namespace edgenas
