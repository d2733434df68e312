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

#include "edgenas/layers.hpp"

namespace edgenas {

Linear::Linear(std::size_t in, std::size_t out, Rng& rng, bool with_bias) {
    Matrix w(in, out);
    const double bound = in == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(in));
    for (double& v : w.values()) {
        v = rng.uniform(-bound, bound);
    }
    weight = Tensor(std::move(w), true);
    if (with_bias) {
        bias = Tensor(Matrix(1, out), true);
    }
}

Tensor Linear::forward(const Tensor& x) const {
    Tensor y = matmul(x, weight);
    return has_bias() ? add(y, bias) : y;
}

Linear Linear::clone() const {
    Linear copy;
    copy.weight = weight.clone();
    if (has_bias()) {
        copy.bias = bias.clone();
    }
    return copy;
}

void Linear::collect(const std::string& prefix, ParamCollector& out) const {
    out.add(prefix + ".weight", weight, true);
    if (has_bias()) {
        out.add(prefix + ".bias", bias, false);
    }
}

FcReluBn::FcReluBn(std::size_t width, Rng& rng, bool with_relu)
    : fc(width, width, rng), bn(width), relu(with_relu) {}

Tensor FcReluBn::forward(const Tensor& x, bool training) {
    if (bypass) {
        return x;
    }
    Tensor h = fc.forward(x);
    if (relu) {
        h = edgenas::relu(h);
    }
    return batch_norm(h, bn, training);
}

FcReluBn FcReluBn::clone() const {
    FcReluBn copy;
    copy.fc = fc.clone();
    copy.bn = bn.clone();
    copy.relu = relu;
    copy.bypass = bypass;
    return copy;
}

void FcReluBn::collect(const std::string& prefix, ParamCollector& out) {
    fc.collect(prefix + ".fc", out);
    out.add(prefix + ".bn.scale", bn.scale, false);
    out.add(prefix + ".bn.shift", bn.shift, false);
    out.add_buffer(prefix + ".bn.running_mean", bn.running_mean);
    out.add_buffer(prefix + ".bn.running_var", bn.running_var);
}

FilmTransform::FilmTransform(std::size_t cond_width, std::size_t width, Rng& rng)
    : g(cond_width, 2 * width, rng) {}

std::pair<Tensor, Tensor> FilmTransform::forward(const Tensor& cond) const {
    Tensor out = g.forward(cond);
    const std::size_t d = width();
    return {slice_cols(out, 0, d), slice_cols(out, d, 2 * d)};
}

void FilmTransform::set_identity() {
    g.weight.mutable_value().fill(0.0);
    Matrix& b = g.bias.mutable_value();
    const std::size_t d = width();
    for (std::size_t c = 0; c < 2 * d; ++c) {
        b(0, c) = c < d ? 1.0 : 0.0;
    }
}

FilmTransform FilmTransform::clone() const {
    FilmTransform copy;
    copy.g = g.clone();
    return copy;
}

void FilmTransform::collect(const std::string& prefix, ParamCollector& out) const {
    g.collect(prefix + ".g", out);
}

}  // namespace edgenas
