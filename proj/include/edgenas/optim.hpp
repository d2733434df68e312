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

#include <vector>

#include "edgenas/autodiff.hpp"
#include "edgenas/layers.hpp"

namespace edgenas {

/// v <- momentum * v + (g + wd * p);  p <- p - lr * v.
/// Weight decay applies only to parameters flagged decay.
class SgdMomentum {
public:
    SgdMomentum(std::vector<ParamRef> params, double momentum, double weight_decay);

    void step(double lr);
    void zero_grad();

private:
    std::vector<ParamRef> params_;
    std::vector<Matrix> velocity_;
    double momentum_;
    double weight_decay_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // L2 term added to the gradient
};

/// Adam with bias correction.
class Adam {
public:
    Adam(std::vector<ParamRef> params, AdamConfig config);

    void step();
    void zero_grad();

    double lr() const { return config_.lr; }
    void set_lr(double lr) { config_.lr = lr; }
    std::size_t steps() const { return t_; }

private:
    std::vector<ParamRef> params_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    AdamConfig config_;
    std::size_t t_ = 0;
};

/// 0.5 * lr0 * (1 + cos(pi * step / total_steps)); lr0 when total_steps is 0.
double cosine_lr(std::size_t step, std::size_t total_steps, double lr0);

/// Wraps bare tensors (architecture weights) as decayed parameters.
std::vector<ParamRef> as_params(const std::vector<Tensor>& tensors, const std::string& prefix);

}  // namespace edgenas
