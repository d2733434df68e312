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
#include <numbers>

#include "edgenas/optim.hpp"

namespace edgenas {

SgdMomentum::SgdMomentum(std::vector<ParamRef> params, double momentum, double weight_decay)
    : params_(std::move(params)), momentum_(momentum), weight_decay_(weight_decay) {
    for (const ParamRef& p : params_) {
        velocity_.emplace_back(p.tensor.rows(), p.tensor.cols());
    }
}

void SgdMomentum::step(double lr) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Tensor& t = params_[i].tensor;
        const double wd = params_[i].decay ? weight_decay_ : 0.0;
        const Matrix& g = t.grad();
        auto& p = t.mutable_value().values();
        auto& v = velocity_[i].values();
        for (std::size_t k = 0; k < p.size(); ++k) {
            v[k] = momentum_ * v[k] + (g.values()[k] + wd * p[k]);
            p[k] -= lr * v[k];
        }
    }
}

void SgdMomentum::zero_grad() {
    for (ParamRef& p : params_) {
        p.tensor.zero_grad();
    }
}

Adam::Adam(std::vector<ParamRef> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    for (const ParamRef& p : params_) {
        m_.emplace_back(p.tensor.rows(), p.tensor.cols());
        v_.emplace_back(p.tensor.rows(), p.tensor.cols());
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Tensor& t = params_[i].tensor;
        const double wd = params_[i].decay ? config_.weight_decay : 0.0;
        const Matrix& grad = t.grad();
        auto& p = t.mutable_value().values();
        auto& m = m_[i].values();
        auto& v = v_[i].values();
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double g = grad.values()[k] + wd * p[k];
            m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
            v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
            const double m_hat = m[k] / bc1;
            const double v_hat = v[k] / bc2;
            p[k] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
        }
    }
}

void Adam::zero_grad() {
    for (ParamRef& p : params_) {
        p.tensor.zero_grad();
    }
}

double cosine_lr(std::size_t step, std::size_t total_steps, double lr0) {
    if (total_steps == 0) {
        return lr0;
    }
    const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
    return 0.5 * lr0 * (1.0 + std::cos(std::numbers::pi * frac));
}

std::vector<ParamRef> as_params(const std::vector<Tensor>& tensors, const std::string& prefix) {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        out.push_back({prefix + std::to_string(i), tensors[i], true});
    }
    return out;
}

}  // namespace edgenas
