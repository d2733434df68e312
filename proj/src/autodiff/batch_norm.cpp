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

#include "edgenas/autodiff.hpp"
#include "edgenas/error.hpp"

namespace edgenas {

BatchNormState::BatchNormState(std::size_t width)
    : scale(Matrix(1, width, 1.0), true),
      shift(Matrix(1, width, 0.0), true),
      running_mean(1, width, 0.0),
      running_var(1, width, 1.0) {}

BatchNormState BatchNormState::clone() const {
    BatchNormState copy(0);
    copy.scale = scale.clone();
    copy.shift = shift.clone();
    copy.running_mean = running_mean;
    copy.running_var = running_var;
    copy.momentum = momentum;
    copy.eps = eps;
    return copy;
}

Tensor batch_norm(const Tensor& x, BatchNormState& state, bool training) {
    const std::size_t d = state.width();
    if (x.cols() != d) {
        throw ShapeError("batch_norm: input width " + std::to_string(x.cols()) +
                         " does not match state width " + std::to_string(d));
    }
    const std::size_t n = x.rows();
    const Matrix& xv = x.value();
    Matrix xhat(n, d);
    std::vector<double> inv_std(d);

    if (training && n > 0) {
        for (std::size_t c = 0; c < d; ++c) {
            double mean = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                mean += xv(r, c);
            }
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double dev = xv(r, c) - mean;
                ss += dev * dev;
            }
            const double var = ss / static_cast<double>(n);
            inv_std[c] = 1.0 / std::sqrt(var + state.eps);
            for (std::size_t r = 0; r < n; ++r) {
                xhat(r, c) = (xv(r, c) - mean) * inv_std[c];
            }
            const double unbiased = n > 1 ? ss / static_cast<double>(n - 1) : var;
            state.running_mean(0, c) =
                (1.0 - state.momentum) * state.running_mean(0, c) + state.momentum * mean;
            state.running_var(0, c) =
                (1.0 - state.momentum) * state.running_var(0, c) + state.momentum * unbiased;
        }
    } else {
        for (std::size_t c = 0; c < d; ++c) {
            inv_std[c] = 1.0 / std::sqrt(state.running_var(0, c) + state.eps);
            for (std::size_t r = 0; r < n; ++r) {
                xhat(r, c) = (xv(r, c) - state.running_mean(0, c)) * inv_std[c];
            }
        }
    }

    Matrix out(n, d);
    const Matrix& gamma = state.scale.value();
    const Matrix& beta = state.shift.value();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            out(r, c) = gamma(0, c) * xhat(r, c) + beta(0, c);
        }
    }
    if (validation_enabled()) {
        for (double v : out.values()) {
            if (!std::isfinite(v)) {
                throw NumericError("non-finite value produced by batch_norm");
            }
        }
    }

    const bool record = Tape::active() != nullptr &&
                        (x.requires_grad() || state.scale.requires_grad() ||
                         state.shift.requires_grad());
    Tensor result(std::move(out), record);
    if (!record) {
        return result;
    }
    const bool batch_stats = training && n > 0;
    Tape::active()->record(
        result, [xn = x.node(), gn = state.scale.node(), bn = state.shift.node(),
                 xhat = std::move(xhat), inv_std = std::move(inv_std), batch_stats,
                 o = std::weak_ptr<detail::Node>(result.node())] {
            const Matrix& g = o.lock()->grad;
            const std::size_t n = g.rows();
            const std::size_t d = g.cols();
            if (gn->requires_grad || bn->requires_grad) {
                Matrix& dg = gn->grad_buffer();
                Matrix& db = bn->grad_buffer();
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t c = 0; c < d; ++c) {
                        if (gn->requires_grad) {
                            dg(0, c) += g(r, c) * xhat(r, c);
                        }
                        if (bn->requires_grad) {
                            db(0, c) += g(r, c);
                        }
                    }
                }
            }
            if (!xn->requires_grad) {
                return;
            }
            Matrix& dx = xn->grad_buffer();
            const Matrix& gamma = gn->value;
            for (std::size_t c = 0; c < d; ++c) {
                if (!batch_stats) {
                    for (std::size_t r = 0; r < n; ++r) {
                        dx(r, c) += g(r, c) * gamma(0, c) * inv_std[c];
                    }
                    continue;
                }
                double sum_dxhat = 0.0;
                double sum_dxhat_xhat = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double dxhat = g(r, c) * gamma(0, c);
                    sum_dxhat += dxhat;
                    sum_dxhat_xhat += dxhat * xhat(r, c);
                }
                const double nn = static_cast<double>(n);
                for (std::size_t r = 0; r < n; ++r) {
                    const double dxhat = g(r, c) * gamma(0, c);
                    dx(r, c) +=
                        inv_std[c] / nn * (nn * dxhat - sum_dxhat - xhat(r, c) * sum_dxhat_xhat);
                }
            }
        });
    return result;
}

}  // namespace edgenas
