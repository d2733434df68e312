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

#include "edgenas/error.hpp"
#include "edgenas/searchspace.hpp"

namespace edgenas {

namespace {

void check_inputs(const Tensor& V, const Tensor& E, const Topology& topo, std::size_t d_v,
                  std::size_t d_e, const char* op) {
    if (V.rows() != topo.num_nodes || V.cols() != d_v) {
        throw ShapeError(std::string(op) + ": entity input " + shape_string(V.value()) +
                         " does not match " + std::to_string(topo.num_nodes) + " x " +
                         std::to_string(d_v));
    }
    if (E.rows() != topo.num_edges() || E.cols() != d_e) {
        throw ShapeError(std::string(op) + ": edge input " + shape_string(E.value()) +
                         " does not match " + std::to_string(topo.num_edges()) + " x " +
                         std::to_string(d_e));
    }
}

SegmentMode aggregator(EntityOpKind kind) {
    switch (kind) {
        case EntityOpKind::Mean:
            return SegmentMode::Mean;
        case EntityOpKind::Max:
            return SegmentMode::Max;
        default:
            return SegmentMode::Sum;
    }
}

}  // namespace

EntityOp::EntityOp(EntityOpKind kind, std::size_t d_v, std::size_t d_e, Rng& rng)
    : kind_(kind), d_v_(d_v), d_e_(d_e) {
    switch (kind) {
        case EntityOpKind::Sum:
        case EntityOpKind::Mean:
        case EntityOpKind::Max:
            film_.emplace(d_e, d_v, rng);
            wrapper_.emplace(d_v, rng);
            break;
        case EntityOpKind::EntitySkip:
        case EntityOpKind::Zero:
            break;
    }
}

Tensor EntityOp::forward(const Tensor& V, const Tensor& E, const Topology& topo, bool training) {
    check_inputs(V, E, topo, d_v_, d_e_, "entity_op");
    switch (kind_) {
        case EntityOpKind::Zero:
            return Tensor::zeros(V.rows(), d_v_);
        case EntityOpKind::EntitySkip:
            return V;
        default:
            break;
    }
    auto [gamma, beta] = film_->forward(E);
    const Tensor messages = add(mul(gamma, gather_rows(V, topo.src)), beta);
    const Tensor aggregated =
        segment_aggregate(messages, topo.dst, topo.num_nodes, aggregator(kind_));
    return wrapper_->forward(aggregated, training);
}

EntityOp EntityOp::clone() const {
    EntityOp copy;
    copy.kind_ = kind_;
    copy.d_v_ = d_v_;
    copy.d_e_ = d_e_;
    if (film_) {
        copy.film_ = film_->clone();
    }
    if (wrapper_) {
        copy.wrapper_ = wrapper_->clone();
    }
    return copy;
}

void EntityOp::collect(const std::string& prefix, ParamCollector& out) {
    if (film_) {
        film_->collect(prefix + ".film", out);
    }
    if (wrapper_) {
        wrapper_->collect(prefix + ".wrap", out);
    }
}

GruParams GruParams::clone() const {
    return GruParams{px.clone(), ur.clone(), wr.clone(), uz.clone(),
                     wz.clone(), uh.clone(), wh.clone()};
}

EdgeOp::EdgeOp(EdgeOpKind kind, std::size_t d_v, std::size_t d_e, Rng& rng)
    : kind_(kind), d_v_(d_v), d_e_(d_e) {
    switch (kind) {
        case EdgeOpKind::Concat:
            mlp_.emplace(d_e + 2 * d_v, d_e, rng);
            wrapper_.emplace(d_e, rng);
            break;
        case EdgeOpKind::GRU: {
            GruParams p;
            p.px = Linear(2 * d_v, d_e, rng, false);
            p.ur = Linear(d_e, d_e, rng);
            p.wr = Linear(d_e, d_e, rng, false);
            p.uz = Linear(d_e, d_e, rng);
            p.wz = Linear(d_e, d_e, rng, false);
            p.uh = Linear(d_e, d_e, rng);
            p.wh = Linear(d_e, d_e, rng, false);
            gru_ = std::move(p);
            wrapper_.emplace(d_e, rng, /*relu=*/false);
            break;
        }
        case EdgeOpKind::FiLM:
            film_.emplace(2 * d_v, d_e, rng);
            wrapper_.emplace(d_e, rng);
            break;
        case EdgeOpKind::EdgeSkip:
        case EdgeOpKind::Zero:
            break;
    }
}

Tensor EdgeOp::forward(const Tensor& E, const Tensor& V, const Topology& topo, bool training) {
    check_inputs(V, E, topo, d_v_, d_e_, "edge_op");
    switch (kind_) {
        case EdgeOpKind::Zero:
            return Tensor::zeros(E.rows(), d_e_);
        case EdgeOpKind::EdgeSkip:
            return E;
        default:
            break;
    }
    const Tensor endpoints = concat_cols(gather_rows(V, topo.src), gather_rows(V, topo.dst));
    Tensor updated;
    switch (kind_) {
        case EdgeOpKind::Concat:
            updated = mlp_->forward(concat_cols(E, endpoints));
            break;
        case EdgeOpKind::GRU: {
            const GruParams& p = *gru_;
            const Tensor x = relu(p.px.forward(endpoints));
            const Tensor r = sigmoid(add(p.ur.forward(x), p.wr.forward(E)));
            const Tensor z = sigmoid(add(p.uz.forward(x), p.wz.forward(E)));
            const Tensor h = tanh(add(p.uh.forward(x), p.wh.forward(mul(r, E))));
            updated = add(mul(affine(z, -1.0, 1.0), E), mul(z, h));
            break;
        }
        case EdgeOpKind::FiLM: {
            auto [gamma, beta] = film_->forward(endpoints);
            updated = add(mul(gamma, E), beta);
            break;
        }
        default:
            break;
    }
    return wrapper_->forward(updated, training);
}

EdgeOp EdgeOp::clone() const {
    EdgeOp copy;
    copy.kind_ = kind_;
    copy.d_v_ = d_v_;
    copy.d_e_ = d_e_;
    if (mlp_) {
        copy.mlp_ = mlp_->clone();
    }
    if (gru_) {
        copy.gru_ = gru_->clone();
    }
    if (film_) {
        copy.film_ = film_->clone();
    }
    if (wrapper_) {
        copy.wrapper_ = wrapper_->clone();
    }
    return copy;
}

void EdgeOp::collect(const std::string& prefix, ParamCollector& out) {
    if (mlp_) {
        mlp_->collect(prefix + ".mlp", out);
    }
    if (gru_) {
        gru_->px.collect(prefix + ".gru.px", out);
        gru_->ur.collect(prefix + ".gru.ur", out);
        gru_->wr.collect(prefix + ".gru.wr", out);
        gru_->uz.collect(prefix + ".gru.uz", out);
        gru_->wz.collect(prefix + ".gru.wz", out);
        gru_->uh.collect(prefix + ".gru.uh", out);
        gru_->wh.collect(prefix + ".gru.wh", out);
    }
    if (film_) {
        film_->collect(prefix + ".film", out);
    }
    if (wrapper_) {
        wrapper_->collect(prefix + ".wrap", out);
    }
}

Tensor mixed_combine(std::span<const Tensor> outputs, const Tensor& weights, std::size_t row) {
    if (weights.cols() != outputs.size()) {
        throw ShapeError("mixed op: " + std::to_string(weights.cols()) + " weights for " +
                         std::to_string(outputs.size()) + " candidates");
    }
    Tensor total;
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        if (!outputs[k].defined()) {
            continue;
        }
        Tensor term = scale_by_entry(outputs[k], weights, row, k);
        total = total.defined() ? add(total, term) : term;
    }
    if (!total.defined()) {
        throw ShapeError("mixed op: every candidate is Zero");
    }
    return total;
}

Matrix e0_init(const Graph& g) {
    if (g.edge_features.cols() > 0) {
        return g.edge_features;
    }
    return Matrix(g.num_edges(), 1, 1.0);
}

}  // namespace edgenas
