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

std::string pair_name(std::size_t src, std::size_t dst) {
    return std::to_string(src) + "_" + std::to_string(dst);
}

Tensor apply_dropout(const Tensor& x, double rate, Rng* rng) {
    if (rate <= 0.0) {
        return x;
    }
    if (rng == nullptr) {
        throw ConfigError("cell dropout needs a random source");
    }
    std::vector<unsigned char> keep(x.rows() * x.cols());
    for (auto& k : keep) {
        k = rng->bernoulli(1.0 - rate) ? 1 : 0;
    }
    return dropout(x, keep, rate);
}

}  // namespace

Cell Cell::supernet(std::size_t num_nodes, std::size_t d_v, std::size_t d_e, Rng& rng) {
    if (num_nodes == 0 || d_v == 0 || d_e == 0) {
        throw ConfigError("cell needs N >= 1 and positive widths");
    }
    Cell c;
    c.mode_ = CellMode::Supernet;
    c.num_nodes_ = num_nodes;
    c.d_v_ = d_v;
    c.d_e_ = d_e;
    c.entity_ops_.resize(num_pairs(num_nodes));
    c.edge_ops_.resize(num_pairs(num_nodes));
    for (std::size_t j = 1; j <= num_nodes; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            auto& ents = c.entity_ops_[pair_index(i, j)];
            auto& edges = c.edge_ops_[pair_index(i, j)];
            for (std::size_t k = 0; k < kNumOps; ++k) {
                ents.emplace_back(kEntityOps[k], d_v, d_e, rng);
            }
            for (std::size_t k = 0; k < kNumOps; ++k) {
                edges.emplace_back(kEdgeOps[k], d_v, d_e, rng);
            }
        }
    }
    c.entity_proj_ = Linear(num_nodes * d_v, d_v, rng);
    c.edge_proj_ = Linear(num_nodes * d_e, d_e, rng);
    return c;
}

Cell Cell::discrete(const CellGenotype& genotype, std::size_t d_v, std::size_t d_e, Rng& rng) {
    Genotype{{genotype}, d_v, d_e}.validate();
    Cell c;
    c.mode_ = CellMode::Discrete;
    c.num_nodes_ = genotype.num_nodes();
    c.d_v_ = d_v;
    c.d_e_ = d_e;
    c.genotype_ = genotype;
    c.entity_ops_.resize(num_pairs(c.num_nodes_));
    c.edge_ops_.resize(num_pairs(c.num_nodes_));
    for (const auto& e : genotype.entity) {
        c.entity_ops_[pair_index(e.src, e.dst)].emplace_back(e.op, d_v, d_e, rng);
    }
    for (const auto& e : genotype.edge) {
        c.edge_ops_[pair_index(e.src, e.dst)].emplace_back(e.op, d_v, d_e, rng);
    }
    c.entity_proj_ = Linear(c.num_nodes_ * d_v, d_v, rng);
    c.edge_proj_ = Linear(c.num_nodes_ * d_e, d_e, rng);
    return c;
}

Cell Cell::discretize(const Cell& supernet, const CellGenotype& genotype) {
    if (supernet.mode_ != CellMode::Supernet) {
        throw ConfigError("discretize expects a supernet cell");
    }
    Genotype{{genotype}, supernet.d_v_, supernet.d_e_}.validate();
    if (genotype.num_nodes() != supernet.num_nodes_) {
        throw ConfigError("genotype N=" + std::to_string(genotype.num_nodes()) +
                          " does not match supernet N=" + std::to_string(supernet.num_nodes_));
    }
    Cell c;
    c.mode_ = CellMode::Discrete;
    c.num_nodes_ = supernet.num_nodes_;
    c.d_v_ = supernet.d_v_;
    c.d_e_ = supernet.d_e_;
    c.genotype_ = genotype;
    c.entity_ops_.resize(num_pairs(c.num_nodes_));
    c.edge_ops_.resize(num_pairs(c.num_nodes_));
    for (const auto& e : genotype.entity) {
        const std::size_t p = pair_index(e.src, e.dst);
        c.entity_ops_[p].push_back(
            supernet.entity_ops_[p][static_cast<std::size_t>(e.op)].clone());
    }
    for (const auto& e : genotype.edge) {
        const std::size_t p = pair_index(e.src, e.dst);
        c.edge_ops_[p].push_back(supernet.edge_ops_[p][static_cast<std::size_t>(e.op)].clone());
    }
    c.entity_proj_ = supernet.entity_proj_.clone();
    c.edge_proj_ = supernet.edge_proj_.clone();
    return c;
}

Cell::Output Cell::forward(const Tensor& V0, const Tensor& E0, const Topology& topo,
                           bool training, const Tensor* entity_weights,
                           const Tensor* edge_weights, double dropout_rate, Rng* dropout_rng) {
    const std::size_t pairs = num_pairs(num_nodes_);
    if (mode_ == CellMode::Supernet) {
        if (entity_weights == nullptr || edge_weights == nullptr) {
            throw ConfigError("supernet cell needs architecture weights");
        }
        if (entity_weights->rows() != pairs || entity_weights->cols() != kNumOps ||
            edge_weights->rows() != pairs || edge_weights->cols() != kNumOps) {
            throw ShapeError("architecture weights must be " + std::to_string(pairs) + " x " +
                             std::to_string(kNumOps));
        }
    }
    if (!training) {
        dropout_rate = 0.0;
    }

    std::vector<Tensor> V{V0};
    std::vector<Tensor> E{E0};
    for (std::size_t j = 1; j <= num_nodes_; ++j) {
        Tensor vj;
        Tensor ej;
        for (std::size_t i = 0; i < j; ++i) {
            const std::size_t p = pair_index(i, j);
            Tensor vterm;
            Tensor eterm;
            if (mode_ == CellMode::Supernet) {
                std::vector<Tensor> vouts(kNumOps);
                std::vector<Tensor> eouts(kNumOps);
                for (std::size_t k = 0; k < kNumOps; ++k) {
                    if (entity_ops_[p][k].kind() != EntityOpKind::Zero) {
                        vouts[k] = entity_ops_[p][k].forward(V[i], E[i], topo, training);
                    }
                    if (edge_ops_[p][k].kind() != EdgeOpKind::Zero) {
                        eouts[k] = edge_ops_[p][k].forward(E[i], V[i], topo, training);
                    }
                }
                vterm = mixed_combine(vouts, *entity_weights, p);
                eterm = mixed_combine(eouts, *edge_weights, p);
            } else {
                if (!entity_ops_[p].empty()) {
                    vterm = entity_ops_[p][0].forward(V[i], E[i], topo, training);
                }
                if (!edge_ops_[p].empty()) {
                    eterm = edge_ops_[p][0].forward(E[i], V[i], topo, training);
                }
            }
            if (vterm.defined()) {
                vj = vj.defined() ? add(vj, vterm) : vterm;
            }
            if (eterm.defined()) {
                ej = ej.defined() ? add(ej, eterm) : eterm;
            }
        }
        if (!vj.defined() || !ej.defined()) {
            throw ConfigError("cell node " + std::to_string(j) + " has no incoming edge");
        }
        V.push_back(vj);
        E.push_back(ej);
    }

    std::vector<Tensor> vcat(V.begin() + 1, V.end());
    std::vector<Tensor> ecat(E.begin() + 1, E.end());
    Tensor vout = entity_proj_.forward(concat_cols(vcat));
    Tensor eout = edge_proj_.forward(concat_cols(ecat));
    vout = apply_dropout(vout, dropout_rate, dropout_rng);
    eout = apply_dropout(eout, dropout_rate, dropout_rng);
    return {add(vout, V0), add(eout, E0)};
}

Cell Cell::clone() const {
    Cell c;
    c.mode_ = mode_;
    c.num_nodes_ = num_nodes_;
    c.d_v_ = d_v_;
    c.d_e_ = d_e_;
    c.genotype_ = genotype_;
    c.entity_ops_.resize(entity_ops_.size());
    c.edge_ops_.resize(edge_ops_.size());
    for (std::size_t p = 0; p < entity_ops_.size(); ++p) {
        for (const auto& op : entity_ops_[p]) {
            c.entity_ops_[p].push_back(op.clone());
        }
        for (const auto& op : edge_ops_[p]) {
            c.edge_ops_[p].push_back(op.clone());
        }
    }
    c.entity_proj_ = entity_proj_.clone();
    c.edge_proj_ = edge_proj_.clone();
    return c;
}

void Cell::collect(const std::string& prefix, ParamCollector& out) {
    for (std::size_t j = 1; j <= num_nodes_; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const std::size_t p = pair_index(i, j);
            for (auto& op : entity_ops_[p]) {
                op.collect(prefix + ".entity." + pair_name(i, j) + "." + std::string(name(op.kind())),
                           out);
            }
            for (auto& op : edge_ops_[p]) {
                op.collect(prefix + ".edge." + pair_name(i, j) + "." + std::string(name(op.kind())),
                           out);
            }
        }
    }
    entity_proj_.collect(prefix + ".entity_proj", out);
    edge_proj_.collect(prefix + ".edge_proj", out);
}

}  // namespace edgenas
