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
#include "edgenas/network.hpp"

namespace edgenas {

void NetworkConfig::validate() const {
    if (num_cells == 0 || num_nodes == 0 || d_v == 0 || d_e == 0) {
        throw ConfigError("num_cells, num_nodes, d_v and d_e must be positive");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw ConfigError("dropout must lie in [0, 1)");
    }
    task.validate();
}

Alphas Alphas::zeros(std::size_t num_cells, std::size_t num_nodes) {
    Alphas a;
    for (std::size_t c = 0; c < num_cells; ++c) {
        a.entity.push_back(Tensor::zeros(num_pairs(num_nodes), kNumOps, true));
        a.edge.push_back(Tensor::zeros(num_pairs(num_nodes), kNumOps, true));
    }
    return a;
}

std::vector<Tensor> Alphas::tensors() const {
    std::vector<Tensor> out;
    for (std::size_t c = 0; c < entity.size(); ++c) {
        out.push_back(entity[c]);
        out.push_back(edge[c]);
    }
    return out;
}

Alphas Alphas::clone() const {
    Alphas a;
    for (std::size_t c = 0; c < entity.size(); ++c) {
        a.entity.push_back(entity[c].clone());
        a.edge.push_back(edge[c].clone());
    }
    return a;
}

void Network::init_common(std::size_t d_in_v, std::size_t d_in_e, Rng& rng) {
    if (d_in_v == 0) {
        throw DataError("graphs need at least one node feature column");
    }
    d_in_v_ = d_in_v;
    d_in_e_ = d_in_e;
    node_embed_ = Linear(d_in_v, config_.d_v, rng);
    edge_embed_ = Linear(d_in_e == 0 ? 1 : d_in_e, config_.d_e, rng);
}

Network Network::supernet(const NetworkConfig& config, std::size_t d_in_v, std::size_t d_in_e,
                          std::uint64_t seed) {
    config.validate();
    Network net;
    net.config_ = config;
    Rng rng(seed);
    net.init_common(d_in_v, d_in_e, rng);
    for (std::size_t c = 0; c < config.num_cells; ++c) {
        net.cells_.push_back(Cell::supernet(config.num_nodes, config.d_v, config.d_e, rng));
    }
    const std::size_t head_in = config.task.level == TaskLevel::Node   ? config.d_v
                                : config.task.level == TaskLevel::Edge ? config.d_e
                                                                       : config.d_v + config.d_e;
    net.head_ = Linear(head_in, config.task.num_classes, rng);
    net.alphas_ = Alphas::zeros(config.num_cells, config.num_nodes);
    return net;
}

Network Network::discrete(const NetworkConfig& config, const Genotype& genotype,
                          std::size_t d_in_v, std::size_t d_in_e, std::uint64_t seed) {
    genotype.validate();
    Network net;
    net.config_ = config;
    net.config_.num_cells = genotype.cells.size();
    net.config_.num_nodes = genotype.num_nodes();
    net.config_.d_v = genotype.d_v;
    net.config_.d_e = genotype.d_e;
    net.config_.validate();
    net.genotype_ = genotype;
    const NetworkConfig& cfg = net.config_;
    Rng rng(seed);
    net.init_common(d_in_v, d_in_e, rng);
    for (const CellGenotype& cg : genotype.cells) {
        net.cells_.push_back(Cell::discrete(cg, cfg.d_v, cfg.d_e, rng));
    }
    const std::size_t head_in = cfg.task.level == TaskLevel::Node   ? cfg.d_v
                                : cfg.task.level == TaskLevel::Edge ? cfg.d_e
                                                                    : cfg.d_v + cfg.d_e;
    net.head_ = Linear(head_in, cfg.task.num_classes, rng);
    return net;
}

Tensor graph_readout(const Tensor& V, const Tensor& E, const GraphBatch& batch) {
    return concat_cols(segment_aggregate(V, batch.graph_of_node, batch.num_graphs, SegmentMode::Mean),
                       segment_aggregate(E, batch.graph_of_edge, batch.num_graphs, SegmentMode::Mean));
}

Tensor Network::forward(const GraphBatch& batch, bool training, Rng* dropout_rng) {
    const Graph& g = batch.merged;
    if (g.node_features.cols() != d_in_v_ && g.num_nodes > 0) {
        throw DataError("node feature width " + std::to_string(g.node_features.cols()) +
                        " does not match the model's " + std::to_string(d_in_v_));
    }
    if (g.edge_features.cols() != d_in_e_ && g.num_edges() > 0) {
        throw DataError("edge feature width " + std::to_string(g.edge_features.cols()) +
                        " does not match the model's " + std::to_string(d_in_e_));
    }
    const Topology topo = batch.topology();
    Matrix x = g.node_features;
    if (x.rows() != g.num_nodes || x.cols() != d_in_v_) {
        x = Matrix(g.num_nodes, d_in_v_);
    }
    Matrix e = g.num_edges() == 0 ? Matrix(0, d_in_e_ == 0 ? 1 : d_in_e_) : e0_init(g);
    Tensor V = node_embed_.forward(Tensor(std::move(x)));
    Tensor E = edge_embed_.forward(Tensor(std::move(e)));

    std::vector<Tensor> entity_weights;
    std::vector<Tensor> edge_weights;
    if (alphas_) {
        for (std::size_t c = 0; c < cells_.size(); ++c) {
            entity_weights.push_back(softmax_rows(alphas_->entity[c]));
            edge_weights.push_back(softmax_rows(alphas_->edge[c]));
        }
    }
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        Cell::Output out = cells_[c].forward(V, E, topo, training,
                                             alphas_ ? &entity_weights[c] : nullptr,
                                             alphas_ ? &edge_weights[c] : nullptr,
                                             config_.dropout, dropout_rng);
        V = out.V;
        E = out.E;
    }

    switch (config_.task.level) {
        case TaskLevel::Node:
            return head_.forward(V);
        case TaskLevel::Edge:
            return head_.forward(E);
        case TaskLevel::Graph:
            break;
    }
    return head_.forward(graph_readout(V, E, batch));
}

ParamCollector Network::weights() {
    ParamCollector out;
    node_embed_.collect("node_embed", out);
    edge_embed_.collect("edge_embed", out);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        cells_[c].collect("cell" + std::to_string(c), out);
    }
    head_.collect("head", out);
    return out;
}

Network Network::clone() const {
    Network net;
    net.config_ = config_;
    net.genotype_ = genotype_;
    if (alphas_) {
        net.alphas_ = alphas_->clone();
    }
    net.d_in_v_ = d_in_v_;
    net.d_in_e_ = d_in_e_;
    net.node_embed_ = node_embed_.clone();
    net.edge_embed_ = edge_embed_.clone();
    for (const Cell& c : cells_) {
        net.cells_.push_back(c.clone());
    }
    net.head_ = head_.clone();
    return net;
}

}  // namespace edgenas
