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
#include <set>

#include "edgenas/error.hpp"
#include "edgenas/graph.hpp"

namespace edgenas {

void Graph::validate() const {
    for (const auto& [s, t] : edges) {
        if (s >= num_nodes || t >= num_nodes) {
            throw DataError("edge (" + std::to_string(s) + "," + std::to_string(t) +
                            ") has an endpoint outside " + std::to_string(num_nodes) + " nodes");
        }
    }
    if (node_features.rows() != num_nodes) {
        throw DataError("node feature rows " + std::to_string(node_features.rows()) +
                        " != num_nodes " + std::to_string(num_nodes));
    }
    if (edge_features.rows() != edges.size()) {
        throw DataError("edge feature rows " + std::to_string(edge_features.rows()) +
                        " != num_edges " + std::to_string(edges.size()));
    }
    if (!node_labels.empty() && node_labels.size() != num_nodes) {
        throw DataError("node label count does not match num_nodes");
    }
    if (!edge_labels.empty() && edge_labels.size() != edges.size()) {
        throw DataError("edge label count does not match num_edges");
    }
}

bool Graph::closed_under_reversal() const {
    std::multiset<std::pair<std::size_t, std::size_t>> seen(edges.begin(), edges.end());
    return std::all_of(edges.begin(), edges.end(), [&](const auto& e) {
        return seen.count({e.second, e.first}) == seen.count(e);
    });
}

Topology topology_of(const Graph& g) {
    Topology topo;
    topo.num_nodes = g.num_nodes;
    topo.src.reserve(g.edges.size());
    topo.dst.reserve(g.edges.size());
    for (const auto& [s, t] : g.edges) {
        topo.src.push_back(s);
        topo.dst.push_back(t);
    }
    return topo;
}

GraphBatch make_batch(std::span<const Graph> graphs) {
    GraphBatch batch;
    batch.num_graphs = graphs.size();
    if (graphs.empty()) {
        batch.node_offsets = {0};
        batch.edge_offsets = {0};
        return batch;
    }
    // empty feature matrices (no nodes / no edges) carry no width information
    std::size_t dv = graphs.front().node_features.cols();
    std::size_t de = graphs.front().edge_features.cols();
    for (const auto& g : graphs) {
        if (g.node_features.rows() > 0) {
            dv = g.node_features.cols();
        }
        if (g.edge_features.rows() > 0) {
            de = g.edge_features.cols();
        }
    }
    std::size_t total_nodes = 0;
    std::size_t total_edges = 0;
    const bool node_labels = !graphs.front().node_labels.empty();
    const bool edge_labels = !graphs.front().edge_labels.empty();
    batch.has_graph_labels = graphs.front().graph_label.has_value();
    for (const auto& g : graphs) {
        if ((g.node_features.rows() > 0 && g.node_features.cols() != dv) ||
            (g.edge_features.rows() > 0 && g.edge_features.cols() != de)) {
            throw DataError("make_batch: feature widths differ between graphs");
        }
        if (node_labels != !g.node_labels.empty() || edge_labels != !g.edge_labels.empty() ||
            batch.has_graph_labels != g.graph_label.has_value()) {
            throw DataError("make_batch: label kinds differ between graphs");
        }
        total_nodes += g.num_nodes;
        total_edges += g.num_edges();
    }

    Graph& m = batch.merged;
    m.num_nodes = total_nodes;
    m.edges.reserve(total_edges);
    m.node_features = Matrix(total_nodes, dv);
    m.edge_features = Matrix(total_edges, de);
    batch.graph_of_node.reserve(total_nodes);
    batch.graph_of_edge.reserve(total_edges);
    batch.node_offsets.push_back(0);
    batch.edge_offsets.push_back(0);

    std::size_t node_off = 0;
    std::size_t edge_off = 0;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const Graph& g = graphs[gi];
        for (const auto& [s, t] : g.edges) {
            m.edges.emplace_back(s + node_off, t + node_off);
        }
        std::copy(g.node_features.values().begin(), g.node_features.values().end(),
                  m.node_features.values().begin() + static_cast<std::ptrdiff_t>(node_off * dv));
        std::copy(g.edge_features.values().begin(), g.edge_features.values().end(),
                  m.edge_features.values().begin() + static_cast<std::ptrdiff_t>(edge_off * de));
        m.node_labels.insert(m.node_labels.end(), g.node_labels.begin(), g.node_labels.end());
        m.edge_labels.insert(m.edge_labels.end(), g.edge_labels.begin(), g.edge_labels.end());
        if (g.graph_label) {
            batch.graph_labels.push_back(*g.graph_label);
        }
        batch.graph_of_node.insert(batch.graph_of_node.end(), g.num_nodes, gi);
        batch.graph_of_edge.insert(batch.graph_of_edge.end(), g.num_edges(), gi);
        node_off += g.num_nodes;
        edge_off += g.num_edges();
        batch.node_offsets.push_back(node_off);
        batch.edge_offsets.push_back(edge_off);
    }
    return batch;
}

GraphBatch make_batch(const Dataset& data, std::span<const std::size_t> indices) {
    std::vector<Graph> picked;
    picked.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= data.size()) {
            throw IndexError("make_batch: graph index out of range");
        }
        picked.push_back(data[i]);
    }
    return make_batch(std::span<const Graph>(picked));
}

std::vector<Graph> unbatch(const GraphBatch& batch) {
    std::vector<Graph> out;
    out.reserve(batch.num_graphs);
    const Graph& m = batch.merged;
    const std::size_t dv = m.node_features.cols();
    const std::size_t de = m.edge_features.cols();
    for (std::size_t gi = 0; gi < batch.num_graphs; ++gi) {
        const std::size_t n0 = batch.node_offsets[gi];
        const std::size_t n1 = batch.node_offsets[gi + 1];
        const std::size_t e0 = batch.edge_offsets[gi];
        const std::size_t e1 = batch.edge_offsets[gi + 1];
        Graph g;
        g.num_nodes = n1 - n0;
        for (std::size_t e = e0; e < e1; ++e) {
            g.edges.emplace_back(m.edges[e].first - n0, m.edges[e].second - n0);
        }
        g.node_features = Matrix(
            n1 - n0, dv,
            std::vector<double>(m.node_features.values().begin() + static_cast<std::ptrdiff_t>(n0 * dv),
                                m.node_features.values().begin() + static_cast<std::ptrdiff_t>(n1 * dv)));
        g.edge_features = Matrix(
            e1 - e0, de,
            std::vector<double>(m.edge_features.values().begin() + static_cast<std::ptrdiff_t>(e0 * de),
                                m.edge_features.values().begin() + static_cast<std::ptrdiff_t>(e1 * de)));
        if (!m.node_labels.empty()) {
            g.node_labels.assign(m.node_labels.begin() + static_cast<std::ptrdiff_t>(n0),
                                 m.node_labels.begin() + static_cast<std::ptrdiff_t>(n1));
        }
        if (!m.edge_labels.empty()) {
            g.edge_labels.assign(m.edge_labels.begin() + static_cast<std::ptrdiff_t>(e0),
                                 m.edge_labels.begin() + static_cast<std::ptrdiff_t>(e1));
        }
        if (batch.has_graph_labels) {
            g.graph_label = batch.graph_labels[gi];
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::pair<Dataset, Dataset> split_even_odd(const Dataset& data) {
    Dataset even;
    Dataset odd;
    for (std::size_t i = 0; i < data.size(); ++i) {
        (i % 2 == 0 ? even : odd).push_back(data[i]);
    }
    return {std::move(even), std::move(odd)};
}

}  // namespace edgenas
