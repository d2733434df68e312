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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edgenas/autodiff.hpp"

namespace edgenas {

/// Directed edge list plus features and optional labels. Undirected data is
/// stored as both directions, so the in-edges of a node are its neighborhood.
struct Graph {
    std::size_t num_nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    Matrix node_features;  // num_nodes x d_in_v
    Matrix edge_features;  // num_edges x d_in_e (d_in_e may be 0)
    std::vector<int> node_labels;
    std::vector<int> edge_labels;
    std::optional<double> graph_label;

    std::size_t num_edges() const { return edges.size(); }

    /// Throws DataError on endpoint or feature-row violations.
    void validate() const;

    /// True if every (s, t) has a matching (t, s).
    bool closed_under_reversal() const;

    bool operator==(const Graph& other) const = default;
};

using Dataset = std::vector<Graph>;

/// Endpoint arrays for message passing.
struct Topology {
    std::size_t num_nodes = 0;
    std::vector<std::size_t> src;
    std::vector<std::size_t> dst;

    std::size_t num_edges() const { return src.size(); }
};

Topology topology_of(const Graph& g);

/// Disjoint union of several graphs with per-node / per-edge graph ids.
struct GraphBatch {
    Graph merged;
    std::vector<std::size_t> graph_of_node;
    std::vector<std::size_t> graph_of_edge;
    std::vector<std::size_t> node_offsets;  // size num_graphs + 1
    std::vector<std::size_t> edge_offsets;  // size num_graphs + 1
    std::vector<double> graph_labels;  // one per graph when the source graphs carry one
    std::size_t num_graphs = 0;
    bool has_graph_labels = false;

    Topology topology() const { return topology_of(merged); }
};

GraphBatch make_batch(std::span<const Graph> graphs);
GraphBatch make_batch(const Dataset& data, std::span<const std::size_t> indices);
std::vector<Graph> unbatch(const GraphBatch& batch);

/// Writes one JSON object per graph: {"n","edges","x","e","y_node"|"y_edge"|"y_graph"}.
void save_jsonl(const std::filesystem::path& path, const Dataset& data);
/// Serializes one graph as a single JSON line (no trailing newline).
std::string to_json_line(const Graph& g);
/// Throws ParseError naming the 1-based line on malformed input.
Dataset load_jsonl(const std::filesystem::path& path);
Graph graph_from_json_line(const std::string& line, std::size_t line_number);

/// Even-index graphs form the first half, odd-index graphs the second.
std::pair<Dataset, Dataset> split_even_odd(const Dataset& data);

}  // namespace edgenas
