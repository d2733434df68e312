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

// Synthetic desk-scale datasets for the three task levels:
//   - SBM community graphs (node classification),
//   - Euclidean TSP graphs labelled by the exact optimal tour (edge classification),
//   - random connected graphs with a structural regression target (graph regression).
// Every generator is a pure function of its parameters and seed.

#include <cstdint>
#include <utility>
#include <vector>

#include "edgenas/graph.hpp"

namespace edgenas {

inline constexpr int kGeneratorVersion = 1;

struct SbmParams {
    std::size_t num_graphs = 100;
    std::size_t nodes_per_community = 10;
    std::size_t num_communities = 2;
    double p_intra = 0.5;
    double p_inter = 0.05;
    double feature_noise = 0.5;
};

/// Node features: one-hot community hint; with probability feature_noise a
/// node gets the uniform row (1/C, ..., 1/C) instead. node_labels = community.
Dataset gen_sbm(const SbmParams& params, std::uint64_t seed);

struct TspParams {
    std::size_t num_graphs = 100;
    std::size_t min_cities = 7;
    std::size_t max_cities = 7;
    std::size_t knn_k = 3;
};

inline constexpr std::size_t kMaxTspCities = 12;

/// Edges = symmetrized k-NN plus optimal-tour edges; x = coordinates,
/// e = Euclidean length, y_edge = 1 on optimal-tour edges (both directions).
Dataset gen_tsp(const TspParams& params, std::uint64_t seed);

/// Builds one TSP graph from fixed city coordinates (3 <= n <= kMaxTspCities).
Graph tsp_graph_from_cities(const std::vector<std::pair<double, double>>& cities,
                            std::size_t knn_k);

struct GraphRegParams {
    std::size_t num_graphs = 100;
    std::size_t min_nodes = 6;
    std::size_t max_nodes = 10;
    double edge_prob = 0.35;
};

inline constexpr std::size_t kEdgeTypes = 3;

/// Connected Erdos-Renyi graphs. x = degree one-hot (width max_nodes),
/// e = edge-type one-hot (3 types), y_graph = triangles + 0.5 * (#type-0 edges).
Dataset gen_graphreg(const GraphRegParams& params, std::uint64_t seed);

/// Builds one regression graph from undirected edges (u, v) with per-edge types.
/// Degree one-hot width is feature_width.
Graph graphreg_graph(std::size_t num_nodes,
                     const std::vector<std::pair<std::size_t, std::size_t>>& undirected,
                     const std::vector<int>& types, std::size_t feature_width);

/// Regression target of gen_graphreg recomputed from a graph's structure and
/// edge-type features.
double graphreg_target(const Graph& g);

struct TourResult {
    std::vector<std::size_t> order;  // starts at city 0
    double length = 0.0;
};

/// Exact minimum tour by Held-Karp dynamic programming; 1 <= n <= kMaxTspCities.
TourResult held_karp(const std::vector<std::pair<double, double>>& cities);

/// Greedy nearest-neighbour tour starting at city 0.
TourResult nearest_neighbor_tour(const std::vector<std::pair<double, double>>& cities);

}  // namespace edgenas
