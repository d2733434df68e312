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
#include <cmath>
#include <tuple>
#include <numeric>
#include <set>

#include "edgenas/error.hpp"
#include "edgenas/generators.hpp"
#include "edgenas/rng.hpp"

namespace edgenas {

namespace {

using Pair = std::pair<std::size_t, std::size_t>;

// Expands an undirected pair set into sorted directed edges.
std::vector<Pair> directed_edges(const std::set<Pair>& undirected) {
    std::vector<Pair> edges;
    edges.reserve(undirected.size() * 2);
    for (const auto& [u, v] : undirected) {
        edges.emplace_back(u, v);
        edges.emplace_back(v, u);
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

Pair unordered(std::size_t a, std::size_t b) { return a < b ? Pair{a, b} : Pair{b, a}; }

bool is_connected(std::size_t n, const std::set<Pair>& undirected) {
    if (n <= 1) {
        return true;
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [u, v] : undirected) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

}  // namespace

Dataset gen_sbm(const SbmParams& p, std::uint64_t seed) {
    if (!(p.p_inter >= 0.0 && p.p_inter < p.p_intra && p.p_intra <= 1.0)) {
        throw ConfigError("gen_sbm: need 0 <= p_inter < p_intra <= 1");
    }
    if (!(p.feature_noise >= 0.0 && p.feature_noise <= 1.0)) {
        throw ConfigError("gen_sbm: feature_noise must lie in [0, 1]");
    }
    if (p.num_communities < 1 || p.nodes_per_community < 1) {
        throw ConfigError("gen_sbm: need at least one community of one node");
    }
    Rng rng(seed);
    const std::size_t c = p.num_communities;
    const std::size_t n = p.nodes_per_community * c;
    Dataset data;
    data.reserve(p.num_graphs);
    for (std::size_t gi = 0; gi < p.num_graphs; ++gi) {
        std::vector<int> community(n);
        for (std::size_t i = 0; i < n; ++i) {
            community[i] = static_cast<int>(i / p.nodes_per_community);
        }
        rng.shuffle(community);

        std::set<Pair> undirected;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                const double prob = community[u] == community[v] ? p.p_intra : p.p_inter;
                if (rng.bernoulli(prob)) {
                    undirected.emplace(u, v);
                }
            }
        }

        Graph g;
        g.num_nodes = n;
        g.edges = directed_edges(undirected);
        g.node_features = Matrix(n, c);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.bernoulli(p.feature_noise)) {
                for (std::size_t k = 0; k < c; ++k) {
                    g.node_features(i, k) = 1.0 / static_cast<double>(c);
                }
            } else {
                g.node_features(i, static_cast<std::size_t>(community[i])) = 1.0;
            }
        }
        g.edge_features = Matrix(g.edges.size(), 0);
        g.node_labels = std::move(community);
        data.push_back(std::move(g));
    }
    return data;
}

Graph tsp_graph_from_cities(const std::vector<std::pair<double, double>>& cities,
                            std::size_t knn_k) {
    const std::size_t n = cities.size();
    if (n < 3 || n > kMaxTspCities) {
        throw ConfigError("gen_tsp: city count " + std::to_string(n) + " outside [3, " +
                          std::to_string(kMaxTspCities) + "]");
    }
    if (knn_k < 1) {
        throw ConfigError("gen_tsp: knn_k must be >= 1");
    }
    auto dist = [&](std::size_t a, std::size_t b) {
        return std::hypot(cities[a].first - cities[b].first, cities[a].second - cities[b].second);
    };
    std::set<Pair> undirected;
    const std::size_t k = std::min(knn_k, n - 1);
    for (std::size_t u = 0; u < n; ++u) {
        std::vector<std::size_t> others;
        for (std::size_t v = 0; v < n; ++v) {
            if (v != u) {
                others.push_back(v);
            }
        }
        std::stable_sort(others.begin(), others.end(),
                         [&](std::size_t a, std::size_t b) { return dist(u, a) < dist(u, b); });
        for (std::size_t i = 0; i < k; ++i) {
            undirected.insert(unordered(u, others[i]));
        }
    }
    const TourResult tour = held_karp(cities);
    std::set<Pair> tour_pairs;
    for (std::size_t i = 0; i < n; ++i) {
        tour_pairs.insert(unordered(tour.order[i], tour.order[(i + 1) % n]));
    }
    undirected.insert(tour_pairs.begin(), tour_pairs.end());

    Graph g;
    g.num_nodes = n;
    g.edges = directed_edges(undirected);
    g.node_features = Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        g.node_features(i, 0) = cities[i].first;
        g.node_features(i, 1) = cities[i].second;
    }
    g.edge_features = Matrix(g.edges.size(), 1);
    g.edge_labels.resize(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto [s, t] = g.edges[e];
        g.edge_features(e, 0) = dist(s, t);
        g.edge_labels[e] = tour_pairs.count(unordered(s, t)) ? 1 : 0;
    }
    return g;
}

Dataset gen_tsp(const TspParams& p, std::uint64_t seed) {
    if (p.min_cities < 3 || p.max_cities > kMaxTspCities || p.min_cities > p.max_cities) {
        throw ConfigError("gen_tsp: need 3 <= min_cities <= max_cities <= " +
                          std::to_string(kMaxTspCities));
    }
    if (p.knn_k < 1) {
        throw ConfigError("gen_tsp: knn_k must be >= 1");
    }
    Rng rng(seed);
    Dataset data;
    data.reserve(p.num_graphs);
    for (std::size_t gi = 0; gi < p.num_graphs; ++gi) {
        const std::size_t n =
            p.min_cities + static_cast<std::size_t>(rng.below(p.max_cities - p.min_cities + 1));
        std::vector<std::pair<double, double>> cities(n);
        for (auto& c : cities) {
            c.first = rng.uniform();
            c.second = rng.uniform();
        }
        data.push_back(tsp_graph_from_cities(cities, p.knn_k));
    }
    return data;
}

Graph graphreg_graph(std::size_t num_nodes, const std::vector<Pair>& undirected_list,
                     const std::vector<int>& types, std::size_t feature_width) {
    if (types.size() != undirected_list.size()) {
        throw DataError("graphreg_graph: one type per undirected edge required");
    }
    std::vector<std::size_t> degree(num_nodes, 0);
    std::vector<std::tuple<std::size_t, std::size_t, int>> directed;
    for (std::size_t i = 0; i < undirected_list.size(); ++i) {
        const auto [u, v] = undirected_list[i];
        if (u >= num_nodes || v >= num_nodes || u == v) {
            throw DataError("graphreg_graph: invalid edge");
        }
        if (types[i] < 0 || static_cast<std::size_t>(types[i]) >= kEdgeTypes) {
            throw DataError("graphreg_graph: edge type out of range");
        }
        ++degree[u];
        ++degree[v];
        directed.emplace_back(u, v, types[i]);
        directed.emplace_back(v, u, types[i]);
    }
    std::sort(directed.begin(), directed.end());
    Graph g;
    g.num_nodes = num_nodes;
    g.node_features = Matrix(num_nodes, feature_width);
    for (std::size_t i = 0; i < num_nodes; ++i) {
        if (degree[i] >= feature_width) {
            throw DataError("graphreg_graph: degree exceeds one-hot width");
        }
        g.node_features(i, degree[i]) = 1.0;
    }
    g.edge_features = Matrix(directed.size(), kEdgeTypes);
    for (std::size_t e = 0; e < directed.size(); ++e) {
        const auto [u, v, t] = directed[e];
        g.edges.emplace_back(u, v);
        g.edge_features(e, static_cast<std::size_t>(t)) = 1.0;
    }
    g.graph_label = graphreg_target(g);
    return g;
}

double graphreg_target(const Graph& g) {
    const std::size_t n = g.num_nodes;
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    std::size_t type0 = 0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto [u, v] = g.edges[e];
        adj[u][v] = true;
        if (u < v && g.edge_features.cols() > 0 && g.edge_features(e, 0) == 1.0) {
            ++type0;
        }
    }
    std::size_t triangles = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!adj[i][j]) {
                continue;
            }
            for (std::size_t k = j + 1; k < n; ++k) {
                if (adj[i][k] && adj[j][k]) {
                    ++triangles;
                }
            }
        }
    }
    return static_cast<double>(triangles) + 0.5 * static_cast<double>(type0);
}

Dataset gen_graphreg(const GraphRegParams& p, std::uint64_t seed) {
    if (p.min_nodes < 2 || p.min_nodes > p.max_nodes) {
        throw ConfigError("gen_graphreg: need 2 <= min_nodes <= max_nodes");
    }
    if (!(p.edge_prob > 0.0 && p.edge_prob <= 1.0)) {
        throw ConfigError("gen_graphreg: edge_prob must lie in (0, 1]");
    }
    Rng rng(seed);
    Dataset data;
    data.reserve(p.num_graphs);
    for (std::size_t gi = 0; gi < p.num_graphs; ++gi) {
        const std::size_t n =
            p.min_nodes + static_cast<std::size_t>(rng.below(p.max_nodes - p.min_nodes + 1));
        std::set<Pair> undirected;
        do {
            undirected.clear();
            for (std::size_t u = 0; u < n; ++u) {
                for (std::size_t v = u + 1; v < n; ++v) {
                    if (rng.bernoulli(p.edge_prob)) {
                        undirected.emplace(u, v);
                    }
                }
            }
        } while (!is_connected(n, undirected));
        std::vector<Pair> list(undirected.begin(), undirected.end());
        std::vector<int> types(list.size());
        for (auto& t : types) {
            t = static_cast<int>(rng.below(kEdgeTypes));
        }
        data.push_back(graphreg_graph(n, list, types, p.max_nodes));
    }
    return data;
}

}  // namespace edgenas
