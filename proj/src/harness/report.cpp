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
#include <cstdio>
#include <map>
#include <sstream>

#include "edgenas/error.hpp"
#include "edgenas/harness.hpp"

namespace edgenas {

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

std::size_t longest_path(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                         std::size_t n) {
    // Edges only run from lower to higher index, so index order is topological.
    std::vector<std::size_t> depth(n + 1, 0);
    std::size_t best = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        for (const auto& [s, t] : edges) {
            if (t == j && s < j) {
                depth[j] = std::max(depth[j], depth[s] + 1);
            }
        }
        best = std::max(best, depth[j]);
    }
    return best;
}

std::vector<CellStats> topology_stats(const Genotype& genotype) {
    genotype.validate();
    const std::size_t n = genotype.num_nodes();
    std::vector<CellStats> out;
    for (std::size_t c = 0; c < genotype.cells.size(); ++c) {
        const CellGenotype& cell = genotype.cells[c];
        CellStats s;
        s.cell = c;
        std::vector<std::pair<std::size_t, std::size_t>> ent;
        std::vector<std::pair<std::size_t, std::size_t>> edg;
        for (const auto& e : cell.entity) {
            ent.emplace_back(e.src, e.dst);
            s.entity_skips += e.op == EntityOpKind::EntitySkip;
            s.entity_from_input += e.src == 0;
        }
        for (const auto& e : cell.edge) {
            edg.emplace_back(e.src, e.dst);
            s.edge_skips += e.op == EdgeOpKind::EdgeSkip;
            s.edge_from_input += e.src == 0;
        }
        s.entity_longest_path = longest_path(ent, n);
        s.edge_longest_path = longest_path(edg, n);
        out.push_back(s);
    }
    return out;
}

std::string stats_csv(const std::vector<CellStats>& stats) {
    std::ostringstream os;
    os << "cell,entity_longest_path,edge_longest_path,entity_skips,edge_skips,"
          "entity_from_input,edge_from_input\n";
    for (const CellStats& s : stats) {
        os << s.cell << ',' << s.entity_longest_path << ',' << s.edge_longest_path << ','
           << s.entity_skips << ',' << s.edge_skips << ',' << s.entity_from_input << ','
           << s.edge_from_input << '\n';
    }
    return os.str();
}

std::string export_dot(const Genotype& genotype) {
    if (genotype.cells.empty()) {
        throw ConfigError("cannot export an empty genotype");
    }
    genotype.validate();
    const std::size_t n = genotype.num_nodes();
    std::ostringstream os;
    os << "digraph genotype {\n  rankdir=LR;\n  node [shape=box];\n";
    for (std::size_t c = 0; c < genotype.cells.size(); ++c) {
        const CellGenotype& cell = genotype.cells[c];
        const std::string cid = "c" + std::to_string(c);

        os << "  subgraph cluster_" << cid << "_edge {\n";
        os << "    label=\"cell " << c << " edge-updating graph\";\n";
        for (std::size_t j = 0; j <= n; ++j) {
            os << "    " << cid << "_E" << j << " [label=\"E" << j << "\"];\n";
        }
        for (const auto& e : cell.edge) {
            const bool skip = e.op == EdgeOpKind::EdgeSkip;
            os << "    " << cid << "_E" << e.src << " -> " << cid << "_E" << e.dst
               << " [label=\"" << name(e.op);
            if (!skip) {
                os << " (+V" << e.src << ")";
            }
            os << "\"" << (skip ? ", style=dashed" : "") << "];\n";
        }
        os << "  }\n";

        os << "  subgraph cluster_" << cid << "_entity {\n";
        os << "    label=\"cell " << c << " entity-updating graph\";\n";
        for (std::size_t j = 0; j <= n; ++j) {
            os << "    " << cid << "_V" << j << " [label=\"V" << j << "\"];\n";
        }
        for (const auto& e : cell.entity) {
            const bool skip = e.op == EntityOpKind::EntitySkip;
            os << "    " << cid << "_V" << e.src << " -> " << cid << "_V" << e.dst
               << " [label=\"" << name(e.op);
            if (!skip) {
                os << " (+E" << e.src << ")";
            }
            os << "\"" << (skip ? ", style=dashed" : "") << "];\n";
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

double heuristic_edge_f1(const Dataset& data, std::size_t per_node) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (const Graph& g : data) {
        if (g.edge_features.cols() == 0 || g.edge_labels.size() != g.num_edges()) {
            throw DataError("heuristic F1 needs edge lengths and edge labels");
        }
        struct Pair {
            double length = 0.0;
            bool actual = false;
            bool predicted = false;
        };
        std::map<std::pair<std::size_t, std::size_t>, Pair> pairs;
        for (std::size_t k = 0; k < g.num_edges(); ++k) {
            const auto [s, t] = g.edges[k];
            Pair& p = pairs[{std::min(s, t), std::max(s, t)}];
            p.length = g.edge_features(k, 0);
            p.actual = p.actual || g.edge_labels[k] == 1;
        }
        std::vector<std::vector<std::pair<double, std::size_t>>> incident(g.num_nodes);
        for (const auto& [key, p] : pairs) {
            incident[key.first].emplace_back(p.length, key.second);
            incident[key.second].emplace_back(p.length, key.first);
        }
        for (std::size_t u = 0; u < g.num_nodes; ++u) {
            auto& inc = incident[u];
            std::sort(inc.begin(), inc.end());
            for (std::size_t r = 0; r < std::min(per_node, inc.size()); ++r) {
                const std::size_t v = inc[r].second;
                pairs[{std::min(u, v), std::max(u, v)}].predicted = true;
            }
        }
        for (const auto& [key, p] : pairs) {
            tp += p.predicted && p.actual;
            fp += p.predicted && !p.actual;
            fn += !p.predicted && p.actual;
        }
    }
    return binary_f1(tp, fp, fn);
}

}  // namespace edgenas
