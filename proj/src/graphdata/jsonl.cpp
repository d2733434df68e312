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

#include <fstream>

#include "edgenas/error.hpp"
#include "edgenas/graph.hpp"
#include "json.hpp"

namespace edgenas {

namespace {

using ojson = nlohmann::ordered_json;

ojson matrix_rows(const Matrix& m) {
    ojson rows = ojson::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        ojson row = ojson::array();
        for (double v : m.row(r)) {
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix parse_rows(const ojson& rows, std::size_t expected_rows, const char* key) {
    if (!rows.is_array() || rows.size() != expected_rows) {
        throw ParseError(std::string("'") + key + "' must hold " + std::to_string(expected_rows) +
                         " rows");
    }
    if (expected_rows == 0) {
        return Matrix(0, 0);
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    data.reserve(expected_rows * cols);
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != cols) {
            throw ParseError(std::string("ragged rows in '") + key + "'");
        }
        for (const auto& v : row) {
            data.push_back(v.get<double>());
        }
    }
    return Matrix(expected_rows, cols, std::move(data));
}

}  // namespace

std::string to_json_line(const Graph& g) {
    ojson j;
    j["n"] = g.num_nodes;
    ojson edges = ojson::array();
    for (const auto& [s, t] : g.edges) {
        edges.push_back({s, t});
    }
    j["edges"] = std::move(edges);
    j["x"] = matrix_rows(g.node_features);
    j["e"] = matrix_rows(g.edge_features);
    if (!g.node_labels.empty()) {
        j["y_node"] = g.node_labels;
    }
    if (!g.edge_labels.empty()) {
        j["y_edge"] = g.edge_labels;
    }
    if (g.graph_label) {
        j["y_graph"] = *g.graph_label;
    }
    return j.dump();
}

Graph graph_from_json_line(const std::string& line, std::size_t line_number) {
    const std::string where = "line " + std::to_string(line_number) + ": ";
    try {
        const ojson j = ojson::parse(line);
        if (!j.is_object()) {
            throw ParseError("expected a JSON object");
        }
        for (const auto& [key, _] : j.items()) {
            if (key != "n" && key != "edges" && key != "x" && key != "e" && key != "y_node" &&
                key != "y_edge" && key != "y_graph") {
                throw ParseError("unknown key '" + key + "'");
            }
        }
        Graph g;
        g.num_nodes = j.at("n").get<std::size_t>();
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw ParseError("edges must be [src, dst] pairs");
            }
            g.edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
        }
        g.node_features = parse_rows(j.at("x"), g.num_nodes, "x");
        if (j.contains("e")) {
            g.edge_features = parse_rows(j.at("e"), g.edges.size(), "e");
        }
        if (g.edge_features.rows() != g.edges.size()) {
            g.edge_features = Matrix(g.edges.size(), 0);
        }
        if (j.contains("y_node")) {
            g.node_labels = j.at("y_node").get<std::vector<int>>();
        }
        if (j.contains("y_edge")) {
            g.edge_labels = j.at("y_edge").get<std::vector<int>>();
        }
        if (j.contains("y_graph")) {
            g.graph_label = j.at("y_graph").get<double>();
        }
        g.validate();
        return g;
    } catch (const ParseError& e) {
        throw ParseError(where + e.what());
    } catch (const DataError& e) {
        throw ParseError(where + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + e.what());
    }
}

void save_jsonl(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    for (const auto& g : data) {
        out << to_json_line(g) << '\n';
    }
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

Dataset load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    Dataset data;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        data.push_back(graph_from_json_line(line, line_number));
    }
    return data;
}

}  // namespace edgenas
