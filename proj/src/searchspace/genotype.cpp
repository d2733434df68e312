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
#include <fstream>
#include <set>
#include <sstream>

#include "edgenas/error.hpp"
#include "edgenas/genotype.hpp"
#include "json.hpp"

namespace edgenas {

namespace {

constexpr std::array<std::string_view, kNumOps> kEntityNames = {"Sum", "Mean", "Max",
                                                                 "EntitySkip", "Zero"};
constexpr std::array<std::string_view, kNumOps> kEdgeNames = {"Concat", "GRU", "FiLM",
                                                               "EdgeSkip", "Zero"};

template <typename Choice>
void validate_dag(const std::vector<Choice>& choices, std::size_t n, std::size_t cell,
                  const char* which) {
    const std::string where = "cell " + std::to_string(cell) + " " + which + " DAG: ";
    std::vector<std::size_t> indegree(n + 1, 0);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& c : choices) {
        if (c.src >= c.dst || c.dst > n) {
            throw ConfigError(where + "edge (" + std::to_string(c.src) + "," +
                              std::to_string(c.dst) + ") is not a forward edge within N=" +
                              std::to_string(n));
        }
        if (static_cast<int>(c.op) == static_cast<int>(kNumOps) - 1) {
            throw ConfigError(where + "edge (" + std::to_string(c.src) + "," +
                              std::to_string(c.dst) + ") carries the Zero operation");
        }
        if (!seen.emplace(c.src, c.dst).second) {
            throw ConfigError(where + "duplicate edge (" + std::to_string(c.src) + "," +
                              std::to_string(c.dst) + ")");
        }
        ++indegree[c.dst];
    }
    for (std::size_t j = 1; j <= n; ++j) {
        if (indegree[j] < 1 || indegree[j] > 2) {
            throw ConfigError(where + "node " + std::to_string(j) + " has " +
                              std::to_string(indegree[j]) + " incoming edges (need 1 or 2)");
        }
    }
}

}  // namespace

std::string_view name(EntityOpKind kind) { return kEntityNames.at(static_cast<std::size_t>(kind)); }
std::string_view name(EdgeOpKind kind) { return kEdgeNames.at(static_cast<std::size_t>(kind)); }

EntityOpKind parse_entity_op(std::string_view text) {
    for (std::size_t i = 0; i < kNumOps; ++i) {
        if (kEntityNames[i] == text) {
            return kEntityOps[i];
        }
    }
    throw ParseError("unknown entity operation '" + std::string(text) + "'");
}

EdgeOpKind parse_edge_op(std::string_view text) {
    for (std::size_t i = 0; i < kNumOps; ++i) {
        if (kEdgeNames[i] == text) {
            return kEdgeOps[i];
        }
    }
    throw ParseError("unknown edge operation '" + std::string(text) + "'");
}

std::size_t CellGenotype::num_nodes() const {
    std::size_t n = 0;
    for (const auto& c : entity) {
        n = std::max(n, c.dst);
    }
    for (const auto& c : edge) {
        n = std::max(n, c.dst);
    }
    return n;
}

void Genotype::validate() const {
    if (cells.empty()) {
        throw ConfigError("genotype has no cells");
    }
    if (d_v == 0 || d_e == 0) {
        throw ConfigError("genotype hidden widths must be positive");
    }
    const std::size_t n = num_nodes();
    if (n == 0) {
        throw ConfigError("genotype cell 0 has no edges");
    }
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        if (cells[ci].num_nodes() != n) {
            throw ConfigError("cell " + std::to_string(ci) + " has N=" +
                              std::to_string(cells[ci].num_nodes()) + ", expected " +
                              std::to_string(n));
        }
        validate_dag(cells[ci].entity, n, ci, "entity");
        validate_dag(cells[ci].edge, n, ci, "edge");
    }
}

std::string genotype_to_json(const Genotype& g) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& c : g.cells) {
        nlohmann::ordered_json cell;
        nlohmann::ordered_json entity = nlohmann::ordered_json::array();
        for (const auto& e : c.entity) {
            entity.push_back({e.src, e.dst, std::string(name(e.op))});
        }
        nlohmann::ordered_json edge = nlohmann::ordered_json::array();
        for (const auto& e : c.edge) {
            edge.push_back({e.src, e.dst, std::string(name(e.op))});
        }
        cell["entity"] = std::move(entity);
        cell["edge"] = std::move(edge);
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    j["d_v"] = g.d_v;
    j["d_e"] = g.d_e;
    return j.dump(2);
}

Genotype genotype_from_json(std::string_view text) {
    Genotype g;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const auto& [key, _] : j.items()) {
            if (key != "cells" && key != "d_v" && key != "d_e") {
                throw ParseError("genotype: unknown key '" + key + "'");
            }
        }
        g.d_v = j.at("d_v").get<std::size_t>();
        g.d_e = j.at("d_e").get<std::size_t>();
        for (const auto& cj : j.at("cells")) {
            CellGenotype cell;
            for (const auto& e : cj.at("entity")) {
                if (!e.is_array() || e.size() != 3) {
                    throw ParseError("genotype: entity choices are [src, dst, op]");
                }
                cell.entity.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(),
                                       parse_entity_op(e[2].get<std::string>())});
            }
            for (const auto& e : cj.at("edge")) {
                if (!e.is_array() || e.size() != 3) {
                    throw ParseError("genotype: edge choices are [src, dst, op]");
                }
                cell.edge.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(),
                                     parse_edge_op(e[2].get<std::string>())});
            }
            g.cells.push_back(std::move(cell));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("genotype: ") + e.what());
    }
    g.validate();
    return g;
}

void save_genotype(const std::filesystem::path& path, const Genotype& g) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write genotype to " + path.string());
    }
    out << genotype_to_json(g) << '\n';
}

Genotype load_genotype(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read genotype " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return genotype_from_json(buf.str());
}

}  // namespace edgenas
