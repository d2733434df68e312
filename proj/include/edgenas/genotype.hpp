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

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace edgenas {

/// Order is the architecture-weight column order.
enum class EntityOpKind { Sum = 0, Mean = 1, Max = 2, EntitySkip = 3, Zero = 4 };
enum class EdgeOpKind { Concat = 0, GRU = 1, FiLM = 2, EdgeSkip = 3, Zero = 4 };

inline constexpr std::size_t kNumOps = 5;
inline constexpr std::array<EntityOpKind, kNumOps> kEntityOps = {
    EntityOpKind::Sum, EntityOpKind::Mean, EntityOpKind::Max, EntityOpKind::EntitySkip,
    EntityOpKind::Zero};
inline constexpr std::array<EdgeOpKind, kNumOps> kEdgeOps = {
    EdgeOpKind::Concat, EdgeOpKind::GRU, EdgeOpKind::FiLM, EdgeOpKind::EdgeSkip,
    EdgeOpKind::Zero};

std::string_view name(EntityOpKind kind);
std::string_view name(EdgeOpKind kind);
/// Throws ParseError for unknown names.
EntityOpKind parse_entity_op(std::string_view text);
EdgeOpKind parse_edge_op(std::string_view text);

/// Number of candidate DAG edges (i, j), 0 <= i < j <= num_nodes.
constexpr std::size_t num_pairs(std::size_t num_nodes) {
    return num_nodes * (num_nodes + 1) / 2;
}
/// Row of DAG edge (i, j) in the per-cell architecture-weight matrix.
constexpr std::size_t pair_index(std::size_t src, std::size_t dst) {
    return dst * (dst - 1) / 2 + src;
}

struct EntityChoice {
    std::size_t src = 0;
    std::size_t dst = 0;
    EntityOpKind op = EntityOpKind::Sum;
    bool operator==(const EntityChoice&) const = default;
};

struct EdgeChoice {
    std::size_t src = 0;
    std::size_t dst = 0;
    EdgeOpKind op = EdgeOpKind::Concat;
    bool operator==(const EdgeChoice&) const = default;
};

struct CellGenotype {
    std::vector<EntityChoice> entity;
    std::vector<EdgeChoice> edge;

    /// Highest destination index, i.e. the DAG node count N.
    std::size_t num_nodes() const;
    bool operator==(const CellGenotype&) const = default;
};

/// Discrete architecture: per cell, the kept DAG edges with their operation.
struct Genotype {
    std::vector<CellGenotype> cells;
    std::size_t d_v = 0;
    std::size_t d_e = 0;

    std::size_t num_nodes() const { return cells.empty() ? 0 : cells.front().num_nodes(); }

    /// Throws ConfigError unless every non-input node of every DAG has 1 or 2
    /// incoming edges from lower indices, no op is Zero and all cells share N.
    void validate() const;
    bool operator==(const Genotype&) const = default;
};

/// {"cells":[{"entity":[[src,dst,"Sum"],...],"edge":[[src,dst,"GRU"],...]}],"d_v":..,"d_e":..}
std::string genotype_to_json(const Genotype& g);
/// Parses and validates; throws ParseError / ConfigError.
Genotype genotype_from_json(std::string_view text);
void save_genotype(const std::filesystem::path& path, const Genotype& g);
Genotype load_genotype(const std::filesystem::path& path);

}  // namespace edgenas
