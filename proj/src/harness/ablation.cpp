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

#include "edgenas/error.hpp"
#include "edgenas/harness.hpp"

namespace edgenas {

AblationKind parse_ablation(const std::string& kind, const std::string& op, std::uint64_t seed) {
    AblationKind a;
    a.seed = seed;
    try {
        if (kind == "replace-entity") {
            a.type = AblationKind::Type::ReplaceEntity;
            a.entity_op = parse_entity_op(op);
            if (a.entity_op == EntityOpKind::Zero) {
                throw ConfigError("Zero cannot replace entity operations");
            }
        } else if (kind == "replace-edge") {
            a.type = AblationKind::Type::ReplaceEdge;
            a.edge_op = parse_edge_op(op);
            if (a.edge_op == EdgeOpKind::Zero) {
                throw ConfigError("Zero cannot replace edge operations");
            }
        } else if (kind == "sequentialize") {
            a.type = AblationKind::Type::Sequentialize;
        } else if (kind == "random") {
            a.type = AblationKind::Type::RandomSample;
        } else {
            throw ConfigError("unknown ablation '" + kind +
                              "' (replace-entity, replace-edge, sequentialize, random)");
        }
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    return a;
}

Genotype ablate(const Genotype& genotype, const AblationKind& kind) {
    genotype.validate();
    Genotype out = genotype;
    switch (kind.type) {
        case AblationKind::Type::ReplaceEntity:
            if (kind.entity_op == EntityOpKind::Zero) {
                throw ConfigError("Zero cannot replace entity operations");
            }
            for (auto& cell : out.cells) {
                for (auto& c : cell.entity) {
                    c.op = kind.entity_op;
                }
            }
            break;
        case AblationKind::Type::ReplaceEdge:
            if (kind.edge_op == EdgeOpKind::Zero) {
                throw ConfigError("Zero cannot replace edge operations");
            }
            for (auto& cell : out.cells) {
                for (auto& c : cell.edge) {
                    c.op = kind.edge_op;
                }
            }
            break;
        case AblationKind::Type::Sequentialize: {
            const std::size_t n = genotype.num_nodes();
            for (auto& cell : out.cells) {
                std::vector<EdgeChoice> seq;
                for (std::size_t j = 1; j <= n; ++j) {
                    EdgeOpKind op = EdgeOpKind::Concat;
                    for (const auto& c : cell.edge) {
                        if (c.src == j - 1 && c.dst == j) {
                            op = c.op;
                        }
                    }
                    seq.push_back({j - 1, j, op});
                }
                cell.edge = std::move(seq);
            }
            break;
        }
        case AblationKind::Type::RandomSample: {
            Rng rng(kind.seed);
            out = random_genotype(genotype.cells.size(), genotype.num_nodes(), genotype.d_v,
                                  genotype.d_e, rng);
            break;
        }
    }
    out.validate();
    return out;
}

namespace {

std::vector<std::size_t> sample_predecessors(std::size_t j, Rng& rng) {
    const std::size_t k = j == 1 ? 1 : 1 + static_cast<std::size_t>(rng.below(2));
    std::vector<std::size_t> pool(j);
    for (std::size_t i = 0; i < j; ++i) {
        pool[i] = i;
    }
    rng.shuffle(pool);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

Genotype random_genotype(std::size_t num_cells, std::size_t num_nodes, std::size_t d_v,
                         std::size_t d_e, Rng& rng) {
    Genotype g;
    g.d_v = d_v;
    g.d_e = d_e;
    for (std::size_t c = 0; c < num_cells; ++c) {
        CellGenotype cell;
        for (std::size_t j = 1; j <= num_nodes; ++j) {
            for (std::size_t i : sample_predecessors(j, rng)) {
                cell.entity.push_back({i, j, kEntityOps[rng.below(kNumOps - 1)]});
            }
        }
        for (std::size_t j = 1; j <= num_nodes; ++j) {
            for (std::size_t i : sample_predecessors(j, rng)) {
                cell.edge.push_back({i, j, kEdgeOps[rng.below(kNumOps - 1)]});
            }
        }
        g.cells.push_back(std::move(cell));
    }
    g.validate();
    return g;
}

Genotype baseline_genotype(std::size_t num_cells, std::size_t num_nodes, std::size_t d_v,
                           std::size_t d_e) {
    Genotype g;
    g.d_v = d_v;
    g.d_e = d_e;
    for (std::size_t c = 0; c < num_cells; ++c) {
        CellGenotype cell;
        for (std::size_t j = 1; j <= num_nodes; ++j) {
            for (std::size_t i = j >= 2 ? j - 2 : 0; i < j; ++i) {
                cell.entity.push_back({i, j, EntityOpKind::Sum});
                cell.edge.push_back({i, j, EdgeOpKind::Concat});
            }
        }
        g.cells.push_back(std::move(cell));
    }
    g.validate();
    return g;
}

}  // namespace edgenas
