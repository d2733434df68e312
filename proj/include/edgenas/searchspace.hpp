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

// The edge-featured cell.
//
// A cell holds two DAGs over N+1 nodes. Node 0 is the cell input (V0, E0);
// node j of each DAG sums one operation per predecessor i < j:
//
//   V_j = sum_i entity_op_ij(V_i, E_i)      E_j = sum_i edge_op_ij(E_i, V_i)
//
// Entity ops modulate per-edge messages gamma * V[src] + beta, with
// (gamma, beta) computed from E_i, and aggregate them at the destination.
// Edge ops update E_i[s,t] from [V_i[s] || V_i[t]]. The cell output
// concatenates nodes 1..N, projects back to the hidden width and adds the
// cell input.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgenas/autodiff.hpp"
#include "edgenas/genotype.hpp"
#include "edgenas/graph.hpp"
#include "edgenas/layers.hpp"
#include "edgenas/rng.hpp"

namespace edgenas {

class EntityOp {
public:
    EntityOp(EntityOpKind kind, std::size_t d_v, std::size_t d_e, Rng& rng);

    EntityOpKind kind() const { return kind_; }

    /// V: |V| x d_v, E: |E| x d_e. Returns |V| x d_v.
    Tensor forward(const Tensor& V, const Tensor& E, const Topology& topo, bool training);

    bool has_params() const { return film_.has_value(); }
    FilmTransform& film() { return *film_; }
    FcReluBn& wrapper() { return *wrapper_; }

    EntityOp clone() const;
    void collect(const std::string& prefix, ParamCollector& out);

private:
    EntityOp() = default;

    EntityOpKind kind_ = EntityOpKind::Zero;
    std::size_t d_v_ = 0;
    std::size_t d_e_ = 0;
    std::optional<FilmTransform> film_;
    std::optional<FcReluBn> wrapper_;
};

struct GruParams {
    Linear px;  // 2 d_v -> d_e, no bias
    Linear ur, wr, uz, wz, uh, wh;  // d_e -> d_e; the U maps carry the gate biases

    GruParams clone() const;
};

class EdgeOp {
public:
    EdgeOp(EdgeOpKind kind, std::size_t d_v, std::size_t d_e, Rng& rng);

    EdgeOpKind kind() const { return kind_; }

    /// E: |E| x d_e, V: |V| x d_v. Returns |E| x d_e.
    Tensor forward(const Tensor& E, const Tensor& V, const Topology& topo, bool training);

    bool has_params() const { return wrapper_.has_value(); }
    Linear& concat_mlp() { return *mlp_; }
    GruParams& gru() { return *gru_; }
    FilmTransform& film() { return *film_; }
    FcReluBn& wrapper() { return *wrapper_; }

    EdgeOp clone() const;
    void collect(const std::string& prefix, ParamCollector& out);

private:
    EdgeOp() = default;

    EdgeOpKind kind_ = EdgeOpKind::Zero;
    std::size_t d_v_ = 0;
    std::size_t d_e_ = 0;
    std::optional<Linear> mlp_;
    std::optional<GruParams> gru_;
    std::optional<FilmTransform> film_;
    std::optional<FcReluBn> wrapper_;
};

/// Softmax-weighted sum of candidate outputs: sum_k weights(row, k) * outputs[k].
/// An undefined tensor in outputs marks a Zero candidate and is skipped.
Tensor mixed_combine(std::span<const Tensor> outputs, const Tensor& weights, std::size_t row);

/// Pre-embedding edge input: the provided edge features, or an |E| x 1
/// column of ones when the data has none.
Matrix e0_init(const Graph& g);

enum class CellMode { Supernet, Discrete };

class Cell {
public:
    /// Every candidate op on every DAG edge.
    static Cell supernet(std::size_t num_nodes, std::size_t d_v, std::size_t d_e, Rng& rng);
    /// Only the genotype's chosen ops, freshly initialized.
    static Cell discrete(const CellGenotype& genotype, std::size_t d_v, std::size_t d_e,
                         Rng& rng);
    /// Discrete cell sharing copies of the supernet's chosen-op weights.
    static Cell discretize(const Cell& supernet, const CellGenotype& genotype);

    struct Output {
        Tensor V;
        Tensor E;
    };

    /// Supernet mode requires entity_weights / edge_weights (num_pairs x 5,
    /// rows already softmax-normalized); discrete mode ignores them.
    /// dropout_rate > 0 with training = true applies inverted dropout to the
    /// projected outputs before the residual.
    Output forward(const Tensor& V0, const Tensor& E0, const Topology& topo, bool training,
                   const Tensor* entity_weights = nullptr, const Tensor* edge_weights = nullptr,
                   double dropout_rate = 0.0, Rng* dropout_rng = nullptr);

    CellMode mode() const { return mode_; }
    std::size_t num_nodes() const { return num_nodes_; }
    std::size_t d_v() const { return d_v_; }
    std::size_t d_e() const { return d_e_; }
    const std::optional<CellGenotype>& genotype() const { return genotype_; }

    /// Candidates of DAG edge (src, dst): 5 ops in kind order (supernet), at
    /// most one op (discrete).
    std::vector<EntityOp>& entity_candidates(std::size_t src, std::size_t dst) {
        return entity_ops_[pair_index(src, dst)];
    }
    std::vector<EdgeOp>& edge_candidates(std::size_t src, std::size_t dst) {
        return edge_ops_[pair_index(src, dst)];
    }
    Linear& entity_projection() { return entity_proj_; }
    Linear& edge_projection() { return edge_proj_; }

    Cell clone() const;
    void collect(const std::string& prefix, ParamCollector& out);

private:
    Cell() = default;

    CellMode mode_ = CellMode::Discrete;
    std::size_t num_nodes_ = 0;
    std::size_t d_v_ = 0;
    std::size_t d_e_ = 0;
    std::optional<CellGenotype> genotype_;
    std::vector<std::vector<EntityOp>> entity_ops_;  // indexed by pair_index
    std::vector<std::vector<EdgeOp>> edge_ops_;
    Linear entity_proj_;
    Linear edge_proj_;
};

}  // namespace edgenas
