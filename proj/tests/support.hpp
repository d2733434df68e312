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

// Shared by the unit tests and the acceptance binary: a central-difference
// gradient checker, loop-based reference implementations, and random
// instance builders.

#include <functional>
#include <string>
#include <vector>

#include "edgenas/autodiff.hpp"
#include "edgenas/graph.hpp"
#include "edgenas/network.hpp"
#include "edgenas/rng.hpp"
#include "edgenas/searchspace.hpp"

namespace edgenas::testing {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -2.0,
                     double hi = 2.0);

/// Same, but every entry has magnitude >= margin (keeps ReLU/abs kinks away
/// from finite-difference probes).
Matrix random_matrix_away_from_zero(std::size_t rows, std::size_t cols, Rng& rng,
                                    double margin = 0.05);

/// |a - b| / max(|a|, |b|, 1e-3).
double rel_error(double a, double b);

/// Builds the scalar loss from the current leaf values.
using LossFn = std::function<Tensor()>;

struct GradcheckStats {
    std::size_t entries = 0;
    std::size_t kinks = 0;  // entries left unchecked, see gradcheck()
};

/// Max relative error between the tape gradient of every leaf entry and a
/// central difference. Each entry's estimate at step h must agree with the
/// one at h/2 to 1e-5 relative; otherwise a ReLU/max kink lies within the
/// probe window and h shrinks tenfold once. Entries that
/// never settle are counted in stats->kinks and excluded.
double gradcheck(const LossFn& loss, const std::vector<Tensor>& leaves, double h = 1e-5,
                 GradcheckStats* stats = nullptr);

/// sum(out .* probe): a generic scalar readout with a fixed random probe.
Tensor probe_loss(const Tensor& out, const Matrix& probe);

struct NamedError {
    std::string name;
    double error = 0.0;
    GradcheckStats stats;
};

/// Gradient checks of every differentiable primitive, each op kind, a
/// supernet cell and end-to-end networks of all three task levels
/// (5-node graph, d = 4, eval-mode normalization).
std::vector<NamedError> gradient_suite(std::uint64_t seed);

/// Random graph, closed under reversal, with the requested feature widths.
Graph random_graph(std::size_t num_nodes, double edge_prob, std::size_t d_in_v,
                   std::size_t d_in_e, Rng& rng);

// ------------------------------------------------------------ loop oracles

Matrix brute_matmul(const Matrix& a, const Matrix& b);
Matrix brute_segment(const Matrix& values, const std::vector<std::size_t>& seg,
                     std::size_t num_segments, SegmentMode mode);
/// y = x W + b for one row.
std::vector<double> brute_linear(const Linear& lin, const std::vector<double>& x);

/// Single-edge updates with the wrapper bypassed.
std::vector<double> brute_concat_edge(const Linear& mlp, const std::vector<double>& e,
                                      const std::vector<double>& vs,
                                      const std::vector<double>& vt);
std::vector<double> brute_gru_edge(const GruParams& p, const std::vector<double>& e,
                                   const std::vector<double>& vs, const std::vector<double>& vt);
std::vector<double> brute_film_edge(const FilmTransform& film, const std::vector<double>& e,
                                    const std::vector<double>& vs,
                                    const std::vector<double>& vt);

/// Entity op with the wrapper bypassed: per-node aggregation of FiLM messages.
Matrix brute_entity_op(const FilmTransform& film, const Matrix& V, const Matrix& E,
                       const Topology& topo, SegmentMode mode);

/// Per graph: [mean of node rows || mean of edge rows] (zero rows when empty).
Matrix brute_graph_pool(const Matrix& V, const Matrix& E, const GraphBatch& batch);

std::vector<double> row_of(const Matrix& m, std::size_t r);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace edgenas::testing
