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

#include "support.hpp"

#include <algorithm>
#include <cmath>

namespace edgenas::testing {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo, double hi) {
    Matrix m(rows, cols);
    for (double& v : m.values()) {
        v = rng.uniform(lo, hi);
    }
    return m;
}

Matrix random_matrix_away_from_zero(std::size_t rows, std::size_t cols, Rng& rng,
                                    double margin) {
    Matrix m(rows, cols);
    for (double& v : m.values()) {
        const double mag = rng.uniform(margin, 2.0);
        v = rng.bernoulli(0.5) ? mag : -mag;
    }
    return m;
}

double rel_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

double gradcheck(const LossFn& loss, const std::vector<Tensor>& leaves, double h,
                 GradcheckStats* stats) {
    std::vector<Tensor> ls = leaves;
    for (Tensor& t : ls) {
        t.zero_grad();
    }
    {
        Tape tape;
        Tape::Scope scope(tape);
        const Tensor l = loss();
        tape.backward(l);
    }
    std::vector<Matrix> analytic;
    for (const Tensor& t : ls) {
        analytic.push_back(t.grad());
    }
    GradcheckStats local;
    double worst = 0.0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto& values = ls[i].mutable_value().values();
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double orig = values[k];
            auto central = [&](double step) {
                values[k] = orig + step;
                const double fp = loss()(0, 0);
                values[k] = orig - step;
                const double fm = loss()(0, 0);
                values[k] = orig;
                return (fp - fm) / (2.0 * step);
            };
            ++local.entries;
            double step = h;
            bool settled = false;
            double numeric = 0.0;
            for (int attempt = 0; attempt < 2 && !settled; ++attempt, step /= 10.0) {
                const double coarse = central(step);
                numeric = central(step / 2.0);
                settled = rel_error(coarse, numeric) <= 1e-5;
            }
            if (!settled) {
                ++local.kinks;
                continue;
            }
            worst = std::max(worst, rel_error(analytic[i].values()[k], numeric));
        }
    }
    if (stats != nullptr) {
        stats->entries += local.entries;
        stats->kinks += local.kinks;
    }
    return worst;
}

Tensor probe_loss(const Tensor& out, const Matrix& probe) {
    return sum_all(mul(out, Tensor(probe)));
}

Graph random_graph(std::size_t num_nodes, double edge_prob, std::size_t d_in_v,
                   std::size_t d_in_e, Rng& rng) {
    Graph g;
    g.num_nodes = num_nodes;
    for (std::size_t u = 0; u < num_nodes; ++u) {
        for (std::size_t v = u + 1; v < num_nodes; ++v) {
            if (rng.bernoulli(edge_prob)) {
                g.edges.emplace_back(u, v);
                g.edges.emplace_back(v, u);
            }
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.node_features = random_matrix(num_nodes, d_in_v, rng);
    g.edge_features = random_matrix(g.num_edges(), d_in_e, rng);
    return g;
}

namespace {

std::vector<Tensor> params_of(ParamCollector& pc) {
    std::vector<Tensor> out;
    for (const ParamRef& p : pc.params) {
        out.push_back(p.tensor);
    }
    return out;
}

/// Non-trivial running statistics so eval-mode normalization is not the
/// identity. Biases are moved off their zero init: a node without incoming
/// messages would otherwise sit exactly on the ReLU kink.
void randomize_buffers(ParamCollector& pc, Rng& rng) {
    for (BufferRef& b : pc.buffers) {
        const bool is_var = b.name.find("running_var") != std::string::npos;
        for (double& v : b.matrix->values()) {
            v = is_var ? rng.uniform(0.5, 1.5) : rng.uniform(-0.5, 0.5);
        }
    }
    for (ParamRef& p : pc.params) {
        if (p.name.size() >= 4 && p.name.compare(p.name.size() - 4, 4, "bias") == 0) {
            p.tensor.mutable_value() =
                random_matrix_away_from_zero(p.tensor.rows(), p.tensor.cols(), rng, 0.1);
        }
    }
}

Tensor leaf(Matrix m) { return Tensor(std::move(m), true); }

}  // namespace

std::vector<NamedError> gradient_suite(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<NamedError> out;
    auto check = [&](const std::string& name, const LossFn& f, const std::vector<Tensor>& ls) {
        NamedError e{name, 0.0, {}};
        e.error = gradcheck(f, ls, 1e-5, &e.stats);
        out.push_back(e);
    };

    {
        const std::size_t r = 1 + rng.below(8);
        const std::size_t c = 1 + rng.below(8);
        Tensor a = leaf(random_matrix(r, c, rng));
        Tensor b = leaf(random_matrix(r, c, rng));
        Tensor row = leaf(random_matrix(1, c, rng));
        const Matrix probe = random_matrix(r, c, rng);
        check("add", [&] { return probe_loss(add(a, b), probe); }, {a, b});
        check("add_broadcast", [&] { return probe_loss(add(a, row), probe); }, {a, row});
        check("sub", [&] { return probe_loss(sub(a, b), probe); }, {a, b});
        check("mul", [&] { return probe_loss(mul(a, b), probe); }, {a, b});
        check("mul_broadcast", [&] { return probe_loss(mul(a, row), probe); }, {a, row});
        Tensor away = leaf(random_matrix_away_from_zero(r, c, rng));
        check("relu", [&] { return probe_loss(relu(away), probe); }, {away});
        check("sigmoid", [&] { return probe_loss(sigmoid(a), probe); }, {a});
        check("tanh", [&] { return probe_loss(tanh(a), probe); }, {a});
        check("affine", [&] { return probe_loss(affine(a, -1.5, 0.25), probe); }, {a});
        Tensor w = leaf(random_matrix(2, 3, rng));
        check("scale_by_entry", [&] { return probe_loss(scale_by_entry(a, w, 1, 2), probe); },
              {a, w});
        check("sum_all", [&] { return sum_all(mul(a, a)); }, {a});
        check("mean_all", [&] { return mean_all(mul(a, b)); }, {a, b});
        check("softmax_rows", [&] { return probe_loss(softmax_rows(a), probe); }, {a});
        std::vector<unsigned char> keep(r * c);
        for (auto& k : keep) {
            k = rng.bernoulli(0.7) ? 1 : 0;
        }
        check("dropout", [&] { return probe_loss(dropout(a, keep, 0.3), probe); }, {a});
    }
    {
        const std::size_t m = 1 + rng.below(8);
        const std::size_t k = 1 + rng.below(8);
        const std::size_t n = 1 + rng.below(8);
        Tensor a = leaf(random_matrix(m, k, rng));
        Tensor b = leaf(random_matrix(k, n, rng));
        Tensor c = leaf(random_matrix(m, n, rng));
        const Matrix probe = random_matrix(m, n, rng);
        check("matmul", [&] { return probe_loss(matmul(a, b), probe); }, {a, b});
        const Matrix probe_cat = random_matrix(m, k + n, rng);
        check("concat_cols", [&] { return probe_loss(concat_cols(a, c), probe_cat); }, {a, c});
        const Matrix probe3 = random_matrix(m, k + n + k, rng);
        check("concat_cols_many",
              [&] {
                  const std::vector<Tensor> parts{a, c, a};
                  return probe_loss(concat_cols(parts), probe3);
              },
              {a, c});
        const Matrix probe_slice = random_matrix(m, 1, rng);
        check("slice_cols", [&] { return probe_loss(slice_cols(a, k - 1, k), probe_slice); },
              {a});
    }
    {
        const std::size_t rows = 2 + rng.below(7);
        const std::size_t cols = 1 + rng.below(8);
        Tensor src = leaf(random_matrix(rows, cols, rng));
        std::vector<std::size_t> index;
        for (std::size_t i = 0; i < rows + 3; ++i) {
            index.push_back(rng.below(rows));
        }
        const Matrix probe = random_matrix(index.size(), cols, rng);
        check("gather_rows", [&] { return probe_loss(gather_rows(src, index), probe); }, {src});
        const std::size_t segs = 1 + rng.below(4) + 1;  // last segment may stay empty
        std::vector<std::size_t> seg;
        for (std::size_t i = 0; i < rows; ++i) {
            seg.push_back(rng.below(segs - 1));
        }
        const Matrix sprobe = random_matrix(segs, cols, rng);
        check("segment_sum",
              [&] { return probe_loss(segment_aggregate(src, seg, segs, SegmentMode::Sum), sprobe); },
              {src});
        check("segment_mean",
              [&] { return probe_loss(segment_aggregate(src, seg, segs, SegmentMode::Mean), sprobe); },
              {src});
        check("segment_max",
              [&] { return probe_loss(segment_aggregate(src, seg, segs, SegmentMode::Max), sprobe); },
              {src});
    }
    {
        const std::size_t n = 2 + rng.below(7);
        const std::size_t classes = 2 + rng.below(4);
        Tensor logits = leaf(random_matrix(n, classes, rng));
        std::vector<int> labels;
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(static_cast<int>(rng.below(classes)));
        }
        check("cross_entropy", [&] { return cross_entropy(logits, labels); }, {logits});
        Tensor pred = leaf(random_matrix(n, 1, rng));
        std::vector<double> targets;
        for (std::size_t i = 0; i < n; ++i) {
            targets.push_back(pred(i, 0) + (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.1, 1.0));
        }
        check("mean_abs_error", [&] { return mean_abs_error(pred, targets); }, {pred});
    }
    {
        const std::size_t rows = 3 + rng.below(6);
        const std::size_t cols = 1 + rng.below(8);
        Tensor x = leaf(random_matrix(rows, cols, rng));
        BatchNormState bn(cols);
        bn.scale.mutable_value() = random_matrix(1, cols, rng, 0.5, 1.5);
        bn.shift.mutable_value() = random_matrix(1, cols, rng);
        const Matrix probe = random_matrix(rows, cols, rng);
        check("batch_norm_train", [&] { return probe_loss(batch_norm(x, bn, true), probe); },
              {x, bn.scale, bn.shift});
        bn.running_mean = random_matrix(1, cols, rng, -0.5, 0.5);
        bn.running_var = random_matrix(1, cols, rng, 0.5, 1.5);
        check("batch_norm_eval", [&] { return probe_loss(batch_norm(x, bn, false), probe); },
              {x, bn.scale, bn.shift});
    }

    // Operations of the search space on a 5-node graph, d = 4, eval-mode wrappers.
    const std::size_t d = 4;
    Graph g = random_graph(5, 0.6, d, d, rng);
    const Topology topo = topology_of(g);
    Tensor V = leaf(random_matrix(g.num_nodes, d, rng));
    Tensor E = leaf(random_matrix(g.num_edges(), d, rng));
    const Matrix vprobe = random_matrix(g.num_nodes, d, rng);
    const Matrix eprobe = random_matrix(g.num_edges(), d, rng);
    for (EntityOpKind kind : kEntityOps) {
        if (kind == EntityOpKind::Zero) {
            continue;
        }
        EntityOp op(kind, d, d, rng);
        ParamCollector pc;
        op.collect("op", pc);
        randomize_buffers(pc, rng);
        std::vector<Tensor> ls = params_of(pc);
        ls.push_back(V);
        ls.push_back(E);
        check("entity_" + std::string(name(kind)),
              [&] { return probe_loss(op.forward(V, E, topo, false), vprobe); }, ls);
    }
    for (EdgeOpKind kind : kEdgeOps) {
        if (kind == EdgeOpKind::Zero) {
            continue;
        }
        EdgeOp op(kind, d, d, rng);
        ParamCollector pc;
        op.collect("op", pc);
        randomize_buffers(pc, rng);
        std::vector<Tensor> ls = params_of(pc);
        ls.push_back(V);
        ls.push_back(E);
        check("edge_" + std::string(name(kind)),
              [&] { return probe_loss(op.forward(E, V, topo, false), eprobe); }, ls);
    }
    {
        Cell cell = Cell::supernet(2, d, d, rng);
        ParamCollector pc;
        cell.collect("cell", pc);
        randomize_buffers(pc, rng);
        Tensor ea = leaf(random_matrix(num_pairs(2), kNumOps, rng));
        Tensor ed = leaf(random_matrix(num_pairs(2), kNumOps, rng));
        std::vector<Tensor> ls = params_of(pc);
        ls.push_back(ea);
        ls.push_back(ed);
        ls.push_back(V);
        ls.push_back(E);
        check("supernet_cell",
              [&] {
                  const Tensor we = softmax_rows(ea);
                  const Tensor wd = softmax_rows(ed);
                  const Cell::Output o = cell.forward(V, E, topo, false, &we, &wd);
                  return add(probe_loss(o.V, vprobe), probe_loss(o.E, eprobe));
              },
              ls);
    }

    // End-to-end networks.
    {
        Graph ng = g;
        ng.node_features = random_matrix(ng.num_nodes, 3, rng);
        ng.edge_features = Matrix(ng.num_edges(), 0);
        for (std::size_t i = 0; i < ng.num_nodes; ++i) {
            ng.node_labels.push_back(static_cast<int>(rng.below(2)));
        }
        const GraphBatch batch = make_batch(std::vector<Graph>{ng});
        NetworkConfig cfg;
        cfg.num_cells = 2;
        cfg.num_nodes = 2;
        cfg.d_v = d;
        cfg.d_e = d;
        cfg.task = {TaskLevel::Node, 2, LossKind::CrossEntropy, MetricKind::Accuracy};
        Network net = Network::supernet(cfg, 3, 0, rng.next());
        ParamCollector pc = net.weights();
        randomize_buffers(pc, rng);
        std::vector<Tensor> ls = params_of(pc);
        for (Tensor& a : net.alphas().tensors()) {
            a.mutable_value() = random_matrix(a.rows(), a.cols(), rng);
            ls.push_back(a);
        }
        check("network_node_supernet",
              [&] { return task_loss(net.forward(batch, false), batch, cfg.task); }, ls);
    }
    {
        Graph eg = g;
        eg.edge_features = random_matrix(eg.num_edges(), 1, rng);
        for (std::size_t k = 0; k < eg.num_edges(); ++k) {
            eg.edge_labels.push_back(static_cast<int>(rng.below(2)));
        }
        const GraphBatch batch = make_batch(std::vector<Graph>{eg});
        Genotype geno;
        geno.d_v = d;
        geno.d_e = d;
        geno.cells.push_back({{{0, 1, EntityOpKind::Max}, {0, 2, EntityOpKind::Mean},
                               {1, 2, EntityOpKind::EntitySkip}},
                              {{0, 1, EdgeOpKind::GRU}, {0, 2, EdgeOpKind::FiLM},
                               {1, 2, EdgeOpKind::Concat}}});
        geno.cells.push_back({{{0, 1, EntityOpKind::Sum}, {1, 2, EntityOpKind::Max}},
                              {{0, 1, EdgeOpKind::EdgeSkip}, {1, 2, EdgeOpKind::GRU}}});
        NetworkConfig cfg;
        cfg.task = {TaskLevel::Edge, 2, LossKind::CrossEntropy, MetricKind::BinaryF1};
        Network net = Network::discrete(cfg, geno, d, 1, rng.next());
        ParamCollector pc = net.weights();
        randomize_buffers(pc, rng);
        check("network_edge",
              [&] { return task_loss(net.forward(batch, false), batch, net.config().task); },
              params_of(pc));

        Graph gg = g;
        gg.graph_label = 2.5;
        Graph gg2 = random_graph(4, 0.7, d, d, rng);
        gg2.graph_label = -1.0;
        const GraphBatch gb = make_batch(std::vector<Graph>{gg, gg2});
        NetworkConfig rcfg;
        rcfg.task = {TaskLevel::Graph, 1, LossKind::AbsoluteError, MetricKind::Mae};
        Network rnet = Network::discrete(rcfg, geno, d, d, rng.next());
        ParamCollector rpc = rnet.weights();
        randomize_buffers(rpc, rng);
        check("network_graph",
              [&] { return probe_loss(rnet.forward(gb, false), Matrix{{0.7}, {-1.3}}); },
              params_of(rpc));
    }
    return out;
}

// ------------------------------------------------------------ loop oracles

Matrix brute_matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) {
                s += a(i, p) * b(p, j);
            }
            c(i, j) = s;
        }
    }
    return c;
}

Matrix brute_segment(const Matrix& values, const std::vector<std::size_t>& seg,
                     std::size_t num_segments, SegmentMode mode) {
    Matrix out(num_segments, values.cols());
    for (std::size_t s = 0; s < num_segments; ++s) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            double acc = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < values.rows(); ++r) {
                if (seg[r] != s) {
                    continue;
                }
                if (mode == SegmentMode::Max) {
                    acc = count == 0 ? values(r, c) : std::max(acc, values(r, c));
                } else {
                    acc += values(r, c);
                }
                ++count;
            }
            if (mode == SegmentMode::Mean && count > 0) {
                acc /= static_cast<double>(count);
            }
            out(s, c) = acc;
        }
    }
    return out;
}

std::vector<double> brute_linear(const Linear& lin, const std::vector<double>& x) {
    const Matrix& w = lin.weight.value();
    std::vector<double> y(w.cols(), 0.0);
    for (std::size_t j = 0; j < w.cols(); ++j) {
        double s = lin.has_bias() ? lin.bias(0, j) : 0.0;
        for (std::size_t i = 0; i < w.rows(); ++i) {
            s += x[i] * w(i, j);
        }
        y[j] = s;
    }
    return y;
}

namespace {

std::vector<double> cat(std::initializer_list<const std::vector<double>*> parts) {
    std::vector<double> out;
    for (const auto* p : parts) {
        out.insert(out.end(), p->begin(), p->end());
    }
    return out;
}

double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::vector<double> brute_concat_edge(const Linear& mlp, const std::vector<double>& e,
                                      const std::vector<double>& vs,
                                      const std::vector<double>& vt) {
    return brute_linear(mlp, cat({&e, &vs, &vt}));
}

std::vector<double> brute_gru_edge(const GruParams& p, const std::vector<double>& e,
                                   const std::vector<double>& vs,
                                   const std::vector<double>& vt) {
    std::vector<double> x = brute_linear(p.px, cat({&vs, &vt}));
    for (double& v : x) {
        v = std::max(v, 0.0);
    }
    const auto ux_r = brute_linear(p.ur, x);
    const auto we_r = brute_linear(p.wr, e);
    const auto ux_z = brute_linear(p.uz, x);
    const auto we_z = brute_linear(p.wz, e);
    std::vector<double> r(e.size());
    std::vector<double> z(e.size());
    std::vector<double> re(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        r[i] = sigmoid_ref(ux_r[i] + we_r[i]);
        z[i] = sigmoid_ref(ux_z[i] + we_z[i]);
        re[i] = r[i] * e[i];
    }
    const auto ux_h = brute_linear(p.uh, x);
    const auto w_re = brute_linear(p.wh, re);
    std::vector<double> out(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double h = std::tanh(ux_h[i] + w_re[i]);
        out[i] = (1.0 - z[i]) * e[i] + z[i] * h;
    }
    return out;
}

std::vector<double> brute_film_edge(const FilmTransform& film, const std::vector<double>& e,
                                    const std::vector<double>& vs,
                                    const std::vector<double>& vt) {
    const auto gb = brute_linear(film.g, cat({&vs, &vt}));
    const std::size_t d = film.width();
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        out[i] = gb[i] * e[i] + gb[d + i];
    }
    return out;
}

Matrix brute_entity_op(const FilmTransform& film, const Matrix& V, const Matrix& E,
                       const Topology& topo, SegmentMode mode) {
    const std::size_t d = V.cols();
    Matrix messages(topo.num_edges(), d);
    for (std::size_t k = 0; k < topo.num_edges(); ++k) {
        const auto gb = brute_linear(film.g, row_of(E, k));
        for (std::size_t i = 0; i < d; ++i) {
            messages(k, i) = gb[i] * V(topo.src[k], i) + gb[d + i];
        }
    }
    return brute_segment(messages, topo.dst, topo.num_nodes, mode);
}

Matrix brute_graph_pool(const Matrix& V, const Matrix& E, const GraphBatch& batch) {
    const std::size_t dv = V.cols();
    const std::size_t de = E.cols();
    Matrix out(batch.num_graphs, dv + de);
    for (std::size_t g = 0; g < batch.num_graphs; ++g) {
        const std::size_t n0 = batch.node_offsets[g];
        const std::size_t n1 = batch.node_offsets[g + 1];
        const std::size_t e0 = batch.edge_offsets[g];
        const std::size_t e1 = batch.edge_offsets[g + 1];
        for (std::size_t c = 0; c < dv; ++c) {
            double s = 0.0;
            for (std::size_t r = n0; r < n1; ++r) {
                s += V(r, c);
            }
            out(g, c) = n1 > n0 ? s / static_cast<double>(n1 - n0) : 0.0;
        }
        for (std::size_t c = 0; c < de; ++c) {
            double s = 0.0;
            for (std::size_t r = e0; r < e1; ++r) {
                s += E(r, c);
            }
            out(g, dv + c) = e1 > e0 ? s / static_cast<double>(e1 - e0) : 0.0;
        }
    }
    return out;
}

std::vector<double> row_of(const Matrix& m, std::size_t r) {
    const auto row = m.row(r);
    return {row.begin(), row.end()};
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
    }
    return worst;
}

}  // namespace edgenas::testing
