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
#include <limits>
#include <memory>

#include "edgenas/autodiff.hpp"
#include "edgenas/error.hpp"
#include "edgenas/kernels.hpp"

namespace edgenas {

namespace {

using NodePtr = std::shared_ptr<detail::Node>;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

bool wants_grad(std::initializer_list<const Tensor*> inputs) {
    if (Tape::active() == nullptr) {
        return false;
    }
    return std::any_of(inputs.begin(), inputs.end(),
                       [](const Tensor* t) { return t != nullptr && t->requires_grad(); });
}

void validate(const Matrix& m, const char* op) {
    if (!validation_enabled()) {
        return;
    }
    for (double v : m.values()) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string("non-finite value produced by ") + op);
        }
    }
}

// Wraps a computed value into a tensor and, if needed, records its backward rule.
template <typename Backward>
Tensor finish(Matrix value, bool record, const char* op, Backward&& backward_factory) {
    validate(value, op);
    Tensor out(std::move(value), record);
    if (record) {
        Tape::active()->record(out, backward_factory(out.node()));
    }
    return out;
}

// Accumulates g into the gradient of n, summing rows if n is a broadcast row.
void accumulate(const NodePtr& n, const Matrix& g) {
    if (!n->requires_grad) {
        return;
    }
    Matrix& dst = n->grad_buffer();
    const auto& k = kernels::active();
    if (dst.same_shape(g)) {
        k.axpy(1.0, g.data(), dst.data(), g.size());
        return;
    }
    // broadcast row
    for (std::size_t r = 0; r < g.rows(); ++r) {
        k.axpy(1.0, g.row(r).data(), dst.data(), g.cols());
    }
}

void check_binary(const Tensor& a, const Tensor& b, const char* op) {
    const bool same = a.value().same_shape(b.value());
    const bool row = b.rows() == 1 && b.cols() == a.cols();
    if (!same && !row) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.value()) + " vs " +
                         shape_string(b.value()));
    }
}

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Expands b to a's shape (copy) when it is a broadcast row.
const Matrix& expanded(const Matrix& a, const Matrix& b, Matrix& storage) {
    if (a.same_shape(b)) {
        return b;
    }
    storage = Matrix(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        std::copy(b.data(), b.data() + b.cols(), storage.row(r).data());
    }
    return storage;
}

}  // namespace

Tensor elementwise(const Tensor& a, const Tensor* b, ElementwiseMode mode) {
    switch (mode) {
        case ElementwiseMode::Add:
        case ElementwiseMode::Sub:
        case ElementwiseMode::Mul:
            if (b == nullptr) {
                throw ShapeError("binary elementwise mode needs a second operand");
            }
            break;
        default:
            break;
    }
    switch (mode) {
        case ElementwiseMode::Add:
            return add(a, *b);
        case ElementwiseMode::Sub:
            return sub(a, *b);
        case ElementwiseMode::Mul:
            return mul(a, *b);
        case ElementwiseMode::Relu:
            return relu(a);
        case ElementwiseMode::Sigmoid:
            return sigmoid(a);
        case ElementwiseMode::Tanh:
            return tanh(a);
    }
    throw ShapeError("unknown elementwise mode");
}

Tensor add(const Tensor& a, const Tensor& b) {
    check_binary(a, b, "add");
    Matrix storage;
    const Matrix& bv = expanded(a.value(), b.value(), storage);
    Matrix out = a.value();
    kernels::active().axpy(1.0, bv.data(), out.data(), out.size());
    return finish(std::move(out), wants_grad({&a, &b}), "add",
                  [an = a.node(), bn = b.node()](NodePtr o) {
                      return [an, bn, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          accumulate(an, g);
                          accumulate(bn, g);
                      };
                  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_binary(a, b, "sub");
    Matrix storage;
    const Matrix& bv = expanded(a.value(), b.value(), storage);
    Matrix out = a.value();
    kernels::active().axpy(-1.0, bv.data(), out.data(), out.size());
    return finish(std::move(out), wants_grad({&a, &b}), "sub",
                  [an = a.node(), bn = b.node()](NodePtr o) {
                      return [an, bn, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          accumulate(an, g);
                          if (bn->requires_grad) {
                              Matrix neg = g;
                              for (double& v : neg.values()) {
                                  v = -v;
                              }
                              accumulate(bn, neg);
                          }
                      };
                  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_binary(a, b, "mul");
    Matrix storage;
    const Matrix& bv = expanded(a.value(), b.value(), storage);
    Matrix out(a.rows(), a.cols());
    kernels::active().hadamard(a.value().data(), bv.data(), out.data(), out.size());
    return finish(std::move(out), wants_grad({&a, &b}), "mul",
                  [an = a.node(), bn = b.node()](NodePtr o) {
                      return [an, bn, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          const auto& k = kernels::active();
                          Matrix storage;
                          const Matrix& bval = expanded(an->value, bn->value, storage);
                          if (an->requires_grad) {
                              k.hadamard_acc(g.data(), bval.data(), an->grad_buffer().data(),
                                             g.size());
                          }
                          if (bn->requires_grad) {
                              Matrix gb(g.rows(), g.cols());
                              k.hadamard(g.data(), an->value.data(), gb.data(), g.size());
                              accumulate(bn, gb);
                          }
                      };
                  });
}

namespace {

template <typename Forward, typename Derivative>
Tensor unary(const Tensor& a, const char* op, Forward f, Derivative d) {
    Matrix out(a.rows(), a.cols());
    const auto& in = a.value().values();
    auto& dst = out.values();
    for (std::size_t i = 0; i < in.size(); ++i) {
        dst[i] = f(in[i]);
    }
    return finish(std::move(out), wants_grad({&a}), op, [an = a.node(), d](NodePtr o) {
        return [an, d, o = std::weak_ptr<detail::Node>(o)] {
            auto on = o.lock();
            const auto& g = on->grad.values();
            const auto& x = an->value.values();
            const auto& y = on->value.values();
            auto& dx = an->grad_buffer().values();
            for (std::size_t i = 0; i < g.size(); ++i) {
                dx[i] += g[i] * d(x[i], y[i]);
            }
        };
    });
}

}  // namespace

Tensor relu(const Tensor& a) {
    return unary(
        a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
        [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
    return unary(a, "sigmoid", stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
    return unary(
        a, "tanh", [](double x) { return std::tanh(x); },
        [](double, double y) { return 1.0 - y * y; });
}

Tensor affine(const Tensor& a, double scale, double shift) {
    return unary(
        a, "affine", [scale, shift](double x) { return scale * x + shift; },
        [scale](double, double) { return scale; });
}

Tensor scale_by_entry(const Tensor& a, const Tensor& w, std::size_t row, std::size_t col) {
    if (row >= w.rows() || col >= w.cols()) {
        throw IndexError("scale_by_entry: entry (" + std::to_string(row) + "," +
                         std::to_string(col) + ") outside " + shape_string(w.value()));
    }
    const double s = w(row, col);
    Matrix out(a.rows(), a.cols());
    const auto& in = a.value().values();
    for (std::size_t i = 0; i < in.size(); ++i) {
        out.values()[i] = s * in[i];
    }
    return finish(std::move(out), wants_grad({&a, &w}), "scale_by_entry",
                  [an = a.node(), wn = w.node(), row, col](NodePtr o) {
                      return [an, wn, row, col, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          if (an->requires_grad) {
                              kernels::active().axpy(wn->value(row, col), g.data(),
                                                     an->grad_buffer().data(), g.size());
                          }
                          if (wn->requires_grad) {
                              double dot = 0.0;
                              for (std::size_t i = 0; i < g.size(); ++i) {
                                  dot += g.values()[i] * an->value.values()[i];
                              }
                              wn->grad_buffer()(row, col) += dot;
                          }
                      };
                  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ " + shape_string(a.value()) + " * " +
                         shape_string(b.value()));
    }
    const std::size_t m = a.rows();
    const std::size_t k = a.cols();
    const std::size_t n = b.cols();
    Matrix out(m, n);
    kernels::active().gemm_nn(a.value().data(), b.value().data(), out.data(), m, k, n);
    return finish(std::move(out), wants_grad({&a, &b}), "matmul",
                  [an = a.node(), bn = b.node(), m, k, n](NodePtr o) {
                      return [an, bn, m, k, n, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          const auto& kt = kernels::active();
                          if (an->requires_grad) {
                              kt.gemm_nt(g.data(), bn->value.data(), an->grad_buffer().data(), m,
                                         n, k);
                          }
                          if (bn->requires_grad) {
                              kt.gemm_tn(an->value.data(), g.data(), bn->grad_buffer().data(), k,
                                         m, n);
                          }
                      };
                  });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    const Tensor parts[] = {a, b};
    return concat_cols(std::span<const Tensor>(parts));
}

Tensor concat_cols(std::span<const Tensor> parts) {
    if (parts.empty()) {
        throw ShapeError("concat_cols: no inputs");
    }
    const std::size_t rows = parts.front().rows();
    std::size_t cols = 0;
    for (const auto& p : parts) {
        if (p.rows() != rows) {
            throw ShapeError("concat_cols: row counts differ (" + std::to_string(rows) + " vs " +
                             std::to_string(p.rows()) + ")");
        }
        cols += p.cols();
    }
    Matrix out(rows, cols);
    std::size_t offset = 0;
    for (const auto& p : parts) {
        for (std::size_t r = 0; r < rows; ++r) {
            std::copy_n(p.value().row(r).data(), p.cols(), out.row(r).data() + offset);
        }
        offset += p.cols();
    }
    bool record = false;
    if (Tape::active() != nullptr) {
        record = std::any_of(parts.begin(), parts.end(),
                             [](const Tensor& t) { return t.requires_grad(); });
    }
    std::vector<NodePtr> nodes;
    nodes.reserve(parts.size());
    for (const auto& p : parts) {
        nodes.push_back(p.node());
    }
    return finish(std::move(out), record, "concat_cols", [nodes](NodePtr o) {
        return [nodes, o = std::weak_ptr<detail::Node>(o)] {
            const Matrix& g = o.lock()->grad;
            std::size_t offset = 0;
            for (const auto& n : nodes) {
                const std::size_t w = n->value.cols();
                if (n->requires_grad) {
                    Matrix& dst = n->grad_buffer();
                    for (std::size_t r = 0; r < g.rows(); ++r) {
                        kernels::active().axpy(1.0, g.row(r).data() + offset, dst.row(r).data(),
                                               w);
                    }
                }
                offset += w;
            }
        };
    });
}

Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
    if (begin > end || end > a.cols()) {
        throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," +
                         std::to_string(end) + ") outside " + shape_string(a.value()));
    }
    const std::size_t w = end - begin;
    Matrix out(a.rows(), w);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        std::copy_n(a.value().row(r).data() + begin, w, out.row(r).data());
    }
    return finish(std::move(out), wants_grad({&a}), "slice_cols",
                  [an = a.node(), begin, w](NodePtr o) {
                      return [an, begin, w, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          Matrix& dst = an->grad_buffer();
                          for (std::size_t r = 0; r < g.rows(); ++r) {
                              kernels::active().axpy(1.0, g.row(r).data(),
                                                     dst.row(r).data() + begin, w);
                          }
                      };
                  });
}

Tensor gather_rows(const Tensor& src, std::span<const std::size_t> index) {
    const std::size_t cols = src.cols();
    Matrix out(index.size(), cols);
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= src.rows()) {
            throw IndexError("gather_rows: index " + std::to_string(index[i]) +
                             " out of range for " + std::to_string(src.rows()) + " rows");
        }
        std::copy_n(src.value().row(index[i]).data(), cols, out.row(i).data());
    }
    std::vector<std::size_t> idx(index.begin(), index.end());
    return finish(std::move(out), wants_grad({&src}), "gather_rows",
                  [sn = src.node(), idx = std::move(idx)](NodePtr o) {
                      return [sn, idx, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          Matrix& dst = sn->grad_buffer();
                          const auto& k = kernels::active();
                          for (std::size_t i = 0; i < idx.size(); ++i) {
                              k.axpy(1.0, g.row(i).data(), dst.row(idx[i]).data(), g.cols());
                          }
                      };
                  });
}

Tensor segment_aggregate(const Tensor& values, std::span<const std::size_t> segment_of_row,
                         std::size_t num_segments, SegmentMode mode) {
    if (segment_of_row.size() != values.rows()) {
        throw ShapeError("segment_aggregate: " + std::to_string(segment_of_row.size()) +
                         " segment ids for " + std::to_string(values.rows()) + " rows");
    }
    for (std::size_t s : segment_of_row) {
        if (s >= num_segments) {
            throw IndexError("segment_aggregate: segment id " + std::to_string(s) +
                             " out of range for " + std::to_string(num_segments) + " segments");
        }
    }
    const std::size_t cols = values.cols();
    const Matrix& v = values.value();
    Matrix out(num_segments, cols);
    std::vector<std::size_t> counts(num_segments, 0);
    for (std::size_t s : segment_of_row) {
        ++counts[s];
    }
    std::vector<std::size_t> seg(segment_of_row.begin(), segment_of_row.end());

    if (mode == SegmentMode::Max) {
        // argmax(s, c): first row (in row order) attaining the maximum
        std::vector<std::size_t> argmax(num_segments * cols, kNone);
        for (std::size_t r = 0; r < v.rows(); ++r) {
            const std::size_t s = seg[r];
            for (std::size_t c = 0; c < cols; ++c) {
                std::size_t& best = argmax[s * cols + c];
                if (best == kNone || v(r, c) > out(s, c)) {
                    best = r;
                    out(s, c) = v(r, c);
                }
            }
        }
        return finish(std::move(out), wants_grad({&values}), "segment_aggregate(max)",
                      [vn = values.node(), argmax = std::move(argmax), cols](NodePtr o) {
                          return [vn, argmax, cols, o = std::weak_ptr<detail::Node>(o)] {
                              const Matrix& g = o.lock()->grad;
                              Matrix& dst = vn->grad_buffer();
                              for (std::size_t s = 0; s < g.rows(); ++s) {
                                  for (std::size_t c = 0; c < cols; ++c) {
                                      const std::size_t r = argmax[s * cols + c];
                                      if (r != kNone) {
                                          dst(r, c) += g(s, c);
                                      }
                                  }
                              }
                          };
                      });
    }

    const auto& k = kernels::active();
    for (std::size_t r = 0; r < v.rows(); ++r) {
        k.axpy(1.0, v.row(r).data(), out.row(seg[r]).data(), cols);
    }
    std::vector<double> factor(num_segments, 1.0);
    if (mode == SegmentMode::Mean) {
        for (std::size_t s = 0; s < num_segments; ++s) {
            if (counts[s] > 0) {
                factor[s] = 1.0 / static_cast<double>(counts[s]);
                for (double& x : out.row(s)) {
                    x *= factor[s];
                }
            }
        }
    }
    return finish(std::move(out), wants_grad({&values}),
                  mode == SegmentMode::Mean ? "segment_aggregate(mean)" : "segment_aggregate(sum)",
                  [vn = values.node(), seg = std::move(seg), factor = std::move(factor)](NodePtr o) {
                      return [vn, seg, factor, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          Matrix& dst = vn->grad_buffer();
                          const auto& k = kernels::active();
                          for (std::size_t r = 0; r < seg.size(); ++r) {
                              k.axpy(factor[seg[r]], g.row(seg[r]).data(), dst.row(r).data(),
                                     g.cols());
                          }
                      };
                  });
}

Tensor softmax_rows(const Tensor& a) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto in = a.value().row(r);
        auto dst = out.row(r);
        if (in.empty()) {
            continue;
        }
        const double mx = *std::max_element(in.begin(), in.end());
        double total = 0.0;
        for (std::size_t c = 0; c < in.size(); ++c) {
            dst[c] = std::exp(in[c] - mx);
            total += dst[c];
        }
        for (double& x : dst) {
            x /= total;
        }
    }
    return finish(std::move(out), wants_grad({&a}), "softmax_rows", [an = a.node()](NodePtr o) {
        return [an, o = std::weak_ptr<detail::Node>(o)] {
            auto on = o.lock();
            const Matrix& g = on->grad;
            const Matrix& y = on->value;
            Matrix& dst = an->grad_buffer();
            for (std::size_t r = 0; r < y.rows(); ++r) {
                double dot = 0.0;
                for (std::size_t c = 0; c < y.cols(); ++c) {
                    dot += g(r, c) * y(r, c);
                }
                for (std::size_t c = 0; c < y.cols(); ++c) {
                    dst(r, c) += y(r, c) * (g(r, c) - dot);
                }
            }
        };
    });
}

Tensor sum_all(const Tensor& a) {
    double total = 0.0;
    for (double x : a.value().values()) {
        total += x;
    }
    return finish(Matrix(1, 1, total), wants_grad({&a}), "sum_all", [an = a.node()](NodePtr o) {
        return [an, o = std::weak_ptr<detail::Node>(o)] {
            const double g = o.lock()->grad(0, 0);
            for (double& x : an->grad_buffer().values()) {
                x += g;
            }
        };
    });
}

Tensor mean_all(const Tensor& a) {
    const double n = static_cast<double>(a.value().size());
    if (n == 0.0) {
        return finish(Matrix(1, 1, 0.0), wants_grad({&a}), "mean_all",
                      [](NodePtr) { return [] {}; });
    }
    return affine(sum_all(a), 1.0 / n, 0.0);
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> labels) {
    if (labels.size() != logits.rows()) {
        throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(logits.rows()) + " rows");
    }
    const std::size_t n = logits.rows();
    const std::size_t c = logits.cols();
    Matrix prob(n, c);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= c) {
            throw IndexError("cross_entropy: label " + std::to_string(labels[r]) +
                             " outside [0," + std::to_string(c) + ")");
        }
        const auto row = logits.value().row(r);
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            prob(r, j) = std::exp(row[j] - mx);
            z += prob(r, j);
        }
        for (std::size_t j = 0; j < c; ++j) {
            prob(r, j) /= z;
        }
        total += -(row[static_cast<std::size_t>(labels[r])] - mx - std::log(z));
    }
    const double loss = n == 0 ? 0.0 : total / static_cast<double>(n);
    std::vector<int> lab(labels.begin(), labels.end());
    return finish(Matrix(1, 1, loss), wants_grad({&logits}), "cross_entropy",
                  [ln = logits.node(), prob = std::move(prob), lab = std::move(lab)](NodePtr o) {
                      return [ln, prob, lab, o = std::weak_ptr<detail::Node>(o)] {
                          const double g = o.lock()->grad(0, 0);
                          const double scale = g / static_cast<double>(lab.size());
                          Matrix& dst = ln->grad_buffer();
                          for (std::size_t r = 0; r < lab.size(); ++r) {
                              for (std::size_t j = 0; j < prob.cols(); ++j) {
                                  const double onehot =
                                      static_cast<std::size_t>(lab[r]) == j ? 1.0 : 0.0;
                                  dst(r, j) += scale * (prob(r, j) - onehot);
                              }
                          }
                      };
                  });
}

Tensor mean_abs_error(const Tensor& pred, std::span<const double> targets) {
    if (pred.cols() != 1 || pred.rows() != targets.size()) {
        throw ShapeError("mean_abs_error: predictions " + shape_string(pred.value()) + " vs " +
                         std::to_string(targets.size()) + " targets");
    }
    const std::size_t n = targets.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += std::abs(pred(i, 0) - targets[i]);
    }
    const double loss = n == 0 ? 0.0 : total / static_cast<double>(n);
    std::vector<double> tgt(targets.begin(), targets.end());
    return finish(Matrix(1, 1, loss), wants_grad({&pred}), "mean_abs_error",
                  [pn = pred.node(), tgt = std::move(tgt)](NodePtr o) {
                      return [pn, tgt, o = std::weak_ptr<detail::Node>(o)] {
                          const double g = o.lock()->grad(0, 0);
                          const double scale = g / static_cast<double>(tgt.size());
                          Matrix& dst = pn->grad_buffer();
                          for (std::size_t i = 0; i < tgt.size(); ++i) {
                              const double d = pn->value(i, 0) - tgt[i];
                              const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
                              dst(i, 0) += scale * sign;
                          }
                      };
                  });
}

Tensor dropout(const Tensor& a, const std::vector<unsigned char>& keep, double rate) {
    if (keep.size() != a.value().size()) {
        throw ShapeError("dropout: mask size does not match input");
    }
    const double scale = rate >= 1.0 ? 0.0 : 1.0 / (1.0 - rate);
    Matrix factor(a.rows(), a.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        factor.values()[i] = keep[i] ? scale : 0.0;
    }
    Matrix out(a.rows(), a.cols());
    kernels::active().hadamard(a.value().data(), factor.data(), out.data(), out.size());
    return finish(std::move(out), wants_grad({&a}), "dropout",
                  [an = a.node(), factor = std::move(factor)](NodePtr o) {
                      return [an, factor, o = std::weak_ptr<detail::Node>(o)] {
                          const Matrix& g = o.lock()->grad;
                          kernels::active().hadamard_acc(g.data(), factor.data(),
                                                         an->grad_buffer().data(), g.size());
                      };
                  });
}

}  // namespace edgenas
