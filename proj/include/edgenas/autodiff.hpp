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

// Define-by-run reverse-mode differentiation over dense row-major float64
// matrices.
//
// A Tensor is a shared handle to a value (and, once needed, a gradient
// buffer). Operations executed while a Tape is active (see Tape::Scope) and
// touching at least one requires_grad input are appended to that tape; the
// tape is rebuilt for every forward pass. Without an active tape operations
// are plain numeric evaluations.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace edgenas {

/// Plain dense matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    void fill(double value);
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool operator==(const Matrix& other) const = default;

    static Matrix identity(std::size_t n);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::string shape_string(const Matrix& m);

namespace detail {
struct Node {
    Matrix value;
    Matrix grad;  // empty until first accumulation
    bool requires_grad = false;

    Matrix& grad_buffer();
};
}  // namespace detail

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Matrix value, bool requires_grad = false);

    static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
    static Tensor constant(std::size_t rows, std::size_t cols, double value);

    bool defined() const { return node_ != nullptr; }
    std::size_t rows() const { return node_->value.rows(); }
    std::size_t cols() const { return node_->value.cols(); }
    double operator()(std::size_t r, std::size_t c) const { return node_->value(r, c); }

    const Matrix& value() const { return node_->value; }
    /// Direct write access for optimizers and initializers; not recorded on any tape.
    Matrix& mutable_value() { return node_->value; }

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool flag) { node_->requires_grad = flag; }

    bool has_grad() const { return !node_->grad.empty(); }
    /// Gradient buffer; all zeros (same shape as value) if nothing was accumulated yet.
    const Matrix& grad() const;
    Matrix& mutable_grad() { return node_->grad_buffer(); }
    void zero_grad();

    /// Deep copy of the value, detached from any tape, same requires_grad flag.
    Tensor clone() const;

    bool same_node(const Tensor& other) const { return node_ == other.node_; }
    const std::shared_ptr<detail::Node>& node() const { return node_; }

private:
    std::shared_ptr<detail::Node> node_;
};

/// Ordered record of differentiable operations.
class Tape {
public:
    using BackwardFn = std::function<void()>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Appends an operation. Called by the op implementations.
    void record(const Tensor& output, BackwardFn backward);

    /// Populates gradients of every requires_grad tensor reachable from loss.
    /// Leaf gradients accumulate across calls; intermediate gradients are reset.
    void backward(const Tensor& loss);

    std::size_t size() const { return entries_.size(); }
    void clear() { entries_.clear(); }

    /// Currently recording tape of this thread, or nullptr.
    static Tape* active();

    /// Makes a tape the recording tape of this thread for the scope's lifetime.
    class Scope {
    public:
        explicit Scope(Tape& tape);
        ~Scope();
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;

    private:
        Tape* previous_;
    };

private:
    struct Entry {
        std::shared_ptr<detail::Node> output;
        BackwardFn backward;
    };
    std::vector<Entry> entries_;
};

/// When on, every op checks its output for NaN/Inf and throws NumericError.
void set_validation(bool enabled);
bool validation_enabled();

enum class ElementwiseMode { Add, Sub, Mul, Relu, Sigmoid, Tanh };
enum class SegmentMode { Sum, Mean, Max };

/// Binary modes take b of identical shape or a 1 x cols row broadcast over a.
Tensor elementwise(const Tensor& a, const Tensor* b, ElementwiseMode mode);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);

/// scale * a + shift, elementwise with scalar constants.
Tensor affine(const Tensor& a, double scale, double shift);

/// a scaled by the single entry w(row, col); differentiable in both.
Tensor scale_by_entry(const Tensor& a, const Tensor& w, std::size_t row, std::size_t col);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end);

Tensor gather_rows(const Tensor& src, std::span<const std::size_t> index);
Tensor segment_aggregate(const Tensor& values, std::span<const std::size_t> segment_of_row,
                         std::size_t num_segments, SegmentMode mode);

Tensor softmax_rows(const Tensor& a);

/// Sum / mean of every element, as a 1 x 1 tensor.
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

/// Mean softmax cross-entropy of logits rows against integer class labels.
Tensor cross_entropy(const Tensor& logits, std::span<const int> labels);
/// Mean |pred - target| over all rows; pred must be n x 1.
Tensor mean_abs_error(const Tensor& pred, std::span<const double> targets);

/// Inverted dropout with a caller-provided keep mask (1 = keep).
Tensor dropout(const Tensor& a, const std::vector<unsigned char>& keep, double rate);

/// Per-feature batch normalization parameters and running statistics.
struct BatchNormState {
    explicit BatchNormState(std::size_t width = 0);

    Tensor scale;  // 1 x width, learnable
    Tensor shift;  // 1 x width, learnable
    Matrix running_mean;
    Matrix running_var;
    double momentum = 0.1;
    double eps = 1e-5;

    std::size_t width() const { return running_mean.cols(); }
    BatchNormState clone() const;
};

/// Training mode normalizes with batch statistics and updates the running
/// ones (unbiased variance); eval mode uses the running statistics.
Tensor batch_norm(const Tensor& x, BatchNormState& state, bool training);

}  // namespace edgenas
