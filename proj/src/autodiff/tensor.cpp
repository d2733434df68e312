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
#include <atomic>

#include "edgenas/autodiff.hpp"
#include "edgenas/error.hpp"

namespace edgenas {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw ShapeError("ragged matrix literal");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

std::string shape_string(const Matrix& m) {
    return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

Matrix& detail::Node::grad_buffer() {
    if (grad.empty() && !value.empty()) {
        grad = Matrix(value.rows(), value.cols());
    }
    return grad;
}

Tensor::Tensor(Matrix value, bool requires_grad)
    : node_(std::make_shared<detail::Node>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
    return Tensor(Matrix(rows, cols), requires_grad);
}

Tensor Tensor::constant(std::size_t rows, std::size_t cols, double value) {
    return Tensor(Matrix(rows, cols, value));
}

const Matrix& Tensor::grad() const { return node_->grad_buffer(); }

void Tensor::zero_grad() {
    if (!node_->grad.empty()) {
        node_->grad.fill(0.0);
    }
}

Tensor Tensor::clone() const { return Tensor(node_->value, node_->requires_grad); }

namespace {

thread_local Tape* g_active_tape = nullptr;
std::atomic<bool> g_validation{false};

}  // namespace

void Tape::record(const Tensor& output, BackwardFn backward) {
    entries_.push_back(Entry{output.node(), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
    if (loss.rows() != 1 || loss.cols() != 1) {
        throw ShapeError("backward() needs a 1x1 loss, got " + shape_string(loss.value()));
    }
    for (auto& entry : entries_) {
        entry.output->grad_buffer().fill(0.0);
    }
    loss.node()->grad_buffer()(0, 0) = 1.0;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        it->backward();
    }
}

Tape* Tape::active() { return g_active_tape; }

Tape::Scope::Scope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

Tape::Scope::~Scope() { g_active_tape = previous_; }

void set_validation(bool enabled) { g_validation.store(enabled, std::memory_order_relaxed); }

bool validation_enabled() { return g_validation.load(std::memory_order_relaxed); }

}  // namespace edgenas
