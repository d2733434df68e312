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

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "edgenas/autodiff.hpp"
#include "edgenas/error.hpp"
#include "support.hpp"

using namespace edgenas;
using edgenas::testing::gradcheck;
using edgenas::testing::max_abs_diff;

namespace {

Tensor T(std::initializer_list<std::initializer_list<double>> rows) { return Tensor(Matrix(rows)); }

// tanh(1/2) evaluated with 30-digit arithmetic (mpmath), rounded to double.
constexpr double kTanhHalf = 0.46211715726000975850;

}  // namespace

TEST_CASE("elementwise examples") {
    CHECK(max_abs_diff(mul(T({{2, 3}}), T({{0, 1}})).value(), Matrix{{0, 3}}) == 0.0);
    CHECK(sigmoid(T({{0}}))(0, 0) == 0.5);
    CHECK(tanh(T({{0.5}}))(0, 0) == doctest::Approx(kTanhHalf).epsilon(1e-15));
    CHECK(relu(T({{-1, 0, 2}})).value() == Matrix{{0, 0, 2}});
    CHECK(add(T({{1, 2}, {3, 4}}), T({{10, 20}})).value() == Matrix{{11, 22}, {13, 24}});
    CHECK(sub(T({{1}}), T({{3}}))(0, 0) == -2.0);
    CHECK(affine(T({{2}}), -1.0, 1.0)(0, 0) == -1.0);
    CHECK_THROWS_AS(add(T({{1, 2}}), T({{1, 2, 3}})), ShapeError);
}

TEST_CASE("matmul examples") {
    const Tensor m = T({{1, 2}, {3, 4}});
    CHECK(matmul(Tensor(Matrix::identity(2)), m).value() == m.value());
    CHECK(matmul(T({{1, 2}}), T({{3}, {4}}))(0, 0) == 11.0);
    CHECK(matmul(T({{0, 0}}), T({{3}, {4}}))(0, 0) == 0.0);
    CHECK_THROWS_AS(matmul(T({{1, 2}}), T({{1, 2}})), ShapeError);
}

TEST_CASE("concat and slice") {
    CHECK(concat_cols(T({{1}}), T({{2}})).value() == Matrix{{1, 2}});
    const Tensor b = T({{5}, {6}});
    CHECK(concat_cols(Tensor(Matrix(2, 0)), b).value() == b.value());
    CHECK(concat_cols(T({{1, 2}, {3, 4}}), b).value() == Matrix{{1, 2, 5}, {3, 4, 6}});
    CHECK(slice_cols(T({{1, 2, 3}}), 1, 3).value() == Matrix{{2, 3}});
    CHECK_THROWS_AS(concat_cols(T({{1}}), T({{1}, {2}})), ShapeError);
}

TEST_CASE("gather rows") {
    const std::vector<std::size_t> idx{2, 0};
    CHECK(gather_rows(T({{1}, {2}, {5}}), idx).value() == Matrix{{5}, {1}});
    const Tensor x = T({{1, 2}, {3, 4}});
    const std::vector<std::size_t> id{0, 1};
    CHECK(gather_rows(x, id).value() == x.value());

    Tensor seven(Matrix{{7}}, true);
    const std::vector<std::size_t> dup{0, 0, 0};
    Tape tape;
    {
        Tape::Scope scope(tape);
        const Tensor g = gather_rows(seven, dup);
        CHECK(g.value() == Matrix{{7}, {7}, {7}});
        tape.backward(sum_all(g));
    }
    CHECK(seven.grad()(0, 0) == 3.0);
    CHECK(gradcheck([&] { return sum_all(mul(gather_rows(seven, dup), gather_rows(seven, dup))); },
                    {seven}) < 1e-6);
    const std::vector<std::size_t> bad{3};
    CHECK_THROWS_AS(gather_rows(seven, bad), IndexError);
}

TEST_CASE("segment aggregation") {
    const Tensor v = T({{1}, {2}, {5}});
    const std::vector<std::size_t> segs{0, 0, 1};
    CHECK(segment_aggregate(v, segs, 2, SegmentMode::Sum).value() == Matrix{{3}, {5}});
    CHECK(segment_aggregate(v, segs, 2, SegmentMode::Mean).value() == Matrix{{1.5}, {5}});
    CHECK(segment_aggregate(v, segs, 2, SegmentMode::Max).value() == Matrix{{2}, {5}});

    const Tensor w = T({{-3, 4}, {-1, -2}});
    const std::vector<std::size_t> zeros{0, 0};
    for (SegmentMode mode : {SegmentMode::Sum, SegmentMode::Mean, SegmentMode::Max}) {
        const Matrix out = segment_aggregate(w, zeros, 2, mode).value();
        CHECK(out(1, 0) == 0.0);
        CHECK(out(1, 1) == 0.0);
        const std::vector<std::size_t> one{0};
        CHECK(segment_aggregate(T({{4}}), one, 1, mode)(0, 0) == 4.0);
    }
    const std::vector<std::size_t> bad{0, 2, 0};
    CHECK_THROWS_AS(segment_aggregate(v, bad, 2, SegmentMode::Sum), IndexError);
}

TEST_CASE("segment aggregation matches the loop oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = rng.below(9);
        const std::size_t cols = 1 + rng.below(4);
        const std::size_t segs = 1 + rng.below(5);
        const Matrix vals = edgenas::testing::random_matrix(rows, cols, rng);
        std::vector<std::size_t> seg(rows);
        for (auto& s : seg) {
            s = rng.below(segs);
        }
        for (SegmentMode mode : {SegmentMode::Sum, SegmentMode::Mean, SegmentMode::Max}) {
            const Matrix got = segment_aggregate(Tensor(vals), seg, segs, mode).value();
            CHECK(max_abs_diff(got, edgenas::testing::brute_segment(vals, seg, segs, mode)) <=
                  1e-12);
        }
    }
}

TEST_CASE("softmax rows") {
    CHECK(softmax_rows(T({{0, 0}})).value() == Matrix{{0.5, 0.5}});
    const Matrix s = softmax_rows(T({{std::log(3.0), 0}})).value();
    CHECK(s(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(s(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
    for (double c : {-50.0, 0.0, 3.5, 700.0}) {
        const Matrix u = softmax_rows(T({{c, c, c, c}})).value();
        for (double x : u.values()) {
            CHECK(x == 0.25);
        }
    }
}

TEST_CASE("batch norm") {
    BatchNormState bn(1);
    const Matrix y = batch_norm(T({{-1}, {1}}), bn, true).value();
    // biased batch variance is 1; normalization divides by sqrt(1 + eps)
    CHECK(y(0, 0) == doctest::Approx(-1.0 / std::sqrt(1.0 + 1e-5)).epsilon(1e-14));
    CHECK(y(1, 0) == doctest::Approx(1.0 / std::sqrt(1.0 + 1e-5)).epsilon(1e-14));
    // running stats: mean 0.9*0 + 0.1*0, var 0.9*1 + 0.1*2 (unbiased)
    CHECK(bn.running_mean(0, 0) == doctest::Approx(0.0));
    CHECK(bn.running_var(0, 0) == doctest::Approx(1.1).epsilon(1e-14));

    BatchNormState c(2);
    const Matrix z = batch_norm(T({{3, 1}, {3, 2}, {3, 3}}), c, true).value();
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(z(r, 0) == doctest::Approx(0.0));
    }
    BatchNormState e(2);
    const Tensor x = T({{0.3, -2}, {4, 5}});
    const Matrix ident = batch_norm(x, e, false).value();
    CHECK(max_abs_diff(ident, x.value()) < 1e-5 * 5);
}

TEST_CASE("backward basics") {
    Tensor w(Matrix{{3}}, true);
    Tensor unused(Matrix{{1, 2}}, true);
    Tape tape;
    {
        Tape::Scope scope(tape);
        tape.backward(sum_all(mul(w, w)));
    }
    CHECK(w.grad()(0, 0) == 6.0);
    CHECK(unused.grad() == Matrix(1, 2));

    // no tape active: nothing is recorded
    const Tensor y = mul(w, w);
    CHECK(Tape::active() == nullptr);
    CHECK(y(0, 0) == 9.0);
}

TEST_CASE("cross entropy and mean absolute error") {
    const std::vector<int> labels{0, 1};
    const Tensor ce = cross_entropy(T({{0, 0}, {0, 0}}), labels);
    CHECK(ce(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const Tensor sat = cross_entropy(T({{50, -50}, {-50, 50}}), labels);
    CHECK(sat(0, 0) < 1e-40);
    const std::vector<double> targets{0, 2};
    CHECK(mean_abs_error(T({{1}, {2}}), targets)(0, 0) == 0.5);
    const std::vector<int> bad{0, 2};
    CHECK_THROWS(cross_entropy(T({{0, 0}, {0, 0}}), bad));
}

TEST_CASE("validation mode flags non-finite values") {
    set_validation(true);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(mul(T({{inf}}), T({{0}})), NumericError);
    set_validation(false);
    CHECK_NOTHROW(mul(T({{inf}}), T({{0}})));
}

TEST_CASE("finite-difference gradient suite") {
    for (const auto& e : edgenas::testing::gradient_suite(3)) {
        INFO(e.name);
        CHECK(e.error < 1e-4);
    }
}
