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

#include <cstdint>
#include <functional>
#include <vector>

#include "edgenas/graph.hpp"
#include "edgenas/network.hpp"

namespace edgenas {

/// Halves the learning rate after `patience` epochs without a new best
/// validation loss, never below `floor`. Requests a stop once
/// `max_halvings` halvings in a row brought no improvement.
class PlateauScheduler {
public:
    enum class Action { None, Halved, Stop };

    PlateauScheduler(double lr, std::size_t patience = 10, double floor = 1e-5,
                     std::size_t max_halvings = 2);

    Action step(double val_loss);

    double lr() const { return lr_; }
    double best() const { return best_; }
    std::size_t stagnant_epochs() const { return stagnant_; }

private:
    double lr_;
    std::size_t patience_;
    double floor_;
    std::size_t max_halvings_;
    double best_;
    std::size_t stagnant_ = 0;
    std::size_t halvings_without_improvement_ = 0;
};

struct TrainConfig {
    std::size_t max_epochs = 100;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    std::size_t patience = 10;
    double lr_floor = 1e-5;
    std::size_t max_halvings = 2;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_metric = 0.0;
    double test_metric = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    double best_val_metric = 0.0;
    double test_metric = 0.0;  // at the best epoch
};

struct EvalResult {
    double loss = 0.0;
    double metric = 0.0;
    std::size_t targets = 0;
};

/// Eval-mode pass over a split; loss is the target-weighted mean.
EvalResult evaluate(Network& net, const Dataset& data, std::size_t batch_size = 64);

/// Retrains from the current weights with Adam and the plateau schedule,
/// then restores the parameters of the best validation epoch. The test split
/// may be empty. Throws NumericError on a non-finite loss.
TrainResult train(Network& net, const Dataset& train_data, const Dataset& val_data,
                  const Dataset& test_data, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Value copies of every weight and buffer, in weights() order.
std::vector<Matrix> snapshot(Network& net);
void restore(Network& net, const std::vector<Matrix>& state);

/// Contiguous mini-batches of a permutation of [0, n).
std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size,
                                                   Rng* shuffle_rng);

/// Throws NumericError if value is not finite.
void require_finite(double value, const std::string& what);

}  // namespace edgenas
