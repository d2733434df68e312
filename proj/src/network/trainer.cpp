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
#include <numeric>

#include "edgenas/error.hpp"
#include "edgenas/optim.hpp"
#include "edgenas/trainer.hpp"

namespace edgenas {

PlateauScheduler::PlateauScheduler(double lr, std::size_t patience, double floor,
                                   std::size_t max_halvings)
    : lr_(lr),
      patience_(patience),
      floor_(floor),
      max_halvings_(max_halvings),
      best_(std::numeric_limits<double>::infinity()) {}

PlateauScheduler::Action PlateauScheduler::step(double val_loss) {
    if (val_loss < best_) {
        best_ = val_loss;
        stagnant_ = 0;
        halvings_without_improvement_ = 0;
        return Action::None;
    }
    if (++stagnant_ < patience_) {
        return Action::None;
    }
    stagnant_ = 0;
    if (halvings_without_improvement_ >= max_halvings_) {
        return Action::Stop;
    }
    lr_ = std::max(lr_ * 0.5, floor_);
    ++halvings_without_improvement_;
    return Action::Halved;
}

void TrainConfig::validate() const {
    if (max_epochs == 0 || batch_size == 0 || patience == 0) {
        throw ConfigError("max_epochs, batch_size and patience must be positive");
    }
    if (!(lr > 0.0) || !(lr_floor > 0.0) || weight_decay < 0.0) {
        throw ConfigError("learning rates must be positive and weight decay non-negative");
    }
}

void require_finite(double value, const std::string& what) {
    if (!std::isfinite(value)) {
        throw NumericError(what + " is not finite");
    }
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size,
                                                   Rng* shuffle_rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle_rng != nullptr) {
        shuffle_rng->shuffle(order);
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t begin = 0; begin < n; begin += batch_size) {
        const std::size_t end = std::min(n, begin + batch_size);
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

std::vector<Matrix> snapshot(Network& net) {
    ParamCollector pc = net.weights();
    std::vector<Matrix> out;
    for (const ParamRef& p : pc.params) {
        out.push_back(p.tensor.value());
    }
    for (const BufferRef& b : pc.buffers) {
        out.push_back(*b.matrix);
    }
    return out;
}

void restore(Network& net, const std::vector<Matrix>& state) {
    ParamCollector pc = net.weights();
    if (state.size() != pc.params.size() + pc.buffers.size()) {
        throw ShapeError("snapshot does not match the network");
    }
    std::size_t k = 0;
    for (ParamRef& p : pc.params) {
        p.tensor.mutable_value() = state[k++];
    }
    for (BufferRef& b : pc.buffers) {
        *b.matrix = state[k++];
    }
}

EvalResult evaluate(Network& net, const Dataset& data, std::size_t batch_size) {
    const TaskSpec& task = net.config().task;
    MetricAccumulator metric(task);
    double loss_sum = 0.0;
    std::size_t targets = 0;
    for (const auto& idx : make_batches(data.size(), batch_size, nullptr)) {
        const GraphBatch batch = make_batch(data, idx);
        const std::size_t n = num_targets(batch, task);
        if (n == 0) {
            continue;
        }
        const Tensor pred = net.forward(batch, false);
        const Tensor loss = task_loss(pred, batch, task);
        loss_sum += loss(0, 0) * static_cast<double>(n);
        targets += n;
        metric.add(pred.value(), batch);
    }
    EvalResult r;
    r.targets = targets;
    r.loss = targets == 0 ? 0.0 : loss_sum / static_cast<double>(targets);
    r.metric = metric.value();
    require_finite(r.loss, "evaluation loss");
    return r;
}

TrainResult train(Network& net, const Dataset& train_data, const Dataset& val_data,
                  const Dataset& test_data, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
    config.validate();
    if (train_data.empty() || val_data.empty()) {
        throw DataError("training needs non-empty train and validation splits");
    }
    const TaskSpec& task = net.config().task;
    check_labels(train_data, task);
    check_labels(val_data, task);
    check_labels(test_data, task);

    ParamCollector pc = net.weights();
    Adam adam(pc.params, AdamConfig{config.lr, 0.9, 0.999, 1e-8, config.weight_decay});
    PlateauScheduler sched(config.lr, config.patience, config.lr_floor, config.max_halvings);
    Rng rng(config.seed);
    Rng shuffle_rng = rng.fork(1);
    Rng dropout_rng = rng.fork(2);

    TrainResult result;
    result.best_val_loss = std::numeric_limits<double>::infinity();
    std::vector<Matrix> best_state = snapshot(net);

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const double lr = sched.lr();
        double loss_sum = 0.0;
        std::size_t targets = 0;
        for (const auto& idx : make_batches(train_data.size(), config.batch_size, &shuffle_rng)) {
            const GraphBatch batch = make_batch(train_data, idx);
            const std::size_t n = num_targets(batch, task);
            if (n == 0) {
                continue;
            }
            Tape tape;
            Tape::Scope scope(tape);
            const Tensor pred = net.forward(batch, true, &dropout_rng);
            const Tensor loss = task_loss(pred, batch, task);
            require_finite(loss(0, 0), "training loss at epoch " + std::to_string(epoch));
            adam.zero_grad();
            tape.backward(loss);
            adam.step();
            loss_sum += loss(0, 0) * static_cast<double>(n);
            targets += n;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = lr;
        rec.train_loss = targets == 0 ? 0.0 : loss_sum / static_cast<double>(targets);
        const EvalResult val = evaluate(net, val_data, config.batch_size);
        rec.val_loss = val.loss;
        rec.val_metric = val.metric;
        rec.test_metric =
            test_data.empty() ? 0.0 : evaluate(net, test_data, config.batch_size).metric;
        result.epochs.push_back(rec);

        if (val.loss < result.best_val_loss) {
            result.best_val_loss = val.loss;
            result.best_val_metric = val.metric;
            result.best_epoch = epoch;
            result.test_metric = rec.test_metric;
            best_state = snapshot(net);
        }
        if (on_epoch) {
            on_epoch(rec);
        }
        const auto action = sched.step(val.loss);
        adam.set_lr(sched.lr());
        if (action == PlateauScheduler::Action::Stop) {
            break;
        }
    }
    restore(net, best_state);
    return result;
}

}  // namespace edgenas
