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

#include "edgenas/error.hpp"
#include "edgenas/optim.hpp"
#include "edgenas/search.hpp"
#include "edgenas/trainer.hpp"

namespace edgenas {

void SearchConfig::validate() const {
    if (batch_size == 0) {
        throw ConfigError("search batch_size must be positive");
    }
    if (!(w_lr > 0.0) || alpha_lr < 0.0 || w_momentum < 0.0 || w_weight_decay < 0.0 ||
        alpha_weight_decay < 0.0) {
        throw ConfigError("search learning rates, momentum and weight decays are out of range");
    }
    if (!(alpha_beta1 >= 0.0 && alpha_beta1 < 1.0 && alpha_beta2 >= 0.0 && alpha_beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    network.validate();
}

SearchResult search(const Dataset& train_data, const Dataset& val_data,
                    const SearchConfig& config,
                    const std::function<void(const SearchEpoch&)>& on_epoch) {
    config.validate();
    if (train_data.empty() || val_data.empty()) {
        throw DataError("search needs non-empty training and validation splits");
    }
    const TaskSpec& task = config.network.task;
    check_labels(train_data, task);
    check_labels(val_data, task);

    const Graph& first = train_data.front();
    Network net = Network::supernet(config.network, first.node_features.cols(),
                                    first.edge_features.cols(), config.seed);
    ParamCollector weights = net.weights();
    SgdMomentum w_opt(weights.params, config.w_momentum, config.w_weight_decay);
    Adam a_opt(as_params(net.alphas().tensors(), "alpha"),
               AdamConfig{config.alpha_lr, config.alpha_beta1, config.alpha_beta2, 1e-8,
                          config.alpha_weight_decay});

    Rng rng(config.seed);
    Rng train_shuffle = rng.fork(11);
    Rng val_shuffle = rng.fork(12);
    Rng dropout_rng = rng.fork(13);

    auto step_loss = [&](const GraphBatch& batch) {
        const Tensor pred = net.forward(batch, true, &dropout_rng);
        return task_loss(pred, batch, task);
    };

    SearchResult result;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = cosine_lr(epoch - 1, config.epochs, config.w_lr);
        const auto train_batches =
            make_batches(train_data.size(), config.batch_size, &train_shuffle);
        const auto val_batches = make_batches(val_data.size(), config.batch_size, &val_shuffle);
        double loss_sum = 0.0;
        std::size_t targets = 0;
        for (std::size_t b = 0; b < train_batches.size(); ++b) {
            {
                const GraphBatch vb = make_batch(val_data, val_batches[b % val_batches.size()]);
                Tape tape;
                Tape::Scope scope(tape);
                const Tensor loss = step_loss(vb);
                require_finite(loss(0, 0), "search validation loss at epoch " +
                                               std::to_string(epoch));
                a_opt.zero_grad();
                tape.backward(loss);
                a_opt.step();
            }
            const GraphBatch tb = make_batch(train_data, train_batches[b]);
            Tape tape;
            Tape::Scope scope(tape);
            const Tensor loss = step_loss(tb);
            require_finite(loss(0, 0),
                           "search training loss at epoch " + std::to_string(epoch));
            w_opt.zero_grad();
            tape.backward(loss);
            w_opt.step(lr);
            const std::size_t n = num_targets(tb, task);
            loss_sum += loss(0, 0) * static_cast<double>(n);
            targets += n;
        }

        SearchEpoch rec;
        rec.epoch = epoch;
        rec.lr = lr;
        rec.train_loss = targets == 0 ? 0.0 : loss_sum / static_cast<double>(targets);
        const EvalResult val = evaluate(net, val_data, config.batch_size);
        rec.val_loss = val.loss;
        rec.metric = val.metric;
        rec.genotype = derive(net.alphas(), config.network.d_v, config.network.d_e);
        if (on_epoch) {
            on_epoch(rec);
        }
        result.epochs.push_back(std::move(rec));
    }
    result.alphas = net.alphas().clone();
    result.genotype = derive(net.alphas(), config.network.d_v, config.network.d_e);
    return result;
}

}  // namespace edgenas
