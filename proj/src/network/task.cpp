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
#include <map>

#include "edgenas/error.hpp"
#include "edgenas/network.hpp"

namespace edgenas {

std::string_view name(TaskLevel v) {
    switch (v) {
        case TaskLevel::Node:
            return "node";
        case TaskLevel::Edge:
            return "edge";
        case TaskLevel::Graph:
            return "graph";
    }
    return "?";
}

std::string_view name(LossKind v) {
    return v == LossKind::CrossEntropy ? "cross_entropy" : "absolute_error";
}

std::string_view name(MetricKind v) {
    switch (v) {
        case MetricKind::Accuracy:
            return "accuracy";
        case MetricKind::BinaryF1:
            return "binary_f1";
        case MetricKind::Mae:
            return "mae";
    }
    return "?";
}

TaskLevel parse_task_level(std::string_view text) {
    for (TaskLevel v : {TaskLevel::Node, TaskLevel::Edge, TaskLevel::Graph}) {
        if (name(v) == text) {
            return v;
        }
    }
    throw ConfigError("unknown task level '" + std::string(text) + "'");
}

LossKind parse_loss_kind(std::string_view text) {
    for (LossKind v : {LossKind::CrossEntropy, LossKind::AbsoluteError}) {
        if (name(v) == text) {
            return v;
        }
    }
    throw ConfigError("unknown loss '" + std::string(text) + "'");
}

MetricKind parse_metric_kind(std::string_view text) {
    for (MetricKind v : {MetricKind::Accuracy, MetricKind::BinaryF1, MetricKind::Mae}) {
        if (name(v) == text) {
            return v;
        }
    }
    throw ConfigError("unknown metric '" + std::string(text) + "'");
}

void TaskSpec::validate() const {
    if (loss == LossKind::AbsoluteError) {
        if (num_classes != 1 || metric != MetricKind::Mae || level != TaskLevel::Graph) {
            throw ConfigError("regression tasks are graph-level with 1 output and the mae metric");
        }
        return;
    }
    if (num_classes < 2) {
        throw ConfigError("classification needs at least 2 classes");
    }
    if (metric == MetricKind::Mae) {
        throw ConfigError("the mae metric needs the absolute_error loss");
    }
    if (metric == MetricKind::BinaryF1 && (num_classes != 2 || level != TaskLevel::Edge)) {
        throw ConfigError("binary_f1 is defined for 2-class edge-level tasks");
    }
}

TaskSpec infer_task(const Dataset& data) {
    if (data.empty()) {
        throw DataError("cannot infer the task of an empty dataset");
    }
    const Graph& g = data.front();
    TaskSpec t;
    if (g.graph_label) {
        t = {TaskLevel::Graph, 1, LossKind::AbsoluteError, MetricKind::Mae};
    } else if (!g.edge_labels.empty()) {
        t = {TaskLevel::Edge, 2, LossKind::CrossEntropy, MetricKind::BinaryF1};
    } else if (!g.node_labels.empty()) {
        int max_label = 1;
        for (const Graph& h : data) {
            for (int y : h.node_labels) {
                max_label = std::max(max_label, y);
            }
        }
        t = {TaskLevel::Node, static_cast<std::size_t>(max_label) + 1, LossKind::CrossEntropy,
             MetricKind::Accuracy};
    } else {
        throw DataError("dataset carries no labels");
    }
    return t;
}

void check_labels(const Dataset& data, const TaskSpec& task) {
    const int classes = static_cast<int>(task.num_classes);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Graph& g = data[i];
        const std::string where = "graph " + std::to_string(i) + ": ";
        switch (task.level) {
            case TaskLevel::Node:
                if (g.node_labels.size() != g.num_nodes) {
                    throw DataError(where + "missing node labels");
                }
                for (int y : g.node_labels) {
                    if (y < 0 || y >= classes) {
                        throw DataError(where + "node label " + std::to_string(y) +
                                        " out of range");
                    }
                }
                break;
            case TaskLevel::Edge:
                if (g.edge_labels.size() != g.num_edges()) {
                    throw DataError(where + "missing edge labels");
                }
                for (int y : g.edge_labels) {
                    if (y < 0 || y >= classes) {
                        throw DataError(where + "edge label " + std::to_string(y) +
                                        " out of range");
                    }
                }
                break;
            case TaskLevel::Graph:
                if (!g.graph_label) {
                    throw DataError(where + "missing graph label");
                }
                if (task.loss == LossKind::CrossEntropy &&
                    (*g.graph_label < 0 || *g.graph_label >= classes ||
                     *g.graph_label != std::floor(*g.graph_label))) {
                    throw DataError(where + "graph label is not a class id");
                }
                break;
        }
    }
}

std::size_t num_targets(const GraphBatch& batch, const TaskSpec& task) {
    switch (task.level) {
        case TaskLevel::Node:
            return batch.merged.num_nodes;
        case TaskLevel::Edge:
            return batch.merged.num_edges();
        case TaskLevel::Graph:
            return batch.num_graphs;
    }
    return 0;
}

Tensor task_loss(const Tensor& predictions, const GraphBatch& batch, const TaskSpec& task) {
    switch (task.level) {
        case TaskLevel::Node:
            return cross_entropy(predictions, batch.merged.node_labels);
        case TaskLevel::Edge:
            return cross_entropy(predictions, batch.merged.edge_labels);
        case TaskLevel::Graph:
            break;
    }
    if (task.loss == LossKind::AbsoluteError) {
        return mean_abs_error(predictions, batch.graph_labels);
    }
    std::vector<int> labels;
    labels.reserve(batch.graph_labels.size());
    for (double y : batch.graph_labels) {
        labels.push_back(static_cast<int>(y));
    }
    return cross_entropy(predictions, labels);
}

double binary_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
    const std::size_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

std::vector<PairDecision> pair_decisions(const Matrix& logits, const Graph& merged) {
    if (logits.rows() != merged.num_edges() || logits.cols() != 2) {
        throw ShapeError("pair decisions need |E| x 2 logits");
    }
    struct Acc {
        double margin = 0.0;
        std::size_t count = 0;
        bool actual = false;
    };
    std::map<std::pair<std::size_t, std::size_t>, Acc> pairs;
    for (std::size_t k = 0; k < merged.num_edges(); ++k) {
        const auto [s, t] = merged.edges[k];
        Acc& a = pairs[{std::min(s, t), std::max(s, t)}];
        a.margin += logits(k, 1) - logits(k, 0);
        ++a.count;
        if (k < merged.edge_labels.size() && merged.edge_labels[k] == 1) {
            a.actual = true;
        }
    }
    std::vector<PairDecision> out;
    out.reserve(pairs.size());
    for (const auto& [key, a] : pairs) {
        out.push_back({a.margin / static_cast<double>(a.count) > 0.0, a.actual});
    }
    return out;
}

void MetricAccumulator::add(const Matrix& predictions, const GraphBatch& batch) {
    const std::size_t n = num_targets(batch, task_);
    if (predictions.rows() != n) {
        throw ShapeError("metric: predictions have " + std::to_string(predictions.rows()) +
                         " rows for " + std::to_string(n) + " targets");
    }
    if (task_.metric == MetricKind::BinaryF1) {
        for (const PairDecision& d : pair_decisions(predictions, batch.merged)) {
            tp_ += d.predicted && d.actual;
            fp_ += d.predicted && !d.actual;
            fn_ += !d.predicted && d.actual;
            ++count_;
        }
        return;
    }
    if (task_.metric == MetricKind::Mae) {
        for (std::size_t i = 0; i < n; ++i) {
            abs_error_ += std::abs(predictions(i, 0) - batch.graph_labels[i]);
        }
        count_ += n;
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < predictions.cols(); ++c) {
            if (predictions(i, c) > predictions(i, best)) {
                best = c;
            }
        }
        int label = 0;
        switch (task_.level) {
            case TaskLevel::Node:
                label = batch.merged.node_labels[i];
                break;
            case TaskLevel::Edge:
                label = batch.merged.edge_labels[i];
                break;
            case TaskLevel::Graph:
                label = static_cast<int>(batch.graph_labels[i]);
                break;
        }
        correct_ += static_cast<int>(best) == label;
    }
    count_ += n;
}

double MetricAccumulator::value() const {
    switch (task_.metric) {
        case MetricKind::BinaryF1:
            return binary_f1(tp_, fp_, fn_);
        case MetricKind::Mae:
            return count_ == 0 ? 0.0 : abs_error_ / static_cast<double>(count_);
        case MetricKind::Accuracy:
            return count_ == 0 ? 0.0
                               : static_cast<double>(correct_) / static_cast<double>(count_);
    }
    return 0.0;
}

}  // namespace edgenas
