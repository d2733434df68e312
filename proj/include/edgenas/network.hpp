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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edgenas/autodiff.hpp"
#include "edgenas/genotype.hpp"
#include "edgenas/graph.hpp"
#include "edgenas/layers.hpp"
#include "edgenas/rng.hpp"
#include "edgenas/searchspace.hpp"

namespace edgenas {

enum class TaskLevel { Node, Edge, Graph };
enum class LossKind { CrossEntropy, AbsoluteError };
enum class MetricKind { Accuracy, BinaryF1, Mae };

std::string_view name(TaskLevel v);
std::string_view name(LossKind v);
std::string_view name(MetricKind v);
TaskLevel parse_task_level(std::string_view text);
LossKind parse_loss_kind(std::string_view text);
MetricKind parse_metric_kind(std::string_view text);

struct TaskSpec {
    TaskLevel level = TaskLevel::Node;
    std::size_t num_classes = 2;
    LossKind loss = LossKind::CrossEntropy;
    MetricKind metric = MetricKind::Accuracy;

    /// Throws ConfigError on inconsistent combinations.
    void validate() const;
    /// True when a larger metric value is better.
    bool metric_higher_is_better() const { return metric != MetricKind::Mae; }

    bool operator==(const TaskSpec&) const = default;
};

/// Node labels -> node accuracy, edge labels -> binary F1 (2 classes),
/// graph labels -> MAE regression. Throws DataError if the data has none.
TaskSpec infer_task(const Dataset& data);

/// Throws DataError if a graph lacks the labels the task needs or a class
/// label is out of range.
void check_labels(const Dataset& data, const TaskSpec& task);

struct NetworkConfig {
    std::size_t num_cells = 4;
    std::size_t num_nodes = 4;  // N, intermediate nodes per DAG
    std::size_t d_v = 16;
    std::size_t d_e = 16;
    double dropout = 0.0;
    TaskSpec task;

    void validate() const;
};

/// Architecture weights: per cell, one num_pairs x 5 matrix per DAG.
struct Alphas {
    std::vector<Tensor> entity;
    std::vector<Tensor> edge;

    static Alphas zeros(std::size_t num_cells, std::size_t num_nodes);
    std::vector<Tensor> tensors() const;
    Alphas clone() const;
};

class Network {
public:
    /// Every cell is a supernet cell driven by the architecture weights.
    static Network supernet(const NetworkConfig& config, std::size_t d_in_v,
                            std::size_t d_in_e, std::uint64_t seed);
    /// Cells follow the genotype; the genotype fixes N and the hidden widths.
    static Network discrete(const NetworkConfig& config, const Genotype& genotype,
                            std::size_t d_in_v, std::size_t d_in_e, std::uint64_t seed);

    /// Node level: |V| x C, edge level: |E| x C, graph level: num_graphs x C.
    /// dropout_rng is required when training with dropout > 0.
    Tensor forward(const GraphBatch& batch, bool training, Rng* dropout_rng = nullptr);

    bool is_supernet() const { return alphas_.has_value(); }
    Alphas& alphas() { return *alphas_; }
    const NetworkConfig& config() const { return config_; }
    const std::optional<Genotype>& genotype() const { return genotype_; }
    std::size_t d_in_v() const { return d_in_v_; }
    std::size_t d_in_e() const { return d_in_e_; }

    std::vector<Cell>& cells() { return cells_; }
    Linear& node_embedding() { return node_embed_; }
    Linear& edge_embedding() { return edge_embed_; }
    Linear& head() { return head_; }

    /// Every learnable weight (architecture weights excluded) and BN buffer,
    /// in a stable order.
    ParamCollector weights();

    Network clone() const;

private:
    Network() = default;
    void init_common(std::size_t d_in_v, std::size_t d_in_e, Rng& rng);

    NetworkConfig config_;
    std::optional<Genotype> genotype_;
    std::optional<Alphas> alphas_;
    std::size_t d_in_v_ = 0;
    std::size_t d_in_e_ = 0;
    Linear node_embed_;
    Linear edge_embed_;
    std::vector<Cell> cells_;
    Linear head_;
};

/// Graph-level readout: per graph [mean of node rows || mean of edge rows].
Tensor graph_readout(const Tensor& V, const Tensor& E, const GraphBatch& batch);

/// Number of labelled items of a batch for the task (nodes, edges or graphs).
std::size_t num_targets(const GraphBatch& batch, const TaskSpec& task);

/// Mean loss over the batch's targets.
Tensor task_loss(const Tensor& predictions, const GraphBatch& batch, const TaskSpec& task);

/// Streams predictions over several batches into one split-level metric.
class MetricAccumulator {
public:
    explicit MetricAccumulator(TaskSpec task) : task_(task) {}

    void add(const Matrix& predictions, const GraphBatch& batch);
    double value() const;

    std::size_t count() const { return count_; }

private:
    TaskSpec task_;
    std::size_t count_ = 0;
    std::size_t correct_ = 0;
    double abs_error_ = 0.0;
    std::size_t tp_ = 0;
    std::size_t fp_ = 0;
    std::size_t fn_ = 0;
};

/// Binary F1 on the positive class; 0 when there is nothing to recall or predict.
double binary_f1(std::size_t tp, std::size_t fp, std::size_t fn);

/// Edge-level decisions deduplicated by unordered node pair: a pair is
/// positive when the mean over its stored directions of logit1 - logit0 is
/// positive; its label is the max over those directions.
struct PairDecision {
    bool predicted = false;
    bool actual = false;
};
std::vector<PairDecision> pair_decisions(const Matrix& logits, const Graph& merged);

/// Writes model.json (genotype, config, tensor manifest) and model.bin.
void save_checkpoint(const std::filesystem::path& dir, Network& net);
Network load_checkpoint(const std::filesystem::path& dir);

std::string network_config_to_json(const NetworkConfig& config);

}  // namespace edgenas
