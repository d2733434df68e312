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
#include <ostream>
#include <string>
#include <vector>

#include "edgenas/generators.hpp"
#include "edgenas/genotype.hpp"
#include "edgenas/network.hpp"
#include "edgenas/rng.hpp"
#include "edgenas/search.hpp"
#include "edgenas/trainer.hpp"

namespace edgenas {

// ---------------------------------------------------------------- configs

/// A run configuration file. Relative paths resolve against the file's
/// directory. Unknown keys are rejected.
///
/// {
///   "data": {"train": "...", "val": "...", "test": "..."},
///   "output_dir": "...", "seed": 0,
///   "network": {"num_cells", "num_nodes", "d_v", "d_e", "dropout",
///               "task": {"level", "num_classes", "loss", "metric"}},
///   "search": {"epochs", "batch_size", "w_lr", "w_momentum", "w_weight_decay",
///              "alpha_lr", "alpha_beta1", "alpha_beta2", "alpha_weight_decay"},
///   "train": {"max_epochs", "batch_size", "lr", "patience", "lr_floor",
///             "max_halvings", "weight_decay"}
/// }
struct RunConfig {
    std::filesystem::path train_path;
    std::filesystem::path val_path;
    std::filesystem::path test_path;
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;
    NetworkConfig network;
    bool task_given = false;
    SearchConfig search;
    TrainConfig train;
};

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);
/// Reads and parses; throws ConfigError on I/O, syntax, unknown keys or bad values.
RunConfig load_run_config(const std::filesystem::path& path);

/// Throws ConfigError naming the first data path that does not exist.
void check_data_paths(const RunConfig& config, bool need_val, bool need_test);

/// Dataset generation settings: {"kind", "name", "splits": {"train","val","test"},
/// "params": {...generator params...}}.
struct GenDataConfig {
    std::string kind = "sbm";  // sbm | tsp | graphreg
    std::string name;          // defaults to kind
    std::size_t train = 200;
    std::size_t val = 100;
    std::size_t test = 100;
    SbmParams sbm;
    TspParams tsp;
    GraphRegParams graphreg;
};

GenDataConfig parse_gen_data_config(const std::string& text);

// ---------------------------------------------------------------- ablations

struct AblationKind {
    enum class Type { ReplaceEntity, ReplaceEdge, Sequentialize, RandomSample };
    Type type = Type::Sequentialize;
    EntityOpKind entity_op = EntityOpKind::Sum;
    EdgeOpKind edge_op = EdgeOpKind::Concat;
    std::uint64_t seed = 0;
};

/// kind: replace-entity | replace-edge | sequentialize | random. op names an
/// operation for the replace kinds; Zero is rejected with ConfigError.
AblationKind parse_ablation(const std::string& kind, const std::string& op, std::uint64_t seed);

Genotype ablate(const Genotype& genotype, const AblationKind& kind);

/// Ops uniform over the non-Zero kinds; per node 1 or 2 distinct
/// predecessors chosen uniformly.
Genotype random_genotype(std::size_t num_cells, std::size_t num_nodes, std::size_t d_v,
                         std::size_t d_e, Rng& rng);

/// Every entity op Sum and every edge op Concat, fed by predecessors
/// (j-2, j-1) (node 1: node 0 only).
Genotype baseline_genotype(std::size_t num_cells, std::size_t num_nodes, std::size_t d_v,
                           std::size_t d_e);

// ---------------------------------------------------------------- reports

/// Graphviz rendering: per cell one cluster for the edge-updating DAG and one
/// for the entity-updating DAG; skip edges are dashed. Throws ConfigError on
/// an empty genotype.
std::string export_dot(const Genotype& genotype);

struct CellStats {
    std::size_t cell = 0;
    std::size_t entity_longest_path = 0;
    std::size_t edge_longest_path = 0;
    std::size_t entity_skips = 0;
    std::size_t edge_skips = 0;
    std::size_t entity_from_input = 0;
    std::size_t edge_from_input = 0;
};

std::vector<CellStats> topology_stats(const Genotype& genotype);
std::string stats_csv(const std::vector<CellStats>& stats);

/// Edge-count longest path in a DAG given as (src, dst) pairs over nodes 0..n.
std::size_t longest_path(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                         std::size_t n);

/// F1 of predicting an unordered pair positive when it is among the `per_node`
/// shortest incident edges (by edge feature 0) of either endpoint.
double heuristic_edge_f1(const Dataset& data, std::size_t per_node);

/// Fixed-precision number formatting shared by every CSV/JSON writer.
std::string format_number(double value);

// ---------------------------------------------------------------- commands

struct CommandOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> genotype;
    std::string kind;  // gen-data: dataset kind; ablate: ablation kind
    std::string op;    // ablate: replacement op
    std::string name;  // gen-data: file stem
};

/// Number of worker threads for file-parallel work: EGNAS_THREADS if set
/// (>= 1), otherwise the hardware concurrency.
std::size_t worker_threads();

/// Each command writes into the output directory and reports to `log`.
/// Errors surface as ConfigError, DataError or NumericError.
void cmd_gen_data(const CommandOptions& opts, std::ostream& log);
SearchResult cmd_search(const CommandOptions& opts, std::ostream& log);
TrainResult cmd_train(const CommandOptions& opts, std::ostream& log);
EvalResult cmd_eval(const CommandOptions& opts, std::ostream& log);
Genotype cmd_ablate(const CommandOptions& opts, std::ostream& log);
void cmd_export_dot(const CommandOptions& opts, std::ostream& log);
std::vector<CellStats> cmd_stats(const CommandOptions& opts, std::ostream& log);

/// Loads a dataset, mapping parse failures to DataError.
Dataset load_dataset(const std::filesystem::path& path);
/// Loads a genotype, mapping parse failures to ConfigError.
Genotype load_genotype_file(const std::filesystem::path& path);

}  // namespace edgenas
