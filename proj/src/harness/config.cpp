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

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "edgenas/error.hpp"
#include "edgenas/harness.hpp"
#include "json.hpp"

namespace edgenas {

namespace {

using Json = nlohmann::json;

void allow_keys(const Json& j, const std::string& where,
                std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (std::string_view k : keys) {
            known = known || key == k;
        }
        if (!known) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    allow_keys(j, "config", {"data", "output_dir", "seed", "network", "search", "train"});
    RunConfig c;
    read(j, "seed", c.seed, "config");
    std::string out_dir;
    read(j, "output_dir", out_dir, "config");
    if (!out_dir.empty()) {
        c.output_dir = resolve(base_dir, out_dir);
    }
    if (j.contains("data")) {
        const Json& d = j["data"];
        allow_keys(d, "data", {"train", "val", "test"});
        auto path_of = [&](const char* key) {
            std::string p;
            read(d, key, p, "data");
            return p.empty() ? std::filesystem::path() : resolve(base_dir, p);
        };
        c.train_path = path_of("train");
        c.val_path = path_of("val");
        c.test_path = path_of("test");
    }
    if (j.contains("network")) {
        const Json& n = j["network"];
        allow_keys(n, "network", {"num_cells", "num_nodes", "d_v", "d_e", "dropout", "task"});
        read(n, "num_cells", c.network.num_cells, "network");
        read(n, "num_nodes", c.network.num_nodes, "network");
        read(n, "d_v", c.network.d_v, "network");
        read(n, "d_e", c.network.d_e, "network");
        read(n, "dropout", c.network.dropout, "network");
        if (n.contains("task")) {
            const Json& t = n["task"];
            allow_keys(t, "network.task", {"level", "num_classes", "loss", "metric"});
            std::string s;
            read(t, "level", s, "network.task");
            c.network.task.level = parse_task_level(s);
            read(t, "num_classes", c.network.task.num_classes, "network.task");
            s.clear();
            read(t, "loss", s, "network.task");
            c.network.task.loss = parse_loss_kind(s);
            s.clear();
            read(t, "metric", s, "network.task");
            c.network.task.metric = parse_metric_kind(s);
            c.network.task.validate();
            c.task_given = true;
        }
        if (c.network.num_cells == 0 || c.network.num_nodes == 0 || c.network.d_v == 0 ||
            c.network.d_e == 0 || !(c.network.dropout >= 0.0 && c.network.dropout < 1.0)) {
            throw ConfigError("network: sizes must be positive and dropout in [0, 1)");
        }
    }
    if (j.contains("search")) {
        const Json& s = j["search"];
        allow_keys(s, "search",
                   {"epochs", "batch_size", "w_lr", "w_momentum", "w_weight_decay", "alpha_lr",
                    "alpha_beta1", "alpha_beta2", "alpha_weight_decay"});
        read(s, "epochs", c.search.epochs, "search");
        read(s, "batch_size", c.search.batch_size, "search");
        read(s, "w_lr", c.search.w_lr, "search");
        read(s, "w_momentum", c.search.w_momentum, "search");
        read(s, "w_weight_decay", c.search.w_weight_decay, "search");
        read(s, "alpha_lr", c.search.alpha_lr, "search");
        read(s, "alpha_beta1", c.search.alpha_beta1, "search");
        read(s, "alpha_beta2", c.search.alpha_beta2, "search");
        read(s, "alpha_weight_decay", c.search.alpha_weight_decay, "search");
    }
    if (j.contains("train")) {
        const Json& t = j["train"];
        allow_keys(t, "train",
                   {"max_epochs", "batch_size", "lr", "patience", "lr_floor", "max_halvings",
                    "weight_decay"});
        read(t, "max_epochs", c.train.max_epochs, "train");
        read(t, "batch_size", c.train.batch_size, "train");
        read(t, "lr", c.train.lr, "train");
        read(t, "patience", c.train.patience, "train");
        read(t, "lr_floor", c.train.lr_floor, "train");
        read(t, "max_halvings", c.train.max_halvings, "train");
        read(t, "weight_decay", c.train.weight_decay, "train");
        c.train.validate();
    }
    c.search.network = c.network;
    c.search.seed = c.seed;
    c.train.seed = c.seed;
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path());
}

void check_data_paths(const RunConfig& config, bool need_val, bool need_test) {
    auto check = [](const std::filesystem::path& p, const char* which) {
        if (p.empty()) {
            throw ConfigError(std::string("config lacks data.") + which);
        }
        if (!std::filesystem::is_regular_file(p)) {
            throw ConfigError(std::string("data.") + which + " does not exist: " + p.string());
        }
    };
    check(config.train_path, "train");
    if (need_val) {
        check(config.val_path, "val");
    }
    if (need_test) {
        check(config.test_path, "test");
    }
}

GenDataConfig parse_gen_data_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("gen-data config is not valid JSON: ") + e.what());
    }
    allow_keys(j, "gen-data config", {"kind", "name", "splits", "params"});
    GenDataConfig c;
    read(j, "kind", c.kind, "gen-data");
    read(j, "name", c.name, "gen-data");
    if (c.kind != "sbm" && c.kind != "tsp" && c.kind != "graphreg") {
        throw ConfigError("unknown dataset kind '" + c.kind + "' (sbm, tsp, graphreg)");
    }
    if (j.contains("splits")) {
        const Json& s = j["splits"];
        allow_keys(s, "splits", {"train", "val", "test"});
        read(s, "train", c.train, "splits");
        read(s, "val", c.val, "splits");
        read(s, "test", c.test, "splits");
    }
    if (j.contains("params")) {
        const Json& p = j["params"];
        if (c.kind == "sbm") {
            allow_keys(p, "params", {"nodes_per_community", "num_communities", "p_intra",
                                     "p_inter", "feature_noise"});
            read(p, "nodes_per_community", c.sbm.nodes_per_community, "params");
            read(p, "num_communities", c.sbm.num_communities, "params");
            read(p, "p_intra", c.sbm.p_intra, "params");
            read(p, "p_inter", c.sbm.p_inter, "params");
            read(p, "feature_noise", c.sbm.feature_noise, "params");
        } else if (c.kind == "tsp") {
            allow_keys(p, "params", {"min_cities", "max_cities", "knn_k"});
            read(p, "min_cities", c.tsp.min_cities, "params");
            read(p, "max_cities", c.tsp.max_cities, "params");
            read(p, "knn_k", c.tsp.knn_k, "params");
        } else {
            allow_keys(p, "params", {"min_nodes", "max_nodes", "edge_prob"});
            read(p, "min_nodes", c.graphreg.min_nodes, "params");
            read(p, "max_nodes", c.graphreg.max_nodes, "params");
            read(p, "edge_prob", c.graphreg.edge_prob, "params");
        }
    }
    if (c.name.empty()) {
        c.name = c.kind;
    }
    return c;
}

}  // namespace edgenas
