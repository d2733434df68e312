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

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "edgenas/error.hpp"
#include "edgenas/harness.hpp"
#include "json.hpp"

namespace edgenas {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << text;
}

/// Runs tasks on up to worker_threads() threads; rethrows the first failure.
void run_parallel(std::vector<std::function<void()>> tasks) {
    const std::size_t workers = std::min(worker_threads(), tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            try {
                tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < tasks.size(); i = next++) {
                    try {
                        tasks[i]();
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

RunConfig require_config(const CommandOptions& opts) {
    if (!opts.config) {
        throw ConfigError("this command needs --config");
    }
    RunConfig c = load_run_config(*opts.config);
    if (opts.seed) {
        c.seed = *opts.seed;
        c.search.seed = c.seed;
        c.train.seed = c.seed;
    }
    return c;
}

fs::path output_dir(const CommandOptions& opts, const RunConfig* config) {
    fs::path dir = opts.out ? *opts.out : config && !config->output_dir.empty()
                                              ? config->output_dir
                                              : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ConfigError("cannot create output directory " + dir.string());
    }
    return dir;
}

/// Loads the listed splits in parallel; empty paths yield empty datasets.
std::vector<Dataset> load_splits(const std::vector<fs::path>& paths) {
    std::vector<Dataset> out(paths.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!paths[i].empty()) {
            tasks.push_back([&, i] { out[i] = load_dataset(paths[i]); });
        }
    }
    run_parallel(std::move(tasks));
    return out;
}

void resolve_task(RunConfig& config, const Dataset& train) {
    if (!config.task_given) {
        config.network.task = infer_task(train);
    }
    config.network.validate();
    config.search.network = config.network;
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string row;
    for (const auto& c : cells) {
        if (!row.empty()) {
            row += ',';
        }
        row += c;
    }
    return row + '\n';
}

}  // namespace

std::size_t worker_threads() {
    if (const char* env = std::getenv("EGNAS_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw ConfigError("EGNAS_THREADS must be a positive integer");
        }
        return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Dataset load_dataset(const fs::path& path) {
    try {
        Dataset d = load_jsonl(path);
        for (std::size_t i = 0; i < d.size(); ++i) {
            d[i].validate();
        }
        return d;
    } catch (const ParseError& e) {
        throw DataError(path.string() + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    } catch (const ConfigError& e) {
        throw DataError(e.what());
    }
}

Genotype load_genotype_file(const fs::path& path) {
    try {
        return load_genotype(path);
    } catch (const ParseError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void cmd_gen_data(const CommandOptions& opts, std::ostream& log) {
    GenDataConfig cfg;
    if (opts.config) {
        cfg = parse_gen_data_config(read_file(*opts.config));
    }
    if (!opts.kind.empty()) {
        if (opts.kind != "sbm" && opts.kind != "tsp" && opts.kind != "graphreg") {
            throw ConfigError("unknown dataset kind '" + opts.kind + "' (sbm, tsp, graphreg)");
        }
        if (opts.config && opts.kind != cfg.kind) {
            throw ConfigError("--kind " + opts.kind + " contradicts the config's " + cfg.kind);
        }
        cfg.kind = opts.kind;
        if (!opts.config) {
            cfg.name = opts.kind;
        }
    }
    if (!opts.name.empty()) {
        cfg.name = opts.name;
    }
    if (cfg.name.empty()) {
        cfg.name = cfg.kind;
    }
    const std::uint64_t seed = opts.seed.value_or(0);
    const fs::path dir = output_dir(opts, nullptr);

    // Validate parameters before any file is written.
    const std::vector<std::pair<std::string, std::size_t>> splits = {
        {"train", cfg.train}, {"val", cfg.val}, {"test", cfg.test}};
    if (cfg.kind == "sbm") {
        SbmParams p = cfg.sbm;
        p.num_graphs = 0;
        gen_sbm(p, seed);
    } else if (cfg.kind == "tsp") {
        TspParams p = cfg.tsp;
        p.num_graphs = 0;
        gen_tsp(p, seed);
    } else {
        GraphRegParams p = cfg.graphreg;
        p.num_graphs = 0;
        gen_graphreg(p, seed);
    }

    Rng base(seed);
    std::vector<std::uint64_t> split_seeds;
    for (std::size_t k = 0; k < splits.size(); ++k) {
        split_seeds.push_back(base.next());
    }
    std::vector<std::function<void()>> tasks;
    for (std::size_t k = 0; k < splits.size(); ++k) {
        tasks.push_back([&, k] {
            const std::size_t count = splits[k].second;
            const std::uint64_t s = split_seeds[k];
            Dataset d;
            if (cfg.kind == "sbm") {
                SbmParams p = cfg.sbm;
                p.num_graphs = count;
                d = gen_sbm(p, s);
            } else if (cfg.kind == "tsp") {
                TspParams p = cfg.tsp;
                p.num_graphs = count;
                d = gen_tsp(p, s);
            } else {
                GraphRegParams p = cfg.graphreg;
                p.num_graphs = count;
                d = gen_graphreg(p, s);
            }
            save_jsonl(dir / (cfg.name + "." + splits[k].first + ".jsonl"), d);
        });
    }
    run_parallel(std::move(tasks));

    Json prov;
    prov["generator_version"] = kGeneratorVersion;
    prov["kind"] = cfg.kind;
    prov["seed"] = seed;
    Json sp;
    for (std::size_t k = 0; k < splits.size(); ++k) {
        sp[splits[k].first] = {{"graphs", splits[k].second}, {"seed", split_seeds[k]}};
    }
    prov["splits"] = std::move(sp);
    Json params;
    if (cfg.kind == "sbm") {
        params = {{"nodes_per_community", cfg.sbm.nodes_per_community},
                  {"num_communities", cfg.sbm.num_communities},
                  {"p_intra", cfg.sbm.p_intra},
                  {"p_inter", cfg.sbm.p_inter},
                  {"feature_noise", cfg.sbm.feature_noise}};
    } else if (cfg.kind == "tsp") {
        params = {{"min_cities", cfg.tsp.min_cities},
                  {"max_cities", cfg.tsp.max_cities},
                  {"knn_k", cfg.tsp.knn_k}};
    } else {
        params = {{"min_nodes", cfg.graphreg.min_nodes},
                  {"max_nodes", cfg.graphreg.max_nodes},
                  {"edge_prob", cfg.graphreg.edge_prob}};
    }
    prov["params"] = std::move(params);
    write_file(dir / (cfg.name + ".provenance.json"), prov.dump(2) + "\n");
    log << "wrote " << cfg.name << ".{train,val,test}.jsonl to " << dir.string() << "\n";
}

SearchResult cmd_search(const CommandOptions& opts, std::ostream& log) {
    RunConfig config = require_config(opts);
    check_data_paths(config, false, false);
    const fs::path dir = output_dir(opts, &config);
    const Dataset train = load_splits({config.train_path})[0];
    if (train.size() < 2) {
        throw DataError("search needs at least 2 training graphs");
    }
    resolve_task(config, train);
    check_labels(train, config.network.task);
    const auto [search_train, search_val] = split_even_odd(train);

    std::string csv = "epoch,train_loss,val_loss,metric,lr\n";
    SearchResult result = search(search_train, search_val, config.search,
                                 [&](const SearchEpoch& e) {
                                     csv += csv_row({std::to_string(e.epoch),
                                                     format_number(e.train_loss),
                                                     format_number(e.val_loss),
                                                     format_number(e.metric),
                                                     format_number(e.lr)});
                                     save_genotype(dir / ("genotype_epoch_" +
                                                          std::to_string(e.epoch) + ".json"),
                                                   e.genotype);
                                     log << "search epoch " << e.epoch << " train_loss "
                                         << format_number(e.train_loss) << " val_loss "
                                         << format_number(e.val_loss) << " "
                                         << name(config.network.task.metric) << " "
                                         << format_number(e.metric) << "\n";
                                 });
    write_file(dir / "search_log.csv", csv);
    save_genotype(dir / "genotype.json", result.genotype);
    log << "wrote " << (dir / "genotype.json").string() << "\n";
    return result;
}

TrainResult cmd_train(const CommandOptions& opts, std::ostream& log) {
    RunConfig config = require_config(opts);
    if (!opts.genotype) {
        throw ConfigError("train needs --genotype");
    }
    check_data_paths(config, true, false);
    if (!config.test_path.empty() && !fs::is_regular_file(config.test_path)) {
        throw ConfigError("data.test does not exist: " + config.test_path.string());
    }
    const Genotype genotype = load_genotype_file(*opts.genotype);
    const fs::path dir = output_dir(opts, &config);
    const auto splits = load_splits({config.train_path, config.val_path, config.test_path});
    const Dataset& train_data = splits[0];
    if (train_data.empty()) {
        throw DataError("training split is empty");
    }
    resolve_task(config, train_data);

    Network net = Network::discrete(config.network, genotype,
                                    train_data.front().node_features.cols(),
                                    train_data.front().edge_features.cols(), config.seed);
    std::string csv = "epoch,train_loss,val_loss,val_metric,test_metric,lr\n";
    const TrainResult result =
        train(net, train_data, splits[1], splits[2], config.train, [&](const EpochRecord& r) {
            csv += csv_row({std::to_string(r.epoch), format_number(r.train_loss),
                            format_number(r.val_loss), format_number(r.val_metric),
                            format_number(r.test_metric), format_number(r.lr)});
            log << "train epoch " << r.epoch << " train_loss " << format_number(r.train_loss)
                << " val_loss " << format_number(r.val_loss) << " val_"
                << name(config.network.task.metric) << " " << format_number(r.val_metric)
                << "\n";
        });
    write_file(dir / "metrics.csv", csv);
    save_checkpoint(dir, net);

    Json summary;
    summary["metric"] = std::string(name(config.network.task.metric));
    summary["epochs"] = result.epochs.size();
    summary["best_epoch"] = result.best_epoch;
    summary["best_val_loss"] = format_number(result.best_val_loss);
    summary["best_val_metric"] = format_number(result.best_val_metric);
    summary["test_metric"] = format_number(result.test_metric);
    write_file(dir / "train_summary.json", summary.dump(2) + "\n");
    log << "best epoch " << result.best_epoch << " test " << name(config.network.task.metric)
        << " " << format_number(result.test_metric) << "\n";
    return result;
}

EvalResult cmd_eval(const CommandOptions& opts, std::ostream& log) {
    RunConfig config = require_config(opts);
    if (config.test_path.empty()) {
        throw ConfigError("eval needs data.test");
    }
    if (!fs::is_regular_file(config.test_path)) {
        throw ConfigError("data.test does not exist: " + config.test_path.string());
    }
    const fs::path dir = output_dir(opts, &config);
    if (!fs::is_regular_file(dir / "model.json")) {
        throw ConfigError("no checkpoint (model.json) in " + dir.string());
    }
    Network net = load_checkpoint(dir);
    const Dataset test = load_splits({config.test_path})[0];
    check_labels(test, net.config().task);
    const EvalResult r = evaluate(net, test, config.train.batch_size);
    Json out;
    out["split"] = "test";
    out["metric"] = std::string(name(net.config().task.metric));
    out["value"] = format_number(r.metric);
    out["loss"] = format_number(r.loss);
    out["targets"] = r.targets;
    write_file(dir / "eval.json", out.dump(2) + "\n");
    log << "test " << name(net.config().task.metric) << " " << format_number(r.metric)
        << " loss " << format_number(r.loss) << "\n";
    return r;
}

Genotype cmd_ablate(const CommandOptions& opts, std::ostream& log) {
    if (!opts.genotype) {
        throw ConfigError("ablate needs --genotype");
    }
    if (opts.kind.empty()) {
        throw ConfigError("ablate needs --kind");
    }
    const AblationKind kind = parse_ablation(opts.kind, opts.op, opts.seed.value_or(0));
    const Genotype out = ablate(load_genotype_file(*opts.genotype), kind);
    if (opts.out) {
        const fs::path dir = output_dir(opts, nullptr);
        save_genotype(dir / "genotype.json", out);
        log << "wrote " << (dir / "genotype.json").string() << "\n";
    } else {
        log << genotype_to_json(out) << "\n";
    }
    return out;
}

void cmd_export_dot(const CommandOptions& opts, std::ostream& log) {
    if (!opts.genotype) {
        throw ConfigError("export-dot needs --genotype");
    }
    const std::string dot = export_dot(load_genotype_file(*opts.genotype));
    if (opts.out) {
        const fs::path dir = output_dir(opts, nullptr);
        write_file(dir / "genotype.dot", dot);
        log << "wrote " << (dir / "genotype.dot").string() << "\n";
    } else {
        log << dot;
    }
}

std::vector<CellStats> cmd_stats(const CommandOptions& opts, std::ostream& log) {
    if (!opts.genotype) {
        throw ConfigError("stats needs --genotype");
    }
    const auto stats = topology_stats(load_genotype_file(*opts.genotype));
    const std::string csv = stats_csv(stats);
    if (opts.out) {
        write_file(output_dir(opts, nullptr) / "stats.csv", csv);
    }
    log << csv;
    return stats;
}

}  // namespace edgenas
