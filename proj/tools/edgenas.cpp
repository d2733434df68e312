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

// edgenas command-line driver.
//
// Exit codes: 0 success, 1 internal error, 2 config error, 3 data error,
// 4 numeric failure.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "edgenas/error.hpp"
#include "edgenas/harness.hpp"

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kNumeric = 4 };

struct Flags {
    std::string config;
    std::string out;
    std::string genotype;
    std::uint64_t seed = 0;
    std::string kind;
    std::string op;
    std::string name;
};

edgenas::CommandOptions to_options(const Flags& f, const CLI::App& sub) {
    edgenas::CommandOptions o;
    if (!f.config.empty()) {
        o.config = f.config;
    }
    if (!f.out.empty()) {
        o.out = f.out;
    }
    if (!f.genotype.empty()) {
        o.genotype = f.genotype;
    }
    if (sub.count("--seed") > 0) {
        o.seed = f.seed;
    }
    o.kind = f.kind;
    o.op = f.op;
    o.name = f.name;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-featured graph neural architecture search"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "JSON configuration file");
        sub->add_option("--seed", flags.seed, "Random seed (overrides the config)");
        sub->add_option("--out", flags.out, "Output directory");
        sub->add_option("--genotype", flags.genotype, "Genotype JSON file");
    };

    CLI::App* gen = app.add_subcommand("gen-data", "Generate train/val/test JSONL files");
    add_common(gen);
    gen->add_option("--kind", flags.kind, "Dataset kind: sbm, tsp or graphreg");
    gen->add_option("--name", flags.name, "File stem (defaults to the kind)");

    CLI::App* search = app.add_subcommand("search", "Run the supernet search");
    add_common(search);
    CLI::App* train = app.add_subcommand("train", "Retrain a genotype from scratch");
    add_common(train);
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
    add_common(eval);

    CLI::App* ablate = app.add_subcommand("ablate", "Rewrite a genotype");
    add_common(ablate);
    ablate->add_option("--kind", flags.kind,
                       "replace-entity, replace-edge, sequentialize or random");
    ablate->add_option("--op", flags.op, "Replacement operation for replace-*");

    CLI::App* dot = app.add_subcommand("export-dot", "Render a genotype as Graphviz DOT");
    add_common(dot);
    CLI::App* stats = app.add_subcommand("stats", "Per-cell topology statistics as CSV");
    add_common(stats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        for (CLI::App* sub : app.get_subcommands()) {
            const edgenas::CommandOptions opts = to_options(flags, *sub);
            const std::string name = sub->get_name();
            if (name == "gen-data") {
                edgenas::cmd_gen_data(opts, std::cout);
            } else if (name == "search") {
                edgenas::cmd_search(opts, std::cout);
            } else if (name == "train") {
                edgenas::cmd_train(opts, std::cout);
            } else if (name == "eval") {
                edgenas::cmd_eval(opts, std::cout);
            } else if (name == "ablate") {
                edgenas::cmd_ablate(opts, std::cout);
            } else if (name == "export-dot") {
                edgenas::cmd_export_dot(opts, std::cout);
            } else if (name == "stats") {
                edgenas::cmd_stats(opts, std::cout);
            }
        }
    } catch (const edgenas::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const edgenas::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const edgenas::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kOk;
}
