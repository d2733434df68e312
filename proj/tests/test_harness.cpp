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

#include <sys/wait.h>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "edgenas/error.hpp"
#include "edgenas/harness.hpp"
#include "support.hpp"

using namespace edgenas;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    auto dir = fs::temp_directory_path() / ("edgenas_harness_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) {
        n += c == '\n';
    }
    return n;
}

/// Runs the CLI and returns its exit status.
int cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + EDGENAS_CLI_PATH + "\" " +
                            args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ------------------------------------------------------------------ DOT oracle
//
// Recursive-descent parser for the DOT language subset
//   graph   : 'digraph' ID? '{' stmt* '}'
//   stmt    : (subgraph | attr_stmt | edge_stmt | node_stmt | ID '=' ID) ';'?
//   subgraph: 'subgraph' ID? '{' stmt* '}'
//   attr_stmt: ('graph' | 'node' | 'edge') attr_list
//   edge_stmt: ID ('->' ID)+ attr_list?
//   node_stmt: ID attr_list?
//   attr_list: '[' (ID '=' ID (','|';')?)* ']'
// with ID = identifier | numeral | double-quoted string.

struct DotEdge {
    std::string src, dst;
    std::map<std::string, std::string> attrs;
};

struct DotGraph {
    std::set<std::string> nodes;
    std::vector<DotEdge> edges;
    std::vector<std::string> subgraphs;
};

class DotParser {
public:
    explicit DotParser(std::string text) : s_(std::move(text)) {}

    DotGraph parse() {
        expect_word("digraph");
        if (peek_id()) {
            id();
        }
        block();
        skip_ws();
        if (pos_ != s_.size()) {
            fail("trailing input");
        }
        return g_;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("DOT parse error at " + std::to_string(pos_) + ": " + what);
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }
    bool accept(const std::string& tok) {
        skip_ws();
        if (s_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(const std::string& tok) {
        if (!accept(tok)) {
            fail("expected '" + tok + "'");
        }
    }
    bool peek_id() {
        skip_ws();
        return pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                s_[pos_] == '"' || s_[pos_] == '-' || s_[pos_] == '.') &&
               s_.compare(pos_, 2, "->") != 0;
    }
    std::string id() {
        skip_ws();
        if (pos_ >= s_.size()) {
            fail("expected an ID");
        }
        if (s_[pos_] == '"') {
            std::string out;
            ++pos_;
            while (pos_ < s_.size() && s_[pos_] != '"') {
                if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                    ++pos_;
                }
                out += s_[pos_++];
            }
            if (pos_ >= s_.size()) {
                fail("unterminated string");
            }
            ++pos_;
            return out;
        }
        const std::size_t start = pos_;
        if (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-' ||
            s_[pos_] == '.') {
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                    (pos_ == start && s_[pos_] == '-'))) {
                ++pos_;
            }
        } else {
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                ++pos_;
            }
        }
        if (pos_ == start) {
            fail("expected an ID");
        }
        return s_.substr(start, pos_ - start);
    }
    void expect_word(const std::string& w) {
        if (id() != w) {
            fail("expected keyword " + w);
        }
    }
    std::map<std::string, std::string> attr_list() {
        std::map<std::string, std::string> out;
        expect("[");
        while (!accept("]")) {
            const std::string k = id();
            expect("=");
            out[k] = id();
            if (!accept(",")) {
                accept(";");
            }
        }
        return out;
    }
    void block() {
        expect("{");
        while (!accept("}")) {
            stmt();
            accept(";");
        }
    }
    void stmt() {
        const std::string first = id();
        if (first == "subgraph") {
            g_.subgraphs.push_back(peek_id() ? id() : "");
            block();
            return;
        }
        if (first == "graph" || first == "node" || first == "edge") {
            attr_list();
            return;
        }
        if (accept("=")) {
            id();
            return;
        }
        g_.nodes.insert(first);
        std::string prev = first;
        bool edge = false;
        std::vector<DotEdge> chain;
        while (accept("->")) {
            const std::string next = id();
            g_.nodes.insert(next);
            chain.push_back({prev, next, {}});
            prev = next;
            edge = true;
        }
        skip_ws();
        std::map<std::string, std::string> attrs;
        if (pos_ < s_.size() && s_[pos_] == '[') {
            attrs = attr_list();
        }
        if (edge) {
            for (DotEdge& e : chain) {
                e.attrs = attrs;
                g_.edges.push_back(e);
            }
        }
    }

    std::string s_;
    std::size_t pos_ = 0;
    DotGraph g_;
};

Genotype sample_genotype() {
    Genotype g;
    g.d_v = 8;
    g.d_e = 8;
    g.cells.push_back({{{0, 1, EntityOpKind::Sum}, {0, 2, EntityOpKind::EntitySkip},
                        {1, 2, EntityOpKind::Max}, {1, 3, EntityOpKind::Mean},
                        {2, 3, EntityOpKind::Sum}, {2, 4, EntityOpKind::Sum}},
                       {{0, 1, EdgeOpKind::GRU}, {0, 2, EdgeOpKind::FiLM}, {0, 3, EdgeOpKind::EdgeSkip},
                        {1, 3, EdgeOpKind::Concat}, {3, 4, EdgeOpKind::GRU}}});
    return g;
}

/// Longest path by exhaustive DFS over all paths starting anywhere.
std::size_t dfs_longest(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                        std::size_t node) {
    std::size_t best = 0;
    for (auto [s, t] : edges) {
        if (s == node) {
            best = std::max(best, 1 + dfs_longest(edges, t));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("run config parsing") {
    const fs::path base = "/data/run";
    const RunConfig c = parse_run_config(
        R"({"data": {"train": "t.jsonl", "val": "/abs/v.jsonl"}, "seed": 9,
            "network": {"num_cells": 2, "d_v": 8},
            "search": {"epochs": 3}, "train": {"max_epochs": 5}})",
        base);
    CHECK(c.train_path == base / "t.jsonl");
    CHECK(c.val_path == fs::path("/abs/v.jsonl"));
    CHECK(c.test_path.empty());
    CHECK(c.seed == 9);
    CHECK(c.search.seed == 9);
    CHECK(c.train.seed == 9);
    CHECK(c.search.network.num_cells == 2);
    CHECK(c.search.epochs == 3);
    CHECK(c.train.max_epochs == 5);
    CHECK_FALSE(c.task_given);

    CHECK_THROWS_AS(parse_run_config(R"({"sead": 1})", base), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"network": {"cells": 1}})", base), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"network": {"num_cells": 0}})", base), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"search": {"epochs": "many"}})", base), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"train": {"lr": -1}})", base), ConfigError);
    CHECK_THROWS_AS(parse_run_config("{", base), ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(R"({"network": {"task": {"level": "node", "num_classes": 2}}})", base),
        ConfigError);

    RunConfig missing = c;
    CHECK_THROWS_AS(check_data_paths(missing, true, false), ConfigError);

    const GenDataConfig g = parse_gen_data_config(
        R"({"kind": "tsp", "splits": {"train": 3}, "params": {"knn_k": 2}})");
    CHECK(g.kind == "tsp");
    CHECK(g.train == 3);
    CHECK(g.tsp.knn_k == 2);
    CHECK_THROWS_AS(parse_gen_data_config(R"({"kind": "tsp", "params": {"p_intra": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_gen_data_config(R"({"kind": "mnist"})"), ConfigError);
}

TEST_CASE("ablations") {
    const Genotype g = sample_genotype();
    SUBCASE("replace entity") {
        const Genotype r = ablate(g, parse_ablation("replace-entity", "Mean", 0));
        for (const EntityChoice& c : r.cells[0].entity) {
            CHECK(c.op == EntityOpKind::Mean);
        }
        CHECK(r.cells[0].edge == g.cells[0].edge);
        CHECK(r.cells[0].entity.size() == g.cells[0].entity.size());
    }
    SUBCASE("replace edge") {
        const Genotype r = ablate(g, parse_ablation("replace-edge", "FiLM", 0));
        for (const EdgeChoice& c : r.cells[0].edge) {
            CHECK(c.op == EdgeOpKind::FiLM);
        }
        CHECK(r.cells[0].entity == g.cells[0].entity);
    }
    SUBCASE("sequentialize") {
        const Genotype r = ablate(g, parse_ablation("sequentialize", "", 0));
        CHECK_NOTHROW(r.validate());
        CHECK(r.cells[0].entity == g.cells[0].entity);
        CHECK(r.cells[0].edge == std::vector<EdgeChoice>{{0, 1, EdgeOpKind::GRU},
                                                         {1, 2, EdgeOpKind::Concat},
                                                         {2, 3, EdgeOpKind::Concat},
                                                         {3, 4, EdgeOpKind::GRU}});
    }
    SUBCASE("random samples are valid") {
        Rng rng(1);
        std::set<std::string> distinct;
        for (int i = 0; i < 1000; ++i) {
            const Genotype r = random_genotype(1 + rng.below(3), 1 + rng.below(5), 4, 4, rng);
            CHECK_NOTHROW(r.validate());
            distinct.insert(genotype_to_json(r));
        }
        CHECK(distinct.size() > 900);
        const Genotype a = ablate(g, parse_ablation("random", "", 5));
        CHECK(a == ablate(g, parse_ablation("random", "", 5)));
        CHECK(a.num_nodes() == g.num_nodes());
    }
    CHECK_THROWS_AS(parse_ablation("replace-entity", "Zero", 0), ConfigError);
    CHECK_THROWS_AS(parse_ablation("replace-edge", "Sum", 0), ConfigError);
    CHECK_THROWS_AS(parse_ablation("shuffle", "", 0), ConfigError);

    const Genotype base = baseline_genotype(2, 4, 8, 8);
    CHECK_NOTHROW(base.validate());
    CHECK(base.cells[1].entity == std::vector<EntityChoice>{{0, 1, EntityOpKind::Sum},
                                                            {0, 2, EntityOpKind::Sum},
                                                            {1, 2, EntityOpKind::Sum},
                                                            {1, 3, EntityOpKind::Sum},
                                                            {2, 3, EntityOpKind::Sum},
                                                            {2, 4, EntityOpKind::Sum},
                                                            {3, 4, EntityOpKind::Sum}});
}

TEST_CASE("DOT export parses and follows the layout") {
    Genotype g = sample_genotype();
    g.cells.push_back(baseline_genotype(1, 4, 8, 8).cells[0]);
    const DotGraph dot = DotParser(export_dot(g)).parse();
    CHECK(dot.subgraphs == std::vector<std::string>{"cluster_c0_edge", "cluster_c0_entity",
                                                    "cluster_c1_edge", "cluster_c1_entity"});
    CHECK(dot.nodes.size() == 2 * 2 * 5);
    CHECK(dot.nodes.count("c0_E0") == 1);
    CHECK(dot.nodes.count("c1_V4") == 1);
    REQUIRE(dot.edges.size() == g.cells[0].entity.size() + g.cells[0].edge.size() +
                                    g.cells[1].entity.size() + g.cells[1].edge.size());
    std::size_t dashed = 0;
    for (const DotEdge& e : dot.edges) {
        const std::string& label = e.attrs.at("label");
        const bool skip = label == "EdgeSkip" || label == "EntitySkip";
        CHECK((e.attrs.count("style") == 1) == skip);
        dashed += skip;
        if (!skip) {
            // edge-DAG ops cite the entity node they read and vice versa
            const bool edge_dag = e.src.find("_E") != std::string::npos;
            const std::string ref = std::string(edge_dag ? "(+V" : "(+E") + e.src.substr(e.src.size() - 1) + ")";
            CHECK(label.find(ref) != std::string::npos);
        }
    }
    CHECK(dashed == 2);
    CHECK_THROWS_AS(export_dot(Genotype{}), ConfigError);
    CHECK_THROWS(DotParser("digraph { a -> }").parse());
}

TEST_CASE("topology statistics") {
    SUBCASE("sequential cell") {
        const std::size_t n = 4;
        Genotype g;
        g.d_v = g.d_e = 4;
        CellGenotype c;
        for (std::size_t j = 1; j <= n; ++j) {
            c.entity.push_back({j - 1, j, EntityOpKind::Sum});
            c.edge.push_back({j - 1, j, EdgeOpKind::Concat});
        }
        g.cells.push_back(c);
        const auto s = topology_stats(g);
        CHECK(s[0].edge_longest_path == n);
        CHECK(s[0].entity_longest_path == n);
        CHECK(s[0].edge_from_input == 1);
    }
    SUBCASE("everything from the input") {
        Genotype g;
        g.d_v = g.d_e = 4;
        CellGenotype c;
        for (std::size_t j = 1; j <= 4; ++j) {
            c.entity.push_back({0, j, EntityOpKind::EntitySkip});
            c.edge.push_back({0, j, EdgeOpKind::GRU});
        }
        g.cells.push_back(c);
        const auto s = topology_stats(g);
        CHECK(s[0].edge_longest_path == 1);
        CHECK(s[0].edge_from_input == 4);
        CHECK(s[0].entity_skips == 4);
        CHECK(s[0].edge_skips == 0);
    }
    SUBCASE("hand-built cell against exhaustive DFS") {
        const Genotype g = sample_genotype();
        std::vector<std::pair<std::size_t, std::size_t>> ee, ve;
        for (const auto& e : g.cells[0].edge) {
            ee.emplace_back(e.src, e.dst);
        }
        for (const auto& e : g.cells[0].entity) {
            ve.emplace_back(e.src, e.dst);
        }
        std::size_t de = 0, dv = 0;
        for (std::size_t s = 0; s <= 4; ++s) {
            de = std::max(de, dfs_longest(ee, s));
            dv = std::max(dv, dfs_longest(ve, s));
        }
        const auto stats = topology_stats(g);
        CHECK(stats[0].edge_longest_path == de);
        CHECK(stats[0].entity_longest_path == dv);
        CHECK(de == 3);
        CHECK(dv == 3);
        CHECK(stats[0].edge_skips == 1);
        CHECK(stats[0].entity_skips == 1);
        CHECK(stats[0].entity_from_input == 2);
        const std::string csv = stats_csv(stats);
        CHECK(csv.rfind("cell,entity_longest_path,edge_longest_path,", 0) == 0);
        CHECK(count_lines(csv) == 2);
    }
}

TEST_CASE("heuristic edge baseline") {
    // square with one diagonal: perimeter edges are shortest and on the tour
    Graph g = tsp_graph_from_cities({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 3);
    CHECK(heuristic_edge_f1({g}, 2) == doctest::Approx(1.0));
    CHECK(heuristic_edge_f1({g}, 3) == doctest::Approx(2.0 * 4 / (2 * 4 + 2)));
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(2.0) == "2");
}

TEST_CASE("worker thread cap") {
    ::setenv("EGNAS_THREADS", "3", 1);
    CHECK(worker_threads() == 3);
    ::setenv("EGNAS_THREADS", "zero", 1);
    CHECK_THROWS_AS(worker_threads(), ConfigError);
    ::unsetenv("EGNAS_THREADS");
    CHECK(worker_threads() >= 1);
}

TEST_CASE("command line pipeline and exit codes") {
    const fs::path dir = temp_dir("cli");
    const std::string d = dir.string();
    spit(dir / "gen.json",
         R"({"kind": "sbm", "splits": {"train": 12, "val": 6, "test": 6},
             "params": {"nodes_per_community": 4}})");
    REQUIRE(cli("gen-data --config " + d + "/gen.json --seed 4 --out " + d + "/data") == 0);
    for (const char* f : {"sbm.train.jsonl", "sbm.val.jsonl", "sbm.test.jsonl", "sbm.provenance.json"}) {
        CHECK(fs::is_regular_file(dir / "data" / f));
    }
    CHECK(count_lines(slurp(dir / "data" / "sbm.train.jsonl")) == 12);
    REQUIRE(cli("gen-data --config " + d + "/gen.json --seed 4 --out " + d + "/data2",
                "EGNAS_THREADS=1") == 0);
    CHECK(slurp(dir / "data" / "sbm.train.jsonl") == slurp(dir / "data2" / "sbm.train.jsonl"));
    CHECK(slurp(dir / "data" / "sbm.test.jsonl") == slurp(dir / "data2" / "sbm.test.jsonl"));

    spit(dir / "run.json",
         R"({"data": {"train": "data/sbm.train.jsonl", "val": "data/sbm.val.jsonl",
                      "test": "data/sbm.test.jsonl"},
             "output_dir": "run", "seed": 2,
             "network": {"num_cells": 1, "num_nodes": 2, "d_v": 4, "d_e": 4},
             "search": {"epochs": 2, "batch_size": 4},
             "train": {"max_epochs": 3, "batch_size": 4}})");
    const std::string cfg = "--config " + d + "/run.json";
    REQUIRE(cli("search " + cfg) == 0);
    const std::string log = slurp(dir / "run" / "search_log.csv");
    CHECK(log.rfind("epoch,train_loss,val_loss,metric,lr\n", 0) == 0);
    CHECK(count_lines(log) == 3);
    CHECK(fs::is_regular_file(dir / "run" / "genotype_epoch_2.json"));
    const std::string geno = d + "/run/genotype.json";
    CHECK_NOTHROW(load_genotype(geno));

    REQUIRE(cli("search " + cfg + " --out " + d + "/run_again") == 0);
    CHECK(slurp(dir / "run_again" / "search_log.csv") == log);

    REQUIRE(cli("train " + cfg + " --genotype " + geno) == 0);
    const std::string metrics = slurp(dir / "run" / "metrics.csv");
    CHECK(metrics.rfind("epoch,train_loss,val_loss,val_metric,test_metric,lr\n", 0) == 0);
    CHECK(count_lines(metrics) == 4);
    CHECK(fs::is_regular_file(dir / "run" / "model.bin"));
    REQUIRE(cli("eval " + cfg) == 0);
    CHECK(slurp(dir / "run" / "eval.json").find("\"accuracy\"") != std::string::npos);

    CHECK(cli("ablate --genotype " + geno + " --kind sequentialize --out " + d + "/seq") == 0);
    CHECK_NOTHROW(load_genotype(dir / "seq" / "genotype.json"));
    CHECK(cli("export-dot --genotype " + geno + " --out " + d + "/dot") == 0);
    CHECK_NOTHROW(DotParser(slurp(dir / "dot" / "genotype.dot")).parse());
    CHECK(cli("stats --genotype " + geno + " --out " + d + "/stats") == 0);
    CHECK(count_lines(slurp(dir / "stats" / "stats.csv")) == 2);

    SUBCASE("config errors exit with 2") {
        CHECK(cli("frobnicate") == 2);
        CHECK(cli("search --seed notanumber") == 2);
        CHECK(cli("search") == 2);
        spit(dir / "unknown.json", R"({"data": {"train": "x"}, "epochs": 3})");
        CHECK(cli("search --config " + d + "/unknown.json") == 2);
        spit(dir / "missing.json", R"({"data": {"train": "nope.jsonl"}})");
        CHECK(cli("search --config " + d + "/missing.json") == 2);
        CHECK(cli("ablate --genotype " + geno + " --kind replace-edge --op Zero") == 2);
        CHECK(cli("gen-data --kind sbm --out " + d + "/x", "EGNAS_THREADS=0") == 2);
        spit(dir / "empty_geno.json", R"({"cells": [], "d_v": 4, "d_e": 4})");
        CHECK(cli("export-dot --genotype " + d + "/empty_geno.json") == 2);
    }
    SUBCASE("data errors exit with 3") {
        spit(dir / "broken.jsonl", "{\"n\": 2, \"edges\": [[0, 1]\n");
        spit(dir / "broken.json", R"({"data": {"train": "broken.jsonl"}})");
        CHECK(cli("search --config " + d + "/broken.json") == 3);
    }
    SUBCASE("numeric failures exit with 4") {
        spit(dir / "diverge.json",
             R"({"data": {"train": "data/sbm.train.jsonl", "val": "data/sbm.val.jsonl"},
                 "output_dir": "diverge",
                 "network": {"num_cells": 1, "num_nodes": 2, "d_v": 4, "d_e": 4},
                 "train": {"max_epochs": 3, "batch_size": 4, "lr": 1e300}})");
        CHECK(cli("train --config " + d + "/diverge.json --genotype " + geno) == 4);
    }
}
