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
#include <sstream>

#include "edgenas/error.hpp"
#include "edgenas/network.hpp"
#include "json.hpp"

namespace edgenas {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kCheckpointFormat = 1;

Json config_json(const NetworkConfig& c) {
    Json j;
    j["num_cells"] = c.num_cells;
    j["num_nodes"] = c.num_nodes;
    j["d_v"] = c.d_v;
    j["d_e"] = c.d_e;
    j["dropout"] = c.dropout;
    Json t;
    t["level"] = std::string(name(c.task.level));
    t["num_classes"] = c.task.num_classes;
    t["loss"] = std::string(name(c.task.loss));
    t["metric"] = std::string(name(c.task.metric));
    j["task"] = std::move(t);
    return j;
}

NetworkConfig config_from_json(const nlohmann::json& j) {
    NetworkConfig c;
    c.num_cells = j.at("num_cells").get<std::size_t>();
    c.num_nodes = j.at("num_nodes").get<std::size_t>();
    c.d_v = j.at("d_v").get<std::size_t>();
    c.d_e = j.at("d_e").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
    const auto& t = j.at("task");
    c.task.level = parse_task_level(t.at("level").get<std::string>());
    c.task.num_classes = t.at("num_classes").get<std::size_t>();
    c.task.loss = parse_loss_kind(t.at("loss").get<std::string>());
    c.task.metric = parse_metric_kind(t.at("metric").get<std::string>());
    return c;
}

struct Slot {
    std::string name;
    Matrix* matrix;
};

std::vector<Slot> slots_of(ParamCollector& pc) {
    std::vector<Slot> out;
    for (ParamRef& p : pc.params) {
        out.push_back({p.name, &p.tensor.mutable_value()});
    }
    for (BufferRef& b : pc.buffers) {
        out.push_back({b.name, b.matrix});
    }
    return out;
}

}  // namespace

std::string network_config_to_json(const NetworkConfig& config) {
    return config_json(config).dump(2);
}

void save_checkpoint(const std::filesystem::path& dir, Network& net) {
    if (!net.genotype()) {
        throw ConfigError("only discrete networks can be checkpointed");
    }
    std::filesystem::create_directories(dir);
    ParamCollector pc = net.weights();
    Json manifest = Json::array();
    std::ofstream bin(dir / "model.bin", std::ios::binary | std::ios::trunc);
    if (!bin) {
        throw ConfigError("cannot write " + (dir / "model.bin").string());
    }
    std::size_t offset = 0;
    for (const Slot& s : slots_of(pc)) {
        Json entry;
        entry["name"] = s.name;
        entry["rows"] = s.matrix->rows();
        entry["cols"] = s.matrix->cols();
        entry["offset"] = offset;
        manifest.push_back(std::move(entry));
        const auto& values = s.matrix->values();
        bin.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
        offset += values.size();
    }
    Json meta;
    meta["format"] = kCheckpointFormat;
    meta["config"] = config_json(net.config());
    meta["genotype"] = Json::parse(genotype_to_json(*net.genotype()));
    meta["d_in_v"] = net.d_in_v();
    meta["d_in_e"] = net.d_in_e();
    meta["tensors"] = std::move(manifest);
    std::ofstream js(dir / "model.json", std::ios::binary | std::ios::trunc);
    if (!js) {
        throw ConfigError("cannot write " + (dir / "model.json").string());
    }
    js << meta.dump(2) << '\n';
}

Network load_checkpoint(const std::filesystem::path& dir) {
    std::ifstream js(dir / "model.json", std::ios::binary);
    if (!js) {
        throw ConfigError("cannot read " + (dir / "model.json").string());
    }
    std::stringstream buf;
    buf << js.rdbuf();
    try {
        const auto meta = nlohmann::json::parse(buf.str());
        if (meta.at("format").get<int>() != kCheckpointFormat) {
            throw ConfigError("unsupported checkpoint format");
        }
        const NetworkConfig config = config_from_json(meta.at("config"));
        const Genotype genotype = genotype_from_json(meta.at("genotype").dump());
        Network net = Network::discrete(config, genotype, meta.at("d_in_v").get<std::size_t>(),
                                        meta.at("d_in_e").get<std::size_t>(), 0);
        ParamCollector pc = net.weights();
        std::vector<Slot> slots = slots_of(pc);
        const auto& manifest = meta.at("tensors");
        if (manifest.size() != slots.size()) {
            throw ConfigError("checkpoint lists " + std::to_string(manifest.size()) +
                              " tensors, model has " + std::to_string(slots.size()));
        }
        std::ifstream bin(dir / "model.bin", std::ios::binary);
        if (!bin) {
            throw ConfigError("cannot read " + (dir / "model.bin").string());
        }
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const auto& entry = manifest[i];
            Slot& s = slots[i];
            if (entry.at("name").get<std::string>() != s.name ||
                entry.at("rows").get<std::size_t>() != s.matrix->rows() ||
                entry.at("cols").get<std::size_t>() != s.matrix->cols()) {
                throw ConfigError("checkpoint tensor " + std::to_string(i) + " (" +
                                  entry.at("name").get<std::string>() +
                                  ") does not match the model's " + s.name);
            }
            bin.seekg(static_cast<std::streamoff>(entry.at("offset").get<std::size_t>() *
                                                  sizeof(double)));
            auto& values = s.matrix->values();
            bin.read(reinterpret_cast<char*>(values.data()),
                     static_cast<std::streamsize>(values.size() * sizeof(double)));
            if (!bin) {
                throw ConfigError("checkpoint blob is truncated at " + s.name);
            }
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("checkpoint metadata: ") + e.what());
    }
}

}  // namespace edgenas
