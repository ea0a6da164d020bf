// SPDX-License-Identifier: Apache-2.0
//
// skybeam: beamforming simulator for two-layer airborne massive-MIMO networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Checkpoint container: a magic line, a length-prefixed JSON manifest
// (actor kinds, layer names/shapes, Adam step counters, config hash), then
// the raw little-endian float64 arrays in manifest order (for each layer:
// values, then the two Adam moment tensors). The format is documented in
// the README and is stable.

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "skybeam/agents.hpp"

namespace skybeam {

namespace {

using nlohmann::json;

constexpr char kMagic[] = "SKYBEAMCKPT1\n";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

std::string hash_to_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t hex_to_hash(const std::string &s) {
    return std::stoull(s, nullptr, 16);
}

void write_doubles(std::ofstream &out, const std::vector<double> &v) {
    out.write(reinterpret_cast<const char *>(v.data()),
              std::streamsize(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream &in, std::vector<double> &v) {
    in.read(reinterpret_cast<char *>(v.data()), std::streamsize(v.size() * sizeof(double)));
    if (!in)
        throw std::runtime_error("checkpoint: truncated payload");
}

json actor_manifest(const ActorNet &net) {
    json layers = json::array();
    for (const auto &[name, p] : net.named_params())
    {
        json shape = json::array();
        for (int i = 0; i < p->value().shape.nd; ++i)
            shape.push_back(p->value().shape.d[std::size_t(i)]);
        layers.push_back({{"name", name}, {"shape", shape}, {"adam_step", p->step}});
    }
    return {{"kind", actor_kind_name(net.kind())},
            {"rows", net.dims().rows},
            {"cols", net.dims().cols},
            {"layers", layers}};
}

void write_actor(std::ofstream &out, const ActorNet &net) {
    for (const auto &[name, p] : net.named_params())
    {
        write_doubles(out, p->value().v);
        write_doubles(out, p->m.v);
        write_doubles(out, p->v.v);
    }
}

std::shared_ptr<ActorNet> read_actor(std::ifstream &in, const json &manifest,
                                     ActorKind expected_kind) {
    const std::string kind = manifest.at("kind").get<std::string>();
    if (kind != actor_kind_name(expected_kind))
        throw std::runtime_error("checkpoint: unexpected actor order");
    ActorDims dims{manifest.at("rows").get<int>(), manifest.at("cols").get<int>()};
    auto net = std::make_shared<ActorNet>(expected_kind, dims);

    auto params = net->named_params();
    const json &layers = manifest.at("layers");
    if (layers.size() != params.size())
        throw std::runtime_error("checkpoint: layer count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        auto &[name, p] = params[i];
        const json &layer = layers[i];
        if (layer.at("name").get<std::string>() != name)
            throw std::runtime_error("checkpoint: layer name mismatch at '" + name + "'");
        const json &shape = layer.at("shape");
        if (int(shape.size()) != p->value().shape.nd)
            throw std::runtime_error("checkpoint: layer rank mismatch at '" + name + "'");
        for (int d = 0; d < p->value().shape.nd; ++d)
            if (shape[std::size_t(d)].get<long>() != p->value().shape.d[std::size_t(d)])
                throw std::runtime_error("checkpoint: layer shape mismatch at '" + name + "'");
        p->step = layer.at("adam_step").get<long>();
        read_doubles(in, p->value().v);
        read_doubles(in, p->m.v);
        read_doubles(in, p->v.v);
    }
    return net;
}

} // namespace

void save_checkpoint(const std::string &path, const ActorPair &nets,
                     const RunConfig &cfg, int episodes_trained) {
    if (!nets.hab || !nets.haps)
        throw std::invalid_argument("save_checkpoint: both actors required");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("checkpoint: cannot write '" + path + "'");

    json header = {
        {"format", 1},
        {"config_hash", hash_to_hex(cfg.hash())},
        {"episodes_trained", episodes_trained},
        {"actors", json::array({actor_manifest(*nets.hab), actor_manifest(*nets.haps)})},
    };
    const std::string header_text = header.dump();
    const std::uint64_t len = header_text.size();

    out.write(kMagic, std::streamsize(kMagicLen));
    out.write(reinterpret_cast<const char *>(&len), sizeof(len));
    out.write(header_text.data(), std::streamsize(header_text.size()));
    write_actor(out, *nets.hab);
    write_actor(out, *nets.haps);
    if (!out)
        throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("checkpoint: cannot read '" + path + "'");

    char magic[kMagicLen];
    in.read(magic, std::streamsize(kMagicLen));
    if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0)
        throw std::runtime_error("checkpoint: bad magic in '" + path + "'");

    std::uint64_t len = 0;
    in.read(reinterpret_cast<char *>(&len), sizeof(len));
    if (!in || len == 0 || len > (1u << 20))
        throw std::runtime_error("checkpoint: bad header length");
    std::string header_text(len, '\0');
    in.read(header_text.data(), std::streamsize(len));
    if (!in)
        throw std::runtime_error("checkpoint: truncated header");

    json header = json::parse(header_text);
    if (header.at("format").get<int>() != 1)
        throw std::runtime_error("checkpoint: unsupported format version");
    const json &actors = header.at("actors");
    if (actors.size() != 2)
        throw std::runtime_error("checkpoint: expected two actors");

    Checkpoint ck;
    ck.config_hash = hex_to_hash(header.at("config_hash").get<std::string>());
    ck.episodes_trained = header.at("episodes_trained").get<int>();
    ck.nets.hab = read_actor(in, actors[0], ActorKind::kHab);
    ck.nets.haps = read_actor(in, actors[1], ActorKind::kHaps);
    return ck;
}

} // namespace skybeam
