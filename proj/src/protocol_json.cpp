// Copyright 2026 The Clover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clover/protocol_json.hpp"

#include <fstream>

#include "clover/state_json.hpp"

namespace clover {

using nlohmann::json;

json instrument_to_json(const Instrument& ins) {
    json branches = json::array();
    for (const auto& b : ins.branches()) {
        json kraus = json::array();
        for (const auto& k : b.kraus) kraus.push_back({{"rows", k.rows()}, {"cols", k.cols()}, {"data", matrix_to_json(k)}});
        branches.push_back({{"label", b.label}, {"kraus", std::move(kraus)}});
    }
    return {{"in", layout_to_json(ins.layout_in())},
            {"out", layout_to_json(ins.layout_out())},
            {"branches", std::move(branches)}};
}

Instrument instrument_from_json(const json& j) {
    RegisterLayout in = layout_from_json(j.at("in"));
    RegisterLayout out = layout_from_json(j.at("out"));
    std::vector<InstrumentBranch> branches;
    for (const auto& jb : j.at("branches")) {
        InstrumentBranch b{jb.at("label").get<std::string>(), {}};
        for (const auto& jk : jb.at("kraus")) {
            const auto rows = jk.at("rows").get<Eigen::Index>();
            const auto cols = jk.at("cols").get<Eigen::Index>();
            if (rows != static_cast<Eigen::Index>(out.total_dim()) || cols != static_cast<Eigen::Index>(in.total_dim())) {
                throw FormatError("Kraus operator of outcome '" + b.label + "' has the wrong shape");
            }
            b.kraus.push_back(matrix_from_json(jk.at("data"), rows, cols));
        }
        branches.push_back(std::move(b));
    }
    return Instrument(std::move(in), std::move(out), std::move(branches));
}

json protocol_to_json(const SloccqProtocol& protocol) {
    json rounds = json::array();
    for (const auto& r : protocol.rounds()) {
        json jr{{"name", r.name},
                {"party", std::string(to_string(r.party))},
                {"targets", r.targets},
                {"instrument", instrument_to_json(r.instrument)},
                {"broadcast", r.broadcast}};
        if (r.transfer) jr["transfer"] = {{"label", r.transfer->label}, {"dim", r.transfer->dim}};
        if (r.condition_on) {
            jr["condition_on"] = *r.condition_on;
            json cond = json::object();
            for (const auto& [label, ins] : r.conditioned) cond[label] = instrument_to_json(ins);
            jr["conditioned"] = std::move(cond);
        }
        if (!r.postselect.empty()) jr["postselect"] = r.postselect;
        rounds.push_back(std::move(jr));
    }
    return {{"format", kProtocolFormat}, {"budget", protocol.budget()}, {"rounds", std::move(rounds)}};
}

SloccqProtocol protocol_from_json(const json& j, std::size_t budget_override) {
    try {
        if (j.contains("format") && j.at("format") != kProtocolFormat) {
            throw FormatError("unsupported protocol format '" + j.at("format").dump() + "'");
        }
        std::vector<ProtocolRound> rounds;
        for (const auto& jr : j.at("rounds")) {
            ProtocolRound r;
            r.name = jr.value("name", "");
            r.party = party_from_string(jr.at("party").get<std::string>());
            r.targets = jr.value("targets", std::vector<std::string>{});
            r.instrument = instrument_from_json(jr.at("instrument"));
            r.broadcast = jr.value("broadcast", true);
            if (jr.contains("transfer")) {
                r.transfer = QuantumTransfer{jr.at("transfer").at("label").get<std::string>(),
                                             jr.at("transfer").at("dim").get<std::size_t>()};
            }
            if (jr.contains("condition_on")) {
                r.condition_on = jr.at("condition_on").get<std::string>();
                const json conditioned = jr.value("conditioned", json::object());
                for (const auto& [label, ji] : conditioned.items()) {
                    r.conditioned.emplace(label, instrument_from_json(ji));
                }
            }
            if (jr.contains("postselect")) r.postselect = jr.at("postselect").get<std::set<std::string>>();
            rounds.push_back(std::move(r));
        }
        const std::size_t budget = budget_override ? budget_override : j.value("budget", std::size_t{1});
        return SloccqProtocol(std::move(rounds), budget);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed protocol JSON: ") + e.what());
    }
}

SloccqProtocol load_protocol(const std::filesystem::path& path, std::size_t budget_override) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open protocol file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("cannot parse '" + path.string() + "': " + e.what());
    }
    return protocol_from_json(j, budget_override);
}

void save_protocol(const SloccqProtocol& protocol, const std::filesystem::path& path) {
    write_file_atomically(path, protocol_to_json(protocol).dump(2) + "\n");
}

}  // namespace clover
