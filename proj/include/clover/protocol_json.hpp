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

// Protocol JSON format:
//
//   {"format": "clover-protocol/1",
//    "budget": 2,
//    "rounds": [{"name": "send", "party": "Alice", "targets": ["A"],
//                "instrument": {"in": <layout>, "out": <layout>,
//                               "branches": [{"label": "ok",
//                                             "kraus": [{"rows": 2, "cols": 2, "data": [[re, im], ...]}]}]},
//                "broadcast": true,
//                "transfer": {"label": "Q", "dim": 2},            // optional
//                "condition_on": "measure",                       // optional
//                "conditioned": {"0": <instrument>, ...},         // optional
//                "postselect": ["success"]}]}                      // optional
//
// Layouts use the state format's register list. Kraus data is row-major.

#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "clover/sloccq.hpp"

namespace clover {

inline constexpr const char* kProtocolFormat = "clover-protocol/1";

nlohmann::json instrument_to_json(const Instrument& ins);
Instrument instrument_from_json(const nlohmann::json& j);
nlohmann::json protocol_to_json(const SloccqProtocol& protocol);
/// `budget_override` (when nonzero) replaces the file's budget.
SloccqProtocol protocol_from_json(const nlohmann::json& j, std::size_t budget_override = 0);
SloccqProtocol load_protocol(const std::filesystem::path& path, std::size_t budget_override = 0);
void save_protocol(const SloccqProtocol& protocol, const std::filesystem::path& path);

}  // namespace clover
