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

// JSON state format:
//
//   {"layout": [{"label": "A", "dim": 2, "party": "Alice"}, ...],
//    "dense": [[re, im], ...]}                      // row-major density matrix
// or
//   {"layout": [...],
//    "ensemble": [{"p": 0.5,
//                  "factors": [{"labels": ["A", "B"], "vector": [[re, im], ...]},
//                              {"labels": ["R"], "block": [[re, im], ...]}]}]}
//
// "block" (row-major density block) is accepted in addition to "vector" for
// mixed factors.

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "clover/state.hpp"

namespace clover {

nlohmann::json layout_to_json(const RegisterLayout& layout);
RegisterLayout layout_from_json(const nlohmann::json& j);
nlohmann::json complex_list(const Vector& v);
Vector complex_vector(const nlohmann::json& j);
/// Row-major [re, im] list of a matrix.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols);

nlohmann::json state_to_json(const QuantumState& s);
QuantumState state_from_json(const nlohmann::json& j);

QuantumState load_state(const std::filesystem::path& path);
void save_state(const QuantumState& s, const std::filesystem::path& path);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace clover
