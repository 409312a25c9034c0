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

// Seeded random states and operations (Haar-like via Gaussian + QR).

#pragma once

#include <random>

#include "clover/state.hpp"

namespace clover {

using Rng = std::mt19937_64;

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Vector random_unit_vector(Eigen::Index n, Rng& rng);
Matrix random_unitary(Eigen::Index n, Rng& rng);
/// rows >= cols; orthonormal columns.
Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng);
/// Density matrix of rank <= `rank` (0 means full rank).
Matrix random_density(Eigen::Index n, Rng& rng, Eigen::Index rank = 0);
QuantumState random_pure_state(const RegisterLayout& layout, Rng& rng);
/// Channel with `num_kraus` Kraus operators obtained by slicing a random isometry.
KrausChannel random_channel(const RegisterLayout& in, const RegisterLayout& out, Eigen::Index num_kraus, Rng& rng);

}  // namespace clover
