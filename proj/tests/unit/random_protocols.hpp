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

// Random pure inputs, random round-based protocols and an SVD rank oracle,
// shared by the unit tests and the acceptance binary.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clover/random.hpp"
#include "clover/sloccq.hpp"

namespace clover::testgen {

/// Schmidt rank of amplitudes ordered (Alice registers, Bob registers), via Eigen's SVD.
inline std::size_t oracle_rank(const Vector& v, std::size_t dim_alice) {
    const auto rows = static_cast<Eigen::Index>(dim_alice);
    const auto cols = v.size() / rows;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    std::size_t r = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > 1e-9 * s(0)) ++r;
    return r;
}

inline std::size_t oracle_rank(const QuantumState& s) {
    auto order = s.layout().party_labels(Party::Alice);
    const auto bob = s.layout().party_labels(Party::Bob);
    order.insert(order.end(), bob.begin(), bob.end());
    return oracle_rank(s.permuted(order).pure_vector(), s.layout().party_dim(Party::Alice));
}

/// Pure state on A (Alice) and B (Bob) with dimensions in 2..4.
inline QuantumState random_input(Rng& rng) {
    const std::size_t da = 2 + rng() % 3, db = 2 + rng() % 3;
    return random_pure_state(RegisterLayout({Register{"A", da, Party::Alice}, Register{"B", db, Party::Bob}}), rng);
}

/// One to three rounds. Each applies a two-outcome instrument to one register of the acting party and
/// creates a fresh register of dimension 2..4, which it hands over half of the time when allowed.
inline SloccqProtocol random_protocol(const RegisterLayout& input, Rng& rng, bool allow_transfer) {
    std::vector<Register> held = input.registers();
    std::vector<ProtocolRound> rounds;
    const std::size_t count = 1 + rng() % 3;
    std::size_t budget = 1;
    for (std::size_t k = 0; k < count; ++k) {
        const Party party = rng() % 2 ? Party::Alice : Party::Bob;
        std::vector<Register> own;
        for (const auto& r : held)
            if (r.party == party) own.push_back(r);
        const Register t = own[rng() % own.size()];
        const Register fresh{"Q" + std::to_string(k), 2 + rng() % 3, party};
        const auto din = static_cast<Eigen::Index>(t.dim);
        const auto dout = static_cast<Eigen::Index>(t.dim * fresh.dim);
        const Matrix iso = random_isometry(2 * dout, din, rng);
        ProtocolRound r;
        r.name = "r" + std::to_string(k);
        r.party = party;
        r.targets = {t.label};
        r.instrument = Instrument(RegisterLayout({t}), RegisterLayout({t, fresh}),
                                  {{"0", {iso.topRows(dout)}}, {"1", {iso.bottomRows(dout)}}});
        held.push_back(fresh);
        if (allow_transfer && rng() % 2) {
            r.transfer = QuantumTransfer{fresh.label, fresh.dim};
            budget *= fresh.dim;
            held.back().party = party == Party::Alice ? Party::Bob : Party::Alice;
        }
        rounds.push_back(std::move(r));
    }
    return SloccqProtocol(std::move(rounds), budget);
}

}  // namespace clover::testgen
