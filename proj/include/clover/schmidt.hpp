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

// Schmidt decompositions, Schmidt-number certificates and entropies.
//
// The Schmidt number of a general mixed state is not computed. Certificates
// come from structured oracles (pure states, rank-two mixtures with a product
// component on locally orthogonal supports, block states separated by local
// classical flags) and from generic witness and decomposition bounds. Anything
// outside those families gets a "refused" certificate carrying only the
// trivial bounds.

#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "clover/state.hpp"

namespace clover {

/// Relative rank threshold: a coefficient counts if it exceeds tolerance * largest.
constexpr double kSchmidtRankTol = 1e-9;

struct SchmidtReport {
    RealVector coefficients;  // descending
    std::size_t rank = 0;
    double rank_tolerance = kSchmidtRankTol;
};

enum class SnMethod {
    PureRank,
    FidelityWitness,
    OrthogonalMixtureOracle,
    FlaggedBlockOracle,
    DecompositionUpper,
    Ledger,
    Refused,
};

std::string_view to_string(SnMethod method);

struct SNCertificate {
    std::size_t lower = 1;
    std::size_t upper = 1;
    SnMethod method = SnMethod::Refused;
    nlohmann::json details = nlohmann::json::object();
    /// Optional pure-state decomposition achieving `upper` (amplitudes in the state's layout order).
    std::vector<std::pair<double, Vector>> decomposition;

    bool exact() const { return lower == upper && method != SnMethod::Refused; }
    bool refused() const { return method == SnMethod::Refused; }
};

SchmidtReport schmidt_rank(const Vector& v, const RegisterLayout& layout, const Cut& cut,
                           double tolerance = kSchmidtRankTol);
/// Across the Alice/Bob cut of the state's layout. Raises PreconditionError on mixed input.
SchmidtReport schmidt_rank(const QuantumState& v, double tolerance = kSchmidtRankTol);

/// Schmidt rank of an all-pure ensemble branch across the Alice/Bob cut (product over factors).
std::size_t branch_schmidt_rank(const RegisterLayout& layout, const Branch& branch);

SNCertificate sn_pure(const QuantumState& v);
/// SN >= ceil(d F) for F the fidelity with a maximally entangled witness of Schmidt rank d.
SNCertificate sn_lower_fidelity(const QuantumState& s, const QuantumState& witness);
/// Exact oracle for p|psi><psi| + (1-p)|phi><phi| with phi product on locally orthogonal supports.
SNCertificate sn_orthogonal_mixture(const QuantumState& s);
/// Exact for ensembles whose blocks (grouped by the values of `flag_labels`, or one block per
/// branch when empty) sit on mutually orthogonal local supports: SN = max block SN.
SNCertificate sn_flagged_blocks(const QuantumState& s, const std::vector<std::string>& flag_labels = {});
/// Upper bound: largest branch Schmidt rank of the ensemble (after purifying factors).
SNCertificate sn_decomposition_upper(const QuantumState& s);

/// Rank of a party's marginal (eigenvalues above 1e-10).
std::size_t local_support_rank(const QuantumState& s, Party party);

/// Entropies in bits.
double von_neumann_entropy(const Matrix& rho);
double von_neumann_entropy(const QuantumState& s);
/// H(target | condition_on) = S(joint) - S(condition_on), target being every other register.
double conditional_entropy(const QuantumState& s, const std::set<std::string>& condition_on);
double entanglement_entropy(const QuantumState& v);

}  // namespace clover
