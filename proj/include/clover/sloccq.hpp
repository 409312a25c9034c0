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

// Round-based stochastic LOCC with bounded quantum communication.
//
// A protocol is a list of rounds. In each round one party applies an
// instrument to registers it holds, optionally announces the outcome, and
// optionally hands one register to the other party. The product of the
// dimensions handed over is the quantum budget. Running a protocol produces a
// branch tree keyed by outcome labels; post-selection marks the successful
// leaves.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clover/schmidt.hpp"
#include "clover/state.hpp"

namespace clover {

struct QuantumTransfer {
    std::string label;
    std::size_t dim = 1;
};

struct ProtocolRound {
    std::string name;
    Party party = Party::Alice;
    std::vector<std::string> targets;
    Instrument instrument;
    /// Name of an earlier round whose outcome selects the instrument from `conditioned`.
    std::optional<std::string> condition_on;
    std::map<std::string, Instrument> conditioned;
    bool broadcast = true;
    std::optional<QuantumTransfer> transfer;
    /// Outcomes that keep the run alive. Empty means every outcome does.
    std::set<std::string> postselect;

    std::size_t transfer_dim() const { return transfer ? transfer->dim : 1; }
};

class SloccqProtocol {
   public:
    SloccqProtocol() = default;
    /// Raises BudgetError when the product of transfer dimensions exceeds `budget`,
    /// and PreconditionError for malformed rounds (unknown conditions, Referee actors...).
    SloccqProtocol(std::vector<ProtocolRound> rounds, std::size_t budget);

    const std::vector<ProtocolRound>& rounds() const { return rounds_; }
    std::size_t budget() const { return budget_; }
    std::size_t budget_used() const;

   private:
    std::vector<ProtocolRound> rounds_;
    std::size_t budget_ = 1;
};

struct ResourceLedger {
    std::size_t budget_used = 1;
    std::size_t sn_bound = 1;
};

struct BranchNode {
    /// Outcome label of every round run so far.
    std::vector<std::string> path;
    double probability = 1.0;
    QuantumState state;
    ResourceLedger ledger;
    bool success = true;
    bool leaf = false;
};

struct BranchTree {
    std::vector<BranchNode> nodes;
    std::size_t input_sn = 1;

    std::vector<const BranchNode*> leaves() const;
    double success_probability() const;
    /// Normalized mixture of the successful leaves.
    QuantumState final_state() const;
    std::size_t max_budget_used() const;
};

/// Runs every branch to completion. `input_sn` seeds the ledger; 0 means "derive it"
/// (Schmidt rank for pure inputs, decomposition upper bound otherwise).
BranchTree run_protocol(const SloccqProtocol& protocol, const QuantumState& input, std::size_t input_sn = 0);

std::size_t ledger_bound(std::size_t input_sn, const std::vector<ProtocolRound>& rounds);

struct ImpossibilityCertificate {
    bool impossible = false;
    std::size_t input_sn_upper = 1;
    std::size_t target_sn_lower = 1;
    std::size_t budget = 1;
    std::string statement;
};

/// Impossible iff budget * input_upper < target_lower; otherwise a refusal that claims nothing.
ImpossibilityCertificate certify_impossible(const SNCertificate& input, const SNCertificate& target, std::size_t budget);

struct FilterResult {
    Instrument instrument;
    std::vector<std::string> targets;
    double success_probability = 1.0;
    std::size_t schmidt_rank = 1;
};

/// Local filter on Alice's registers turning a pure state into a maximally entangled one of the
/// same Schmidt rank. The success outcome is "success"; its output register `out_label` (dim k)
/// carries Alice's Schmidt basis mapped to the computational basis.
FilterResult filter_to_max_entangled(const QuantumState& v, const std::string& out_label = "~EA");

/// Teleportation of `payload` (held by Alice) through a maximally entangled pair (alice_half, bob_half)
/// of the same dimension. Bob's half ends up relabeled `bob_out`.
std::vector<ProtocolRound> teleport_register(const std::string& payload, const std::string& alice_half,
                                             const std::string& bob_half, std::size_t d, const std::string& bob_out,
                                             const std::string& name_prefix = "teleport");

struct ConverseProtocol {
    SloccqProtocol protocol;
    std::size_t input_rank = 1;
    std::size_t shared_dim = 1;
    double filter_success_probability = 1.0;
};

/// Filtration, one quantum send of dimension `budget`, and teleportation-based preparation of `target`.
ConverseProtocol construct_converse(const QuantumState& input, const QuantumState& target, std::size_t budget);

struct CatalystPrep {
    SloccqProtocol protocol;
    std::size_t max_branch_rank = 1;
};

/// Alice samples a catalyst branch, sends Bob's part compressed onto its Schmidt support, and Bob
/// decompresses. The budget is the largest branch Schmidt rank.
CatalystPrep compile_catalyst_prep(const QuantumState& catalyst);

/// Rank-k pure-branch decomposition used by the converse: explicit ensemble branches, the orthogonal
/// mixture oracle, or the spectral decomposition for pure/dense inputs.
std::vector<std::pair<double, Vector>> preparation_components(const QuantumState& target);

}  // namespace clover
