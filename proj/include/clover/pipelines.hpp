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

// End-to-end verification pipelines. Each returns a ReportDocument whose
// verdict is "verified" only if every check passes.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clover/catalysis.hpp"
#include "clover/report.hpp"
#include "clover/sloccq.hpp"

namespace clover {

struct PipelineOptions {
    /// Strength of the channel corruption used as a negative control (0 disables it).
    double corrupt = 0.0;
    std::uint64_t seed = 20260415;
};

/// Phi+ on the {0, 1} subspace of two qutrits A (Alice) and B (Bob).
QuantumState embedded_phi_plus();
/// |22> on qutrits A and B.
QuantumState ket22();

/// Catalytic transformation with n+1 copies against the SLOCCQ budget 2^n - 1; n in {1, 2}.
ReportDocument pipeline_theorem(std::size_t n, const PipelineOptions& options = {});
/// Catalytic protocol for user states; n in {1, 2, 3}.
ReportDocument pipeline_lemma1(const QuantumState& rho, const QuantumState& sigma, std::size_t n,
                               const PipelineOptions& options = {},
                               nlohmann::json inputs = nlohmann::json::object());
/// Catalyst compiled into an SLOCCQ preparation followed by the catalytic channels; n in {2, 3}.
/// With `shared_randomness` the system state is the product |01>, so the catalyst has Schmidt number 1.
ReportDocument pipeline_obs1(std::size_t n, const PipelineOptions& options = {}, bool shared_randomness = false);
/// One-bit LOCC transformation with a referee and its conditional-entropy obstruction.
ReportDocument pipeline_obs3(const PipelineOptions& options = {});
/// Schmidt data of a state. `cut_left` (optional) puts those registers on Alice's side, the rest on Bob's.
ReportDocument pipeline_schmidt(const QuantumState& state, const std::vector<std::string>& cut_left = {});
/// Runs a protocol and checks the ledger on every branch; compares with `target` when given.
ReportDocument pipeline_simulate(const SloccqProtocol& protocol, const QuantumState& input,
                                 const std::optional<QuantumState>& target = std::nullopt,
                                 nlohmann::json inputs = nlohmann::json::object());

/// Channels with the Alice channel corrupted by `eps` (see corrupt_channel).
CloChannels corrupted_channels(const CloChannels& channels, double eps);

}  // namespace clover
