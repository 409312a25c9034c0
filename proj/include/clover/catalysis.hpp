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

// Catalytic local operations turning rho into (1/n) rho^n + ((n-1)/n) sigma^n.
//
// The catalyst is the uniform mixture over i of rho^{(x) i} (x) sigma^{(x) n-1-i}
// held in n-1 slots per party. Each party reads i (from a classical flag
// register, or by measuring which slots hold a rho support), then shifts its
// registers: below the top value the fresh system copy moves into slot i+1 and
// the displaced sigma copy leaves as output together with n-1 freshly prepared
// sigma copies; at the top value all rho copies leave and fresh sigma copies
// refill the slots. Both parties see the same i, so nothing is communicated.
//
// Register naming for a rho register X: outputs X.1 .. X.n, catalyst slots
// C.X.1 .. C.X.(n-1), flags F_A and F_B.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clover/schmidt.hpp"
#include "clover/state.hpp"

namespace clover {

enum class FlagMode { ExplicitFlags, SupportMeasurement };

std::string_view to_string(FlagMode mode);
FlagMode flag_mode_from_string(std::string_view name);

inline const std::string kFlagAlice = "F_A";
inline const std::string kFlagBob = "F_B";

std::string output_label(const std::string& label, std::size_t copy);
std::string slot_label(const std::string& label, std::size_t copy);

/// True when the supports of rho and sigma are orthogonal on Alice's side and on Bob's side.
bool locally_orthogonal(const QuantumState& rho, const QuantumState& sigma);
/// SupportMeasurement when `locally_orthogonal`, ExplicitFlags otherwise.
FlagMode default_flag_mode(const QuantumState& rho, const QuantumState& sigma);

QuantumState build_catalyst(const QuantumState& rho, const QuantumState& sigma, std::size_t n, FlagMode mode);

struct CloChannels {
    KrausChannel alice;
    KrausChannel bob;
    std::vector<std::string> alice_targets;
    std::vector<std::string> bob_targets;
};

CloChannels build_clo_channels(const QuantumState& rho, const QuantumState& sigma, std::size_t n, FlagMode mode);

/// (1/n) rho^{(x) n} + ((n-1)/n) sigma^{(x) n} on the output registers, Alice's first.
QuantumState clo_target(const QuantumState& rho, const QuantumState& sigma, std::size_t n);

struct CatalyticProtocol {
    std::size_t n = 1;
    QuantumState rho;
    QuantumState sigma;
    FlagMode flag_mode = FlagMode::ExplicitFlags;
    CloChannels channels;
    QuantumState catalyst;

    std::vector<std::string> output_labels() const;
    std::vector<std::string> catalyst_labels() const { return catalyst.layout().labels(); }
};

/// Validates the inputs and builds catalyst and channels. Uses `default_flag_mode` when `mode` is empty.
CatalyticProtocol make_catalytic_protocol(const QuantumState& rho, const QuantumState& sigma, std::size_t n,
                                          std::optional<FlagMode> mode = std::nullopt);

struct CLORunReport {
    QuantumState output_state;
    QuantumState catalyst_out;
    double catalyst_restoration_distance = 0.0;
    double output_target_distance = 0.0;
    SNCertificate catalyst_sn;
    bool joint_available = false;
    std::optional<QuantumState> joint;
    double input_tolerance = 1e-9;
    bool dense = false;
};

struct RunOptions {
    /// Densify the joint state first (only for small instances).
    bool dense = false;
    /// Keep the final joint state in the report.
    bool keep_joint = false;
    /// Replace the channels before running (negative controls).
    std::optional<CloChannels> channels_override;
};

/// Runs the protocol on `input`, which must equal rho within trace distance 1e-9.
CLORunReport run_clo(const CatalyticProtocol& protocol, const QuantumState& input, const RunOptions& options = {});
/// Runs the channels on an input other than rho; no input check.
CLORunReport verify_input_sensitivity(const CatalyticProtocol& protocol, const QuantumState& wrong_input,
                                      const RunOptions& options = {});

}  // namespace clover
