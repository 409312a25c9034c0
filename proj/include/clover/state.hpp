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

// Density operators with party structure, Kraus channels and instruments.
//
// A QuantumState is either a dense density matrix or an ensemble: a
// probability-weighted list of branches, each branch a tensor product of
// factors over disjoint register groups. Pure states are single-branch
// ensembles. Ensembles are what make the larger catalytic protocols
// tractable: their joint states never need a dense matrix.

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "clover/tensor.hpp"

namespace clover {

/// Probability below which an instrument outcome is treated as impossible.
constexpr double kZeroProbability = 1e-12;

/// One tensor factor of an ensemble branch. Holds either normalized amplitudes
/// or a unit-trace density block over `labels` (in that register order).
struct Factor {
    std::vector<std::string> labels;
    std::variant<Vector, Matrix> data;

    bool is_pure() const { return std::holds_alternative<Vector>(data); }
    const Vector& vector() const { return std::get<Vector>(data); }
    const Matrix& block() const { return std::get<Matrix>(data); }
    /// Density matrix of the factor (outer product for pure factors).
    Matrix density() const;
};

struct Branch {
    double probability = 1.0;
    std::vector<Factor> factors;
};

class QuantumState {
   public:
    /// The state on no registers.
    QuantumState() : QuantumState(RegisterLayout(), std::vector<Branch>{Branch{}}) {}
    /// Validates Hermiticity, positivity and unit trace.
    static QuantumState dense(RegisterLayout layout, Matrix rho);
    /// Validates probabilities, factor normalization and that every branch covers the layout exactly once.
    static QuantumState ensemble(RegisterLayout layout, std::vector<Branch> branches);
    static QuantumState pure(RegisterLayout layout, Vector amplitudes);

    const RegisterLayout& layout() const { return layout_; }
    bool is_dense() const { return std::holds_alternative<Matrix>(rep_); }
    bool is_ensemble() const { return !is_dense(); }
    const Matrix& dense_matrix() const;
    const std::vector<Branch>& branches() const;

    /// Dense density matrix in layout order. Raises DenseCapError above kDenseCap.
    Matrix density() const;
    QuantumState to_dense() const;
    Operator as_operator() const { return Operator::square(layout_, density()); }

    bool is_pure() const;
    /// Amplitudes in layout order (global phase arbitrary for dense inputs).
    Vector pure_vector() const;

    /// Same state with register `label` handed to `party`.
    QuantumState with_party(const std::string& label, Party party) const;
    /// Same state with registers reordered.
    QuantumState permuted(const std::vector<std::string>& new_order) const;
    /// Same state with registers renamed (missing labels keep their names).
    QuantumState relabeled(const std::map<std::string, std::string>& renames) const;

   private:
    QuantumState(RegisterLayout layout, std::variant<Matrix, std::vector<Branch>> rep)
        : layout_(std::move(layout)), rep_(std::move(rep)) {}

    RegisterLayout layout_;
    std::variant<Matrix, std::vector<Branch>> rep_;
};

/// Completely positive map given by Kraus operators, possibly between different layouts.
class KrausChannel {
   public:
    /// Identity on no registers.
    KrausChannel() : kraus_{Matrix::Identity(1, 1)} {}
    /// Validates shapes and trace preservation (sum K^dagger K = I within 1e-9).
    KrausChannel(RegisterLayout layout_in, RegisterLayout layout_out, std::vector<Matrix> kraus);

    const RegisterLayout& layout_in() const { return layout_in_; }
    const RegisterLayout& layout_out() const { return layout_out_; }
    const std::vector<Matrix>& kraus() const { return kraus_; }

    /// max |sum K^dagger K - I| entrywise.
    double trace_preservation_defect() const;

   private:
    RegisterLayout layout_in_;
    RegisterLayout layout_out_;
    std::vector<Matrix> kraus_;
};

struct InstrumentBranch {
    std::string label;
    std::vector<Matrix> kraus;
};

/// Quantum instrument: labelled CP branches that jointly form a trace-preserving map.
class Instrument {
   public:
    /// Identity on no registers with the single outcome "ok".
    Instrument() : branches_{InstrumentBranch{"ok", {Matrix::Identity(1, 1)}}} {}
    Instrument(RegisterLayout layout_in, RegisterLayout layout_out, std::vector<InstrumentBranch> branches);
    /// Single-outcome instrument running a channel.
    static Instrument from_channel(const KrausChannel& channel, std::string label = "ok");

    const RegisterLayout& layout_in() const { return layout_in_; }
    const RegisterLayout& layout_out() const { return layout_out_; }
    const std::vector<InstrumentBranch>& branches() const { return branches_; }
    KrausChannel as_channel() const;

   private:
    RegisterLayout layout_in_;
    RegisterLayout layout_out_;
    std::vector<InstrumentBranch> branches_;
};

struct InstrumentOutcome {
    std::string label;
    double probability = 0.0;
    QuantumState state;
};

// Constructors.

/// (1/sqrt d) sum_k |kk> with Alice holding `alice` and Bob holding `bob`.
QuantumState max_entangled(std::size_t d, const std::string& alice = "A", const std::string& bob = "B");
/// Computational basis product state.
QuantumState basis_product(const std::vector<std::pair<Register, std::size_t>>& indices);
/// Isometric embedding into larger local dimensions.
QuantumState embed_local_dims(const QuantumState& s, const std::map<std::string, std::size_t>& new_dims);
QuantumState maximally_mixed(const RegisterLayout& layout);

// Structural operations.

QuantumState tensor(const QuantumState& a, const QuantumState& b);
QuantumState partial_trace(const QuantumState& s, const std::set<std::string>& discard);
QuantumState marginal(const QuantumState& s, const std::vector<std::string>& keep);
/// Convex combination of states on the same layout (weights are renormalized).
QuantumState mix(const std::vector<std::pair<double, QuantumState>>& parts);
/// Replaces dense factor blocks by their spectral ensembles; every factor becomes pure.
QuantumState purify_factors(const QuantumState& s);

/// Layout after replacing `targets` by `out`: outputs take the position of the first
/// target (or go last when there are no targets), remaining registers keep their order.
RegisterLayout layout_after(const RegisterLayout& layout, const std::vector<std::string>& targets,
                            const RegisterLayout& out);

QuantumState apply_channel(const KrausChannel& ch, const QuantumState& s, const std::vector<std::string>& targets);
std::vector<InstrumentOutcome> apply_instrument(const Instrument& ins, const QuantumState& s,
                                                const std::vector<std::string>& targets);

/// <b|a|b> for pure b on the same register set.
double fidelity(const QuantumState& a, const QuantumState& b);
/// Half the trace norm of a - b. Both states are densified.
double trace_distance(const QuantumState& a, const QuantumState& b);
double min_eigenvalue(const QuantumState& s);

// Channel helpers.

/// Channel that discards the given layout entirely.
KrausChannel discard_channel(const RegisterLayout& layout_in);
/// Channel preparing `state` on fresh registers from no input.
KrausChannel preparation_channel(const QuantumState& state);
/// Adds Kraus operators mapping the deficient subspace of a trace-decreasing set to the
/// first basis state of the output, producing a trace-preserving channel.
KrausChannel complete_to_channel(const RegisterLayout& layout_in, const RegisterLayout& layout_out,
                                 std::vector<Matrix> kraus);
/// sqrt(1-eps) K + sqrt(eps) X K for the cyclic shift X on the first output register.
/// Used by the negative controls of the verification pipelines.
KrausChannel corrupt_channel(const KrausChannel& ch, double eps);

/// Largest deviation between the ensemble route and the dense route for marginals,
/// fidelities and purity. Requires layout total dimension <= kDenseCap.
double ensemble_dense_deviation(const QuantumState& s);

}  // namespace clover
