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

#include "clover/catalysis.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "clover/errors.hpp"
#include "clover/random.hpp"
#include "oracles.hpp"

namespace clover {
namespace {

const Register kA3{"A", 3, Party::Alice};
const Register kB3{"B", 3, Party::Bob};

QuantumState phi3() { return embed_local_dims(max_entangled(2), {{"A", 3}, {"B", 3}}); }
QuantumState ket22() { return basis_product({{kA3, 2}, {kB3, 2}}); }

/// |psi>^{(x) n} with Alice registers first: amplitudes <a_1..a_n b_1..b_n| = prod_k psi(a_k, b_k).
Vector alice_first_power(const Vector& psi, std::size_t d, std::size_t n) {
    std::vector<std::size_t> dims(2 * n, d);
    const std::size_t total = oracle::product(dims);
    Vector out(static_cast<Eigen::Index>(total));
    for (std::size_t idx = 0; idx < total; ++idx) {
        const auto dg = oracle::digits(idx, dims);
        Complex amp = 1.0;
        for (std::size_t k = 0; k < n; ++k) amp *= psi(static_cast<Eigen::Index>(dg[k] * d + dg[n + k]));
        out(static_cast<Eigen::Index>(idx)) = amp;
    }
    return out;
}

/// (1/n) rho^n + ((n-1)/n) sigma^n from raw vectors, on A.1..A.n B.1..B.n.
Matrix target_oracle(const Vector& rho, const Vector& sigma, std::size_t d, std::size_t n) {
    const Vector r = alice_first_power(rho, d, n), s = alice_first_power(sigma, d, n);
    const double nn = static_cast<double>(n);
    return (1.0 / nn) * r * r.adjoint() + ((nn - 1.0) / nn) * s * s.adjoint();
}

Vector phi3_vector() {
    Vector v = Vector::Zero(9);
    v(0) = v(4) = 1.0 / std::sqrt(2.0);
    return v;
}

TEST(FlagMode, NamesRoundTrip) {
    for (FlagMode m : {FlagMode::ExplicitFlags, FlagMode::SupportMeasurement}) {
        EXPECT_EQ(flag_mode_from_string(to_string(m)), m);
    }
    EXPECT_THROW(flag_mode_from_string("telepathy"), Error);
}

TEST(BuildCatalyst, SingleCopyIsTrivial) {
    const QuantumState c = build_catalyst(phi3(), ket22(), 1, FlagMode::SupportMeasurement);
    EXPECT_TRUE(c.layout().empty());
    const QuantumState f = build_catalyst(phi3(), ket22(), 1, FlagMode::ExplicitFlags);
    EXPECT_EQ(f.layout().labels(), (std::vector<std::string>{kFlagAlice, kFlagBob}));
    EXPECT_EQ(f.layout().total_dim(), 1u);
}

TEST(BuildCatalyst, TwoCopiesIsHalfSigmaHalfRho) {
    const QuantumState c = build_catalyst(phi3(), ket22(), 2, FlagMode::ExplicitFlags);
    EXPECT_EQ(c.layout().labels(), (std::vector<std::string>{"C.A.1", "C.B.1", kFlagAlice, kFlagBob}));
    ASSERT_TRUE(c.is_ensemble());
    EXPECT_EQ(c.branches().size(), 2u);
    // Flag i tags slot content: i = 0 -> sigma, i = 1 -> rho.
    const Vector f0 = oracle::kron(oracle::basis(2, 0), oracle::basis(2, 0));
    const Vector f1 = oracle::kron(oracle::basis(2, 1), oracle::basis(2, 1));
    const Vector b0 = oracle::kron(oracle::basis(9, 8), f0);
    const Vector b1 = oracle::kron(phi3_vector(), f1);
    const Matrix expected = 0.5 * b0 * b0.adjoint() + 0.5 * b1 * b1.adjoint();
    EXPECT_LE(oracle::max_abs(c.density() - expected), 1e-12);
    EXPECT_EQ(sn_flagged_blocks(c, {kFlagAlice, kFlagBob}).upper, 2u);
}

TEST(BuildCatalyst, ThreeCopiesHasThreeBranches) {
    const QuantumState c = build_catalyst(phi3(), ket22(), 3, FlagMode::SupportMeasurement);
    EXPECT_EQ(c.layout().labels(), (std::vector<std::string>{"C.A.1", "C.A.2", "C.B.1", "C.B.2"}));
    ASSERT_EQ(c.branches().size(), 3u);
    // Branch i: slots 1..i hold rho, the rest sigma. Layout C.A.1 C.A.2 C.B.1 C.B.2.
    const Vector s = oracle::basis(9, 8);
    const std::vector<std::vector<Vector>> slots{{s, s}, {phi3_vector(), s}, {phi3_vector(), phi3_vector()}};
    const Matrix p = oracle::permutation({3, 3, 3, 3}, {0, 2, 1, 3});  // A1 B1 A2 B2 -> A1 A2 B1 B2
    Matrix expected = Matrix::Zero(81, 81);
    for (const auto& sl : slots) {
        const Vector v = p * oracle::kron(sl[0], sl[1]);
        expected += (1.0 / 3.0) * v * v.adjoint();
    }
    EXPECT_LE(oracle::max_abs(c.density() - expected), 1e-12);
    const SNCertificate sn = sn_flagged_blocks(c);
    EXPECT_EQ(sn.lower, 4u);
    EXPECT_EQ(sn.upper, 4u);
}

TEST(BuildCatalyst, Preconditions) {
    EXPECT_THROW(build_catalyst(phi3(), phi3(), 2, FlagMode::ExplicitFlags), PreconditionError);
    const QuantumState sigma_overlap = basis_product({{kA3, 0}, {kB3, 2}});
    EXPECT_FALSE(locally_orthogonal(phi3(), sigma_overlap));
    EXPECT_THROW(build_catalyst(phi3(), sigma_overlap, 2, FlagMode::SupportMeasurement), PreconditionError);
    EXPECT_NO_THROW(build_catalyst(phi3(), sigma_overlap, 2, FlagMode::ExplicitFlags));
    EXPECT_EQ(default_flag_mode(phi3(), sigma_overlap), FlagMode::ExplicitFlags);
    EXPECT_EQ(default_flag_mode(phi3(), ket22()), FlagMode::SupportMeasurement);
}

TEST(CloChannels, AreTracePreserving) {
    for (std::size_t n = 1; n <= 3; ++n) {
        for (FlagMode m : {FlagMode::ExplicitFlags, FlagMode::SupportMeasurement}) {
            const CloChannels ch = build_clo_channels(phi3(), ket22(), n, m);
            EXPECT_LE(ch.alice.trace_preservation_defect(), 1e-9);
            EXPECT_LE(ch.bob.trace_preservation_defect(), 1e-9);
        }
    }
}

TEST(CloChannels, SingleCopyOutputsTheSystem) {
    const CatalyticProtocol p = make_catalytic_protocol(phi3(), ket22(), 1, FlagMode::SupportMeasurement);
    const CLORunReport r = run_clo(p, phi3());
    EXPECT_LE(r.output_target_distance, 1e-12);
    EXPECT_EQ(r.catalyst_restoration_distance, 0.0);
    EXPECT_NEAR(fidelity(r.output_state, phi3().relabeled({{"A", "A.1"}, {"B", "B.1"}})), 1.0, 1e-12);
}

/// Runs both channels on input (x) (one catalyst branch with flags), returning the joint state.
QuantumState run_branch(const QuantumState& rho, const QuantumState& sigma, const QuantumState& branch, bool dense) {
    const CloChannels ch = build_clo_channels(rho, sigma, 2, FlagMode::ExplicitFlags);
    QuantumState joint = tensor(rho, branch);
    if (dense) joint = joint.to_dense();
    joint = apply_channel(ch.alice, joint, ch.alice_targets);
    return apply_channel(ch.bob, joint, ch.bob_targets);
}

QuantumState flags(std::size_t i) {
    return basis_product({{Register{kFlagAlice, 2, Party::Alice}, i}, {Register{kFlagBob, 2, Party::Bob}, i}});
}

TEST(CloChannels, TwoCopyBranchBookkeepingOnQubits) {
    // Qubit Phi+ and |11> (explicit flags) keep every joint state small enough for a dense run.
    const Register a{"A", 2, Party::Alice}, b{"B", 2, Party::Bob};
    const QuantumState rho = max_entangled(2);
    const QuantumState sigma = basis_product({{a, 1}, {b, 1}});
    const std::map<std::string, std::string> to_slot{{"A", "C.A.1"}, {"B", "C.B.1"}};
    const std::map<std::string, std::string> to_out1{{"A", "A.1"}, {"B", "B.1"}};
    const std::map<std::string, std::string> to_out2{{"A", "A.2"}, {"B", "B.2"}};
    const std::vector<std::string> out_order{"A.1", "A.2", "B.1", "B.2"};

    const Vector phi{{1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)}};
    const Vector k11 = oracle::basis(4, 3);
    for (bool dense : {false, true}) {
        // Flag 1: the slot holds rho. Output rho rho, new catalyst sigma, flag 0.
        const QuantumState joint1 = run_branch(rho, sigma, tensor(rho.relabeled(to_slot), flags(1)), dense);
        const Vector rr = alice_first_power(phi, 2, 2);
        EXPECT_LE(oracle::max_abs(marginal(joint1, out_order).density() - rr * rr.adjoint()), 1e-12);
        EXPECT_LE(oracle::max_abs(marginal(joint1, {"C.A.1", "C.B.1"}).density() - k11 * k11.adjoint()), 1e-12);
        EXPECT_NEAR(marginal(joint1, {kFlagAlice, kFlagBob}).density()(0, 0).real(), 1.0, 1e-12);

        // Flag 0: the slot holds sigma. Output sigma sigma, new catalyst rho, flag 1.
        const QuantumState joint0 = run_branch(rho, sigma, tensor(sigma.relabeled(to_slot), flags(0)), dense);
        const Vector ss = alice_first_power(k11, 2, 2);
        EXPECT_LE(oracle::max_abs(marginal(joint0, out_order).density() - ss * ss.adjoint()), 1e-12);
        EXPECT_LE(oracle::max_abs(marginal(joint0, {"C.A.1", "C.B.1"}).density() - phi * phi.adjoint()), 1e-12);
        EXPECT_NEAR(marginal(joint0, {kFlagAlice, kFlagBob}).density()(3, 3).real(), 1.0, 1e-12);
    }
}

TEST(RunClo, TwoAndThreeCopiesOfEmbeddedPhiPlus) {
    for (std::size_t n : {2u, 3u}) {
        const CatalyticProtocol p = make_catalytic_protocol(phi3(), ket22(), n);
        EXPECT_EQ(p.flag_mode, FlagMode::SupportMeasurement);
        const CLORunReport r = run_clo(p, phi3());
        EXPECT_LE(r.output_target_distance, 1e-10);
        EXPECT_LE(r.catalyst_restoration_distance, 1e-10);
        const Matrix expected = target_oracle(phi3_vector(), oracle::basis(9, 8), 3, n);
        EXPECT_LE(oracle::trace_distance(r.output_state.density(), expected), 1e-10);
        EXPECT_EQ(r.catalyst_sn.upper, std::size_t{1} << (n - 1));
        EXPECT_EQ(r.catalyst_sn.lower, std::size_t{1} << (n - 1));
        // The output has Schmidt number SN(rho) times the catalyst budget.
        EXPECT_EQ(sn_orthogonal_mixture(r.output_state).lower, std::size_t{1} << n);
    }
}

TEST(RunClo, DenseCrossCheckOfMarginals) {
    const CatalyticProtocol p = make_catalytic_protocol(phi3(), ket22(), 2);
    const CLORunReport e = run_clo(p, phi3());
    RunOptions dense;
    dense.dense = true;
    const CLORunReport d = run_clo(p, phi3(), dense);
    EXPECT_LE(trace_distance(e.output_state, d.output_state), 1e-9);
    EXPECT_LE(trace_distance(e.catalyst_out, d.catalyst_out), 1e-9);
    EXPECT_LE(d.catalyst_restoration_distance, 1e-10);
}

TEST(RunClo, RejectsOtherInputs) {
    const CatalyticProtocol p = make_catalytic_protocol(phi3(), ket22(), 2);
    EXPECT_THROW(run_clo(p, ket22()), PreconditionError);
}

TEST(InputSensitivity, WrongInputsDisturbTheCatalyst) {
    const CatalyticProtocol p = make_catalytic_protocol(phi3(), ket22(), 2);
    // Regression baseline observed for sigma fed into the two-copy protocol.
    EXPECT_NEAR(verify_input_sensitivity(p, ket22()).catalyst_restoration_distance, 0.5, 1e-9);
    EXPECT_LE(verify_input_sensitivity(p, phi3()).catalyst_restoration_distance, 1e-10);
    const QuantumState half = mix({{0.5, phi3()}, {0.5, ket22()}});
    EXPECT_GT(verify_input_sensitivity(p, half).catalyst_restoration_distance, 1e-6);
}

TEST(Property, RestorationOutputAndBudgetOverRandomPureInputs) {
    Rng rng(41);
    for (int trial = 0; trial < 6; ++trial) {
        // Random pure rho on the {0, 1} subspace of each qutrit, sigma = |22>.
        Vector small = random_unit_vector(4, rng);
        Vector v = Vector::Zero(9);
        v(0) = small(0);
        v(1) = small(1);
        v(3) = small(2);
        v(4) = small(3);
        const QuantumState rho = QuantumState::pure(RegisterLayout({kA3, kB3}), v);
        const std::size_t sr = schmidt_rank(rho).rank;
        for (std::size_t n = 1; n <= 3; ++n) {
            const CatalyticProtocol sm = make_catalytic_protocol(rho, ket22(), n, FlagMode::SupportMeasurement);
            const CatalyticProtocol ef = make_catalytic_protocol(rho, ket22(), n, FlagMode::ExplicitFlags);
            const CLORunReport rs = run_clo(sm, rho), re = run_clo(ef, rho);
            EXPECT_LE(rs.catalyst_restoration_distance, 1e-10);
            EXPECT_LE(re.catalyst_restoration_distance, 1e-10);
            EXPECT_LE(rs.output_target_distance, 1e-10);
            EXPECT_LE(re.output_target_distance, 1e-10);
            EXPECT_LE(oracle::trace_distance(rs.output_state.density(), target_oracle(v, oracle::basis(9, 8), 3, n)), 1e-10);
            EXPECT_LE(trace_distance(rs.output_state, re.output_state), 1e-9);
            std::size_t budget = 1;
            for (std::size_t k = 1; k < n; ++k) budget *= sr;
            EXPECT_EQ(re.catalyst_sn.upper, budget);
            EXPECT_EQ(re.catalyst_sn.lower, budget);
        }
    }
}

TEST(Property, NonOrthogonalPairsUseExplicitFlags) {
    // Weakly entangled qubit rho with a product sigma sharing its support.
    const Register a{"A", 2, Party::Alice}, b{"B", 2, Party::Bob};
    const Vector v{{std::sqrt(0.8), 0.0, 0.0, std::sqrt(0.2)}};
    const QuantumState rho = QuantumState::pure(RegisterLayout({a, b}), v);
    const QuantumState sigma = basis_product({{a, 0}, {b, 1}});
    for (std::size_t n = 1; n <= 3; ++n) {
        const CatalyticProtocol p = make_catalytic_protocol(rho, sigma, n);
        EXPECT_EQ(p.flag_mode, FlagMode::ExplicitFlags);
        const CLORunReport r = run_clo(p, rho);
        EXPECT_LE(r.catalyst_restoration_distance, 1e-10);
        EXPECT_LE(oracle::trace_distance(r.output_state.density(), target_oracle(v, oracle::basis(4, 1), 2, n)), 1e-10);
    }
}

}  // namespace
}  // namespace clover
