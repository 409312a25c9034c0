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

// Acceptance gate. Prints one PASS/FAIL line per check and exits nonzero if
// any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "../unit/random_protocols.hpp"
#include "clover/catalysis.hpp"
#include "clover/pipelines.hpp"
#include "clover/schmidt.hpp"
#include "clover/sloccq.hpp"

namespace clover {
namespace {

int failures = 0;

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs `body`, then prints PASS/FAIL with its details and the runtime against `limit_s` (0 = none).
void criterion(const std::string& id, const std::string& title, double limit_s, const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail << " [exception: " << e.what() << "]";
    }
    const double t = seconds_since(t0);
    if (limit_s > 0.0) c.require(t < limit_s, "runtime");
    std::printf("%s  %-4s %s:%s  runtime %.2f s", c.ok ? "PASS" : "FAIL", id.c_str(), title.c_str(),
                c.detail.str().c_str(), t);
    if (limit_s > 0.0) std::printf(" (< %.0f s)", limit_s);
    std::printf("\n");
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

const Quantity& quantity(const ReportDocument& rep, const std::string& name) {
    const auto* q = rep.find(name);
    if (q == nullptr) throw std::runtime_error(rep.pipeline() + " report lacks '" + name + "'");
    return *q;
}

double real(const ReportDocument& rep, const std::string& name) { return quantity(rep, name).value.get<double>(); }
long long integer(const ReportDocument& rep, const std::string& name) {
    return quantity(rep, name).value.get<long long>();
}
bool flag(const ReportDocument& rep, const std::string& name) { return quantity(rep, name).value.get<bool>(); }

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Independent target: (1/n) rho^n + ((n-1)/n) sigma^n from raw amplitude vectors on A.1..A.n B.1..B.n.

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

Matrix target_oracle(std::size_t n) {
    Vector rho = Vector::Zero(9), sigma = Vector::Zero(9);
    rho(0) = rho(4) = 1.0 / std::sqrt(2.0);
    sigma(8) = 1.0;
    const Vector r = alice_first_power(rho, 3, n), s = alice_first_power(sigma, 3, n);
    const double nn = static_cast<double>(n);
    return (1.0 / nn) * r * r.adjoint() + ((nn - 1.0) / nn) * s * s.adjoint();
}

void lemma1(std::size_t n) {
    criterion("1", "catalytic protocol n=" + std::to_string(n), 10.0, [n](Check& c) {
        const auto rep = pipeline_lemma1(embedded_phi_plus(), ket22(), n);
        const double out = real(rep, "output_target_distance");
        const double cat = real(rep, "catalyst_restoration_distance");
        // Cross-check the output against a target assembled without the library.
        const auto protocol = make_catalytic_protocol(embedded_phi_plus(), ket22(), n);
        const auto run = run_clo(protocol, embedded_phi_plus());
        const Matrix got = run.output_state.permuted(protocol.output_labels()).density();
        const double independent = oracle::trace_distance(got, target_oracle(n));
        c.detail << " output distance " << sci(out) << ", independent target distance " << sci(independent)
                 << ", restoration distance " << sci(cat) << " (<= 1e-10), catalyst SN "
                 << integer(rep, "catalyst_sn");
        c.require(out <= 1e-10, "output distance");
        c.require(independent <= 1e-10, "independent target distance");
        c.require(cat <= 1e-10, "restoration distance");
        c.require(rep.verdict() == Verdict::Verified, "verdict");
    });
}

void theorem(std::size_t n, double limit) {
    const std::string id = n == 1 ? "2" : "3";
    criterion(id, "separation n=" + std::to_string(n), limit, [n](Check& c) {
        const auto rep = pipeline_theorem(n);
        const long long budget = 1LL << n;
        const long long sn_in = integer(rep, "sn_input");
        const long long sn_out = integer(rep, "sn_output");
        const long long sn_cat = integer(rep, "catalyst_sn");
        const double dist = real(rep, "converse_distance");
        const long long used = integer(rep, "converse_budget_used");
        c.detail << " SN(rho) " << sn_in << ", SN(tau) " << sn_out << (flag(rep, "sn_output_exact") ? " exact" : "")
                 << ", catalyst SN " << sn_cat << ", impossible at budget " << budget - 1 << ": "
                 << (flag(rep, "impossible_at_budget_minus_one") ? "yes" : "no") << ", converse at budget " << used
                 << " distance " << sci(dist) << " (<= 1e-8)";
        c.require(sn_in == 2, "SN(rho) = 2");
        c.require(sn_out == 2 * budget && flag(rep, "sn_output_exact"), "SN(tau)");
        c.require(sn_cat == budget, "catalyst SN");
        c.require(flag(rep, "impossible_at_budget_minus_one"), "impossibility certificate");
        c.require(used == budget, "converse budget");
        c.require(dist <= 1e-8, "converse distance");
        c.require(rep.verdict() == Verdict::Verified, "verdict");
    });
}

void obs3() {
    criterion("4", "one-bit LOCC and entropy certificate", 0.0, [](Check& c) {
        const auto rep = pipeline_obs3();
        const double locc = real(rep, "locc_output_distance");
        const auto& per = quantity(rep, "h_r_given_a_ca_by_catalyst").value;
        double worst = 0.0;
        for (const auto& [name, h] : per.items()) worst = std::max(worst, std::abs(h.get<double>() - 1.0));
        const double h_target = real(rep, "h_r_given_a_target");
        c.detail << " LOCC distance " << sci(locc) << " (<= 1e-10), H(R|A C_A) over " << per.size()
                 << " shared states max |h - 1| " << sci(worst) << ", H(R|A) " << sci(h_target) << " (+-1e-9)";
        c.require(locc <= 1e-10, "LOCC distance");
        c.require(per.size() == 12 && per.contains("phi+") && per.contains("product"), "12 shared states");
        c.require(worst <= 1e-9, "H(R|A C_A) = 1");
        c.require(std::abs(h_target) <= 1e-9, "H(R|A) = 0");
        c.require(rep.verdict() == Verdict::Verified, "verdict");
    });
}

void obs1(std::size_t n) {
    criterion("5", "compiled catalyst preparation n=" + std::to_string(n), 0.0, [n](Check& c) {
        const auto rep = pipeline_obs1(n);
        const long long budget = 1LL << (n - 1);
        const double replay = real(rep, "replay_output_distance");
        const double target = real(rep, "replay_target_distance");
        c.detail << " budget " << integer(rep, "prep_budget") << " (expected " << budget << "), replay vs CLO output "
                 << sci(replay) << ", vs target " << sci(target) << " (<= 1e-8)";
        c.require(integer(rep, "prep_budget") == budget && integer(rep, "budget_used") == budget, "budget");
        c.require(replay <= 1e-8 && target <= 1e-8, "replay distance");
        c.require(rep.verdict() == Verdict::Verified, "verdict");
    });
}

void ledger_soundness() {
    criterion("6a", "ledger soundness", 0.0, [](Check& c) {
        Rng rng(6001);
        int protocols = 0, leaves = 0, violations = 0;
        for (; protocols < 250; ++protocols) {
            const auto input = testgen::random_input(rng);
            const auto protocol = testgen::random_protocol(input.layout(), rng, true);
            const auto tree = run_protocol(protocol, input);
            for (const auto* leaf : tree.leaves()) {
                if (leaf->probability <= 1e-12) continue;
                ++leaves;
                if (testgen::oracle_rank(leaf->state) > leaf->ledger.sn_bound) ++violations;
            }
        }
        c.detail << " " << protocols << " random protocols, " << leaves << " branches, " << violations
                 << " ledger violations";
        c.require(protocols >= 200 && violations == 0, "no violations");
    });
}

void locc_monotone() {
    criterion("6b", "LOCC never increases Schmidt rank", 0.0, [](Check& c) {
        Rng rng(6002);
        int protocols = 0, leaves = 0, violations = 0;
        for (; protocols < 250; ++protocols) {
            const auto input = testgen::random_input(rng);
            const auto protocol = testgen::random_protocol(input.layout(), rng, false);
            const std::size_t rank = testgen::oracle_rank(input);
            const auto tree = run_protocol(protocol, input);
            for (const auto* leaf : tree.leaves()) {
                if (leaf->probability <= 1e-12) continue;
                ++leaves;
                if (testgen::oracle_rank(leaf->state) > rank) ++violations;
            }
        }
        c.detail << " " << protocols << " random LOCC protocols, " << leaves << " branches, " << violations
                 << " rank increases";
        c.require(protocols >= 200 && violations == 0, "no increases");
    });
}

struct PipelineRun {
    std::string name;
    std::function<ReportDocument(const PipelineOptions&)> run;
};

std::vector<PipelineRun> channel_pipelines() {
    std::vector<PipelineRun> out;
    for (std::size_t n : {1u, 2u}) {
        out.push_back({"theorem n=" + std::to_string(n), [n](const PipelineOptions& o) { return pipeline_theorem(n, o); }});
    }
    for (std::size_t n : {1u, 2u, 3u}) {
        out.push_back({"lemma1 n=" + std::to_string(n),
                       [n](const PipelineOptions& o) { return pipeline_lemma1(embedded_phi_plus(), ket22(), n, o); }});
    }
    for (std::size_t n : {2u, 3u}) {
        out.push_back({"obs1 n=" + std::to_string(n), [n](const PipelineOptions& o) { return pipeline_obs1(n, o); }});
    }
    out.push_back({"obs3", [](const PipelineOptions& o) { return pipeline_obs3(o); }});
    return out;
}

void ensemble_vs_dense() {
    criterion("6c", "ensemble vs dense agreement", 0.0, [](Check& c) {
        double worst = 0.0;
        long long checked = 0, above_cap = 0;
        for (const auto& p : channel_pipelines()) {
            const auto rep = p.run({});
            worst = std::max(worst, real(rep, "ensemble_dense_deviation"));
            checked += integer(rep, "ensemble_dense_states_checked");
            above_cap += integer(rep, "ensemble_dense_states_above_cap");
            for (const char* name : {"dense_cross_check", "flag_mode_agreement"}) {
                if (rep.find(name) != nullptr) worst = std::max(worst, real(rep, name));
            }
        }
        c.detail << " " << checked << " pipeline states checked, worst deviation " << sci(worst)
                 << " (<= 1e-9), states above the dense cap " << above_cap;
        c.require(worst <= 1e-9, "agreement");
        c.require(above_cap == 0, "every state checked");
    });
}

void filtration() {
    criterion("6d", "filtration success = k * lambda_min", 0.0, [](Check& c) {
        Rng rng(6004);
        double worst = 0.0;
        int states = 0;
        for (; states < 150; ++states) {
            const std::size_t da = 2 + rng() % 3, db = 2 + rng() % 3;
            const std::size_t rank = 1 + rng() % std::min(da, db);
            const RegisterLayout layout({Register{"A", da, Party::Alice}, Register{"B", db, Party::Bob}});
            // Rank-limited random state: (A x G) vec with G of the chosen rank.
            const Matrix g = random_gaussian(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(rank), rng) *
                             random_gaussian(static_cast<Eigen::Index>(rank), static_cast<Eigen::Index>(db), rng);
            Vector v(static_cast<Eigen::Index>(da * db));
            for (Eigen::Index i = 0; i < g.rows(); ++i)
                for (Eigen::Index j = 0; j < g.cols(); ++j) v(i * g.cols() + j) = g(i, j);
            v.normalize();
            const QuantumState psi = QuantumState::pure(layout, v);
            Matrix m(g.rows(), g.cols());
            for (Eigen::Index i = 0; i < g.rows(); ++i)
                for (Eigen::Index j = 0; j < g.cols(); ++j) m(i, j) = v(i * g.cols() + j);
            const Eigen::VectorXd sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
            const auto k = static_cast<Eigen::Index>(rank);
            const double expected = static_cast<double>(rank) * sv(k - 1) * sv(k - 1);
            const auto f = filter_to_max_entangled(psi);
            double measured = 0.0;
            for (const auto& out : apply_instrument(f.instrument, psi, f.targets)) {
                if (out.label == "success") measured = out.probability;
            }
            worst = std::max({worst, std::abs(measured - expected), std::abs(f.success_probability - expected)});
        }
        c.detail << " " << states << " random pure states, max |p - k lambda_min| " << sci(worst) << " (<= 1e-9)";
        c.require(states >= 100 && worst <= 1e-9, "agreement");
    });
}

void negative_controls() {
    criterion("6e", "corruption eps=1e-3 flips every verdict", 0.0, [](Check& c) {
        PipelineOptions bad;
        bad.corrupt = 1e-3;
        int flipped = 0, total = 0;
        for (const auto& p : channel_pipelines()) {
            ++total;
            const Verdict clean = p.run({}).verdict();
            const Verdict corrupted = p.run(bad).verdict();
            const bool ok = clean == Verdict::Verified && corrupted == Verdict::Falsified;
            if (ok) ++flipped;
            c.detail << " " << p.name << " " << to_string(clean) << "->" << to_string(corrupted) << ";";
            c.require(ok, p.name);
        }
        c.detail << " flipped " << flipped << "/" << total;
    });
}


void schmidt_suites() {
    criterion("7", "Schmidt rank multiplicativity, embedding, orthogonal mixtures", 0.0, [](Check& c) {
        Rng rng(7007);
        int mult_bad = 0, embed_bad = 0, instances = 0;
        for (; instances < 150; ++instances) {
            // Rank-limited factors so products of ranks vary.
            auto make = [&](const std::string& a, const std::string& b) {
                const std::size_t da = 2 + rng() % 2, db = 2 + rng() % 2;
                const std::size_t r = 1 + rng() % std::min(da, db);
                const Matrix g = random_gaussian(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(r), rng) *
                                 random_gaussian(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(db), rng);
                Vector v(g.size());
                for (Eigen::Index i = 0; i < g.rows(); ++i)
                    for (Eigen::Index j = 0; j < g.cols(); ++j) v(i * g.cols() + j) = g(i, j);
                v.normalize();
                return QuantumState::pure(RegisterLayout({Register{a, da, Party::Alice}, Register{b, db, Party::Bob}}),
                                          v);
            };
            const auto x = make("A1", "B1");
            const auto y = make("A2", "B2");
            const std::size_t rx = testgen::oracle_rank(x), ry = testgen::oracle_rank(y);
            if (schmidt_rank(tensor(x, y)).rank != rx * ry) ++mult_bad;
            const auto big = embed_local_dims(x, {{"A1", 5}, {"B1", 4}});
            const auto sx = schmidt_rank(x), sb = schmidt_rank(big);
            bool same = sb.rank == sx.rank && sx.rank == rx;
            for (std::size_t k = 0; same && k < sx.rank; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                same = std::abs(sb.coefficients(kk) - sx.coefficients(kk)) <= 1e-10;
            }
            if (!same) ++embed_bad;
        }
        int grid_bad = 0, grid = 0;
        const auto phi = embedded_phi_plus().density();
        const auto k22 = ket22().density();
        const RegisterLayout layout = embedded_phi_plus().layout();
        for (int i = 1; i <= 99; ++i, ++grid) {
            const double p = i / 100.0;
            const auto cert = sn_orthogonal_mixture(QuantumState::dense(layout, p * phi + (1.0 - p) * k22));
            if (!(cert.exact() && cert.lower == 2)) ++grid_bad;
        }
        c.detail << " " << instances << " multiplicativity instances (" << mult_bad << " bad), " << instances
                 << " embedding instances (" << embed_bad << " bad), " << grid << "-point p-grid SN = 2 ("
                 << grid_bad << " bad)";
        c.require(instances >= 100 && mult_bad == 0, "multiplicativity");
        c.require(embed_bad == 0, "embedding invariance");
        c.require(grid == 99 && grid_bad == 0, "orthogonal mixture grid");
    });
}

}  // namespace
}  // namespace clover

int main() {
    using namespace clover;
    for (std::size_t n : {1u, 2u, 3u}) lemma1(n);
    theorem(1, 30.0);
    theorem(2, 300.0);
    obs3();
    obs1(2);
    obs1(3);
    ledger_soundness();
    locc_monotone();
    ensemble_vs_dense();
    filtration();
    negative_controls();
    schmidt_suites();
    std::printf("%s: %d check(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
