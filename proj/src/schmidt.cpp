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

#include "clover/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>

namespace clover {

namespace {

constexpr double kEigenFloor = 1e-10;
constexpr double kSupportOverlapTol = 1e-9;
// A reshaped amplitude matrix is product when s2 / s1 is below this.
constexpr double kProductRatio = 1e-8;

Matrix cut_matrix(const Vector& v, const RegisterLayout& layout, const Cut& cut) {
    std::vector<std::string> order = cut.left;
    order.insert(order.end(), cut.right.begin(), cut.right.end());
    const Vector r = permute_vector(v, layout.dims(), positions_of(layout, order));
    return reshape_rows(r, layout.select(cut.left).total_dim(), layout.select(cut.right).total_dim());
}

std::size_t count_above(const RealVector& values, double threshold) {
    std::size_t n = 0;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (values(k) > threshold) ++n;
    }
    return n;
}

bool is_product(const Matrix& m) {
    if (m.rows() <= 1 || m.cols() <= 1) return true;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    return s(1) <= kProductRatio * s(0);
}

Vector normalized(const Vector& v) { return v / v.norm(); }

/// Searches span{e1, e2} for a product vector across `cut` via the 2x2 compressed determinant pencil.
std::optional<Vector> product_in_span(const Vector& e1, const Vector& e2, const RegisterLayout& layout,
                                      const Cut& cut) {
    const Matrix m1 = cut_matrix(e1, layout, cut);
    const Matrix m2 = cut_matrix(e2, layout, cut);
    if (is_product(m1)) return e1;
    if (is_product(m2)) return e2;
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
        Matrix g(r, c);
        for (Eigen::Index j = 0; j < c; ++j) {
            for (Eigen::Index i = 0; i < r; ++i) g(i, j) = Complex(normal(rng), normal(rng));
        }
        return g;
    };
    for (int attempt = 0; attempt < 4; ++attempt) {
        const Matrix u = gaussian(2, m1.rows());
        const Matrix w = gaussian(m1.cols(), 2);
        const Matrix a = u * m1 * w;
        const Matrix b = u * m2 * w;
        // det(a + t b) = c0 + c1 t + c2 t^2
        const Complex c0 = a.determinant();
        const Complex c1 = a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1);
        const Complex c2 = b.determinant();
        std::vector<Complex> roots;
        const double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
        if (std::abs(c2) > 1e-12 * scale) {
            const Complex disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
            roots.push_back((-c1 + disc) / (2.0 * c2));
            roots.push_back((-c1 - disc) / (2.0 * c2));
        } else if (std::abs(c1) > 1e-12 * scale) {
            roots.push_back(-c0 / c1);
        }
        for (const auto& t : roots) {
            const Vector cand = e1 + t * e2;
            if (cand.norm() < 1e-12) continue;
            if (is_product(cut_matrix(cand, layout, cut))) return normalized(cand);
        }
    }
    return std::nullopt;
}

/// Orthonormal basis of the column space of m (singular values above tol * largest).
Matrix column_support(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const std::size_t r = count_above(s, kSchmidtRankTol * (s.size() ? s(0) : 0.0));
    return svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
}

SNCertificate refusal(const QuantumState& s, const std::string& reason) {
    SNCertificate c;
    c.method = SnMethod::Refused;
    c.lower = 1;
    try {
        c.upper = std::min(local_support_rank(s, Party::Alice), local_support_rank(s, Party::Bob));
    } catch (const Error&) {
        c.upper = std::min(s.layout().party_dim(Party::Alice), s.layout().party_dim(Party::Bob));
    }
    c.details = {{"reason", reason}};
    return c;
}

}  // namespace

std::string_view to_string(SnMethod method) {
    switch (method) {
        case SnMethod::PureRank:
            return "pure-rank";
        case SnMethod::FidelityWitness:
            return "fidelity-witness";
        case SnMethod::OrthogonalMixtureOracle:
            return "orthogonal-mixture-oracle";
        case SnMethod::FlaggedBlockOracle:
            return "flagged-block-oracle";
        case SnMethod::DecompositionUpper:
            return "decomposition-upper";
        case SnMethod::Ledger:
            return "ledger";
        case SnMethod::Refused:
            return "refused";
    }
    return "?";
}

SchmidtReport schmidt_rank(const Vector& v, const RegisterLayout& layout, const Cut& cut, double tolerance) {
    const auto dec = svd_across_cut(v, layout, cut);
    SchmidtReport r;
    r.coefficients = dec.singular_values;
    r.rank_tolerance = tolerance;
    const double top = r.coefficients.size() ? r.coefficients(0) : 0.0;
    r.rank = count_above(r.coefficients, tolerance * top);
    return r;
}

SchmidtReport schmidt_rank(const QuantumState& v, double tolerance) {
    if (!v.is_pure()) throw PreconditionError("Schmidt rank needs a pure state");
    return schmidt_rank(v.pure_vector(), v.layout(), Cut::alice_bob(v.layout()), tolerance);
}

std::size_t branch_schmidt_rank(const RegisterLayout& layout, const Branch& branch) {
    std::size_t rank = 1;
    for (const auto& f : branch.factors) {
        if (!f.is_pure()) throw PreconditionError("branch has a mixed factor");
        const RegisterLayout fl = layout.select(f.labels);
        const Cut cut = Cut::alice_bob(fl);
        if (cut.left.empty() || cut.right.empty()) continue;
        rank *= schmidt_rank(f.vector(), fl, cut).rank;
    }
    return rank;
}

SNCertificate sn_pure(const QuantumState& v) {
    const auto report = schmidt_rank(v);
    SNCertificate c;
    c.method = SnMethod::PureRank;
    c.lower = c.upper = report.rank;
    c.details = {{"schmidt_rank", report.rank}};
    return c;
}

SNCertificate sn_lower_fidelity(const QuantumState& s, const QuantumState& witness) {
    if (!witness.is_pure()) throw PreconditionError("fidelity witness must be pure");
    const auto report = schmidt_rank(witness);
    const std::size_t d = report.rank;
    const double expected = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t k = 0; k < d; ++k) {
        if (std::abs(report.coefficients(static_cast<Eigen::Index>(k)) - expected) > kReconstructionTol) {
            throw PreconditionError("fidelity witness is not maximally entangled");
        }
    }
    const double f = fidelity(s, witness);
    SNCertificate c;
    c.method = SnMethod::FidelityWitness;
    const double bound = std::ceil(static_cast<double>(d) * f - 1e-9);
    c.lower = std::max<std::size_t>(1, static_cast<std::size_t>(std::max(bound, 1.0)));
    c.upper = std::min(local_support_rank(s, Party::Alice), local_support_rank(s, Party::Bob));
    c.details = {{"witness_rank", d}, {"fidelity", f}};
    return c;
}

SNCertificate sn_orthogonal_mixture(const QuantumState& s) {
    const RegisterLayout& layout = s.layout();
    Cut cut;
    try {
        cut = Cut::alice_bob(layout);
    } catch (const LayoutError& e) {
        return refusal(s, e.what());
    }
    const Matrix rho = s.density();
    const auto es = eig_hermitian(rho);
    const std::size_t rank = count_above(es.eigenvalues, kEigenFloor);
    if (rank != 2) return refusal(s, "state has rank " + std::to_string(rank) + ", not 2");
    const Vector e1 = es.eigenvectors.col(0);
    const Vector e2 = es.eigenvectors.col(1);
    const auto product = product_in_span(e1, e2, layout, cut);
    if (!product) return refusal(s, "no product vector in the support");
    const Vector phi = *product;
    Vector psi = e1 - phi.dot(e1) * phi;
    const Vector alt = e2 - phi.dot(e2) * phi;
    if (alt.norm() > psi.norm()) psi = alt;
    psi = normalized(psi);
    const double p = psi.dot(rho * psi).real();
    const double q = phi.dot(rho * phi).real();
    const double off = std::abs(psi.dot(rho * phi));
    if (off > kReconstructionTol) return refusal(s, "product component is not an eigenvector");
    if (p <= 1e-12 || q <= 1e-12) return refusal(s, "a mixture weight vanishes");
    const Matrix rebuilt = p * psi * psi.adjoint() + q * phi * phi.adjoint();
    if ((rebuilt - rho).cwiseAbs().maxCoeff() > kReconstructionTol) {
        return refusal(s, "state is not the rank-two mixture it appears to be");
    }

    const Matrix m_psi = cut_matrix(psi, layout, cut);
    const Matrix m_phi = cut_matrix(phi, layout, cut);
    Eigen::JacobiSVD<Matrix> phi_svd(m_phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector a_phi = phi_svd.matrixU().col(0);
    const Vector b_phi = phi_svd.matrixV().col(0).conjugate();
    const Matrix alice_support = column_support(m_psi);
    const Matrix bob_support = column_support(Matrix(m_psi.transpose()));
    const double overlap_alice = (alice_support.adjoint() * a_phi).squaredNorm();
    const double overlap_bob = (bob_support.adjoint() * b_phi).squaredNorm();
    if (std::min(overlap_alice, overlap_bob) > kSupportOverlapTol) {
        return refusal(s, "components do not have locally orthogonal supports");
    }
    const std::size_t sr = schmidt_rank(psi, layout, cut).rank;

    SNCertificate c;
    c.method = SnMethod::OrthogonalMixtureOracle;
    c.lower = c.upper = sr;
    c.decomposition = {{p, psi}, {q, phi}};
    c.details = {
        {"weights", {p, q}},
        {"entangled_component_rank", sr},
        {"support_overlap_alice", overlap_alice},
        {"support_overlap_bob", overlap_bob},
        {"justification",
         "every vector of the support with a nonzero amplitude on the entangled component has Schmidt rank at least "
         "its rank, because the product component lives on an orthogonal local block; the eigendecomposition attains "
         "that rank"},
    };
    return c;
}

SNCertificate sn_flagged_blocks(const QuantumState& s, const std::vector<std::string>& flag_labels) {
    if (!s.is_ensemble()) throw PreconditionError("flagged-block oracle needs an ensemble state");
    const RegisterLayout& layout = s.layout();
    const auto alice = layout.party_labels(Party::Alice);
    const auto bob = layout.party_labels(Party::Bob);
    if (alice.size() + bob.size() != layout.size()) throw LayoutError("flagged-block oracle needs a bipartite layout");

    // Group branches into blocks keyed by the classical flag values.
    std::map<std::vector<std::size_t>, std::vector<Branch>> blocks;
    std::size_t index = 0;
    for (const auto& b : s.branches()) {
        std::vector<std::size_t> key;
        if (flag_labels.empty()) {
            key.push_back(index);
        } else {
            for (const auto& flag : flag_labels) {
                auto it = std::find_if(b.factors.begin(), b.factors.end(), [&](const Factor& f) {
                    return f.labels.size() == 1 && f.labels[0] == flag;
                });
                if (it == b.factors.end() || !it->is_pure()) {
                    throw PreconditionError("flag register '" + flag + "' is not a separate pure factor");
                }
                Eigen::Index arg = 0;
                const double peak = it->vector().cwiseAbs().maxCoeff(&arg);
                if (std::abs(peak - 1.0) > kHermitianTol) {
                    throw PreconditionError("flag register '" + flag + "' is not a basis state");
                }
                key.push_back(static_cast<std::size_t>(arg));
            }
        }
        blocks[key].push_back(b);
        ++index;
    }

    struct BlockInfo {
        QuantumState state;
        Matrix alice_marginal;
        Matrix bob_marginal;
    };
    std::vector<BlockInfo> infos;
    for (auto& [key, branches] : blocks) {
        double w = 0.0;
        for (const auto& b : branches) w += b.probability;
        for (auto& b : branches) b.probability /= w;
        QuantumState block = QuantumState::ensemble(layout, branches);
        Matrix ma = alice.empty() ? Matrix::Ones(1, 1) : marginal(block, alice).density();
        Matrix mb = bob.empty() ? Matrix::Ones(1, 1) : marginal(block, bob).density();
        infos.push_back({std::move(block), std::move(ma), std::move(mb)});
    }
    bool alice_orthogonal = true, bob_orthogonal = true;
    for (std::size_t i = 0; i < infos.size(); ++i) {
        for (std::size_t j = i + 1; j < infos.size(); ++j) {
            if (std::abs((infos[i].alice_marginal * infos[j].alice_marginal).trace()) > kSupportOverlapTol) {
                alice_orthogonal = false;
            }
            if (std::abs((infos[i].bob_marginal * infos[j].bob_marginal).trace()) > kSupportOverlapTol) {
                bob_orthogonal = false;
            }
        }
    }
    if (!alice_orthogonal && !bob_orthogonal) {
        throw PreconditionError("blocks are not locally orthogonal on either side");
    }

    SNCertificate c;
    c.method = SnMethod::FlaggedBlockOracle;
    c.lower = 1;
    c.upper = 1;
    nlohmann::json block_details = nlohmann::json::array();
    bool exact = true;
    for (const auto& info : infos) {
        const QuantumState pure = purify_factors(info.state);
        std::size_t lo = 1, hi = 1;
        if (pure.branches().size() == 1) {
            lo = hi = branch_schmidt_rank(layout, pure.branches()[0]);
        } else {
            for (const auto& b : pure.branches()) hi = std::max(hi, branch_schmidt_rank(layout, b));
            bool solved = false;
            if (layout.total_dim() <= kDenseCap) {
                const auto mixture = sn_orthogonal_mixture(info.state);
                if (!mixture.refused()) {
                    lo = hi = mixture.upper;
                    solved = true;
                }
            }
            exact = exact && solved;
        }
        c.lower = std::max(c.lower, lo);
        c.upper = std::max(c.upper, hi);
        block_details.push_back({{"lower", lo}, {"upper", hi}});
    }
    c.details = {{"blocks", block_details},
                 {"orthogonal_side", alice_orthogonal ? "Alice" : "Bob"},
                 {"exact", exact}};
    return c;
}

SNCertificate sn_decomposition_upper(const QuantumState& s) {
    const QuantumState pure = purify_factors(s);
    SNCertificate c;
    c.method = SnMethod::DecompositionUpper;
    c.lower = 1;
    c.upper = 1;
    for (const auto& b : pure.branches()) {
        c.upper = std::max(c.upper, branch_schmidt_rank(s.layout(), b));
    }
    c.details = {{"components", pure.branches().size()}};
    return c;
}

std::size_t local_support_rank(const QuantumState& s, Party party) {
    const auto labels = s.layout().party_labels(party);
    if (labels.empty()) return 1;
    const auto es = eig_hermitian(marginal(s, labels).density());
    return std::max<std::size_t>(1, count_above(es.eigenvalues, kEigenFloor));
}

double von_neumann_entropy(const Matrix& rho) {
    const auto es = eig_hermitian(rho);
    double h = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
        const double l = es.eigenvalues(k);
        if (l > 1e-14) h -= l * std::log2(l);
    }
    return h;
}

double von_neumann_entropy(const QuantumState& s) {
    if (s.is_ensemble() && s.branches().size() == 1 &&
        std::all_of(s.branches()[0].factors.begin(), s.branches()[0].factors.end(),
                    [](const Factor& f) { return f.is_pure(); })) {
        return 0.0;
    }
    return von_neumann_entropy(s.density());
}

double conditional_entropy(const QuantumState& s, const std::set<std::string>& condition_on) {
    for (const auto& l : condition_on) s.layout().index_of(l);
    if (condition_on.size() >= s.layout().size()) throw PreconditionError("conditional entropy needs a target system");
    std::vector<std::string> keep;
    for (const auto& l : s.layout().labels()) {
        if (condition_on.count(l)) keep.push_back(l);
    }
    const double joint = von_neumann_entropy(s);
    const double cond = keep.empty() ? 0.0 : von_neumann_entropy(marginal(s, keep));
    return joint - cond;
}

double entanglement_entropy(const QuantumState& v) {
    const auto report = schmidt_rank(v);
    double h = 0.0;
    for (Eigen::Index k = 0; k < report.coefficients.size(); ++k) {
        const double p = report.coefficients(k) * report.coefficients(k);
        if (p > 1e-14) h -= p * std::log2(p);
    }
    return h;
}

}  // namespace clover
