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

#include "clover/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace clover {

namespace {

// Sub-branch weights below this are exact zeros up to rounding.
constexpr double kNegligibleWeight = 1e-22;
// Spectral weights dropped when splitting density blocks into pure branches.
constexpr double kSpectralFloor = 1e-15;

std::vector<std::size_t> dims_of(const RegisterLayout& layout, const std::vector<std::string>& labels) {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(layout.at(l).dim);
    return out;
}

std::size_t product(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_cap(std::size_t dim, const char* what) {
    if (dim > kDenseCap) {
        throw DenseCapError(std::string(what) + ": dense dimension " + std::to_string(dim) + " exceeds cap " +
                            std::to_string(kDenseCap));
    }
}

/// Index of each `to` label inside `from`.
std::vector<std::size_t> order_from(const std::vector<std::string>& from, const std::vector<std::string>& to) {
    std::unordered_map<std::string, std::size_t> where;
    for (std::size_t k = 0; k < from.size(); ++k) where[from[k]] = k;
    std::vector<std::size_t> out;
    out.reserve(to.size());
    for (const auto& l : to) {
        auto it = where.find(l);
        if (it == where.end()) throw LayoutError("register '" + l + "' missing");
        out.push_back(it->second);
    }
    return out;
}

Vector flatten_rows(const Matrix& m) {
    Vector out(m.size());
    Eigen::Map<Matrix>(out.data(), m.cols(), m.rows()) = m.transpose();
    return out;
}

// Relative residual below which a bipartite pure factor is treated as product.
constexpr double kProductFactorRatio = 1e-12;

/// Left factor u of m = u v^T when m is rank one within kProductFactorRatio (Frobenius).
std::optional<Vector> product_left_factor(const Matrix& m) {
    Eigen::Index col = 0;
    m.colwise().squaredNorm().maxCoeff(&col);
    const double norm = m.col(col).norm();
    if (norm == 0.0) return std::nullopt;
    const Vector u = m.col(col) / norm;
    const double residual = (m - u * (u.adjoint() * m)).norm();
    if (residual > kProductFactorRatio * m.norm()) return std::nullopt;
    return u;
}

/// Full amplitude vector of an all-pure branch in `layout` order.
Vector branch_vector(const RegisterLayout& layout, const Branch& b) {
    Vector v = Vector::Ones(1);
    std::vector<std::string> labels;
    for (const auto& f : b.factors) {
        v = kron(v, f.vector());
        labels.insert(labels.end(), f.labels.begin(), f.labels.end());
    }
    return permute_vector(v, dims_of(layout, labels), order_from(labels, layout.labels()));
}

Matrix branch_density(const RegisterLayout& layout, const Branch& b) {
    Matrix m = Matrix::Ones(1, 1);
    std::vector<std::string> labels;
    for (const auto& f : b.factors) {
        m = kron(m, f.density());
        labels.insert(labels.end(), f.labels.begin(), f.labels.end());
    }
    return permute_square(m, dims_of(layout, labels), order_from(labels, layout.labels()));
}

bool all_pure(const Branch& b) {
    return std::all_of(b.factors.begin(), b.factors.end(), [](const Factor& f) { return f.is_pure(); });
}

void validate_branches(const RegisterLayout& layout, const std::vector<Branch>& branches) {
    if (branches.empty()) throw PreconditionError("ensemble has no branches");
    double total = 0.0;
    for (const auto& b : branches) {
        if (!(b.probability > 0.0) || b.probability > 1.0 + 1e-12) {
            throw PreconditionError("ensemble branch probability outside (0, 1]");
        }
        total += b.probability;
        std::vector<std::string> covered;
        for (const auto& f : b.factors) {
            const auto d = product(dims_of(layout, f.labels));
            covered.insert(covered.end(), f.labels.begin(), f.labels.end());
            if (f.is_pure()) {
                if (static_cast<std::size_t>(f.vector().size()) != d) throw LayoutError("factor vector size mismatch");
                if (std::abs(f.vector().norm() - 1.0) > kHermitianTol) {
                    throw PreconditionError("ensemble factor is not normalized");
                }
            } else {
                const Matrix& m = f.block();
                if (static_cast<std::size_t>(m.rows()) != d || m.rows() != m.cols()) {
                    throw LayoutError("factor block shape mismatch");
                }
                if (hermiticity_defect(m) > kHermitianTol || std::abs(m.trace() - Complex(1.0)) > kHermitianTol) {
                    throw PreconditionError("ensemble factor block is not a unit-trace Hermitian matrix");
                }
            }
        }
        auto sorted = covered;
        std::sort(sorted.begin(), sorted.end());
        auto expected = layout.labels();
        std::sort(expected.begin(), expected.end());
        if (sorted != expected) throw LayoutError("ensemble branch factors do not cover the layout exactly once");
    }
    if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("ensemble probabilities do not sum to 1");
}

void normalize(std::vector<Branch>& branches) {
    double total = 0.0;
    for (const auto& b : branches) total += b.probability;
    for (auto& b : branches) b.probability /= total;
}

/// Maps a flat index of the old local dims to the flat index of the new dims.
std::vector<std::size_t> embedding_map(const std::vector<std::size_t>& old_dims,
                                       const std::vector<std::size_t>& new_dims) {
    const std::size_t n = product(old_dims);
    std::vector<std::size_t> map(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rest = i, out = 0, stride = 1;
        for (std::size_t k = old_dims.size(); k-- > 0;) {
            out += (rest % old_dims[k]) * stride;
            rest /= old_dims[k];
            stride *= new_dims[k];
        }
        map[i] = out;
    }
    return map;
}

Vector embed_vector(const Vector& v, const std::vector<std::size_t>& old_dims, const std::vector<std::size_t>& new_dims) {
    const auto map = embedding_map(old_dims, new_dims);
    Vector out = Vector::Zero(static_cast<Eigen::Index>(product(new_dims)));
    for (std::size_t i = 0; i < map.size(); ++i) out(static_cast<Eigen::Index>(map[i])) = v(static_cast<Eigen::Index>(i));
    return out;
}

Matrix embed_matrix(const Matrix& m, const std::vector<std::size_t>& old_dims, const std::vector<std::size_t>& new_dims) {
    const auto map = embedding_map(old_dims, new_dims);
    const auto n = static_cast<Eigen::Index>(product(new_dims));
    Matrix out = Matrix::Zero(n, n);
    for (std::size_t j = 0; j < map.size(); ++j) {
        for (std::size_t i = 0; i < map.size(); ++i) {
            out(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j])) =
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

void check_targets(const RegisterLayout& layout, const RegisterLayout& layout_in, const std::vector<std::string>& targets) {
    if (targets.size() != layout_in.size()) {
        throw LayoutError("channel expects " + std::to_string(layout_in.size()) + " target registers, got " +
                          std::to_string(targets.size()));
    }
    std::set<std::string> seen;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        if (!seen.insert(targets[k]).second) throw LayoutError("duplicate target '" + targets[k] + "'");
        if (layout.at(targets[k]).dim != layout_in.registers()[k].dim) {
            throw LayoutError("target '" + targets[k] + "' dimension does not match the channel input");
        }
    }
}

/// Applies one Kraus list to every (pure) branch and appends the normalized sub-branches.
/// Returns the total weight produced.
double apply_kraus_to_branches(const RegisterLayout& layout, const std::vector<Branch>& branches,
                               const std::vector<Matrix>& kraus, const std::vector<std::string>& targets,
                               const RegisterLayout& out_layout, std::vector<Branch>& sink) {
    const std::set<std::string> target_set(targets.begin(), targets.end());
    const auto out_labels = out_layout.labels();
    double total = 0.0;
    for (const auto& b : branches) {
        Branch rest;
        std::vector<std::string> labels;
        Vector psi = Vector::Ones(1);
        for (const auto& f : b.factors) {
            const bool involved = std::any_of(f.labels.begin(), f.labels.end(),
                                              [&](const std::string& l) { return target_set.count(l) > 0; });
            if (involved) {
                psi = kron(psi, f.vector());
                labels.insert(labels.end(), f.labels.begin(), f.labels.end());
            } else {
                rest.factors.push_back(f);
            }
        }
        std::vector<std::string> others;
        for (const auto& l : labels) {
            if (!target_set.count(l)) others.push_back(l);
        }
        std::vector<std::string> order = targets;
        order.insert(order.end(), others.begin(), others.end());
        const Vector reordered = permute_vector(psi, dims_of(layout, labels), order_from(labels, order));
        const std::size_t d_t = product(dims_of(layout, targets));
        const std::size_t d_r = product(dims_of(layout, others));
        const Matrix x = reshape_rows(reordered, d_t, d_r);
        std::vector<std::string> new_labels = out_labels;
        new_labels.insert(new_labels.end(), others.begin(), others.end());
        for (const auto& k : kraus) {
            const Matrix y = k * x;
            const double w = y.squaredNorm();
            if (w <= kNegligibleWeight) continue;
            Branch nb;
            nb.probability = b.probability * w;
            nb.factors = rest.factors;
            if (!new_labels.empty()) nb.factors.push_back(Factor{new_labels, Vector(flatten_rows(y) / std::sqrt(w))});
            total += nb.probability;
            sink.push_back(std::move(nb));
        }
    }
    return total;
}

Matrix apply_kraus_dense(const Matrix& rho_tr, std::size_t d_r, const std::vector<Matrix>& kraus) {
    const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(d_r), static_cast<Eigen::Index>(d_r));
    Matrix out;
    for (const auto& k : kraus) {
        const Matrix kk = kron(k, id);
        Matrix term = kk * rho_tr * kk.adjoint();
        if (out.size() == 0) {
            out = std::move(term);
        } else {
            out += term;
        }
    }
    return out;
}

}  // namespace

// ----------------------------------------------------------------------------
// Factor / QuantumState

Matrix Factor::density() const {
    if (is_pure()) return vector() * vector().adjoint();
    return block();
}

QuantumState QuantumState::dense(RegisterLayout layout, Matrix rho) {
    if (static_cast<std::size_t>(rho.rows()) != layout.total_dim() || rho.rows() != rho.cols()) {
        throw LayoutError("density matrix shape does not match layout");
    }
    if (hermiticity_defect(rho) > kHermitianTol) throw PreconditionError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0)) > kHermitianTol) throw PreconditionError("density matrix trace is not 1");
    const auto es = eig_hermitian(rho);
    if (es.eigenvalues.size() > 0 && es.eigenvalues(es.eigenvalues.size() - 1) < -kHermitianTol) {
        throw PreconditionError("density matrix is not positive semidefinite");
    }
    return QuantumState(std::move(layout), std::move(rho));
}

QuantumState QuantumState::ensemble(RegisterLayout layout, std::vector<Branch> branches) {
    validate_branches(layout, branches);
    return QuantumState(std::move(layout), std::move(branches));
}

QuantumState QuantumState::pure(RegisterLayout layout, Vector amplitudes) {
    if (static_cast<std::size_t>(amplitudes.size()) != layout.total_dim()) {
        throw LayoutError("amplitude vector does not match layout");
    }
    if (std::abs(amplitudes.norm() - 1.0) > kHermitianTol) throw PreconditionError("state vector is not normalized");
    std::vector<Branch> branches(1);
    if (!layout.empty()) branches[0].factors.push_back(Factor{layout.labels(), std::move(amplitudes)});
    return QuantumState(std::move(layout), std::move(branches));
}

const Matrix& QuantumState::dense_matrix() const {
    if (!is_dense()) throw PreconditionError("state is not dense");
    return std::get<Matrix>(rep_);
}

const std::vector<Branch>& QuantumState::branches() const {
    if (!is_ensemble()) throw PreconditionError("state is not an ensemble");
    return std::get<std::vector<Branch>>(rep_);
}

Matrix QuantumState::density() const {
    if (is_dense()) return dense_matrix();
    check_cap(layout_.total_dim(), "densify");
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    Matrix out = Matrix::Zero(n, n);
    for (const auto& b : branches()) out += b.probability * branch_density(layout_, b);
    return out;
}

QuantumState QuantumState::to_dense() const {
    if (is_dense()) return *this;
    return QuantumState(layout_, density());
}

bool QuantumState::is_pure() const {
    if (is_ensemble()) {
        const auto& bs = branches();
        if (bs.size() == 1 && all_pure(bs[0])) return true;
        if (layout_.total_dim() > kDenseCap) return false;
    }
    const Matrix rho = density();
    return std::abs((rho * rho).trace().real() - 1.0) <= kReconstructionTol;
}

Vector QuantumState::pure_vector() const {
    if (is_ensemble()) {
        const auto& bs = branches();
        if (bs.size() == 1 && all_pure(bs[0])) return branch_vector(layout_, bs[0]);
    }
    if (!is_pure()) throw PreconditionError("state is not pure");
    const auto es = eig_hermitian(density());
    return es.eigenvectors.col(0);
}

QuantumState QuantumState::with_party(const std::string& label, Party party) const {
    return QuantumState(layout_.with_party(label, party), rep_);
}

QuantumState QuantumState::permuted(const std::vector<std::string>& new_order) const {
    RegisterLayout layout = layout_.select(new_order);
    if (layout.size() != layout_.size()) throw LayoutError("new order is not a permutation of the layout");
    if (is_dense()) {
        return QuantumState(std::move(layout),
                            permute_square(dense_matrix(), layout_.dims(), positions_of(layout_, new_order)));
    }
    return QuantumState(std::move(layout), rep_);
}

QuantumState QuantumState::relabeled(const std::map<std::string, std::string>& renames) const {
    auto rename = [&](const std::string& l) {
        auto it = renames.find(l);
        return it == renames.end() ? l : it->second;
    };
    std::vector<Register> regs = layout_.registers();
    for (auto& r : regs) r.label = rename(r.label);
    RegisterLayout layout(std::move(regs));
    if (is_dense()) return QuantumState(std::move(layout), dense_matrix());
    auto bs = branches();
    for (auto& b : bs) {
        for (auto& f : b.factors) {
            for (auto& l : f.labels) l = rename(l);
        }
    }
    return QuantumState(std::move(layout), std::move(bs));
}

// ----------------------------------------------------------------------------
// Channels and instruments

KrausChannel::KrausChannel(RegisterLayout layout_in, RegisterLayout layout_out, std::vector<Matrix> kraus)
    : layout_in_(std::move(layout_in)), layout_out_(std::move(layout_out)), kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw PreconditionError("channel has no Kraus operators");
    for (const auto& k : kraus_) {
        if (static_cast<std::size_t>(k.rows()) != layout_out_.total_dim() ||
            static_cast<std::size_t>(k.cols()) != layout_in_.total_dim()) {
            throw LayoutError("Kraus operator shape does not match channel layouts");
        }
    }
    if (trace_preservation_defect() > kReconstructionTol) throw PreconditionError("channel is not trace preserving");
}

double KrausChannel::trace_preservation_defect() const {
    const auto n = static_cast<Eigen::Index>(layout_in_.total_dim());
    Matrix s = Matrix::Zero(n, n);
    for (const auto& k : kraus_) s += k.adjoint() * k;
    return (s - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

Instrument::Instrument(RegisterLayout layout_in, RegisterLayout layout_out, std::vector<InstrumentBranch> branches)
    : layout_in_(std::move(layout_in)), layout_out_(std::move(layout_out)), branches_(std::move(branches)) {
    if (branches_.empty()) throw PreconditionError("instrument has no branches");
    std::set<std::string> labels;
    for (const auto& b : branches_) {
        if (!labels.insert(b.label).second) throw PreconditionError("duplicate instrument outcome '" + b.label + "'");
    }
    as_channel();  // validates shapes and trace preservation
}

Instrument Instrument::from_channel(const KrausChannel& channel, std::string label) {
    return Instrument(channel.layout_in(), channel.layout_out(), {InstrumentBranch{std::move(label), channel.kraus()}});
}

KrausChannel Instrument::as_channel() const {
    std::vector<Matrix> all;
    for (const auto& b : branches_) all.insert(all.end(), b.kraus.begin(), b.kraus.end());
    return KrausChannel(layout_in_, layout_out_, std::move(all));
}

// ----------------------------------------------------------------------------
// Constructors

QuantumState max_entangled(std::size_t d, const std::string& alice, const std::string& bob) {
    if (d == 0) throw PreconditionError("maximally entangled state needs d >= 1");
    RegisterLayout layout({Register{alice, d, Party::Alice}, Register{bob, d, Party::Bob}});
    const auto n = static_cast<Eigen::Index>(d);
    Vector v = Vector::Zero(n * n);
    for (Eigen::Index k = 0; k < n; ++k) v(k * n + k) = 1.0 / std::sqrt(static_cast<double>(d));
    return QuantumState::pure(std::move(layout), std::move(v));
}

QuantumState basis_product(const std::vector<std::pair<Register, std::size_t>>& indices) {
    std::vector<Register> regs;
    std::vector<Branch> branches(1);
    for (const auto& [reg, index] : indices) {
        if (index >= reg.dim) {
            throw PreconditionError("basis index " + std::to_string(index) + " out of range for '" + reg.label + "'");
        }
        regs.push_back(reg);
        Vector v = Vector::Zero(static_cast<Eigen::Index>(reg.dim));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        branches[0].factors.push_back(Factor{{reg.label}, std::move(v)});
    }
    return QuantumState::ensemble(RegisterLayout(std::move(regs)), std::move(branches));
}

QuantumState maximally_mixed(const RegisterLayout& layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    std::vector<Branch> branches(1);
    if (!layout.empty()) {
        branches[0].factors.push_back(
            Factor{layout.labels(), Matrix(Matrix::Identity(n, n) / static_cast<double>(n))});
    }
    return QuantumState::ensemble(layout, std::move(branches));
}

QuantumState embed_local_dims(const QuantumState& s, const std::map<std::string, std::size_t>& new_dims) {
    std::vector<Register> regs = s.layout().registers();
    for (const auto& [label, dim] : new_dims) {
        auto& r = regs[s.layout().index_of(label)];
        if (dim < r.dim) throw PreconditionError("cannot shrink register '" + label + "'");
        r.dim = dim;
    }
    RegisterLayout layout(std::move(regs));
    if (s.is_dense()) {
        return QuantumState::dense(layout, embed_matrix(s.dense_matrix(), s.layout().dims(), layout.dims()));
    }
    auto branches = s.branches();
    for (auto& b : branches) {
        for (auto& f : b.factors) {
            const auto od = dims_of(s.layout(), f.labels);
            const auto nd = dims_of(layout, f.labels);
            if (f.is_pure()) {
                f.data = embed_vector(f.vector(), od, nd);
            } else {
                f.data = embed_matrix(f.block(), od, nd);
            }
        }
    }
    return QuantumState::ensemble(std::move(layout), std::move(branches));
}

// ----------------------------------------------------------------------------
// Structural operations

QuantumState tensor(const QuantumState& a, const QuantumState& b) {
    RegisterLayout layout = a.layout().concat(b.layout());
    if (a.is_ensemble() && b.is_ensemble()) {
        std::vector<Branch> out;
        out.reserve(a.branches().size() * b.branches().size());
        for (const auto& x : a.branches()) {
            for (const auto& y : b.branches()) {
                Branch nb{x.probability * y.probability, x.factors};
                nb.factors.insert(nb.factors.end(), y.factors.begin(), y.factors.end());
                out.push_back(std::move(nb));
            }
        }
        normalize(out);
        return QuantumState::ensemble(std::move(layout), std::move(out));
    }
    check_cap(layout.total_dim(), "tensor");
    return QuantumState::dense(std::move(layout), kron(a.density(), b.density()));
}

QuantumState partial_trace(const QuantumState& s, const std::set<std::string>& discard) {
    RegisterLayout layout = s.layout().without(discard);
    if (s.is_dense()) {
        std::vector<bool> keep(s.layout().size(), true);
        for (const auto& l : discard) keep[s.layout().index_of(l)] = false;
        Matrix m = partial_trace_matrix(s.dense_matrix(), s.layout().dims(), keep);
        return QuantumState::dense(std::move(layout), std::move(m));
    }
    std::vector<Branch> out;
    for (const auto& b : s.branches()) {
        Branch nb{b.probability, {}};
        for (const auto& f : b.factors) {
            std::vector<std::string> kept, gone;
            for (const auto& l : f.labels) (discard.count(l) ? gone : kept).push_back(l);
            if (gone.empty()) {
                nb.factors.push_back(f);
                continue;
            }
            if (kept.empty()) continue;
            const auto fd = dims_of(s.layout(), f.labels);
            Matrix reduced;
            if (f.is_pure()) {
                std::vector<std::string> order = kept;
                order.insert(order.end(), gone.begin(), gone.end());
                const Vector v = permute_vector(f.vector(), fd, order_from(f.labels, order));
                const Matrix m = reshape_rows(v, product(dims_of(s.layout(), kept)), product(dims_of(s.layout(), gone)));
                // Kept and discarded parts in a product state: the reduced factor stays pure.
                if (auto u = product_left_factor(m)) {
                    nb.factors.push_back(Factor{kept, std::move(*u)});
                    continue;
                }
                reduced = m * m.adjoint();
            } else {
                std::vector<bool> keep;
                for (const auto& l : f.labels) keep.push_back(!discard.count(l));
                reduced = partial_trace_matrix(f.block(), fd, keep);
            }
            reduced /= reduced.trace().real();
            nb.factors.push_back(Factor{kept, std::move(reduced)});
        }
        out.push_back(std::move(nb));
    }
    return QuantumState::ensemble(std::move(layout), std::move(out));
}

QuantumState marginal(const QuantumState& s, const std::vector<std::string>& keep) {
    std::set<std::string> discard;
    for (const auto& l : s.layout().labels()) {
        if (std::find(keep.begin(), keep.end(), l) == keep.end()) discard.insert(l);
    }
    return partial_trace(s, discard).permuted(keep);
}

QuantumState mix(const std::vector<std::pair<double, QuantumState>>& parts) {
    if (parts.empty()) throw PreconditionError("mixture of nothing");
    const RegisterLayout& layout = parts.front().second.layout();
    double total = 0.0;
    bool ensembles = true;
    for (const auto& [w, s] : parts) {
        if (w < 0.0) throw PreconditionError("negative mixture weight");
        total += w;
        ensembles = ensembles && s.is_ensemble();
    }
    if (!(total > 0.0)) throw PreconditionError("mixture weights sum to zero");
    if (ensembles) {
        std::vector<Branch> out;
        for (const auto& [w, s] : parts) {
            if (w <= 0.0) continue;
            const QuantumState aligned = s.layout() == layout ? s : s.permuted(layout.labels());
            if (!(aligned.layout() == layout)) throw LayoutError("mixture components have different layouts");
            for (const auto& b : aligned.branches()) out.push_back(Branch{w / total * b.probability, b.factors});
        }
        normalize(out);
        return QuantumState::ensemble(layout, std::move(out));
    }
    check_cap(layout.total_dim(), "mix");
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    Matrix m = Matrix::Zero(n, n);
    for (const auto& [w, s] : parts) {
        const QuantumState aligned = s.layout() == layout ? s : s.permuted(layout.labels());
        if (!(aligned.layout() == layout)) throw LayoutError("mixture components have different layouts");
        m += (w / total) * aligned.density();
    }
    return QuantumState::dense(layout, std::move(m));
}

QuantumState purify_factors(const QuantumState& s) {
    if (s.is_dense()) {
        const auto es = eig_hermitian(s.dense_matrix());
        std::vector<Branch> out;
        for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
            if (es.eigenvalues(k) <= kSpectralFloor) continue;
            Branch b{es.eigenvalues(k), {}};
            if (!s.layout().empty()) b.factors.push_back(Factor{s.layout().labels(), Vector(es.eigenvectors.col(k))});
            out.push_back(std::move(b));
        }
        normalize(out);
        return QuantumState::ensemble(s.layout(), std::move(out));
    }
    std::vector<Branch> out;
    for (const auto& b : s.branches()) {
        std::vector<Branch> partial{Branch{b.probability, {}}};
        for (const auto& f : b.factors) {
            if (f.is_pure()) {
                for (auto& p : partial) p.factors.push_back(f);
                continue;
            }
            const auto es = eig_hermitian(f.block());
            std::vector<Branch> next;
            for (const auto& p : partial) {
                for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
                    if (es.eigenvalues(k) <= kSpectralFloor) continue;
                    Branch nb{p.probability * es.eigenvalues(k), p.factors};
                    nb.factors.push_back(Factor{f.labels, Vector(es.eigenvectors.col(k))});
                    next.push_back(std::move(nb));
                }
            }
            partial = std::move(next);
        }
        out.insert(out.end(), partial.begin(), partial.end());
    }
    normalize(out);
    return QuantumState::ensemble(s.layout(), std::move(out));
}

RegisterLayout layout_after(const RegisterLayout& layout, const std::vector<std::string>& targets,
                            const RegisterLayout& out) {
    const std::set<std::string> target_set(targets.begin(), targets.end());
    std::vector<Register> regs;
    bool placed = false;
    for (const auto& r : layout.registers()) {
        if (target_set.count(r.label)) {
            if (!placed) {
                regs.insert(regs.end(), out.registers().begin(), out.registers().end());
                placed = true;
            }
            continue;
        }
        regs.push_back(r);
    }
    if (!placed) regs.insert(regs.end(), out.registers().begin(), out.registers().end());
    return RegisterLayout(std::move(regs));
}

namespace {

/// Dense route shared by channels and instruments: per Kraus list, the unnormalized output.
std::vector<Matrix> dense_outputs(const QuantumState& s, const std::vector<std::vector<Matrix>>& kraus_sets,
                                  const std::vector<std::string>& targets, const RegisterLayout& out_layout,
                                  const RegisterLayout& final_layout) {
    const auto& layout = s.layout();
    check_cap(final_layout.total_dim(), "dense channel output");
    std::vector<std::string> others;
    for (const auto& l : layout.labels()) {
        if (std::find(targets.begin(), targets.end(), l) == targets.end()) others.push_back(l);
    }
    std::vector<std::string> order = targets;
    order.insert(order.end(), others.begin(), others.end());
    const Matrix rho = permute_square(s.dense_matrix(), layout.dims(), positions_of(layout, order));
    const std::size_t d_r = product(dims_of(layout, others));
    std::vector<std::string> produced = out_layout.labels();
    produced.insert(produced.end(), others.begin(), others.end());
    std::vector<std::size_t> produced_dims = out_layout.dims();
    for (const auto& l : others) produced_dims.push_back(layout.at(l).dim);
    std::vector<Matrix> results;
    for (const auto& kraus : kraus_sets) {
        Matrix m = apply_kraus_dense(rho, d_r, kraus);
        results.push_back(permute_square(m, produced_dims, order_from(produced, final_layout.labels())));
    }
    return results;
}

}  // namespace

QuantumState apply_channel(const KrausChannel& ch, const QuantumState& s, const std::vector<std::string>& targets) {
    check_targets(s.layout(), ch.layout_in(), targets);
    RegisterLayout final_layout = layout_after(s.layout(), targets, ch.layout_out());
    if (s.is_dense()) {
        auto out = dense_outputs(s, {ch.kraus()}, targets, ch.layout_out(), final_layout);
        Matrix m = std::move(out[0]);
        m = 0.5 * (m + m.adjoint());
        return QuantumState::dense(std::move(final_layout), std::move(m));
    }
    const QuantumState pure = purify_factors(s);
    std::vector<Branch> out;
    apply_kraus_to_branches(s.layout(), pure.branches(), ch.kraus(), targets, ch.layout_out(), out);
    normalize(out);
    return QuantumState::ensemble(std::move(final_layout), std::move(out));
}

std::vector<InstrumentOutcome> apply_instrument(const Instrument& ins, const QuantumState& s,
                                                const std::vector<std::string>& targets) {
    check_targets(s.layout(), ins.layout_in(), targets);
    RegisterLayout final_layout = layout_after(s.layout(), targets, ins.layout_out());
    std::vector<InstrumentOutcome> outcomes;
    if (s.is_dense()) {
        std::vector<std::vector<Matrix>> sets;
        for (const auto& b : ins.branches()) sets.push_back(b.kraus);
        auto outs = dense_outputs(s, sets, targets, ins.layout_out(), final_layout);
        for (std::size_t k = 0; k < outs.size(); ++k) {
            const double p = outs[k].trace().real();
            if (p < kZeroProbability) continue;
            Matrix m = outs[k] / p;
            m = 0.5 * (m + m.adjoint());
            outcomes.push_back({ins.branches()[k].label, p, QuantumState::dense(final_layout, std::move(m))});
        }
    } else {
        const QuantumState pure = purify_factors(s);
        for (const auto& b : ins.branches()) {
            std::vector<Branch> out;
            const double p = apply_kraus_to_branches(s.layout(), pure.branches(), b.kraus, targets, ins.layout_out(), out);
            if (p < kZeroProbability) continue;
            normalize(out);
            outcomes.push_back({b.label, p, QuantumState::ensemble(final_layout, std::move(out))});
        }
    }
    double total = 0.0;
    for (const auto& o : outcomes) total += o.probability;
    for (auto& o : outcomes) o.probability /= total;
    return outcomes;
}

double fidelity(const QuantumState& a, const QuantumState& b) {
    if (!b.is_pure()) throw PreconditionError("fidelity reference must be pure");
    std::vector<std::string> la = a.layout().labels(), lb = b.layout().labels();
    if (la.size() != lb.size()) throw LayoutError("fidelity between states on different registers");
    const QuantumState bb = b.permuted(la);
    if (bb.layout().dims() != a.layout().dims()) throw LayoutError("fidelity between states of different dimensions");
    const Vector v = bb.pure_vector();
    Complex f = 0.0;
    if (a.is_dense()) {
        f = v.dot(a.dense_matrix() * v);
    } else {
        const QuantumState pa = purify_factors(a);
        double acc = 0.0;
        for (const auto& br : pa.branches()) acc += br.probability * std::norm(v.dot(branch_vector(a.layout(), br)));
        f = acc;
    }
    return std::clamp(f.real(), 0.0, 1.0);
}

double trace_distance(const QuantumState& a, const QuantumState& b) {
    std::vector<std::string> la = a.layout().labels();
    if (la.size() != b.layout().size()) throw LayoutError("trace distance between states on different registers");
    const QuantumState bb = b.permuted(la);
    if (bb.layout().dims() != a.layout().dims()) throw LayoutError("trace distance between states of different dimensions");
    const auto n = static_cast<Eigen::Index>(a.layout().total_dim());
    if (a.is_ensemble() && bb.is_ensemble()) {
        // a - b = V W V^dagger with V = Q R, so its nonzero spectrum is that of R W R^dagger.
        const QuantumState pa = purify_factors(a), pb = purify_factors(bb);
        const auto r = static_cast<Eigen::Index>(pa.branches().size() + pb.branches().size());
        if (2 * r <= n) {
            Matrix v(n, r);
            RealVector w(r);
            Eigen::Index col = 0;
            for (const auto* part : {&pa, &pb}) {
                const double sign = part == &pa ? 1.0 : -1.0;
                for (const auto& br : part->branches()) {
                    v.col(col) = branch_vector(a.layout(), br);
                    w(col++) = sign * br.probability;
                }
            }
            Eigen::HouseholderQR<Matrix> qr(v);
            const Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
            const Matrix small = rr * w.cast<Complex>().asDiagonal() * rr.adjoint();
            const auto es = eig_hermitian(Matrix(0.5 * (small + small.adjoint())));
            return std::clamp(0.5 * es.eigenvalues.cwiseAbs().sum(), 0.0, 1.0);
        }
    }
    const Matrix diff = a.density() - bb.density();
    const auto es = eig_hermitian(Matrix(0.5 * (diff + diff.adjoint())));
    return std::clamp(0.5 * es.eigenvalues.cwiseAbs().sum(), 0.0, 1.0);
}

double min_eigenvalue(const QuantumState& s) {
    const auto es = eig_hermitian(s.density());
    return es.eigenvalues.size() ? es.eigenvalues(es.eigenvalues.size() - 1) : 0.0;
}

// ----------------------------------------------------------------------------
// Channel helpers

KrausChannel discard_channel(const RegisterLayout& layout_in) {
    const auto n = static_cast<Eigen::Index>(layout_in.total_dim());
    std::vector<Matrix> kraus;
    for (Eigen::Index j = 0; j < n; ++j) {
        Matrix k = Matrix::Zero(1, n);
        k(0, j) = 1.0;
        kraus.push_back(std::move(k));
    }
    return KrausChannel(layout_in, RegisterLayout(), std::move(kraus));
}

KrausChannel preparation_channel(const QuantumState& state) {
    std::vector<Matrix> kraus;
    const QuantumState pure = purify_factors(state);
    for (const auto& b : pure.branches()) {
        Branch single = b;
        single.probability = 1.0;
        kraus.push_back(std::sqrt(b.probability) * branch_vector(state.layout(), single));
    }
    return KrausChannel(RegisterLayout(), state.layout(), std::move(kraus));
}

KrausChannel complete_to_channel(const RegisterLayout& layout_in, const RegisterLayout& layout_out,
                                 std::vector<Matrix> kraus) {
    const auto n = static_cast<Eigen::Index>(layout_in.total_dim());
    const auto m = static_cast<Eigen::Index>(layout_out.total_dim());
    Matrix s = Matrix::Zero(n, n);
    for (const auto& k : kraus) s += k.adjoint() * k;
    const auto es = eig_hermitian(Matrix(Matrix::Identity(n, n) - 0.5 * (s + s.adjoint())));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lambda = es.eigenvalues(k);
        if (lambda < -kReconstructionTol) throw PreconditionError("Kraus set is not trace non-increasing");
        if (lambda <= 1e-14) continue;
        Matrix extra = Matrix::Zero(m, n);
        extra.row(0) = std::sqrt(lambda) * es.eigenvectors.col(k).adjoint();
        kraus.push_back(std::move(extra));
    }
    return KrausChannel(layout_in, layout_out, std::move(kraus));
}

KrausChannel corrupt_channel(const KrausChannel& ch, double eps) {
    if (ch.layout_out().empty()) throw PreconditionError("cannot corrupt a channel without outputs");
    const auto d0 = static_cast<Eigen::Index>(ch.layout_out().registers()[0].dim);
    Matrix shift = Matrix::Zero(d0, d0);
    for (Eigen::Index k = 0; k < d0; ++k) shift((k + 1) % d0, k) = 1.0;
    const auto rest = static_cast<Eigen::Index>(ch.layout_out().total_dim()) / d0;
    const Matrix x = kron(shift, Matrix(Matrix::Identity(rest, rest)));
    std::vector<Matrix> kraus;
    for (const auto& k : ch.kraus()) {
        kraus.push_back(std::sqrt(1.0 - eps) * k);
        kraus.push_back(std::sqrt(eps) * (x * k));
    }
    return KrausChannel(ch.layout_in(), ch.layout_out(), std::move(kraus));
}

double ensemble_dense_deviation(const QuantumState& s) {
    if (s.is_dense()) return 0.0;
    check_cap(s.layout().total_dim(), "ensemble/dense cross-check");
    const auto& layout = s.layout();
    // Dense route: densify once, then work on the matrix only.
    const Matrix rho = s.density();
    // Independent route: spectral purification followed by outer products.
    const QuantumState pure = purify_factors(s);
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    Matrix rho2 = Matrix::Zero(n, n);
    for (const auto& b : pure.branches()) {
        const Vector v = branch_vector(layout, b);
        rho2 += b.probability * v * v.adjoint();
    }
    double dev = (rho - rho2).cwiseAbs().maxCoeff();
    for (Party party : {Party::Alice, Party::Bob}) {
        const auto keep_labels = layout.party_labels(party);
        if (keep_labels.empty() || keep_labels.size() == layout.size()) continue;
        std::vector<bool> keep;
        for (const auto& r : layout.registers()) keep.push_back(r.party == party);
        const Matrix dense_marginal = partial_trace_matrix(rho, layout.dims(), keep);
        const Matrix ensemble_marginal = marginal(s, keep_labels).density();
        dev = std::max(dev, (dense_marginal - ensemble_marginal).cwiseAbs().maxCoeff());
    }
    const auto& first = pure.branches().front();
    const Vector ref = branch_vector(layout, Branch{1.0, first.factors});
    const double f_dense = ref.dot(rho * ref).real();
    const double f_ensemble = fidelity(s, QuantumState::pure(layout, ref));
    dev = std::max(dev, std::abs(f_dense - f_ensemble));
    const double purity_dense = (rho * rho).trace().real();
    double purity_ensemble = 0.0;
    const auto& bs = pure.branches();
    std::vector<Vector> vs;
    for (const auto& b : bs) vs.push_back(branch_vector(layout, b));
    for (std::size_t i = 0; i < bs.size(); ++i) {
        for (std::size_t j = 0; j < bs.size(); ++j) {
            purity_ensemble += bs[i].probability * bs[j].probability * std::norm(vs[i].dot(vs[j]));
        }
    }
    dev = std::max(dev, std::abs(purity_dense - purity_ensemble));
    return dev;
}

}  // namespace clover
