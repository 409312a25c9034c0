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

#include "clover/tensor.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace clover {

std::string_view to_string(Party party) {
    switch (party) {
        case Party::Alice:
            return "Alice";
        case Party::Bob:
            return "Bob";
        case Party::Referee:
            return "Referee";
    }
    return "?";
}

Party party_from_string(std::string_view name) {
    if (name == "Alice" || name == "alice" || name == "A") return Party::Alice;
    if (name == "Bob" || name == "bob" || name == "B") return Party::Bob;
    if (name == "Referee" || name == "referee" || name == "R") return Party::Referee;
    throw FormatError("unknown party '" + std::string(name) + "'");
}

// ----------------------------------------------------------------------------
// RegisterLayout

RegisterLayout::RegisterLayout(std::vector<Register> registers) : registers_(std::move(registers)) {
    std::unordered_set<std::string> seen;
    for (const auto& r : registers_) {
        if (r.dim == 0) throw LayoutError("register '" + r.label + "' has dimension 0");
        if (!seen.insert(r.label).second) throw LayoutError("duplicate register label '" + r.label + "'");
        total_dim_ *= r.dim;
    }
}

bool RegisterLayout::contains(std::string_view label) const {
    return std::any_of(registers_.begin(), registers_.end(), [&](const Register& r) { return r.label == label; });
}

std::size_t RegisterLayout::index_of(std::string_view label) const {
    for (std::size_t k = 0; k < registers_.size(); ++k) {
        if (registers_[k].label == label) return k;
    }
    throw LayoutError("unknown register label '" + std::string(label) + "'");
}

const Register& RegisterLayout::at(std::string_view label) const { return registers_[index_of(label)]; }

std::vector<std::string> RegisterLayout::labels() const {
    std::vector<std::string> out;
    out.reserve(registers_.size());
    for (const auto& r : registers_) out.push_back(r.label);
    return out;
}

std::vector<std::size_t> RegisterLayout::dims() const {
    std::vector<std::size_t> out;
    out.reserve(registers_.size());
    for (const auto& r : registers_) out.push_back(r.dim);
    return out;
}

std::vector<std::string> RegisterLayout::party_labels(Party party) const {
    std::vector<std::string> out;
    for (const auto& r : registers_) {
        if (r.party == party) out.push_back(r.label);
    }
    return out;
}

std::size_t RegisterLayout::party_dim(Party party) const {
    std::size_t d = 1;
    for (const auto& r : registers_) {
        if (r.party == party) d *= r.dim;
    }
    return d;
}

RegisterLayout RegisterLayout::concat(const RegisterLayout& other) const {
    std::vector<Register> regs = registers_;
    regs.insert(regs.end(), other.registers_.begin(), other.registers_.end());
    return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::select(const std::vector<std::string>& labels) const {
    std::vector<Register> regs;
    regs.reserve(labels.size());
    for (const auto& l : labels) regs.push_back(at(l));
    return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::without(const std::set<std::string>& labels) const {
    for (const auto& l : labels) index_of(l);
    std::vector<Register> regs;
    for (const auto& r : registers_) {
        if (!labels.count(r.label)) regs.push_back(r);
    }
    return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::with_party(std::string_view label, Party party) const {
    std::vector<Register> regs = registers_;
    regs[index_of(label)].party = party;
    return RegisterLayout(std::move(regs));
}

// ----------------------------------------------------------------------------
// Operator

Operator::Operator(RegisterLayout layout_out, RegisterLayout layout_in, Matrix entries)
    : layout_out_(std::move(layout_out)), layout_in_(std::move(layout_in)), entries_(std::move(entries)) {
    if (static_cast<std::size_t>(entries_.rows()) != layout_out_.total_dim() ||
        static_cast<std::size_t>(entries_.cols()) != layout_in_.total_dim()) {
        throw LayoutError("operator shape " + std::to_string(entries_.rows()) + "x" +
                          std::to_string(entries_.cols()) + " does not match its layouts");
    }
}

Operator Operator::square(RegisterLayout layout, Matrix entries) {
    RegisterLayout copy = layout;
    return Operator(std::move(layout), std::move(copy), std::move(entries));
}

Operator Operator::identity(const RegisterLayout& layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return square(layout, Matrix::Identity(n, n));
}

// ----------------------------------------------------------------------------
// Kernels

std::vector<std::size_t> permutation_index_map(const std::vector<std::size_t>& dims,
                                               const std::vector<std::size_t>& order) {
    const std::size_t n = dims.size();
    if (order.size() != n) throw LayoutError("permutation length mismatch");
    std::vector<std::size_t> old_stride(n, 1);
    for (std::size_t k = n; k-- > 1;) old_stride[k - 1] = old_stride[k] * dims[k];
    std::vector<std::size_t> new_dims(n), stride(n);
    std::vector<bool> used(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        if (order[j] >= n || used[order[j]]) throw LayoutError("not a permutation");
        used[order[j]] = true;
        new_dims[j] = dims[order[j]];
        stride[j] = old_stride[order[j]];
    }
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    std::vector<std::size_t> map(total);
    std::vector<std::size_t> digit(n, 0);
    std::size_t old_index = 0;
    for (std::size_t i = 0; i < total; ++i) {
        map[i] = old_index;
        for (std::size_t j = n; j-- > 0;) {
            if (++digit[j] < new_dims[j]) {
                old_index += stride[j];
                break;
            }
            old_index -= stride[j] * (new_dims[j] - 1);
            digit[j] = 0;
        }
    }
    return map;
}

std::vector<std::size_t> positions_of(const RegisterLayout& layout, const std::vector<std::string>& labels) {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(layout.index_of(l));
    return out;
}

Vector permute_vector(const Vector& v, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& order) {
    const auto map = permutation_index_map(dims, order);
    Vector out(v.size());
    for (std::size_t i = 0; i < map.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(map[i]));
    return out;
}

Matrix permute_square(const Matrix& m, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& order) {
    const auto map = permutation_index_map(dims, order);
    const auto n = static_cast<Eigen::Index>(map.size());
    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto oj = static_cast<Eigen::Index>(map[j]);
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = m(static_cast<Eigen::Index>(map[i]), oj);
    }
    return out;
}

Matrix partial_trace_matrix(const Matrix& m, const std::vector<std::size_t>& dims, const std::vector<bool>& keep) {
    std::vector<std::size_t> order;
    std::size_t kept_dim = 1, traced_dim = 1;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (keep[k]) {
            order.push_back(k);
            kept_dim *= dims[k];
        }
    }
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (!keep[k]) {
            order.push_back(k);
            traced_dim *= dims[k];
        }
    }
    const Matrix p = permute_square(m, dims, order);
    const auto K = static_cast<Eigen::Index>(kept_dim);
    const auto T = static_cast<Eigen::Index>(traced_dim);
    Matrix out = Matrix::Zero(K, K);
    for (Eigen::Index j = 0; j < K; ++j) {
        for (Eigen::Index i = 0; i < K; ++i) {
            Complex acc = 0;
            for (Eigen::Index t = 0; t < T; ++t) acc += p(i * T + t, j * T + t);
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Matrix reshape_rows(const Vector& v, std::size_t rows, std::size_t cols) {
    if (static_cast<std::size_t>(v.size()) != rows * cols) throw LayoutError("reshape size mismatch");
    // Eigen is column-major: a (cols x rows) view of v is the transpose of the row-major reshape.
    return Eigen::Map<const Matrix>(v.data(), static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(rows))
        .transpose();
}

double hermiticity_defect(const Matrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// ----------------------------------------------------------------------------
// Operations

Operator tensor_product(const Operator& x, const Operator& y) {
    return Operator(x.layout_out().concat(y.layout_out()), x.layout_in().concat(y.layout_in()),
                    kron(x.matrix(), y.matrix()));
}

Operator partial_trace(const Operator& x, const std::set<std::string>& discard) {
    if (!x.is_square()) throw LayoutError("partial trace needs a square operator");
    const auto& layout = x.layout_in();
    std::vector<bool> keep(layout.size(), true);
    for (const auto& l : discard) keep[layout.index_of(l)] = false;
    return Operator::square(layout.without(discard), partial_trace_matrix(x.matrix(), layout.dims(), keep));
}

Operator permute_registers(const Operator& x, const std::vector<std::string>& new_order) {
    if (!x.is_square()) throw LayoutError("conjugation by a register permutation needs a square operator");
    return permute_registers(x, new_order, new_order);
}

Operator permute_registers(const Operator& x, const std::vector<std::string>& out_order,
                           const std::vector<std::string>& in_order) {
    const auto& lo = x.layout_out();
    const auto& li = x.layout_in();
    if (out_order.size() != lo.size() || in_order.size() != li.size()) {
        throw LayoutError("new register order is not a permutation of the layout labels");
    }
    const auto out_map = permutation_index_map(lo.dims(), positions_of(lo, out_order));
    const auto in_map = permutation_index_map(li.dims(), positions_of(li, in_order));
    const Matrix& m = x.matrix();
    Matrix out(m.rows(), m.cols());
    for (std::size_t j = 0; j < in_map.size(); ++j) {
        for (std::size_t i = 0; i < out_map.size(); ++i) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(out_map[i]), static_cast<Eigen::Index>(in_map[j]));
        }
    }
    return Operator(lo.select(out_order), li.select(in_order), std::move(out));
}

SpectralResult eig_hermitian(const Matrix& x) {
    if (x.rows() != x.cols()) throw PreconditionError("eigendecomposition needs a square matrix");
    if (hermiticity_defect(x) > kHermitianTol) {
        throw PreconditionError("matrix is not Hermitian within tolerance");
    }
    if (x.size() == 0) return {RealVector(0), Matrix(0, 0)};
    const Matrix h = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) throw Error("eigensolver failed");
    const auto n = h.rows();
    SpectralResult out{RealVector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
        out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    return out;
}

SpectralResult eig_hermitian(const Operator& x) {
    if (!x.is_square()) throw PreconditionError("eigendecomposition needs a square operator");
    return eig_hermitian(x.matrix());
}

Cut Cut::alice_bob(const RegisterLayout& layout) {
    Cut cut;
    for (const auto& r : layout.registers()) {
        if (r.party == Party::Alice) {
            cut.left.push_back(r.label);
        } else if (r.party == Party::Bob) {
            cut.right.push_back(r.label);
        } else {
            throw LayoutError("register '" + r.label + "' is on neither side of the Alice/Bob cut");
        }
    }
    return cut;
}

CutDecomposition svd_across_cut(const Vector& v, const RegisterLayout& layout, const Cut& cut) {
    if (static_cast<std::size_t>(v.size()) != layout.total_dim()) throw LayoutError("vector does not match layout");
    if (std::abs(v.norm() - 1.0) > kHermitianTol) throw PreconditionError("state vector is not normalized");
    std::vector<std::string> order = cut.left;
    order.insert(order.end(), cut.right.begin(), cut.right.end());
    if (order.size() != layout.size()) throw LayoutError("cut does not assign every register to one side");
    const auto perm = positions_of(layout, order);  // throws on unknown labels
    {
        std::vector<std::size_t> sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw LayoutError("register assigned to both sides of the cut");
        }
    }
    CutDecomposition out;
    out.left_layout = layout.select(cut.left);
    out.right_layout = layout.select(cut.right);
    const Vector reordered = permute_vector(v, layout.dims(), perm);
    const Matrix m = reshape_rows(reordered, out.left_layout.total_dim(), out.right_layout.total_dim());
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.singular_values = svd.singularValues();
    out.left_basis = svd.matrixU();
    // m = U S V^dagger, so the right-hand vectors of v are the conjugated columns of V.
    out.right_basis = svd.matrixV().conjugate();
    return out;
}

}  // namespace clover
