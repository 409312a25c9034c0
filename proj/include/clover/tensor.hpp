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

// Dense complex linear algebra over labelled multipartite register spaces.
//
// Index convention: the leftmost register of a layout is the most significant
// digit of the flattened index. Every module relies on this single convention.

#pragma once

#include <complex>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "clover/errors.hpp"

namespace clover {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Entrywise tolerance for Hermiticity and normalization checks.
constexpr double kHermitianTol = 1e-10;
/// Tolerance for reconstructing an input from its decomposition.
constexpr double kReconstructionTol = 1e-9;
/// Largest total dimension ever materialized as a dense square matrix.
constexpr std::size_t kDenseCap = 2000;

enum class Party { Alice, Bob, Referee };

std::string_view to_string(Party party);
Party party_from_string(std::string_view name);

struct Register {
    std::string label;
    std::size_t dim = 1;
    Party party = Party::Alice;

    bool operator==(const Register&) const = default;
};

/// Ordered list of uniquely labelled registers, each owned by one party.
class RegisterLayout {
   public:
    RegisterLayout() = default;
    explicit RegisterLayout(std::vector<Register> registers);

    const std::vector<Register>& registers() const { return registers_; }
    std::size_t size() const { return registers_.size(); }
    bool empty() const { return registers_.empty(); }
    std::size_t total_dim() const { return total_dim_; }

    bool contains(std::string_view label) const;
    std::size_t index_of(std::string_view label) const;
    const Register& at(std::string_view label) const;

    std::vector<std::string> labels() const;
    std::vector<std::size_t> dims() const;
    std::vector<std::string> party_labels(Party party) const;
    std::size_t party_dim(Party party) const;

    /// Concatenation (this first). Duplicate labels raise LayoutError.
    RegisterLayout concat(const RegisterLayout& other) const;
    /// Sub-layout in the given label order.
    RegisterLayout select(const std::vector<std::string>& labels) const;
    RegisterLayout without(const std::set<std::string>& labels) const;
    RegisterLayout with_party(std::string_view label, Party party) const;

    bool operator==(const RegisterLayout& other) const { return registers_ == other.registers_; }

   private:
    std::vector<Register> registers_;
    std::size_t total_dim_ = 1;
};

/// Dense operator from layout_in to layout_out (rows index layout_out).
class Operator {
   public:
    Operator(RegisterLayout layout_out, RegisterLayout layout_in, Matrix entries);

    static Operator square(RegisterLayout layout, Matrix entries);
    static Operator identity(const RegisterLayout& layout);

    const RegisterLayout& layout_out() const { return layout_out_; }
    const RegisterLayout& layout_in() const { return layout_in_; }
    const Matrix& matrix() const { return entries_; }
    bool is_square() const { return layout_in_ == layout_out_; }

   private:
    RegisterLayout layout_out_;
    RegisterLayout layout_in_;
    Matrix entries_;
};

struct SpectralResult {
    RealVector eigenvalues;  // descending
    Matrix eigenvectors;     // column k belongs to eigenvalues(k)
};

/// Bipartition of a layout's registers.
struct Cut {
    std::vector<std::string> left;
    std::vector<std::string> right;

    /// Alice registers on the left, Bob registers on the right. Referee registers are rejected.
    static Cut alice_bob(const RegisterLayout& layout);
};

struct CutDecomposition {
    RealVector singular_values;  // descending
    Matrix left_basis;           // columns on the left layout
    Matrix right_basis;          // columns on the right layout; v = sum_k s_k l_k (x) r_k
    RegisterLayout left_layout;
    RegisterLayout right_layout;
};

Operator tensor_product(const Operator& x, const Operator& y);
Operator partial_trace(const Operator& x, const std::set<std::string>& discard);
/// Conjugation by the register permutation unitary. `new_order` lists every label once.
Operator permute_registers(const Operator& x, const std::vector<std::string>& new_order);
/// Reorders output and input registers independently (rectangular operators).
Operator permute_registers(const Operator& x, const std::vector<std::string>& out_order,
                           const std::vector<std::string>& in_order);
SpectralResult eig_hermitian(const Operator& x);
SpectralResult eig_hermitian(const Matrix& x);
CutDecomposition svd_across_cut(const Vector& v, const RegisterLayout& layout, const Cut& cut);

// Raw kernels shared by the higher modules.

/// new_flat -> old_flat map for reordering registers with dims `dims` into `order`.
std::vector<std::size_t> permutation_index_map(const std::vector<std::size_t>& dims,
                                               const std::vector<std::size_t>& order);
/// Positions of `labels` inside `layout`, in the order given.
std::vector<std::size_t> positions_of(const RegisterLayout& layout, const std::vector<std::string>& labels);
Vector permute_vector(const Vector& v, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& order);
Matrix permute_square(const Matrix& m, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& order);
/// Traces out every register whose keep flag is false.
Matrix partial_trace_matrix(const Matrix& m, const std::vector<std::size_t>& dims, const std::vector<bool>& keep);
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);
/// Row-major reshape of a vector into rows x cols.
Matrix reshape_rows(const Vector& v, std::size_t rows, std::size_t cols);
double hermiticity_defect(const Matrix& m);

}  // namespace clover
