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

#include "clover/random.hpp"

namespace clover {

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
    }
    return m;
}

Vector random_unit_vector(Eigen::Index n, Rng& rng) {
    Vector v = random_gaussian(n, 1, rng).col(0);
    return v / v.norm();
}

Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    if (rows < cols) throw PreconditionError("isometry needs rows >= cols");
    const Matrix g = random_gaussian(rows, cols, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    // Fix the phase freedom of QR so the distribution is unitarily invariant.
    const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < cols; ++k) {
        const Complex d = r(k, k);
        if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

Matrix random_unitary(Eigen::Index n, Rng& rng) { return random_isometry(n, n, rng); }

Matrix random_density(Eigen::Index n, Rng& rng, Eigen::Index rank) {
    const Matrix g = random_gaussian(n, rank > 0 ? rank : n, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

QuantumState random_pure_state(const RegisterLayout& layout, Rng& rng) {
    return QuantumState::pure(layout, random_unit_vector(static_cast<Eigen::Index>(layout.total_dim()), rng));
}

KrausChannel random_channel(const RegisterLayout& in, const RegisterLayout& out, Eigen::Index num_kraus, Rng& rng) {
    const auto di = static_cast<Eigen::Index>(in.total_dim());
    const auto dout = static_cast<Eigen::Index>(out.total_dim());
    const Matrix v = random_isometry(dout * num_kraus, di, rng);
    std::vector<Matrix> kraus;
    for (Eigen::Index k = 0; k < num_kraus; ++k) kraus.push_back(v.middleRows(k * dout, dout));
    return KrausChannel(in, out, std::move(kraus));
}

}  // namespace clover
