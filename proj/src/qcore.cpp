// Copyright 2026 The QHL Authors
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

#include "qhl/qcore.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qhl/errors.hpp"

namespace qhl {

namespace {

double max_abs(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_hermitian(const ComplexMatrix &h) {
    if (!is_hermitian(h)) {
        throw Error(ErrorKind::NonHermitianInput, "matrix is not Hermitian within tolerance");
    }
}

bool is_real(const ComplexMatrix &m) {
    return m.imag().cwiseAbs().maxCoeff() == 0.0;
}

// Rescales u so its first non-negligible entry is real and positive.
Eigen::Matrix2cd canonical_phase(const Eigen::Matrix2cd &u) {
    for (Eigen::Index k = 0; k < 4; ++k) {
        Complex z = u(k % 2, k / 2);
        if (std::abs(z) > 1e-6) {
            return u * (std::abs(z) / z);
        }
    }
    return u;
}

std::array<Eigen::Matrix2cd, 24> generate_cliffords() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd h;
    h << r, r, r, -r;
    Eigen::Matrix2cd s;
    s << 1, 0, 0, Complex(0, 1);

    std::vector<Eigen::Matrix2cd> group{Eigen::Matrix2cd::Identity()};
    for (size_t head = 0; head < group.size(); ++head) {
        for (const auto &g : {h, s}) {
            Eigen::Matrix2cd candidate = canonical_phase(g * group[head]);
            bool seen = false;
            for (const auto &known : group) {
                if ((known - candidate).cwiseAbs().maxCoeff() < 1e-9) {
                    seen = true;
                    break;
                }
            }
            if (!seen) {
                group.push_back(candidate);
            }
        }
    }
    if (group.size() != 24) {
        throw std::logic_error("Clifford closure produced " + std::to_string(group.size()) + " elements");
    }
    std::array<Eigen::Matrix2cd, 24> out;
    std::copy(group.begin(), group.end(), out.begin());
    return out;
}

}  // namespace

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > 1e-12) {
        throw Error(ErrorKind::DimensionMismatch, "state vector is not normalized");
    }
}

DensityMatrix::DensityMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "density matrix must be square");
    }
    require_hermitian(entries_);
    if (std::abs(entries_.trace() - Complex(1.0)) > 1e-12) {
        throw Error(ErrorKind::DimensionMismatch, "density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(entries_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
        throw Error(ErrorKind::DimensionMismatch, "density matrix has a negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::from_pure(const StateVector &psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

ComplexMatrix pauli(char label) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    switch (label) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        case '+': m << 0, 0, 1, 0; break;
        case '-': m << 0, 1, 0, 0; break;
        default:
            throw Error(ErrorKind::InvalidConfig, std::string("unknown Pauli label '") + label + "'");
    }
    return m;
}

ComplexMatrix pauli_string(std::string_view labels) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (char c : labels) {
        out = kron(out, pauli(c));
    }
    return out;
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

bool is_hermitian(const ComplexMatrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    double scale = std::max(1.0, max_abs(m));
    return max_abs(m - m.adjoint()) <= tol * scale;
}

bool is_unitary(const ComplexMatrix &u, double tol) {
    if (u.rows() != u.cols()) {
        return false;
    }
    return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())) <= tol;
}

ComplexMatrix expm_hermitian(const ComplexMatrix &h, double t) {
    require_hermitian(h);
    if (t == 0.0) {
        return ComplexMatrix::Identity(h.rows(), h.cols());
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
    const ComplexMatrix &v = eig.eigenvectors();
    return v * expm_diagonal(eig.eigenvalues(), t).asDiagonal() * v.adjoint();
}

ComplexVector expm_diagonal(const RealVector &diagonal, double t) {
    ComplexVector phases(diagonal.size());
    for (Eigen::Index k = 0; k < diagonal.size(); ++k) {
        phases[k] = std::polar(1.0, -diagonal[k] * t);
    }
    return phases;
}

ComplexVector apply_expm_hermitian(const ComplexMatrix &h, double t, const ComplexVector &psi) {
    if (h.rows() != psi.size()) {
        throw Error(ErrorKind::DimensionMismatch, "state dimension does not match Hamiltonian");
    }
    require_hermitian(h);
    if (is_real(h)) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> eig(h.real());
        ComplexMatrix v = eig.eigenvectors().cast<Complex>();
        ComplexVector c = v.transpose() * psi;
        return v * (expm_diagonal(eig.eigenvalues(), t).cwiseProduct(c));
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
    const ComplexMatrix &v = eig.eigenvectors();
    ComplexVector c = v.adjoint() * psi;
    return v * (expm_diagonal(eig.eigenvalues(), t).cwiseProduct(c));
}

ComplexMatrix partial_trace_first(const ComplexMatrix &m, Eigen::Index dim_a, Eigen::Index dim_b) {
    if (dim_a <= 0 || dim_b <= 0 || m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b) {
        throw Error(ErrorKind::DimensionMismatch, "operator dimension is not dim_a * dim_b");
    }
    ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
    for (Eigen::Index k = 0; k < dim_a; ++k) {
        out += m.block(k * dim_b, k * dim_b, dim_b, dim_b);
    }
    return out;
}

DensityMatrix partial_trace_first(const DensityMatrix &rho, Eigen::Index dim_a, Eigen::Index dim_b) {
    return DensityMatrix(partial_trace_first(rho.matrix(), dim_a, dim_b));
}

double spectral_norm(const ComplexMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

double hermitian_norm(const ComplexMatrix &h) {
    if (is_real(h)) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> eig(h.real(), Eigen::EigenvaluesOnly);
        return eig.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

const std::array<Eigen::Matrix2cd, 24> &single_qubit_cliffords() {
    static const std::array<Eigen::Matrix2cd, 24> group = generate_cliffords();
    return group;
}

int clifford_index(const Eigen::Matrix2cd &u, double tol) {
    Eigen::Matrix2cd canon = canonical_phase(u);
    const auto &group = single_qubit_cliffords();
    for (size_t k = 0; k < group.size(); ++k) {
        if ((group[k] - canon).cwiseAbs().maxCoeff() < tol) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

ComplexMatrix random_local_clifford(int n, Rng &rng) {
    if (n < 1) {
        throw Error(ErrorKind::DimensionMismatch, "random_local_clifford needs n >= 1");
    }
    const auto &group = single_qubit_cliffords();
    std::uniform_int_distribution<int> pick(0, 23);
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
        out = kron(out, ComplexMatrix(group[pick(rng)]));
    }
    return out;
}

ComplexVector plus_state(int n) {
    Eigen::Index dim = Eigen::Index{1} << n;
    return ComplexVector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

ComplexVector basis_state(int n, Eigen::Index index) {
    ComplexVector out = ComplexVector::Zero(Eigen::Index{1} << n);
    out[index] = 1.0;
    return out;
}

}  // namespace qhl
