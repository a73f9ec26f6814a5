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

#ifndef QHL_QCORE_HPP
#define QHL_QCORE_HPP

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "qhl/rng.hpp"

namespace qhl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

/// Normalized pure state of dimension 2^n.
class StateVector {
   public:
    explicit StateVector(ComplexVector amplitudes);

    const ComplexVector &amplitudes() const { return amplitudes_; }
    Eigen::Index dim() const { return amplitudes_.size(); }

   private:
    ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
   public:
    explicit DensityMatrix(ComplexMatrix entries);
    static DensityMatrix from_pure(const StateVector &psi);

    const ComplexMatrix &matrix() const { return entries_; }
    Eigen::Index dim() const { return entries_.rows(); }

   private:
    ComplexMatrix entries_;
};

// Pauli matrices: 'I', 'X', 'Y', 'Z', plus '+' = |1><0| and '-' = |0><1|.
ComplexMatrix pauli(char label);

/// Tensor product of single-qubit operators; label[0] acts on qubit 1,
/// which is the most significant factor.
ComplexMatrix pauli_string(std::string_view labels);

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

bool is_hermitian(const ComplexMatrix &m, double tol = kHermitianTol);
bool is_unitary(const ComplexMatrix &u, double tol = kUnitaryTol);

/// e^{-iht} through the eigendecomposition h = V diag(λ) V†.
/// Throws NonHermitianInput when h is not Hermitian.
ComplexMatrix expm_hermitian(const ComplexMatrix &h, double t);

/// Phases e^{-i λ_k t} of a diagonal Hamiltonian.
ComplexVector expm_diagonal(const RealVector &diagonal, double t);

/// e^{-iht} psi without forming the full propagator. Real symmetric h
/// uses a real eigensolver.
ComplexVector apply_expm_hermitian(const ComplexMatrix &h, double t, const ComplexVector &psi);

/// Tr_A of an operator on A ⊗ B.
ComplexMatrix partial_trace_first(const ComplexMatrix &m, Eigen::Index dim_a, Eigen::Index dim_b);
DensityMatrix partial_trace_first(const DensityMatrix &rho, Eigen::Index dim_a, Eigen::Index dim_b);

/// Largest singular value.
double spectral_norm(const ComplexMatrix &m);

/// Spectral norm of a Hermitian matrix, max |eigenvalue|.
double hermitian_norm(const ComplexMatrix &h);

/// The 24 single-qubit Cliffords modulo global phase, generated from H and S.
const std::array<Eigen::Matrix2cd, 24> &single_qubit_cliffords();

/// Index into single_qubit_cliffords() of u up to global phase, or -1.
int clifford_index(const Eigen::Matrix2cd &u, double tol = 1e-9);

/// ⊗_k C_k with each C_k drawn uniformly from the 24-element group.
ComplexMatrix random_local_clifford(int n, Rng &rng);

ComplexVector plus_state(int n);
ComplexVector basis_state(int n, Eigen::Index index);

}  // namespace qhl

#endif  // QHL_QCORE_HPP
