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

#ifndef QHL_CHANNELS_HPP
#define QHL_CHANNELS_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qhl/qcore.hpp"

namespace qhl {

// Vectorization is row-major throughout: vec(M)[i * dim + j] = M(i, j).
// In this layout the map ρ ↦ AρB has supermatrix A ⊗ Bᵀ.

/// Linear map on vectorized operators. dim_in/dim_out are operator-space
/// dimensions (squares of the Hilbert dimensions).
class Superoperator {
   public:
    Superoperator() = default;
    explicit Superoperator(ComplexMatrix matrix, bool trace_preserving = false, bool completely_positive = false);

    const ComplexMatrix &matrix() const { return matrix_; }
    Eigen::Index dim_in() const { return matrix_.cols(); }
    Eigen::Index dim_out() const { return matrix_.rows(); }
    Eigen::Index hilbert_in() const { return hilbert_in_; }
    Eigen::Index hilbert_out() const { return hilbert_out_; }
    bool trace_preserving() const { return trace_preserving_; }
    bool completely_positive() const { return completely_positive_; }

   private:
    ComplexMatrix matrix_;
    Eigen::Index hilbert_in_ = 0;
    Eigen::Index hilbert_out_ = 0;
    bool trace_preserving_ = false;
    bool completely_positive_ = false;
};

ComplexVector vec(const ComplexMatrix &m);
ComplexMatrix unvec(const ComplexVector &v);

/// outer ∘ inner. Flags are the conjunction of the operands' flags.
Superoperator compose(const Superoperator &outer, const Superoperator &inner);
ComplexMatrix apply(const Superoperator &s, const ComplexMatrix &rho);

Superoperator left_right_superop(const ComplexMatrix &a, const ComplexMatrix &b);
/// ρ ↦ UρU†, flagged trace-preserving and completely positive.
Superoperator unitary_superop(const ComplexMatrix &u);

/// ρ ↦ ρ ⊗ |0⟩⟨0| for one qubit (16 × 4).
Superoperator prep_superop();
/// Traces out the first of two qubits (4 × 16).
Superoperator trace_superop();
ComplexMatrix swap_gate();
Superoperator swap_superop();

/// ρ ↦ (1 − strength) ρ + strength Tr(ρ) I / 2^n.
Superoperator depolarizing_superop(double strength, int n);

/// Channel on A ⊗ B from channels on A and on B.
Superoperator tensor_superop(const Superoperator &a, const Superoperator &b);

ComplexMatrix choi_matrix(const Superoperator &s);
bool is_trace_preserving(const Superoperator &s, double tol = 1e-10);
bool is_completely_positive(const Superoperator &s, double tol = 1e-8);

struct CollapseOperator {
    ComplexMatrix op;
    double rate = 0.0;
};

struct LindbladSpec {
    ComplexMatrix hamiltonian;
    std::vector<CollapseOperator> collapse;
};

/// G with d vec(ρ)/dt = G vec(ρ) for
/// dρ/dt = −i[H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k† L_k, ρ}).
Superoperator lindblad_generator(const LindbladSpec &spec);

struct GeneratorSegment {
    Superoperator generator;
    double duration = 0.0;
};

/// Time-ordered piecewise-constant generator schedule.
class PiecewiseGenerator {
   public:
    PiecewiseGenerator() = default;
    explicit PiecewiseGenerator(std::vector<GeneratorSegment> segments);

    void add(Superoperator generator, double duration);
    const std::vector<GeneratorSegment> &segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }

   private:
    std::vector<GeneratorSegment> segments_;
};

/// exp(m) for a general square matrix (scaling and squaring).
ComplexMatrix expm_general(const ComplexMatrix &m);

/// exp(Ω₁ + Ω₂), Ω₁ = Σ_k G_k Δt_k, Ω₂ = ½ Σ_{j>k} [G_j, G_k] Δt_j Δt_k.
/// Flags are set from numerical checks of the result.
Superoperator magnus2_propagator(const PiecewiseGenerator &schedule);

/// Effective single-qubit noise of an imperfect SWAP: S_Tr ∘ s_gate ∘ S_prep.
Superoperator lambda_noise(const Superoperator &s_gate);

/// Text channel format:
///   superoperator <dim_in> <dim_out> tp=<0|1> cp=<0|1>
///   <dim_out rows of dim_in comma-separated "re,im" pairs>
/// Lines starting with '#' are comments. Numbers use the shortest
/// round-trip decimal form.
std::string format_superop(const Superoperator &s);
Superoperator parse_superop(std::string_view text);
void save_superop(const Superoperator &s, const std::filesystem::path &path);
Superoperator load_superop(const std::filesystem::path &path);

}  // namespace qhl

#endif  // QHL_CHANNELS_HPP
