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

#ifndef QHL_LIKELIHOOD_HPP
#define QHL_LIKELIHOOD_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "qhl/channels.hpp"
#include "qhl/models.hpp"

namespace qhl {

enum class Protocol { QLE, IQLE };

/// Two-outcome {ψ₀, ψ₀⊥} (outcome 0 is ψ₀) or the computational basis.
enum class MeasurementSpec { TwoOutcome, ProductBasis };

struct InitialStateSpec {
    enum class Kind { Plus, RandomClifford };
    Kind kind = Kind::Plus;
    uint64_t seed = 0;  // RandomClifford only

    static InitialStateSpec plus() { return {}; }
    static InitialStateSpec random_clifford(uint64_t seed) { return {Kind::RandomClifford, seed}; }
};

/// |+⟩^⊗n, or C|0…0⟩ for a local Clifford C drawn from `seed`.
ComplexVector prepare_initial_state(const InitialStateSpec &spec, int n);

/// One QLE or IQLE experiment. For IQLE the inversion e^{iH(x₋)t} is built
/// by `inversion_family`, which need not be the family being evaluated.
struct ExperimentDesign {
    Protocol protocol = Protocol::IQLE;
    double t = 0.0;
    std::optional<ModelParameters> x_minus;
    FamilyPtr inversion_family;
    InitialStateSpec initial;
    MeasurementSpec measurement = MeasurementSpec::TwoOutcome;
};

/// Throws InvalidDesign unless t > 0 and x₋ is present exactly for IQLE.
void validate_design(const ExperimentDesign &design, int n);

struct OutcomeDatum {
    int outcome = 0;
};

/// Depolarizing strength in [0, 1] and an optional SWAP noise channel, either
/// the single-qubit Λ_noise (4 × 4, applied to each qubit) or a full
/// two-qubit register map (16 × 16).
struct NoiseConfig {
    double depolarizing = 0.0;
    std::optional<Superoperator> swap_channel;
    bool assumed_known = true;

    bool noiseless() const { return depolarizing == 0.0 && !swap_channel; }
};

void validate_noise(const NoiseConfig &noise);

/// Per-design data shared by every particle.
class PreparedExperiment {
   public:
    PreparedExperiment(const ExperimentDesign &design, const NoiseConfig &noise, int n);

    int outcome_count() const;
    std::vector<double> distribution(const HamiltonianFamily &family, const ModelParameters &x) const;
    double probability(const HamiltonianFamily &family, const ModelParameters &x, int outcome) const;

   private:
    ComplexVector evolve_forward(const HamiltonianFamily &family, const ModelParameters &x) const;
    double noiseless_return_probability(const HamiltonianFamily &family, const ModelParameters &x) const;
    std::vector<double> apply_depolarizing(std::vector<double> probs) const;

    int n_;
    ExperimentDesign design_;
    double depolarizing_;
    ComplexVector psi_;
    RealVector psi_weights_;  // |ψ_k|²
    bool inversion_diagonal_ = false;
    RealVector inversion_diagonal_energies_;
    ComplexMatrix inversion_dagger_;  // e^{iH₋t}
    ComplexVector chi_;               // e^{-iH₋t}ψ, or ψ for QLE
    std::optional<Superoperator> register_channel_;
};

std::vector<double> outcome_distribution(const ModelParameters &x, const ExperimentDesign &design,
                                         const NoiseConfig &noise, const HamiltonianFamily &family);

OutcomeDatum sample_outcome(const std::vector<double> &distribution, Rng &rng);

struct LikelihoodMode {
    enum class Kind { Exact, Sampled };
    Kind kind = Kind::Exact;
    int samples = 0;

    static LikelihoodMode exact() { return {}; }
    static LikelihoodMode sampled(int samples) { return {Kind::Sampled, samples}; }
};

/// Pr(observed | x_j) for every particle row. Sampled mode returns the
/// fraction of `samples` simulated draws matching the datum; particle j
/// draws from the substream derive_seed(stream_seed, j), where stream_seed
/// is one draw from `rng`, so results do not depend on `threads`.
std::vector<double> estimate_likelihoods(const ParticleMatrix &particles, const OutcomeDatum &observed,
                                         const ExperimentDesign &design, const NoiseConfig &noise,
                                         const HamiltonianFamily &family, const LikelihoodMode &mode, Rng &rng,
                                         unsigned threads = 1);

}  // namespace qhl

#endif  // QHL_LIKELIHOOD_HPP
