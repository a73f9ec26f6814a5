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

#ifndef QHL_PROTOCOLS_HPP
#define QHL_PROTOCOLS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qhl/likelihood.hpp"
#include "qhl/models.hpp"
#include "qhl/smc.hpp"

namespace qhl {

struct ParticleGuess {
    ModelParameters x_minus;
    ModelParameters x_prime;
    double t = 0.0;
};

/// Draws x₋ and x′ by weight and sets t = 1/‖H(x₋) − H(x′)‖. Redraws x′ up
/// to 50 times when the pair is indistinguishable, then throws DegenerateCloud.
ParticleGuess particle_guess(const ParticleCloud &cloud, const HamiltonianFamily &family, Rng &rng);

struct QHLConfig {
    FamilyPtr family;
    FamilyPtr truth_family;                 // defaults to `family`
    std::optional<ModelParameters> x_true;  // sampled from truth_family's prior when absent
    int particles = 1000;
    int experiments = 100;
    LikelihoodMode likelihood = LikelihoodMode::exact();
    NoiseConfig noise;
    Protocol protocol = Protocol::IQLE;
    InitialStateSpec::Kind initial_state = InitialStateSpec::Kind::Plus;
    MeasurementSpec measurement = MeasurementSpec::TwoOutcome;
    double resample_a = 0.9;
    double resample_threshold = 0.5;  // resample when ESS < threshold · M
    uint64_t seed = 0;
    unsigned threads = 1;

    // Test hooks. `initial_cloud` replaces the prior draw; `design_hook`
    // replaces the particle guess heuristic.
    std::optional<ParticleCloud> initial_cloud;
    std::function<ExperimentDesign(const ParticleCloud &, int experiment, Rng &)> design_hook;

    const HamiltonianFamily &truth() const { return truth_family ? *truth_family : *family; }
};

void validate_config(const QHLConfig &config);

struct ExperimentRecord {
    int index = 0;  // 1-based
    double t = 0.0;
    ModelParameters x_minus;
    InitialStateSpec initial;
    int outcome = 0;
    double loss = 0.0;
    double log_evidence = 0.0;
    double ess_before_update = 0.0;
    double ess_after_update = 0.0;
    bool resampled = false;
    int retries = 0;
    ModelParameters posterior_mean;
};

struct TrialTrace {
    uint64_t seed = 0;
    int experiments = 0;
    ModelParameters x_true;
    std::vector<ExperimentRecord> records;
    ModelParameters estimate;
    bool aborted = false;
    std::string abort_reason;

    /// Loss per experiment. An aborted trial repeats its last loss (or the
    /// prior loss when nothing completed) up to `experiments` entries.
    std::vector<double> losses() const;
    double initial_loss = 0.0;
};

TrialTrace qhl_run(const QHLConfig &config);

/// Running sum of log Z over the trace records.
std::vector<double> marginal_likelihood_trace(const TrialTrace &trace);

enum class ModelRole { Null, Alternate };

struct ModelSelectRecord {
    int index = 0;
    ModelRole driver = ModelRole::Null;  // role that designed this experiment
    double t = 0.0;
    int outcome = 0;
    double log_evidence_null = 0.0;
    double log_evidence_alt = 0.0;
    double log_odds = 0.0;  // cumulative ln Pr(D|alt) − ln Pr(D|null)
    double loss_null = 0.0;
    double loss_alt = 0.0;
};

struct ModelSelectTrace {
    uint64_t seed = 0;
    int experiments = 0;
    ModelParameters x_true;
    std::vector<ModelSelectRecord> records;
    bool aborted = false;
    std::string abort_reason;

    /// log₁₀ posterior odds per experiment, padded like TrialTrace::losses.
    std::vector<double> log10_odds() const;
};

/// Runs both configurations against one simulated system. The truth, the
/// designs and the outcomes come from streams derived from `seed`; each cloud
/// draws its prior, resampling and sampled likelihoods from its own config
/// seed. Both configs must name the same truth family and truth parameters.
ModelSelectTrace model_select_run(const QHLConfig &null_config, const QHLConfig &alt_config, int experiments,
                                  uint64_t seed, ModelRole initial_driver = ModelRole::Null);

/// max_loglik − (d/2) ln n, for n ≥ 1 data.
double bic_score(double max_loglik, int d, double n);

}  // namespace qhl

#endif  // QHL_PROTOCOLS_HPP
