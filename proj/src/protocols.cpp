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

#include "qhl/protocols.hpp"

#include <cmath>
#include <random>

#include "qhl/errors.hpp"
#include "qhl/metrics.hpp"

namespace qhl {

namespace {

constexpr int kGuessAttempts = 50;
constexpr double kDistinctDistance = 1e-12;

struct Streams {
    explicit Streams(uint64_t seed)
        : truth(derive_seed(seed, 0)),
          cloud(derive_seed(seed, 1)),
          design(derive_seed(seed, 2)),
          outcome(derive_seed(seed, 3)),
          resample(derive_seed(seed, 4)),
          likelihood(derive_seed(seed, 5)) {}

    Rng truth, cloud, design, outcome, resample, likelihood;
};

NoiseConfig likelihood_noise(const NoiseConfig &noise) {
    return noise.assumed_known ? noise : NoiseConfig{};
}

ExperimentDesign next_design(const QHLConfig &config, const ParticleCloud &cloud, int experiment, Rng &rng) {
    if (config.design_hook) {
        return config.design_hook(cloud, experiment, rng);
    }
    ParticleGuess guess = particle_guess(cloud, *config.family, rng);
    ExperimentDesign design;
    design.protocol = config.protocol;
    design.t = guess.t;
    if (config.protocol == Protocol::IQLE) {
        design.x_minus = std::move(guess.x_minus);
        design.inversion_family = config.family;
    }
    design.measurement = config.measurement;
    if (config.initial_state == InitialStateSpec::Kind::RandomClifford) {
        design.initial = InitialStateSpec::random_clifford(rng());
    }
    return design;
}

int loss_coordinates(const QHLConfig &config) {
    int k = shared_coordinates(*config.family, config.truth());
    if (k == 0) {
        throw Error(ErrorKind::InvalidConfig, "model family '" + config.family->id() +
                                                  "' shares no coordinates with truth family '" +
                                                  config.truth().id() + "'");
    }
    return k;
}

double embedded_loss(const ModelParameters &estimate, const ModelParameters &truth, int k) {
    return quadratic_loss(embed(estimate, k), embed(truth, k));
}

ModelParameters choose_truth(const QHLConfig &config, Rng &rng) {
    if (config.x_true) {
        return *config.x_true;
    }
    return sample_prior(config.truth(), rng);
}

ParticleCloud starting_cloud(const QHLConfig &config, Rng &rng) {
    if (config.initial_cloud) {
        if (config.initial_cloud->dim() != config.family->d()) {
            throw Error(ErrorKind::DimensionMismatch, "initial cloud dimension does not match the family");
        }
        return *config.initial_cloud;
    }
    return init_cloud(*config.family, config.particles, rng);
}

template <typename T>
std::vector<double> padded(const std::vector<T> &records, int experiments, double before_first,
                           double (*field)(const T &)) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(experiments));
    for (const T &record : records) {
        out.push_back(field(record));
    }
    double fill = out.empty() ? before_first : out.back();
    while (out.size() < static_cast<size_t>(experiments)) {
        out.push_back(fill);
    }
    return out;
}

}  // namespace

ParticleGuess particle_guess(const ParticleCloud &cloud, const HamiltonianFamily &family, Rng &rng) {
    if (cloud.dim() != family.d()) {
        throw Error(ErrorKind::DimensionMismatch, "cloud dimension does not match the family");
    }
    const RealVector &w = cloud.weights();
    std::discrete_distribution<Eigen::Index> pick(w.data(), w.data() + w.size());
    ParticleGuess guess;
    guess.x_minus = cloud.particle(pick(rng));
    for (int attempt = 0; attempt < kGuessAttempts; ++attempt) {
        guess.x_prime = cloud.particle(pick(rng));
        double distance = hamiltonian_distance(family, guess.x_minus, guess.x_prime);
        if (distance >= kDistinctDistance) {
            guess.t = 1.0 / distance;
            return guess;
        }
    }
    throw Error(ErrorKind::DegenerateCloud, "no distinguishable particle pair after 50 draws");
}

void validate_config(const QHLConfig &config) {
    if (!config.family) {
        throw Error(ErrorKind::InvalidConfig, "config has no model family");
    }
    if (config.truth().n() != config.family->n()) {
        throw Error(ErrorKind::InvalidConfig, "truth and model families act on different qubit counts");
    }
    if (config.particles < 2 && !config.initial_cloud) {
        throw Error(ErrorKind::InvalidConfig, "at least two particles are required");
    }
    if (config.experiments < 1) {
        throw Error(ErrorKind::InvalidConfig, "at least one experiment is required");
    }
    if (config.likelihood.kind == LikelihoodMode::Kind::Sampled && config.likelihood.samples < 1) {
        throw Error(ErrorKind::InvalidConfig, "sampled likelihood mode needs at least one sample");
    }
    if (!(config.resample_a > 0.0 && config.resample_a <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "resample a must lie in (0, 1]");
    }
    if (!(config.resample_threshold >= 0.0 && config.resample_threshold <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "resample threshold must lie in [0, 1]");
    }
    if (config.x_true && config.x_true->size() != config.truth().d()) {
        throw Error(ErrorKind::DimensionMismatch, "x_true length does not match the truth family");
    }
    validate_noise(config.noise);
}

std::vector<double> TrialTrace::losses() const {
    return padded<ExperimentRecord>(records, experiments, initial_loss,
                                    [](const ExperimentRecord &r) { return r.loss; });
}

TrialTrace qhl_run(const QHLConfig &config) {
    validate_config(config);
    Streams streams(config.seed);
    const HamiltonianFamily &family = *config.family;
    const int k = loss_coordinates(config);
    const NoiseConfig model_noise = likelihood_noise(config.noise);

    TrialTrace trace;
    trace.seed = config.seed;
    trace.experiments = config.experiments;
    trace.x_true = choose_truth(config, streams.truth);
    ParticleCloud cloud = starting_cloud(config, streams.cloud);
    trace.initial_loss = embedded_loss(posterior_summary(cloud).mean, trace.x_true, k);
    trace.estimate = posterior_summary(cloud).mean;
    const double resample_below = config.resample_threshold * static_cast<double>(cloud.size());

    for (int i = 1; i <= config.experiments; ++i) {
        ExperimentRecord record;
        record.index = i;
        std::optional<BayesUpdate> update;
        try {
            for (int attempt = 0; !update; ++attempt) {
                ExperimentDesign design = next_design(config, cloud, i, streams.design);
                std::vector<double> truth_dist =
                    outcome_distribution(trace.x_true, design, config.noise, config.truth());
                OutcomeDatum datum = sample_outcome(truth_dist, streams.outcome);
                std::vector<double> likelihoods = estimate_likelihoods(
                    cloud.locations(), datum, design, model_noise, family, config.likelihood,
                    streams.likelihood, config.threads);
                record.t = design.t;
                record.x_minus = design.x_minus.value_or(ModelParameters());
                record.initial = design.initial;
                record.outcome = datum.outcome;
                record.retries = attempt;
                try {
                    update = bayes_update(cloud, likelihoods);
                } catch (const Error &e) {
                    if (e.kind() != ErrorKind::ZeroEvidence || attempt >= 1) {
                        throw;
                    }
                }
            }
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::ZeroEvidence && e.kind() != ErrorKind::DegenerateCloud) {
                throw;
            }
            trace.aborted = true;
            trace.abort_reason = std::string(error_kind_name(e.kind())) + " at experiment " +
                                 std::to_string(i) + ": " + e.what();
            break;
        }
        record.ess_before_update = effective_sample_size(cloud);
        cloud = std::move(update->cloud);
        record.log_evidence = update->log_evidence;
        record.ess_after_update = effective_sample_size(cloud);
        record.posterior_mean = posterior_summary(cloud).mean;
        record.loss = embedded_loss(record.posterior_mean, trace.x_true, k);
        trace.estimate = record.posterior_mean;
        if (record.ess_after_update < resample_below) {
            cloud = liu_west_resample(cloud, config.resample_a, streams.resample);
            record.resampled = true;
        }
        trace.records.push_back(std::move(record));
    }
    return trace;
}

std::vector<double> marginal_likelihood_trace(const TrialTrace &trace) {
    std::vector<double> out;
    out.reserve(trace.records.size());
    double total = 0.0;
    for (const ExperimentRecord &record : trace.records) {
        total += record.log_evidence;
        out.push_back(total);
    }
    return out;
}

std::vector<double> ModelSelectTrace::log10_odds() const {
    return padded<ModelSelectRecord>(records, experiments, 0.0, [](const ModelSelectRecord &r) {
        return r.log_odds / std::log(10.0);
    });
}

namespace {

struct Contender {
    Contender(const QHLConfig &config, int loss_k)
        : config(config), streams(config.seed), cloud(starting_cloud(config, streams.cloud)),
          model_noise(likelihood_noise(config.noise)), loss_k(loss_k),
          resample_below(config.resample_threshold * static_cast<double>(cloud.size())) {}

    const QHLConfig &config;
    Streams streams;
    ParticleCloud cloud;
    NoiseConfig model_noise;
    int loss_k;
    double resample_below;
    double log_evidence_total = 0.0;

    std::vector<double> likelihoods(const OutcomeDatum &datum, const ExperimentDesign &design) {
        return estimate_likelihoods(cloud.locations(), datum, design, model_noise, *config.family,
                                    config.likelihood, streams.likelihood, config.threads);
    }
};

int truth_loss_coordinates(const QHLConfig &model, const QHLConfig &truth_owner) {
    QHLConfig probe;
    probe.family = model.family;
    probe.truth_family = truth_owner.truth_family ? truth_owner.truth_family : truth_owner.family;
    return loss_coordinates(probe);
}

}  // namespace

ModelSelectTrace model_select_run(const QHLConfig &null_config, const QHLConfig &alt_config, int experiments,
                                  uint64_t seed, ModelRole initial_driver) {
    validate_config(null_config);
    validate_config(alt_config);
    if (experiments < 1) {
        throw Error(ErrorKind::InvalidConfig, "at least one experiment is required");
    }
    const HamiltonianFamily &truth_family = null_config.truth();
    if (truth_family.id() != alt_config.truth().id() || truth_family.n() != alt_config.truth().n()) {
        throw Error(ErrorKind::InvalidConfig, "null and alternate configs describe different physical systems");
    }
    if (null_config.x_true && alt_config.x_true && *null_config.x_true != *alt_config.x_true) {
        throw Error(ErrorKind::InvalidConfig, "null and alternate configs fix different true parameters");
    }
    Streams shared(seed);
    ModelSelectTrace trace;
    trace.seed = seed;
    trace.experiments = experiments;
    if (null_config.x_true) {
        trace.x_true = *null_config.x_true;
    } else if (alt_config.x_true) {
        trace.x_true = *alt_config.x_true;
    } else {
        trace.x_true = sample_prior(truth_family, shared.truth);
    }

    Contender null_model(null_config, truth_loss_coordinates(null_config, null_config));
    Contender alt_model(alt_config, truth_loss_coordinates(alt_config, null_config));
    ModelRole driver = initial_driver;

    for (int i = 1; i <= experiments; ++i) {
        Contender &lead = driver == ModelRole::Null ? null_model : alt_model;
        ModelSelectRecord record;
        record.index = i;
        record.driver = driver;
        std::optional<BayesUpdate> null_update, alt_update;
        try {
            for (int attempt = 0; !null_update || !alt_update; ++attempt) {
                null_update.reset();
                alt_update.reset();
                ExperimentDesign design = next_design(lead.config, lead.cloud, i, shared.design);
                std::vector<double> truth_dist =
                    outcome_distribution(trace.x_true, design, lead.config.noise, truth_family);
                OutcomeDatum datum = sample_outcome(truth_dist, shared.outcome);
                std::vector<double> null_lik = null_model.likelihoods(datum, design);
                std::vector<double> alt_lik = alt_model.likelihoods(datum, design);
                record.t = design.t;
                record.outcome = datum.outcome;
                try {
                    null_update = bayes_update(null_model.cloud, null_lik);
                    alt_update = bayes_update(alt_model.cloud, alt_lik);
                } catch (const Error &e) {
                    if (e.kind() != ErrorKind::ZeroEvidence || attempt >= 1) {
                        throw;
                    }
                }
            }
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::ZeroEvidence && e.kind() != ErrorKind::DegenerateCloud) {
                throw;
            }
            trace.aborted = true;
            trace.abort_reason = std::string(error_kind_name(e.kind())) + " at experiment " +
                                 std::to_string(i) + ": " + e.what();
            break;
        }

        std::pair<Contender *, BayesUpdate *> pairs[] = {{&null_model, &*null_update}, {&alt_model, &*alt_update}};
        for (auto [model, update] : pairs) {
            model->cloud = std::move(update->cloud);
            model->log_evidence_total += update->log_evidence;
        }
        record.log_evidence_null = null_update->log_evidence;
        record.log_evidence_alt = alt_update->log_evidence;
        record.log_odds = alt_model.log_evidence_total - null_model.log_evidence_total;
        record.loss_null = embedded_loss(posterior_summary(null_model.cloud).mean, trace.x_true, null_model.loss_k);
        record.loss_alt = embedded_loss(posterior_summary(alt_model.cloud).mean, trace.x_true, alt_model.loss_k);
        for (Contender *model : {&null_model, &alt_model}) {
            if (effective_sample_size(model->cloud) < model->resample_below) {
                model->cloud = liu_west_resample(model->cloud, model->config.resample_a, model->streams.resample);
            }
        }
        if (driver == ModelRole::Null && record.log_odds > 0.0) {
            driver = ModelRole::Alternate;
        } else if (driver == ModelRole::Alternate && record.log_odds < 0.0) {
            driver = ModelRole::Null;
        }
        trace.records.push_back(record);
    }
    return trace;
}

double bic_score(double max_loglik, int d, double n) {
    if (!(n >= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "BIC needs at least one datum");
    }
    return max_loglik - 0.5 * static_cast<double>(d) * std::log(n);
}

}  // namespace qhl
