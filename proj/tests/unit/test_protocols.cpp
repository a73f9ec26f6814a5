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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qhl/errors.hpp"
#include "qhl/metrics.hpp"

using namespace qhl;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParameters vec1(double x) {
    ModelParameters v(1);
    v << x;
    return v;
}

ParticleCloud two_point(double a, double b, double wa = 0.5) {
    ParticleMatrix loc(2, 1);
    loc << a, b;
    RealVector w(2);
    w << wa, 1.0 - wa;
    return ParticleCloud(loc, w);
}

ParticleCloud pinned(const ModelParameters &x) {
    return ParticleCloud(ParticleMatrix(x.transpose()), RealVector::Ones(1));
}

// Fixed IQLE design: invert at `x_minus` for time `t`.
std::function<ExperimentDesign(const ParticleCloud &, int, Rng &)> fixed_design(FamilyPtr family, double x_minus,
                                                                               double t) {
    return [family, x_minus, t](const ParticleCloud &, int, Rng &) {
        ExperimentDesign design;
        design.protocol = Protocol::IQLE;
        design.t = t;
        design.x_minus = vec1(x_minus);
        design.inversion_family = family;
        return design;
    };
}

QHLConfig line_config(int n, uint64_t seed) {
    QHLConfig config;
    config.family = make_family("ising-line", n);
    config.particles = 300;
    config.experiments = 30;
    config.seed = seed;
    return config;
}

ErrorKind kind_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::IoError;
}

}  // namespace

TEST(ParticleGuess, TwoParticleTime) {
    auto family = make_family("ising-line", 2);
    Rng rng(80);
    for (int rep = 0; rep < 20; ++rep) {
        ParticleGuess g = particle_guess(two_point(0.5, 0.3), *family, rng);
        EXPECT_NEAR(g.t, 1.0 / (0.1 * kPi), 1e-12);
        EXPECT_NE(g.x_minus[0], g.x_prime[0]);
    }
}

TEST(ParticleGuess, DominantWeightFrequency) {
    auto family = make_family("ising-line", 2);
    ParticleMatrix loc(3, 1);
    loc << 0.1, 0.2, 0.3;
    RealVector w(3);
    w << 0.8, 0.1, 0.1;
    ParticleCloud cloud(loc, w);
    Rng rng(81);
    const int draws = 10000;
    int hits = 0;
    for (int i = 0; i < draws; ++i) {
        hits += particle_guess(cloud, *family, rng).x_minus[0] == 0.1;
    }
    EXPECT_NEAR(hits / static_cast<double>(draws), 0.8, 4.0 * std::sqrt(0.8 * 0.2 / draws));
}

TEST(ParticleGuess, MedianTimeTracksPosteriorWidth) {
    auto family = make_family("ising-line", 2);
    Rng rng(82);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = 1e-3;
    const int m = 5000;
    ParticleMatrix loc(m, 1);
    for (int i = 0; i < m; ++i) {
        loc(i, 0) = 0.4 + sigma * normal(rng);
    }
    ParticleCloud cloud(loc, RealVector::Constant(m, 1.0 / m));
    std::vector<double> ts;
    for (int i = 0; i < 4000; ++i) {
        ts.push_back(particle_guess(cloud, *family, rng).t);
    }
    // |x₋ − x′| ~ |N(0, 2σ²)| with median 0.6745·√2·σ; distance = π/2·|Δ|.
    const double expected = 1.0 / (kPi / 2.0 * 0.6744897501960817 * std::sqrt(2.0) * sigma);
    EXPECT_NEAR(quantile(ts, 0.5) / expected, 1.0, 0.06);
}

TEST(ParticleGuess, DegenerateCloud) {
    auto family = make_family("ising-line", 2);
    Rng rng(83);
    EXPECT_EQ(kind_of([&] { particle_guess(two_point(0.4, 0.4), *family, rng); }), ErrorKind::DegenerateCloud);
    EXPECT_EQ(kind_of([&] { particle_guess(pinned(vec1(0.4)), *family, rng); }), ErrorKind::DegenerateCloud);
}

TEST(QhlRun, PinnedCloudHasZeroLoss) {
    QHLConfig config = line_config(2, 84);
    config.x_true = vec1(0.37);
    config.initial_cloud = pinned(vec1(0.37));
    config.design_hook = fixed_design(config.family, 0.2, 3.0);
    config.experiments = 15;
    TrialTrace trace = qhl_run(config);
    ASSERT_FALSE(trace.aborted);
    ASSERT_EQ(trace.records.size(), 15u);
    for (double loss : trace.losses()) {
        EXPECT_EQ(loss, 0.0);
    }
    EXPECT_EQ(trace.estimate[0], 0.37);
}

TEST(QhlRun, TwoParticleChainMatchesEnumeration) {
    // Truth 0.5, rival 0.3, design inverting at the rival: outcome 0 has
    // probability cos²(1) under the truth and 1 under the rival.
    auto family = make_family("ising-line", 2);
    const double t = 1.0 / (0.1 * kPi);
    const double p_true0 = std::pow(std::cos(kPi * t * 0.2 / 2.0), 2);
    const int steps = 10;

    // Exact expected weight on the truth after k steps by enumerating outcomes.
    std::vector<double> expected(steps + 1, 0.0);
    for (int mask = 0; mask < (1 << steps); ++mask) {
        double prob = 1.0;
        double w_true = 0.5, w_rival = 0.5;
        for (int k = 0; k < steps; ++k) {
            int outcome = (mask >> k) & 1;
            double lt = outcome == 0 ? p_true0 : 1.0 - p_true0;
            double lr = outcome == 0 ? 1.0 : 0.0;
            prob *= lt;
            double z = w_true * lt + w_rival * lr;
            w_true = w_true * lt / z;
            w_rival = w_rival * lr / z;
            expected[static_cast<size_t>(k + 1)] += prob * w_true / (1 << (steps - k - 1));
        }
    }
    expected[0] = 0.5;
    for (int k = 1; k <= steps; ++k) {
        EXPECT_GE(expected[static_cast<size_t>(k)], expected[static_cast<size_t>(k - 1)] - 1e-15);
    }
    EXPECT_GT(expected[steps], 0.99);

    const int runs = 400;
    std::vector<double> mean_weight(steps, 0.0);
    for (int seed = 0; seed < runs; ++seed) {
        QHLConfig config;
        config.family = family;
        config.x_true = vec1(0.5);
        config.initial_cloud = two_point(0.5, 0.3);
        config.design_hook = fixed_design(family, 0.3, t);
        config.experiments = steps;
        config.resample_threshold = 0.0;
        config.seed = static_cast<uint64_t>(seed);
        TrialTrace trace = qhl_run(config);
        ASSERT_EQ(trace.records.size(), static_cast<size_t>(steps));
        // replay the recorded outcomes through the closed-form update
        double w_true = 0.5;
        for (int k = 0; k < steps; ++k) {
            const ExperimentRecord &r = trace.records[static_cast<size_t>(k)];
            double lt = r.outcome == 0 ? p_true0 : 1.0 - p_true0;
            double lr = r.outcome == 0 ? 1.0 : 0.0;
            w_true = w_true * lt / (w_true * lt + (1.0 - w_true) * lr);
            double w_from_mean = (r.posterior_mean[0] - 0.3) / 0.2;
            EXPECT_NEAR(w_from_mean, w_true, 1e-9);
            mean_weight[static_cast<size_t>(k)] += w_true / runs;
        }
    }
    for (int k = 0; k < steps; ++k) {
        double p = expected[static_cast<size_t>(k + 1)];
        double se = std::sqrt(std::max(p * (1.0 - p), 1e-6) / runs);
        EXPECT_NEAR(mean_weight[static_cast<size_t>(k)], p, 5.0 * se + 1e-6) << "step " << k + 1;
    }
}

TEST(QhlRun, ZeroEvidenceAbortsAndPads) {
    // A single particle that predicts outcome 0 with certainty: any outcome 1
    // from the truth is impossible under the model.
    auto family = make_family("ising-line", 2);
    const double t = 1.0 / (0.1 * kPi);
    int aborted = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        QHLConfig config;
        config.family = family;
        config.x_true = vec1(0.5);
        config.initial_cloud = pinned(vec1(0.3));
        config.design_hook = fixed_design(family, 0.3, t);
        config.experiments = 12;
        config.seed = seed;
        TrialTrace trace = qhl_run(config);
        std::vector<double> losses = trace.losses();
        ASSERT_EQ(losses.size(), 12u);
        if (trace.aborted) {
            ++aborted;
            EXPECT_LT(trace.records.size(), 12u);
            EXPECT_NE(trace.abort_reason.find("ZeroEvidence"), std::string::npos) << trace.abort_reason;
            for (double loss : losses) {
                EXPECT_NEAR(loss, 0.04, 1e-15);
            }
        }
        for (const ExperimentRecord &r : trace.records) {
            EXPECT_EQ(r.outcome, 0);
        }
    }
    EXPECT_GT(aborted, 15);
}

TEST(QhlRun, RecordsAreConsistent) {
    QHLConfig config = line_config(3, 85);
    TrialTrace trace = qhl_run(config);
    ASSERT_EQ(trace.records.size(), 30u);
    for (size_t i = 0; i < trace.records.size(); ++i) {
        const ExperimentRecord &r = trace.records[i];
        EXPECT_EQ(r.index, static_cast<int>(i + 1));
        EXPECT_GE(r.loss, 0.0);
        EXPECT_GT(r.t, 0.0);
        EXPECT_LE(r.log_evidence, 0.0);
        EXPECT_GE(r.ess_after_update, 1.0);
        EXPECT_LE(r.ess_before_update, 300.0 + 1e-9);
        EXPECT_EQ(r.resampled, r.ess_after_update < 150.0);
        EXPECT_NEAR(r.loss, quadratic_loss(r.posterior_mean, trace.x_true), 1e-15);
    }
    EXPECT_EQ(trace.estimate, trace.records.back().posterior_mean);
}

TEST(QhlRun, ReproducibleAcrossThreadCounts) {
    for (LikelihoodMode mode : {LikelihoodMode::exact(), LikelihoodMode::sampled(50)}) {
        QHLConfig config = line_config(4, 86);
        config.likelihood = mode;
        config.threads = 1;
        TrialTrace a = qhl_run(config);
        TrialTrace b = qhl_run(config);
        config.threads = 4;
        TrialTrace c = qhl_run(config);
        EXPECT_EQ(a.losses(), b.losses());
        EXPECT_EQ(a.losses(), c.losses());
        EXPECT_EQ(a.estimate, c.estimate);
    }
}

TEST(QhlRun, LossInvariantUnderParticlePermutation) {
    auto family = make_family("ising-line", 3);
    Rng rng(87);
    const int m = 200;
    ParticleMatrix loc(m, 2);
    for (int i = 0; i < m; ++i) {
        loc.row(i) = sample_prior(*family, rng).transpose();
    }
    RealVector w = RealVector::Constant(m, 1.0 / m);
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) {
        order[static_cast<size_t>(i)] = m - 1 - i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    ParticleMatrix permuted(m, 2);
    for (int i = 0; i < m; ++i) {
        permuted.row(i) = loc.row(order[static_cast<size_t>(i)]);
    }
    ModelParameters x_minus(2);
    x_minus << 0.2, -0.1;
    auto hook = [family, x_minus](const ParticleCloud &, int k, Rng &) {
        ExperimentDesign design;
        design.t = 1.0 + 0.7 * k;
        design.x_minus = x_minus;
        design.inversion_family = family;
        return design;
    };
    QHLConfig config;
    config.family = family;
    config.experiments = 20;
    config.resample_threshold = 0.0;
    config.design_hook = hook;
    config.seed = 88;
    config.initial_cloud = ParticleCloud(loc, w);
    std::vector<double> base = qhl_run(config).losses();
    config.initial_cloud = ParticleCloud(permuted, w);
    std::vector<double> perm = qhl_run(config).losses();
    ASSERT_EQ(base.size(), perm.size());
    for (size_t i = 0; i < base.size(); ++i) {
        EXPECT_NEAR(perm[i], base[i], 1e-12 * std::max(1.0, base[i]) + 1e-15);
    }
}

TEST(QhlRun, ConfigValidation) {
    QHLConfig ok = line_config(2, 1);
    EXPECT_NO_THROW(validate_config(ok));
    QHLConfig c = ok;
    c.family = nullptr;
    EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::InvalidConfig);
    c = ok;
    c.particles = 1;
    EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::InvalidConfig);
    c = ok;
    c.experiments = 0;
    EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::InvalidConfig);
    c = ok;
    c.resample_a = 0.0;
    EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::InvalidConfig);
    c = ok;
    c.likelihood = LikelihoodMode::sampled(0);
    EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::InvalidConfig);
    c = ok;
    c.truth_family = make_family("ising-line", 3);
    EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::InvalidConfig);
    c = ok;
    c.x_true = ModelParameters::Zero(3);
    EXPECT_EQ(kind_of([&] { validate_config(c); }), ErrorKind::DimensionMismatch);
    c = ok;
    c.noise.depolarizing = 1.5;
    EXPECT_THROW(validate_config(c), Error);
}

TEST(QhlRun, MisspecifiedModelUsesSharedCoordinates) {
    QHLConfig config = line_config(3, 89);
    config.truth_family = make_family("ising-complete", 3);
    config.experiments = 10;
    TrialTrace trace = qhl_run(config);
    ASSERT_EQ(trace.x_true.size(), 3);
    for (const ExperimentRecord &r : trace.records) {
        EXPECT_NEAR(r.loss, quadratic_loss(r.posterior_mean, trace.x_true.head(2)), 1e-15);
    }
}

TEST(MarginalLikelihood, Examples) {
    TrialTrace trace;
    ExperimentRecord r;
    r.log_evidence = std::log(0.5);
    trace.records.push_back(r);
    EXPECT_NEAR(marginal_likelihood_trace(trace).back(), std::log(0.5), 1e-15);
    r.log_evidence = std::log(0.4);
    trace.records.push_back(r);
    EXPECT_NEAR(marginal_likelihood_trace(trace).back(), std::log(0.2), 1e-15);

    TrialTrace certain;
    r.log_evidence = 0.0;
    certain.records.assign(5, r);
    for (double v : marginal_likelihood_trace(certain)) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(MarginalLikelihood, MatchesBayesUpdateEvidence) {
    ParticleCloud cloud = two_point(0.0, 1.0);
    double p[] = {0.8, 0.2};
    TrialTrace trace;
    ExperimentRecord r;
    r.log_evidence = bayes_update(cloud, p).log_evidence;
    trace.records.push_back(r);
    EXPECT_NEAR(marginal_likelihood_trace(trace)[0], std::log(0.5), 1e-15);
}

TEST(Bic, Examples) {
    EXPECT_EQ(bic_score(-3.5, 0, 17), -3.5);
    EXPECT_EQ(bic_score(-3.5, 4, 1), -3.5);
    EXPECT_NEAR(bic_score(-10.0, 2, std::exp(2.0)), -12.0, 1e-12);
    EXPECT_NEAR(bic_score(-10.0, 2, 7), -10.0 - std::log(7.0), 1e-12);
    EXPECT_EQ(kind_of([] { bic_score(0.0, 1, 0); }), ErrorKind::InvalidConfig);
}

namespace {

QHLConfig select_config(const std::string &family, uint64_t seed) {
    QHLConfig config;
    config.family = make_family(family, 3);
    config.truth_family = make_family("ising-complete", 3);
    config.particles = 300;
    config.seed = seed;
    return config;
}

}  // namespace

TEST(ModelSelect, IdenticalModelsGiveEvenOdds) {
    QHLConfig a = select_config("ising-line", 90);
    QHLConfig b = select_config("ising-line", 90);
    ModelSelectTrace trace = model_select_run(a, b, 25, 91);
    ASSERT_EQ(trace.records.size(), 25u);
    for (const ModelSelectRecord &r : trace.records) {
        EXPECT_EQ(r.log_odds, 0.0);
        EXPECT_EQ(r.driver, ModelRole::Null);
        EXPECT_EQ(r.loss_null, r.loss_alt);
    }
    for (double v : trace.log10_odds()) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(ModelSelect, ExchangeNegatesOdds) {
    QHLConfig line = select_config("ising-line", 92);
    QHLConfig complete = select_config("ising-complete", 93);
    ModelSelectTrace forward = model_select_run(line, complete, 40, 94, ModelRole::Null);
    ModelSelectTrace swapped = model_select_run(complete, line, 40, 94, ModelRole::Alternate);
    ASSERT_EQ(forward.records.size(), swapped.records.size());
    for (size_t i = 0; i < forward.records.size(); ++i) {
        const ModelSelectRecord &f = forward.records[i];
        const ModelSelectRecord &s = swapped.records[i];
        EXPECT_EQ(f.log_odds, -s.log_odds) << i;
        EXPECT_EQ(f.outcome, s.outcome);
        EXPECT_EQ(f.t, s.t);
        EXPECT_EQ(f.log_evidence_null, s.log_evidence_alt);
        EXPECT_NE(f.driver, s.driver);
    }
    EXPECT_EQ(forward.x_true, swapped.x_true);
}

TEST(ModelSelect, RoleSwitchFollowsOddsSign) {
    QHLConfig line = select_config("ising-line", 95);
    QHLConfig complete = select_config("ising-complete", 96);
    ModelSelectTrace trace = model_select_run(line, complete, 40, 97);
    ModelRole driver = ModelRole::Null;
    double cumulative = 0.0;
    for (const ModelSelectRecord &r : trace.records) {
        EXPECT_EQ(r.driver, driver);
        cumulative += r.log_evidence_alt - r.log_evidence_null;
        EXPECT_NEAR(r.log_odds, cumulative, 1e-9);
        if (driver == ModelRole::Null && r.log_odds > 0.0) {
            driver = ModelRole::Alternate;
        } else if (driver == ModelRole::Alternate && r.log_odds < 0.0) {
            driver = ModelRole::Null;
        }
    }
}

TEST(ModelSelect, RejectsDifferentTruths) {
    QHLConfig a = select_config("ising-line", 1);
    QHLConfig b = select_config("ising-line", 1);
    b.truth_family = make_family("ising-line", 3);
    EXPECT_EQ(kind_of([&] { model_select_run(a, b, 5, 1); }), ErrorKind::InvalidConfig);
    EXPECT_EQ(kind_of([&] { model_select_run(a, a, 0, 1); }), ErrorKind::InvalidConfig);
}
