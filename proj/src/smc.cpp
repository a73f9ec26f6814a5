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

#include "qhl/smc.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "qhl/errors.hpp"

namespace qhl {

namespace {

// Evidence below this is treated as an impossible datum.
constexpr double kEvidenceFloor = 1e-300;

}  // namespace

ParticleCloud::ParticleCloud(ParticleMatrix locations, RealVector weights)
    : locations_(std::move(locations)), weights_(std::move(weights)) {
    if (locations_.rows() < 1) {
        throw Error(ErrorKind::DimensionMismatch, "particle cloud needs at least one particle");
    }
    if (weights_.size() != locations_.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "weight count differs from particle count");
    }
    if (!locations_.allFinite() || !weights_.allFinite() || (weights_.array() < 0.0).any()) {
        throw Error(ErrorKind::DimensionMismatch, "particle cloud contains NaN, Inf or negative weights");
    }
    if (std::abs(weights_.sum() - 1.0) > 1e-12) {
        throw Error(ErrorKind::DimensionMismatch, "particle weights do not sum to one");
    }
}

ParticleCloud init_cloud(const HamiltonianFamily &family, int particles, Rng &rng) {
    if (particles < 1) {
        throw Error(ErrorKind::InvalidConfig, "init_cloud needs at least one particle");
    }
    ParticleMatrix locations(particles, family.d());
    for (int i = 0; i < particles; ++i) {
        locations.row(i) = sample_prior(family, rng).transpose();
    }
    return ParticleCloud(std::move(locations), RealVector::Constant(particles, 1.0 / particles));
}

BayesUpdate bayes_update(const ParticleCloud &cloud, std::span<const double> likelihoods) {
    const Eigen::Index m = cloud.size();
    if (static_cast<Eigen::Index>(likelihoods.size()) != m) {
        throw Error(ErrorKind::DimensionMismatch, "likelihood count differs from particle count");
    }
    std::vector<double> log_terms(static_cast<size_t>(m), -std::numeric_limits<double>::infinity());
    double max_log = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
        double p = likelihoods[static_cast<size_t>(i)];
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorKind::DimensionMismatch, "likelihoods must be finite and nonnegative");
        }
        double w = cloud.weights()[i];
        if (p > 0.0 && w > 0.0) {
            log_terms[static_cast<size_t>(i)] = std::log(w) + std::log(p);
            max_log = std::max(max_log, log_terms[static_cast<size_t>(i)]);
        }
    }
    if (!std::isfinite(max_log)) {
        throw Error(ErrorKind::ZeroEvidence, "datum has zero likelihood under every particle");
    }
    RealVector weights(m);
    double scale = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        weights[i] = std::exp(log_terms[static_cast<size_t>(i)] - max_log);
        scale += weights[i];
    }
    double log_evidence = max_log + std::log(scale);
    if (log_evidence < std::log(kEvidenceFloor)) {
        throw Error(ErrorKind::ZeroEvidence, "evidence underflow: log Z = " + std::to_string(log_evidence));
    }
    weights /= scale;
    weights /= weights.sum();
    return {ParticleCloud(cloud.locations(), std::move(weights)), std::exp(log_evidence), log_evidence};
}

double effective_sample_size(const ParticleCloud &cloud) {
    return 1.0 / cloud.weights().squaredNorm();
}

PosteriorSummary posterior_summary(const ParticleCloud &cloud) {
    const auto &x = cloud.locations();
    const auto &w = cloud.weights();
    RealVector mean = x.transpose() * w;
    ParticleMatrix centered = x.rowwise() - mean.transpose();
    RealMatrix cov = centered.transpose() * w.asDiagonal() * centered;
    cov = 0.5 * (cov + cov.transpose());
    return {std::move(mean), std::move(cov)};
}

ParticleCloud liu_west_resample(const ParticleCloud &cloud, double a, Rng &rng) {
    if (!(a > 0.0 && a <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "Liu-West parameter a must lie in (0, 1]");
    }
    const Eigen::Index m = cloud.size();
    const Eigen::Index d = cloud.dim();
    PosteriorSummary summary = posterior_summary(cloud);

    const double noise_scale = std::sqrt(std::max(0.0, 1.0 - a * a));
    RealMatrix factor = RealMatrix::Zero(d, d);
    if (noise_scale > 0.0) {
        Eigen::LLT<RealMatrix> llt(summary.covariance);
        bool ok = llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite();
        const double eps = 1e-12 * summary.covariance.trace() / static_cast<double>(d);
        if (!ok) {
            llt.compute(summary.covariance + eps * RealMatrix::Identity(d, d));
            ok = llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite();
        }
        if (ok) {
            factor = llt.matrixL().toDenseMatrix();
        } else {
            // Degenerate covariance: independent per-coordinate noise with a variance floor.
            for (Eigen::Index k = 0; k < d; ++k) {
                factor(k, k) = std::sqrt(std::max(summary.covariance(k, k), std::max(eps, 0.0)));
            }
        }
        factor *= noise_scale;
    }

    // Systematic ancestor selection.
    const auto &w = cloud.weights();
    std::vector<Eigen::Index> ancestors(static_cast<size_t>(m));
    const double step = 1.0 / static_cast<double>(m);
    double u = std::uniform_real_distribution<double>(0.0, step)(rng);
    double cumulative = w[0];
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        while (u > cumulative && j < m - 1) {
            ++j;
            cumulative += w[j];
        }
        ancestors[static_cast<size_t>(i)] = j;
        u += step;
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    ParticleMatrix locations(m, d);
    RealVector z(d);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) {
            z[k] = normal(rng);
        }
        RealVector fresh = a * cloud.locations().row(ancestors[static_cast<size_t>(i)]).transpose() +
                           (1.0 - a) * summary.mean + factor * z;
        locations.row(i) = fresh.transpose();
    }
    return ParticleCloud(std::move(locations), RealVector::Constant(m, 1.0 / static_cast<double>(m)));
}

CredibleEllipsoid::CredibleEllipsoid(RealVector mean, RealMatrix inverse_covariance, double z)
    : mean_(std::move(mean)), inverse_covariance_(std::move(inverse_covariance)), z_(z) {}

double CredibleEllipsoid::mahalanobis_squared(const RealVector &x) const {
    RealVector delta = x - mean_;
    return delta.dot(inverse_covariance_ * delta);
}

bool CredibleEllipsoid::contains(const RealVector &x) const {
    return mahalanobis_squared(x) <= z_ * z_;
}

double CredibleEllipsoid::nominal_coverage() const {
    return std::pow(std::erf(z_ / std::sqrt(2.0)), static_cast<double>(mean_.size()));
}

CredibleEllipsoid credible_ellipsoid(const PosteriorSummary &summary, double z) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(summary.covariance);
    RealVector values = eig.eigenvalues();
    const double largest = values.maxCoeff();
    if (!(largest > 0.0)) {
        throw Error(ErrorKind::SingularCovariance, "posterior covariance is zero");
    }
    if (!(values.minCoeff() > 0.0) || largest / values.minCoeff() > 1e12) {
        values.array() += 1e-12 * largest;
    }
    if (!(values.minCoeff() > 0.0)) {
        throw Error(ErrorKind::SingularCovariance, "posterior covariance is singular after regularization");
    }
    RealMatrix inverse = eig.eigenvectors() * values.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    return CredibleEllipsoid(summary.mean, std::move(inverse), z);
}

}  // namespace qhl
