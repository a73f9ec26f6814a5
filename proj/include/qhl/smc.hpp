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

#ifndef QHL_SMC_HPP
#define QHL_SMC_HPP

#include <span>

#include "qhl/models.hpp"

namespace qhl {

/// Weighted particle approximation of a posterior over x.
class ParticleCloud {
   public:
    /// Validates shape, finiteness, nonnegativity and Σw = 1 (within 1e-12).
    ParticleCloud(ParticleMatrix locations, RealVector weights);

    Eigen::Index size() const { return locations_.rows(); }
    Eigen::Index dim() const { return locations_.cols(); }
    const ParticleMatrix &locations() const { return locations_; }
    const RealVector &weights() const { return weights_; }
    ModelParameters particle(Eigen::Index i) const { return locations_.row(i).transpose(); }

   private:
    ParticleMatrix locations_;
    RealVector weights_;
};

struct PosteriorSummary {
    RealVector mean;
    RealMatrix covariance;
};

/// M prior draws with weights 1/M.
ParticleCloud init_cloud(const HamiltonianFamily &family, int particles, Rng &rng);

struct BayesUpdate {
    ParticleCloud cloud;
    double evidence;      // Z = Σ w_i p_i
    double log_evidence;  // log Z, computed without underflow
};

/// w_i ← w_i p_i / Z in log space. Throws ZeroEvidence when Z underflows.
BayesUpdate bayes_update(const ParticleCloud &cloud, std::span<const double> likelihoods);

/// 1 / Σ w_i².
double effective_sample_size(const ParticleCloud &cloud);

PosteriorSummary posterior_summary(const ParticleCloud &cloud);

/// Liu–West refresh: systematic ancestor selection, then
/// x ← a x_anc + (1 − a) μ + N(0, (1 − a²) Σ). Returns equal weights.
ParticleCloud liu_west_resample(const ParticleCloud &cloud, double a, Rng &rng);

/// Region {x : (x − μ)ᵀ Σ⁻¹ (x − μ) ≤ Z²}.
class CredibleEllipsoid {
   public:
    CredibleEllipsoid(RealVector mean, RealMatrix inverse_covariance, double z);

    bool contains(const RealVector &x) const;
    double mahalanobis_squared(const RealVector &x) const;
    /// erf(Z/√2)^d.
    double nominal_coverage() const;
    double z() const { return z_; }

   private:
    RealVector mean_;
    RealMatrix inverse_covariance_;
    double z_;
};

/// Covariances with condition number above 1e12 are regularized first;
/// throws SingularCovariance if that still fails.
CredibleEllipsoid credible_ellipsoid(const PosteriorSummary &summary, double z);

}  // namespace qhl

#endif  // QHL_SMC_HPP
