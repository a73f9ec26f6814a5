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

#ifndef QHL_METRICS_HPP
#define QHL_METRICS_HPP

#include <cstddef>
#include <vector>

#include "qhl/models.hpp"

namespace qhl {

/// Σ_j (x̂_j − x_j)².
double quadratic_loss(const ModelParameters &estimate, const ModelParameters &truth);

/// Least-squares fit of ln L(N) = ln A − γ N.
struct GammaFit {
    double amplitude = 0.0;  // A
    double gamma = 0.0;
    size_t first = 0;  // fit range, 1-based experiment indices, inclusive
    size_t last = 0;
    double residual = 0.0;   // RMS of ln-space residuals
    size_t used_points = 0;
    size_t dropped_points = 0;  // nonpositive losses skipped
};

/// `losses[k]` is the loss after experiment k + 1. Throws NonPositiveLoss when
/// fewer than two positive points remain in [first, last].
GammaFit fit_gamma(const std::vector<double> &losses, size_t first, size_t last);
GammaFit fit_gamma(const std::vector<double> &losses);

/// Linear-interpolated quantile of the sorted sample (Hyndman–Fan type 7).
double quantile(std::vector<double> values, double q);

struct QuantileBand {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

QuantileBand quantile_band(const std::vector<double> &values);

}  // namespace qhl

#endif  // QHL_METRICS_HPP
