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

#include "qhl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qhl/errors.hpp"

namespace qhl {

double quadratic_loss(const ModelParameters &estimate, const ModelParameters &truth) {
    if (estimate.size() != truth.size()) {
        throw Error(ErrorKind::DimensionMismatch, "quadratic loss needs equal-length vectors");
    }
    return (estimate - truth).squaredNorm();
}

GammaFit fit_gamma(const std::vector<double> &losses, size_t first, size_t last) {
    if (first < 1 || last > losses.size() || first > last) {
        throw Error(ErrorKind::InvalidConfig, "fit range outside the loss trace");
    }
    GammaFit fit;
    fit.first = first;
    fit.last = last;
    std::vector<double> xs, ys;
    for (size_t n = first; n <= last; ++n) {
        double loss = losses[n - 1];
        if (loss > 0.0 && std::isfinite(loss)) {
            xs.push_back(static_cast<double>(n));
            ys.push_back(std::log(loss));
        } else {
            ++fit.dropped_points;
        }
    }
    if (xs.size() < 2) {
        throw Error(ErrorKind::NonPositiveLoss, "fewer than two positive losses in the fit range");
    }
    const double count = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) {
        double r = ys[k] - (intercept + slope * xs[k]);
        ss += r * r;
    }
    fit.gamma = -slope;
    fit.amplitude = std::exp(intercept);
    fit.residual = std::sqrt(ss / count);
    fit.used_points = xs.size();
    return fit;
}

GammaFit fit_gamma(const std::vector<double> &losses) {
    return fit_gamma(losses, 1, losses.size());
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw Error(ErrorKind::InvalidConfig, "quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

QuantileBand quantile_band(const std::vector<double> &values) {
    return {quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75)};
}

}  // namespace qhl
