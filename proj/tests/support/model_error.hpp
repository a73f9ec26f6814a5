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

#ifndef QHL_TESTS_MODEL_ERROR_HPP
#define QHL_TESTS_MODEL_ERROR_HPP

#include <string>

#include "qhl/likelihood.hpp"
#include "qhl/models.hpp"

namespace testing_support {

using namespace qhl;

// Dense family spanning every two-qubit Hermitian operator.
inline FamilyPtr pauli_basis_family() {
    static FamilyPtr family = [] {
        FamilyRegistry::global().add("two-qubit-pauli-basis", [](int) {
            FamilyDefinition def;
            const std::string labels = "IXYZ";
            for (char a : labels) {
                for (char b : labels) {
                    def.generators.push_back(pauli_string(std::string{a, b}));
                }
            }
            def.default_prior = PriorSpec::broadcast(PriorComponent::gaussian(0.0, 1.0), 16);
            return def;
        });
        return make_family("two-qubit-pauli-basis", 2);
    }();
    return family;
}

struct BoundSample {
    double delta_pr;
    double amplitude_sq;
    double scale;  // ‖H − H̃‖ t
};

inline BoundSample model_error_sample(Rng &rng) {
    FamilyPtr family = pauli_basis_family();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ModelParameters x = sample_prior(*family, rng);
    ModelParameters dx = sample_prior(*family, rng) * (0.05 + unit(rng));
    double t = 0.2 + 2.0 * unit(rng);
    double norm = hamiltonian_distance(*family, x, x + dx);
    double scale = norm * t;
    if (scale > 1.0) {
        dx *= unit(rng) / scale;
        norm = hamiltonian_distance(*family, x, x + dx);
        scale = norm * t;
    }
    ExperimentDesign d;
    d.protocol = Protocol::QLE;
    d.t = t;
    d.initial = InitialStateSpec::random_clifford(rng());
    d.measurement = MeasurementSpec::ProductBasis;
    auto p = outcome_distribution(x, d, {}, *family);
    auto q = outcome_distribution(x + dx, d, {}, *family);
    size_t outcome = static_cast<size_t>(rng() % 4);
    ComplexVector psi = prepare_initial_state(d.initial, 2);
    Complex a = (expm_hermitian(family->build_dense(x), t) * psi)[static_cast<Eigen::Index>(outcome)];
    Complex b = (expm_hermitian(family->build_dense(x + dx), t) * psi)[static_cast<Eigen::Index>(outcome)];
    return {std::abs(p[outcome] - q[outcome]), std::norm(a - b), scale};
}
}  // namespace testing_support

#endif  // QHL_TESTS_MODEL_ERROR_HPP
