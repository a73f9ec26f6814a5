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

#include "qhl/models.hpp"

#include <cmath>
#include <numbers>

#include "qhl/errors.hpp"

namespace qhl {

namespace {

// Pauli string with `a` on qubit i and `b` on qubit j (0-based), identity elsewhere.
ComplexMatrix two_site(int n, int i, char a, int j, char b) {
    std::string labels(static_cast<size_t>(n), 'I');
    labels[static_cast<size_t>(i)] = a;
    labels[static_cast<size_t>(j)] = b;
    return pauli_string(labels);
}

ComplexMatrix one_site(int n, int i, char a) {
    std::string labels(static_cast<size_t>(n), 'I');
    labels[static_cast<size_t>(i)] = a;
    return pauli_string(labels);
}

void require_qubits(const std::string &id, int n, int min_n) {
    if (n < min_n || n > 8) {
        throw Error(ErrorKind::InvalidConfig,
                    id + " requires " + std::to_string(min_n) + " <= n <= 8, got " + std::to_string(n));
    }
}

constexpr double kIsingScale = std::numbers::pi / 2.0;

FamilyDefinition ising_line(int n) {
    require_qubits("ising-line", n, 2);
    FamilyDefinition def;
    def.diagonal = true;
    for (int i = 0; i + 1 < n; ++i) {
        def.generators.push_back(kIsingScale * two_site(n, i, 'Z', i + 1, 'Z'));
    }
    def.default_prior = PriorSpec::broadcast(
        PriorComponent::uniform(-1.0 / std::numbers::pi, 1.0 / std::numbers::pi), n - 1);
    return def;
}

// Nearest-neighbour block first, then b_{i,j} for j >= i + 2 in lexicographic order,
// so ising-line is a prefix.
FamilyDefinition ising_complete(int n) {
    require_qubits("ising-complete", n, 2);
    FamilyDefinition def;
    def.diagonal = true;
    std::vector<PriorComponent> prior;
    for (int i = 0; i + 1 < n; ++i) {
        def.generators.push_back(kIsingScale * two_site(n, i, 'Z', i + 1, 'Z'));
        prior.push_back(PriorComponent::uniform(-0.5, 0.5));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            def.generators.push_back(kIsingScale * two_site(n, i, 'Z', j, 'Z'));
            prior.push_back(PriorComponent::gaussian(0.0, 1e-4));
        }
    }
    def.default_prior = PriorSpec(std::move(prior));
    return def;
}

FamilyDefinition transverse_ising(int n) {
    require_qubits("transverse-ising", n, 1);
    FamilyDefinition def;
    for (int k = 0; k < n; ++k) {
        def.generators.push_back(one_site(n, k, 'X'));
    }
    for (int k = 0; k + 1 < n; ++k) {
        def.generators.push_back(two_site(n, k, 'Z', k + 1, 'Z'));
    }
    def.default_prior = PriorSpec::broadcast(PriorComponent::uniform(0.0, 1.0), 2 * n - 1);
    return def;
}

FamilyDefinition ti_transverse_ising(int n) {
    require_qubits("ti-transverse-ising", n, 2);
    FamilyDefinition def;
    Eigen::Index dim = Eigen::Index{1} << n;
    ComplexMatrix field = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix coupling = ComplexMatrix::Zero(dim, dim);
    for (int k = 0; k < n; ++k) {
        field += one_site(n, k, 'X');
    }
    for (int k = 0; k + 1 < n; ++k) {
        coupling += two_site(n, k, 'Z', k + 1, 'Z');
    }
    def.generators = {field, coupling};
    def.default_prior = PriorSpec::broadcast(PriorComponent::uniform(0.0, 1.0), 2);
    return def;
}

}  // namespace

PriorComponent PriorComponent::uniform(double lo, double hi) {
    if (!(lo < hi)) {
        throw Error(ErrorKind::InvalidConfig, "uniform prior requires lo < hi");
    }
    return PriorComponent(Kind::Uniform, lo, hi);
}

PriorComponent PriorComponent::gaussian(double mean, double sd) {
    if (!(sd > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "gaussian prior requires sd > 0");
    }
    return PriorComponent(Kind::Gaussian, mean, sd);
}

double PriorComponent::sample(Rng &rng) const {
    if (kind_ == Kind::Uniform) {
        return std::uniform_real_distribution<double>(first_, second_)(rng);
    }
    return std::normal_distribution<double>(first_, second_)(rng);
}

double PriorComponent::mean() const {
    return kind_ == Kind::Uniform ? 0.5 * (first_ + second_) : first_;
}

double PriorComponent::variance() const {
    if (kind_ == Kind::Uniform) {
        double w = second_ - first_;
        return w * w / 12.0;
    }
    return second_ * second_;
}

bool PriorComponent::in_support(double x) const {
    return kind_ == Kind::Gaussian ? std::isfinite(x) : (x >= first_ && x <= second_);
}

PriorSpec PriorSpec::broadcast(const PriorComponent &component, int d) {
    return PriorSpec(std::vector<PriorComponent>(static_cast<size_t>(d), component));
}

ComplexMatrix Hamiltonian::matrix() const {
    if (is_diagonal) {
        return diagonal.cast<Complex>().asDiagonal();
    }
    return dense;
}

HamiltonianFamily::HamiltonianFamily(std::string id, int n, FamilyDefinition definition)
    : id_(std::move(id)),
      n_(n),
      diagonal_(definition.diagonal),
      real_(true),
      prior_(std::move(definition.default_prior)),
      generators_(std::move(definition.generators)) {
    if (generators_.empty()) {
        throw Error(ErrorKind::InvalidConfig, "family " + id_ + " has no parameters");
    }
    if (prior_.size() != generators_.size()) {
        throw Error(ErrorKind::DimensionMismatch, "family " + id_ + " prior length differs from d");
    }
    Eigen::Index dim = Eigen::Index{1} << n_;
    diagonal_table_ = RealMatrix::Zero(dim, d());
    for (int k = 0; k < d(); ++k) {
        const ComplexMatrix &g = generators_[static_cast<size_t>(k)];
        if (g.rows() != dim || g.cols() != dim || !is_hermitian(g)) {
            throw Error(ErrorKind::NonHermitianInput, "family " + id_ + " generator is not a Hermitian 2^n matrix");
        }
        if (g.imag().cwiseAbs().maxCoeff() != 0.0) {
            real_ = false;
        }
        diagonal_table_.col(k) = g.diagonal().real();
        if (diagonal_) {
            ComplexMatrix off = g;
            off.diagonal().setZero();
            if (off.cwiseAbs().maxCoeff() != 0.0) {
                throw Error(ErrorKind::InvalidConfig, "family " + id_ + " flagged diagonal has off-diagonal terms");
            }
        }
    }
}

HamiltonianFamily HamiltonianFamily::with_prior(PriorSpec prior) const {
    if (prior.size() != generators_.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "prior has " + std::to_string(prior.size()) + " components, family " + id_ + " has d = " +
                        std::to_string(d()));
    }
    HamiltonianFamily copy = *this;
    copy.prior_ = std::move(prior);
    return copy;
}

void HamiltonianFamily::check_length(const ModelParameters &x) const {
    if (x.size() != d()) {
        throw Error(ErrorKind::DimensionMismatch, "parameter vector length " + std::to_string(x.size()) +
                                                      " does not match d = " + std::to_string(d()) + " of " + id_);
    }
}

RealVector HamiltonianFamily::build_diagonal(const ModelParameters &x) const {
    check_length(x);
    return diagonal_table_ * x;
}

ComplexMatrix HamiltonianFamily::build_dense(const ModelParameters &x) const {
    check_length(x);
    ComplexMatrix h = ComplexMatrix::Zero(dim(), dim());
    for (int k = 0; k < d(); ++k) {
        h += x[k] * generators_[static_cast<size_t>(k)];
    }
    return h;
}

Hamiltonian HamiltonianFamily::build(const ModelParameters &x) const {
    Hamiltonian h;
    h.is_diagonal = diagonal_;
    if (diagonal_) {
        h.diagonal = build_diagonal(x);
    } else {
        h.dense = build_dense(x);
    }
    return h;
}

FamilyRegistry::FamilyRegistry() {
    factories_["ising-line"] = ising_line;
    factories_["ising-complete"] = ising_complete;
    factories_["transverse-ising"] = transverse_ising;
    factories_["ti-transverse-ising"] = ti_transverse_ising;
}

FamilyRegistry &FamilyRegistry::global() {
    static FamilyRegistry registry;
    return registry;
}

void FamilyRegistry::add(const std::string &id, Factory factory) {
    std::lock_guard lock(mutex_);
    factories_[id] = std::move(factory);
}

bool FamilyRegistry::contains(const std::string &id) const {
    std::lock_guard lock(mutex_);
    return factories_.count(id) > 0;
}

std::vector<std::string> FamilyRegistry::ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto &[id, factory] : factories_) {
        out.push_back(id);
    }
    return out;
}

FamilyPtr FamilyRegistry::make(const std::string &id, int n, std::optional<PriorSpec> prior) const {
    Factory factory;
    {
        std::lock_guard lock(mutex_);
        auto it = factories_.find(id);
        if (it == factories_.end()) {
            throw Error(ErrorKind::InvalidConfig, "unknown Hamiltonian family '" + id + "'");
        }
        factory = it->second;
    }
    HamiltonianFamily family(id, n, factory(n));
    if (prior) {
        return std::make_shared<const HamiltonianFamily>(family.with_prior(std::move(*prior)));
    }
    return std::make_shared<const HamiltonianFamily>(std::move(family));
}

Hamiltonian build_hamiltonian(const HamiltonianFamily &family, const ModelParameters &x) {
    return family.build(x);
}

ModelParameters sample_prior(const HamiltonianFamily &family, Rng &rng) {
    const auto &components = family.prior().components();
    ModelParameters x(family.d());
    for (int k = 0; k < family.d(); ++k) {
        x[k] = components[static_cast<size_t>(k)].sample(rng);
    }
    return x;
}

double hamiltonian_distance(const HamiltonianFamily &family, const ModelParameters &x1,
                            const ModelParameters &x2) {
    ModelParameters delta = x1 - x2;
    if (family.diagonal()) {
        return family.build_diagonal(delta).cwiseAbs().maxCoeff();
    }
    return hermitian_norm(family.build_dense(delta));
}

int shared_coordinates(const HamiltonianFamily &a, const HamiltonianFamily &b) {
    if (a.n() != b.n()) {
        return 0;
    }
    int k = 0;
    while (k < a.d() && k < b.d() && (a.generator(k) - b.generator(k)).cwiseAbs().maxCoeff() == 0.0) {
        ++k;
    }
    return k;
}

ModelParameters embed(const ModelParameters &x, int k) {
    if (k > x.size() || k < 0) {
        throw Error(ErrorKind::DimensionMismatch, "embedding longer than parameter vector");
    }
    return x.head(k);
}

}  // namespace qhl
