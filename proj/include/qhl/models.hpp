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

#ifndef QHL_MODELS_HPP
#define QHL_MODELS_HPP

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qhl/qcore.hpp"

namespace qhl {

/// Real parameter vector x of a Hamiltonian family.
using ModelParameters = RealVector;

/// M × d particle locations, one particle per row.
using ParticleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One coordinate of a product prior.
class PriorComponent {
   public:
    enum class Kind { Uniform, Gaussian };

    static PriorComponent uniform(double lo, double hi);
    static PriorComponent gaussian(double mean, double sd);

    Kind kind() const { return kind_; }
    // (lo, hi) for uniform, (mean, sd) for gaussian.
    double first() const { return first_; }
    double second() const { return second_; }

    double sample(Rng &rng) const;
    double mean() const;
    double variance() const;
    bool in_support(double x) const;

   private:
    PriorComponent(Kind kind, double first, double second)
        : kind_(kind), first_(first), second_(second) {}

    Kind kind_;
    double first_;
    double second_;
};

/// Independent prior per parameter.
class PriorSpec {
   public:
    PriorSpec() = default;
    explicit PriorSpec(std::vector<PriorComponent> components) : components_(std::move(components)) {}
    static PriorSpec broadcast(const PriorComponent &component, int d);

    const std::vector<PriorComponent> &components() const { return components_; }
    size_t size() const { return components_.size(); }

   private:
    std::vector<PriorComponent> components_;
};

/// H(x) in whichever representation the family supports. Diagonal families
/// only fill `diagonal`; `matrix()` expands on demand.
struct Hamiltonian {
    bool is_diagonal = false;
    RealVector diagonal;
    ComplexMatrix dense;

    Eigen::Index dim() const { return is_diagonal ? diagonal.size() : dense.rows(); }
    ComplexMatrix matrix() const;
};

/// Generators and metadata a registered family contributes.
struct FamilyDefinition {
    std::vector<ComplexMatrix> generators;
    bool diagonal = false;
    PriorSpec default_prior;
};

/// H(x) = Σ_k x_k G_k on n qubits.
class HamiltonianFamily {
   public:
    HamiltonianFamily(std::string id, int n, FamilyDefinition definition);

    const std::string &id() const { return id_; }
    int n() const { return n_; }
    int d() const { return static_cast<int>(generators_.size()); }
    Eigen::Index dim() const { return Eigen::Index{1} << n_; }
    bool diagonal() const { return diagonal_; }
    bool real() const { return real_; }
    const PriorSpec &prior() const { return prior_; }
    const ComplexMatrix &generator(int k) const { return generators_.at(static_cast<size_t>(k)); }

    /// Copy of this family with a different prior. Throws DimensionMismatch
    /// when the prior length differs from d.
    HamiltonianFamily with_prior(PriorSpec prior) const;

    Hamiltonian build(const ModelParameters &x) const;
    RealVector build_diagonal(const ModelParameters &x) const;
    ComplexMatrix build_dense(const ModelParameters &x) const;

   private:
    void check_length(const ModelParameters &x) const;

    std::string id_;
    int n_;
    bool diagonal_;
    bool real_;
    PriorSpec prior_;
    std::vector<ComplexMatrix> generators_;
    RealMatrix diagonal_table_;  // dim x d, column k = diag(G_k)
};

using FamilyPtr = std::shared_ptr<const HamiltonianFamily>;

/// Open map from family id to a definition factory. Built-ins:
/// ising-line, ising-complete, transverse-ising, ti-transverse-ising.
class FamilyRegistry {
   public:
    using Factory = std::function<FamilyDefinition(int n)>;

    static FamilyRegistry &global();

    void add(const std::string &id, Factory factory);
    bool contains(const std::string &id) const;
    std::vector<std::string> ids() const;
    FamilyPtr make(const std::string &id, int n, std::optional<PriorSpec> prior = std::nullopt) const;

   private:
    FamilyRegistry();

    mutable std::mutex mutex_;
    std::map<std::string, Factory> factories_;
};

inline FamilyPtr make_family(const std::string &id, int n, std::optional<PriorSpec> prior = std::nullopt) {
    return FamilyRegistry::global().make(id, n, std::move(prior));
}

Hamiltonian build_hamiltonian(const HamiltonianFamily &family, const ModelParameters &x);
ModelParameters sample_prior(const HamiltonianFamily &family, Rng &rng);

/// ‖H(x1) − H(x2)‖ in spectral norm.
double hamiltonian_distance(const HamiltonianFamily &family, const ModelParameters &x1,
                            const ModelParameters &x2);

/// Number of leading coordinates two families share (identical generators
/// in the same positions). Misspecified studies compare only these.
int shared_coordinates(const HamiltonianFamily &a, const HamiltonianFamily &b);

/// Prefix projection onto the first k coordinates.
ModelParameters embed(const ModelParameters &x, int k);

}  // namespace qhl

#endif  // QHL_MODELS_HPP
