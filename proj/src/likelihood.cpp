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

#include "qhl/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "qhl/errors.hpp"
#include "qhl/parallel.hpp"

namespace qhl {

namespace {

double clamp_probability(double p) {
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

ComplexVector prepare_initial_state(const InitialStateSpec &spec, int n) {
    if (spec.kind == InitialStateSpec::Kind::Plus) {
        return plus_state(n);
    }
    Rng rng(spec.seed);
    return random_local_clifford(n, rng) * basis_state(n, 0);
}

void validate_design(const ExperimentDesign &design, int n) {
    if (!(design.t > 0.0) || !std::isfinite(design.t)) {
        throw Error(ErrorKind::InvalidDesign, "experiment time must be positive and finite");
    }
    if (design.protocol == Protocol::IQLE) {
        if (!design.x_minus || !design.inversion_family) {
            throw Error(ErrorKind::InvalidDesign, "IQLE designs need x_minus and its family");
        }
        if (design.inversion_family->n() != n) {
            throw Error(ErrorKind::InvalidDesign, "inversion family acts on a different number of qubits");
        }
        if (design.x_minus->size() != design.inversion_family->d()) {
            throw Error(ErrorKind::DimensionMismatch, "x_minus length does not match its family");
        }
    } else if (design.x_minus) {
        throw Error(ErrorKind::InvalidDesign, "QLE designs must not carry x_minus");
    }
}

void validate_noise(const NoiseConfig &noise) {
    if (!(noise.depolarizing >= 0.0 && noise.depolarizing <= 1.0)) {
        throw Error(ErrorKind::StrengthOutOfRange, "depolarizing strength must lie in [0, 1]");
    }
    if (noise.swap_channel && !is_trace_preserving(*noise.swap_channel)) {
        throw Error(ErrorKind::ChannelValidation, "SWAP noise channel is not trace-preserving");
    }
}

PreparedExperiment::PreparedExperiment(const ExperimentDesign &design, const NoiseConfig &noise, int n)
    : n_(n), design_(design), depolarizing_(noise.depolarizing) {
    validate_design(design, n);
    validate_noise(noise);
    if (noise.swap_channel) {
        if (design.protocol != Protocol::IQLE) {
            throw Error(ErrorKind::InvalidDesign, "a SWAP noise channel only applies to IQLE experiments");
        }
        if (n != 2) {
            throw Error(ErrorKind::InvalidDesign,
                        "SWAP noise channels are supported for n = 2 only, got n = " + std::to_string(n));
        }
        const Superoperator &channel = *noise.swap_channel;
        if (channel.dim_in() == 4 && channel.dim_out() == 4) {
            register_channel_ = tensor_superop(channel, channel);
        } else if (channel.dim_in() == 16 && channel.dim_out() == 16) {
            register_channel_ = channel;
        } else {
            throw Error(ErrorKind::DimensionMismatch, "SWAP noise channel must be 4 x 4 or 16 x 16");
        }
    }

    psi_ = prepare_initial_state(design.initial, n);
    psi_weights_ = psi_.cwiseAbs2();
    if (design.protocol == Protocol::IQLE) {
        Hamiltonian h_minus = design.inversion_family->build(*design.x_minus);
        if (h_minus.is_diagonal) {
            inversion_diagonal_ = true;
            inversion_diagonal_energies_ = h_minus.diagonal;
            chi_ = expm_diagonal(h_minus.diagonal, design.t).cwiseProduct(psi_);
        } else {
            ComplexMatrix u_minus = expm_hermitian(h_minus.dense, design.t);
            inversion_dagger_ = u_minus.adjoint();
            chi_ = u_minus * psi_;
        }
    } else {
        chi_ = psi_;
    }
}

int PreparedExperiment::outcome_count() const {
    return design_.measurement == MeasurementSpec::TwoOutcome ? 2 : (1 << n_);
}

ComplexVector PreparedExperiment::evolve_forward(const HamiltonianFamily &family, const ModelParameters &x) const {
    if (family.n() != n_) {
        throw Error(ErrorKind::DimensionMismatch, "family acts on a different number of qubits than the design");
    }
    if (family.diagonal()) {
        return expm_diagonal(family.build_diagonal(x), design_.t).cwiseProduct(psi_);
    }
    return apply_expm_hermitian(family.build_dense(x), design_.t, psi_);
}

double PreparedExperiment::noiseless_return_probability(const HamiltonianFamily &family,
                                                        const ModelParameters &x) const {
    if (family.diagonal() && family.n() == n_) {
        RealVector energies = family.build_diagonal(x);
        Complex amp(0.0, 0.0);
        for (Eigen::Index k = 0; k < energies.size(); ++k) {
            amp += std::conj(chi_[k]) * psi_[k] * std::polar(1.0, -energies[k] * design_.t);
        }
        return clamp_probability(std::norm(amp));
    }
    return clamp_probability(std::norm(chi_.dot(evolve_forward(family, x))));
}

std::vector<double> PreparedExperiment::apply_depolarizing(std::vector<double> probs) const {
    if (depolarizing_ == 0.0) {
        return probs;
    }
    const double dim = std::ldexp(1.0, n_);
    const double keep = 1.0 - depolarizing_;
    if (design_.measurement == MeasurementSpec::TwoOutcome) {
        double a = probs[0];
        probs[0] = a * keep + depolarizing_ / dim;
        probs[1] = (1.0 - a) * keep + depolarizing_ * (dim - 1.0) / dim;
    } else {
        for (double &p : probs) {
            p = p * keep + depolarizing_ / dim;
        }
    }
    return probs;
}

std::vector<double> PreparedExperiment::distribution(const HamiltonianFamily &family,
                                                     const ModelParameters &x) const {
    std::vector<double> probs;
    if (!register_channel_) {
        if (design_.measurement == MeasurementSpec::TwoOutcome) {
            double a = noiseless_return_probability(family, x);
            probs = {a, 1.0 - a};
        } else {
            ComplexVector final_state = evolve_forward(family, x);
            if (design_.protocol == Protocol::IQLE) {
                if (inversion_diagonal_) {
                    final_state = expm_diagonal(inversion_diagonal_energies_, -design_.t).cwiseProduct(final_state);
                } else {
                    final_state = inversion_dagger_ * final_state;
                }
            }
            probs.resize(static_cast<size_t>(final_state.size()));
            for (Eigen::Index k = 0; k < final_state.size(); ++k) {
                probs[static_cast<size_t>(k)] = clamp_probability(std::norm(final_state[k]));
            }
        }
    } else {
        ComplexVector evolved = evolve_forward(family, x);
        ComplexMatrix rho = qhl::apply(*register_channel_, ComplexMatrix(evolved * evolved.adjoint()));
        if (design_.measurement == MeasurementSpec::TwoOutcome) {
            double a = clamp_probability(chi_.dot(rho * chi_).real());
            probs = {a, 1.0 - a};
        } else {
            ComplexMatrix inverted = inversion_diagonal_
                                         ? ComplexMatrix(expm_diagonal(inversion_diagonal_energies_, -design_.t).asDiagonal() *
                                                         rho * expm_diagonal(inversion_diagonal_energies_, design_.t).asDiagonal())
                                         : ComplexMatrix(inversion_dagger_ * rho * inversion_dagger_.adjoint());
            probs.resize(static_cast<size_t>(inverted.rows()));
            for (Eigen::Index k = 0; k < inverted.rows(); ++k) {
                probs[static_cast<size_t>(k)] = clamp_probability(inverted(k, k).real());
            }
        }
    }
    return apply_depolarizing(std::move(probs));
}

double PreparedExperiment::probability(const HamiltonianFamily &family, const ModelParameters &x,
                                       int outcome) const {
    if (outcome < 0 || outcome >= outcome_count()) {
        throw Error(ErrorKind::InvalidDesign, "outcome index out of range for the measurement");
    }
    if (!register_channel_ && design_.measurement == MeasurementSpec::TwoOutcome) {
        double a = noiseless_return_probability(family, x);
        return apply_depolarizing({a, 1.0 - a})[static_cast<size_t>(outcome)];
    }
    return distribution(family, x)[static_cast<size_t>(outcome)];
}

std::vector<double> outcome_distribution(const ModelParameters &x, const ExperimentDesign &design,
                                         const NoiseConfig &noise, const HamiltonianFamily &family) {
    return PreparedExperiment(design, noise, family.n()).distribution(family, x);
}

OutcomeDatum sample_outcome(const std::vector<double> &distribution, Rng &rng) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double total = 0.0;
    for (double p : distribution) {
        total += p;
    }
    double target = u * total;
    double cumulative = 0.0;
    int last_positive = 0;
    for (size_t k = 0; k < distribution.size(); ++k) {
        if (distribution[k] <= 0.0) {
            continue;
        }
        last_positive = static_cast<int>(k);
        cumulative += distribution[k];
        if (target < cumulative) {
            return {static_cast<int>(k)};
        }
    }
    return {last_positive};
}

std::vector<double> estimate_likelihoods(const ParticleMatrix &particles, const OutcomeDatum &observed,
                                         const ExperimentDesign &design, const NoiseConfig &noise,
                                         const HamiltonianFamily &family, const LikelihoodMode &mode, Rng &rng,
                                         unsigned threads) {
    if (particles.cols() != family.d()) {
        throw Error(ErrorKind::DimensionMismatch, "particle dimension does not match family d");
    }
    if (mode.kind == LikelihoodMode::Kind::Sampled && mode.samples < 1) {
        throw Error(ErrorKind::InvalidConfig, "sampled likelihood mode needs at least one sample");
    }
    const PreparedExperiment prepared(design, noise, family.n());
    const uint64_t stream = mode.kind == LikelihoodMode::Kind::Sampled ? rng() : 0;
    std::vector<double> out(static_cast<size_t>(particles.rows()));
    parallel_for(out.size(), threads, [&](size_t begin, size_t end) {
        ModelParameters x(family.d());
        for (size_t j = begin; j < end; ++j) {
            x = particles.row(static_cast<Eigen::Index>(j)).transpose();
            double p = prepared.probability(family, x, observed.outcome);
            if (mode.kind == LikelihoodMode::Kind::Sampled) {
                Rng local(derive_seed(stream, j));
                std::binomial_distribution<int> draws(mode.samples, p);
                p = static_cast<double>(draws(local)) / mode.samples;
            }
            out[j] = p;
        }
    });
    return out;
}

}  // namespace qhl
