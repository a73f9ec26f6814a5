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

#ifndef QHL_HARNESS_HPP
#define QHL_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qhl/metrics.hpp"
#include "qhl/protocols.hpp"

namespace qhl {

using Json = nlohmann::ordered_json;

struct FitRange {
    size_t first = 0;
    size_t last = 0;  // 0 means "through the end of the trace"
};

struct SweepSpec {
    std::string name;
    QHLConfig base;
    int trials = 1;
    uint64_t base_seed = 0;
    FitRange fit{5, 0};
};

struct ModelSelectSpec {
    std::string name;
    QHLConfig null_config;
    QHLConfig alt_config;
    ModelRole initial_driver = ModelRole::Null;
    int experiments = 100;
    int trials = 1;
    uint64_t base_seed = 0;
};

/// Trial i of a sweep runs with seed derive_seed(base_seed, i).
uint64_t trial_seed(uint64_t base_seed, int trial);

struct SweepResult {
    std::vector<TrialTrace> trials;
    std::vector<QuantileBand> bands;  // one per experiment index
    std::optional<GammaFit> fit;
    std::string fit_error;
    std::vector<int> flagged;  // aborted trial indices
};

/// Trials run in parallel over `threads` workers; each trial evaluates its
/// likelihoods single-threaded, so results do not depend on `threads`.
SweepResult run_sweep(const SweepSpec &spec, unsigned threads);

struct ModelSelectResult {
    std::vector<ModelSelectTrace> trials;
    std::vector<QuantileBand> log10_odds;
    std::vector<QuantileBand> loss_null;
    std::vector<QuantileBand> loss_alt;
    std::vector<int> flagged;
};

ModelSelectResult run_model_select(const ModelSelectSpec &spec, unsigned threads);

/// Column-wise quantile bands of equal-length rows.
std::vector<QuantileBand> bands_by_column(const std::vector<std::vector<double>> &rows);

// Configuration files. Relative channel paths resolve against `base_dir`.
QHLConfig parse_qhl_config(const Json &json, const std::filesystem::path &base_dir);
SweepSpec parse_sweep_spec(const Json &json, const std::filesystem::path &base_dir);
ModelSelectSpec parse_model_select_spec(const Json &json, const std::filesystem::path &base_dir);
Json load_json(const std::filesystem::path &path);

PriorSpec parse_prior(const Json &json, int d);
LindbladSpec parse_lindblad_spec(const Json &json, int n);
/// {"qubits": n, "segments": [{"duration": ..., "hamiltonian": [...], "collapse": [...]}],
///  "lambda_noise": bool}. With lambda_noise the two-qubit propagator is
/// reduced to the single-register channel.
Superoperator build_channel(const Json &json);

// Records.
Json to_json(const ModelParameters &x);
Json to_json(const TrialTrace &trace);
Json to_json(const ModelSelectTrace &trace);
Json to_json(const GammaFit &fit);

std::string bands_csv(const std::vector<QuantileBand> &bands, const std::string &value_name);
std::string model_select_csv(const ModelSelectResult &result);

/// Reads the `median_loss` column of a sweep CSV.
std::vector<double> read_median_column(const std::filesystem::path &csv, const std::string &value_name);

/// Writes sweep.csv, sweep.json and trials/trial_NNNN.json under `out`.
void write_sweep(const SweepSpec &spec, const SweepResult &result, const std::filesystem::path &out);
void write_model_select(const ModelSelectSpec &spec, const ModelSelectResult &result,
                        const std::filesystem::path &out);

}  // namespace qhl

#endif  // QHL_HARNESS_HPP
