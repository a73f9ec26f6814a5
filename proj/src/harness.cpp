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

#include "qhl/harness.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qhl/errors.hpp"
#include "qhl/io.hpp"
#include "qhl/parallel.hpp"

namespace qhl {

namespace {

[[noreturn]] void config_error(const std::string &message) {
    throw Error(ErrorKind::InvalidConfig, message);
}

void check_keys(const Json &json, const std::string &where, std::initializer_list<const char *> allowed) {
    if (!json.is_object()) {
        config_error(where + " must be an object");
    }
    std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto &item : json.items()) {
        if (!known.count(item.key())) {
            config_error("unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <typename T>
T get_or(const Json &json, const char *key, T fallback) {
    if (!json.contains(key)) {
        return fallback;
    }
    try {
        return json.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        config_error(std::string("bad value for '") + key + "': " + e.what());
    }
}

ModelParameters parse_vector(const Json &json, const std::string &where) {
    if (!json.is_array()) {
        config_error(where + " must be an array of numbers");
    }
    ModelParameters x(static_cast<Eigen::Index>(json.size()));
    for (size_t k = 0; k < json.size(); ++k) {
        if (!json[k].is_number()) {
            config_error(where + " must be an array of numbers");
        }
        x[static_cast<Eigen::Index>(k)] = json[k].get<double>();
    }
    return x;
}

PriorComponent parse_prior_component(const Json &json) {
    if (!json.is_object() || json.size() != 1) {
        config_error("prior component must be {\"uniform\": [lo, hi]} or {\"gaussian\": [mean, sd]}");
    }
    auto [kind, value] = *json.items().begin();
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
        config_error("prior component '" + kind + "' needs two numbers");
    }
    double a = value[0].get<double>();
    double b = value[1].get<double>();
    if (kind == "uniform") {
        return PriorComponent::uniform(a, b);
    }
    if (kind == "gaussian") {
        return PriorComponent::gaussian(a, b);
    }
    config_error("unknown prior kind '" + kind + "'");
}

FamilyPtr parse_family(const Json &json, const std::string &where, std::optional<int> default_qubits) {
    check_keys(json, where, {"family", "qubits", "prior", "x_true"});
    if (!json.contains("family")) {
        config_error(where + " needs a 'family'");
    }
    std::string id = json.at("family").get<std::string>();
    std::optional<int> qubits = json.contains("qubits") ? std::optional<int>(json.at("qubits").get<int>())
                                                        : default_qubits;
    if (!qubits) {
        config_error(where + " needs 'qubits'");
    }
    if (!FamilyRegistry::global().contains(id)) {
        config_error("unknown family '" + id + "'");
    }
    FamilyPtr family = make_family(id, *qubits);
    if (json.contains("prior")) {
        family = std::make_shared<const HamiltonianFamily>(family->with_prior(parse_prior(json.at("prior"), family->d())));
    }
    return family;
}

LikelihoodMode parse_likelihood(const Json &json) {
    if (json.is_string() && json.get<std::string>() == "exact") {
        return LikelihoodMode::exact();
    }
    if (json.is_object()) {
        check_keys(json, "likelihood", {"samples"});
        return LikelihoodMode::sampled(get_or<int>(json, "samples", 0));
    }
    config_error("likelihood must be \"exact\" or {\"samples\": N}");
}

NoiseConfig parse_noise(const Json &json, const std::filesystem::path &base_dir, int d) {
    check_keys(json, "noise", {"depolarizing", "depolarizing_over_d", "swap_channel", "assumed_known"});
    NoiseConfig noise;
    if (json.contains("depolarizing") && json.contains("depolarizing_over_d")) {
        config_error("give either 'depolarizing' or 'depolarizing_over_d', not both");
    }
    noise.depolarizing = get_or<double>(json, "depolarizing", 0.0);
    if (json.contains("depolarizing_over_d")) {
        noise.depolarizing = json.at("depolarizing_over_d").get<double>() / d;
    }
    if (json.contains("swap_channel")) {
        std::filesystem::path path = json.at("swap_channel").get<std::string>();
        noise.swap_channel = load_superop(path.is_absolute() ? path : base_dir / path);
    }
    noise.assumed_known = get_or<bool>(json, "assumed_known", true);
    validate_noise(noise);
    return noise;
}

constexpr std::initializer_list<const char *> kRunKeys = {
    "model",        "truth",       "particles", "experiments", "likelihood", "noise",
    "protocol",     "initial_state", "measurement", "resample", "seed",       "threads"};

QHLConfig parse_run_fields(const Json &json, const Json &model_json, const std::filesystem::path &base_dir) {
    QHLConfig config;
    config.family = parse_family(model_json, "model", std::nullopt);
    if (json.contains("truth")) {
        const Json &truth = json.at("truth");
        if (truth.contains("family")) {
            config.truth_family = parse_family(truth, "truth", config.family->n());
        } else {
            check_keys(truth, "truth", {"x_true"});
        }
        if (truth.contains("x_true")) {
            config.x_true = parse_vector(truth.at("x_true"), "truth.x_true");
        }
    }
    if (model_json.contains("x_true")) {
        config_error("x_true belongs in 'truth', not in the model");
    }
    config.particles = get_or<int>(json, "particles", config.particles);
    config.experiments = get_or<int>(json, "experiments", config.experiments);
    if (json.contains("likelihood")) {
        config.likelihood = parse_likelihood(json.at("likelihood"));
    }
    if (json.contains("noise")) {
        config.noise = parse_noise(json.at("noise"), base_dir, config.family->d());
    }
    std::string protocol = get_or<std::string>(json, "protocol", "iqle");
    if (protocol == "iqle") {
        config.protocol = Protocol::IQLE;
    } else if (protocol == "qle") {
        config.protocol = Protocol::QLE;
    } else {
        config_error("protocol must be \"iqle\" or \"qle\"");
    }
    std::string initial = get_or<std::string>(json, "initial_state", "plus");
    if (initial == "plus") {
        config.initial_state = InitialStateSpec::Kind::Plus;
    } else if (initial == "random-clifford") {
        config.initial_state = InitialStateSpec::Kind::RandomClifford;
    } else {
        config_error("initial_state must be \"plus\" or \"random-clifford\"");
    }
    std::string measurement = get_or<std::string>(json, "measurement", "two-outcome");
    if (measurement == "two-outcome") {
        config.measurement = MeasurementSpec::TwoOutcome;
    } else if (measurement == "product-basis") {
        config.measurement = MeasurementSpec::ProductBasis;
    } else {
        config_error("measurement must be \"two-outcome\" or \"product-basis\"");
    }
    if (json.contains("resample")) {
        const Json &resample = json.at("resample");
        check_keys(resample, "resample", {"a", "threshold"});
        config.resample_a = get_or<double>(resample, "a", config.resample_a);
        config.resample_threshold = get_or<double>(resample, "threshold", config.resample_threshold);
    }
    config.seed = get_or<uint64_t>(json, "seed", 0);
    config.threads = get_or<unsigned>(json, "threads", 1u);
    validate_config(config);
    return config;
}

Json without(const Json &json, std::initializer_list<const char *> keys) {
    Json out = json;
    for (const char *key : keys) {
        out.erase(key);
    }
    return out;
}

void check_run_keys(const Json &json, const std::string &where, std::initializer_list<const char *> extra) {
    std::vector<const char *> keys(kRunKeys);
    keys.insert(keys.end(), extra.begin(), extra.end());
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto &item : json.items()) {
        if (!known.count(item.key())) {
            config_error("unknown key '" + item.key() + "' in " + where);
        }
    }
}

std::string role_name(ModelRole role) {
    return role == ModelRole::Null ? "null" : "alt";
}

}  // namespace

uint64_t trial_seed(uint64_t base_seed, int trial) {
    return derive_seed(base_seed, static_cast<uint64_t>(trial));
}

PriorSpec parse_prior(const Json &json, int d) {
    if (json.is_array()) {
        if (static_cast<int>(json.size()) != d) {
            throw Error(ErrorKind::DimensionMismatch,
                        "prior lists " + std::to_string(json.size()) + " components for d = " + std::to_string(d));
        }
        std::vector<PriorComponent> components;
        for (const Json &c : json) {
            components.push_back(parse_prior_component(c));
        }
        return PriorSpec(std::move(components));
    }
    return PriorSpec::broadcast(parse_prior_component(json), d);
}

QHLConfig parse_qhl_config(const Json &json, const std::filesystem::path &base_dir) {
    check_run_keys(json, "run config", {"name", "trials", "fit"});
    if (!json.contains("model")) {
        config_error("config needs a 'model'");
    }
    return parse_run_fields(json, json.at("model"), base_dir);
}

SweepSpec parse_sweep_spec(const Json &json, const std::filesystem::path &base_dir) {
    SweepSpec spec;
    spec.base = parse_qhl_config(json, base_dir);
    spec.name = get_or<std::string>(json, "name", "sweep");
    spec.trials = get_or<int>(json, "trials", 1);
    spec.base_seed = spec.base.seed;
    if (spec.trials < 1) {
        config_error("trials must be at least 1");
    }
    if (json.contains("fit")) {
        check_keys(json.at("fit"), "fit", {"first", "last"});
        spec.fit.first = get_or<size_t>(json.at("fit"), "first", spec.fit.first);
        spec.fit.last = get_or<size_t>(json.at("fit"), "last", spec.fit.last);
    }
    size_t last = spec.fit.last == 0 ? static_cast<size_t>(spec.base.experiments) : spec.fit.last;
    if (spec.fit.first < 1 || spec.fit.first >= last || last > static_cast<size_t>(spec.base.experiments)) {
        config_error("fit range must satisfy 1 <= first < last <= experiments");
    }
    return spec;
}

ModelSelectSpec parse_model_select_spec(const Json &json, const std::filesystem::path &base_dir) {
    check_run_keys(json, "model selection config", {"name", "trials", "null", "alt", "initial_driver"});
    if (json.contains("model")) {
        config_error("model selection configs name 'null' and 'alt' models instead of 'model'");
    }
    if (!json.contains("null") || !json.contains("alt")) {
        config_error("model selection needs 'null' and 'alt' models");
    }
    if (!json.contains("truth") || !json.at("truth").contains("family")) {
        config_error("model selection needs an explicit truth family");
    }
    ModelSelectSpec spec;
    Json shared = without(json, {"name", "trials", "null", "alt", "initial_driver"});
    spec.null_config = parse_run_fields(shared, json.at("null"), base_dir);
    spec.alt_config = parse_run_fields(shared, json.at("alt"), base_dir);
    spec.name = get_or<std::string>(json, "name", "modelselect");
    spec.trials = get_or<int>(json, "trials", 1);
    spec.experiments = spec.null_config.experiments;
    spec.base_seed = spec.null_config.seed;
    std::string driver = get_or<std::string>(json, "initial_driver", "null");
    if (driver == "null") {
        spec.initial_driver = ModelRole::Null;
    } else if (driver == "alt") {
        spec.initial_driver = ModelRole::Alternate;
    } else {
        config_error("initial_driver must be \"null\" or \"alt\"");
    }
    if (spec.trials < 1) {
        config_error("trials must be at least 1");
    }
    return spec;
}

Json load_json(const std::filesystem::path &path) {
    std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        std::string message = e.what();
        // byte offsets are reported; convert to line/column
        size_t offset = std::min(e.byte, text.size());
        size_t line = 1, column = 1;
        for (size_t k = 0; k + 1 < offset; ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(path.string() + ": " + message, line, column);
    }
}

namespace {

ComplexMatrix parse_operator_terms(const Json &terms, int n, const std::string &where) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    if (!terms.is_array()) {
        config_error(where + " must be an array of {\"pauli\", \"coefficient\"} terms");
    }
    for (const Json &term : terms) {
        check_keys(term, where, {"pauli", "coefficient"});
        std::string labels = term.at("pauli").get<std::string>();
        if (static_cast<int>(labels.size()) != n) {
            throw Error(ErrorKind::DimensionMismatch, where + ": Pauli string '" + labels + "' is not " +
                                                          std::to_string(n) + " qubits long");
        }
        double coefficient = get_or<double>(term, "coefficient", 1.0);
        total += coefficient * pauli_string(labels);
    }
    return total;
}

}  // namespace

LindbladSpec parse_lindblad_spec(const Json &json, int n) {
    check_keys(json, "segment", {"duration", "hamiltonian", "collapse"});
    LindbladSpec spec;
    spec.hamiltonian = json.contains("hamiltonian") ? parse_operator_terms(json.at("hamiltonian"), n, "hamiltonian")
                                                    : ComplexMatrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    if (json.contains("collapse")) {
        for (const Json &c : json.at("collapse")) {
            check_keys(c, "collapse", {"terms", "rate"});
            CollapseOperator op;
            op.op = parse_operator_terms(c.at("terms"), n, "collapse.terms");
            op.rate = get_or<double>(c, "rate", 0.0);
            if (!(op.rate >= 0.0)) {
                config_error("collapse rates must be nonnegative");
            }
            spec.collapse.push_back(std::move(op));
        }
    }
    return spec;
}

Superoperator build_channel(const Json &json) {
    check_keys(json, "channel config", {"qubits", "segments", "lambda_noise"});
    int n = get_or<int>(json, "qubits", 0);
    if (n < 1 || n > 4) {
        config_error("channel configs need 1 <= qubits <= 4");
    }
    if (!json.contains("segments") || !json.at("segments").is_array()) {
        config_error("channel config needs a 'segments' array");
    }
    PiecewiseGenerator schedule;
    for (const Json &segment : json.at("segments")) {
        LindbladSpec spec = parse_lindblad_spec(segment, n);
        schedule.add(lindblad_generator(spec), get_or<double>(segment, "duration", 0.0));
    }
    Superoperator propagator = magnus2_propagator(schedule);
    if (get_or<bool>(json, "lambda_noise", false)) {
        if (n != 2) {
            config_error("lambda_noise needs a two-qubit schedule");
        }
        return lambda_noise(propagator);
    }
    return propagator;
}

Json to_json(const ModelParameters &x) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        out.push_back(x[k]);
    }
    return out;
}

Json to_json(const TrialTrace &trace) {
    Json records = Json::array();
    for (const ExperimentRecord &r : trace.records) {
        Json initial = r.initial.kind == InitialStateSpec::Kind::Plus
                           ? Json("plus")
                           : Json{{"random_clifford_seed", r.initial.seed}};
        records.push_back({{"experiment", r.index},
                           {"t", r.t},
                           {"x_minus", to_json(r.x_minus)},
                           {"initial_state", initial},
                           {"outcome", r.outcome},
                           {"loss", r.loss},
                           {"log_evidence", r.log_evidence},
                           {"ess_before_update", r.ess_before_update},
                           {"ess_after_update", r.ess_after_update},
                           {"resampled", r.resampled},
                           {"retries", r.retries},
                           {"posterior_mean", to_json(r.posterior_mean)}});
    }
    return {{"seed", trace.seed},
            {"experiments", trace.experiments},
            {"x_true", to_json(trace.x_true)},
            {"initial_loss", trace.initial_loss},
            {"estimate", to_json(trace.estimate)},
            {"aborted", trace.aborted},
            {"abort_reason", trace.abort_reason},
            {"records", records}};
}

Json to_json(const ModelSelectTrace &trace) {
    Json records = Json::array();
    for (const ModelSelectRecord &r : trace.records) {
        records.push_back({{"experiment", r.index},
                           {"driver", role_name(r.driver)},
                           {"t", r.t},
                           {"outcome", r.outcome},
                           {"log_evidence_null", r.log_evidence_null},
                           {"log_evidence_alt", r.log_evidence_alt},
                           {"log_odds", r.log_odds},
                           {"loss_null", r.loss_null},
                           {"loss_alt", r.loss_alt}});
    }
    return {{"seed", trace.seed},
            {"experiments", trace.experiments},
            {"x_true", to_json(trace.x_true)},
            {"aborted", trace.aborted},
            {"abort_reason", trace.abort_reason},
            {"records", records}};
}

Json to_json(const GammaFit &fit) {
    return {{"A", fit.amplitude},
            {"gamma", fit.gamma},
            {"first", fit.first},
            {"last", fit.last},
            {"residual_rms_ln", fit.residual},
            {"used_points", fit.used_points},
            {"dropped_nonpositive_points", fit.dropped_points}};
}

std::vector<QuantileBand> bands_by_column(const std::vector<std::vector<double>> &rows) {
    std::vector<QuantileBand> bands;
    if (rows.empty()) {
        return bands;
    }
    const size_t width = rows.front().size();
    std::vector<double> column(rows.size());
    for (size_t k = 0; k < width; ++k) {
        for (size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != width) {
                throw Error(ErrorKind::DimensionMismatch, "ragged rows in quantile bands");
            }
            column[r] = rows[r][k];
        }
        bands.push_back(quantile_band(column));
    }
    return bands;
}

SweepResult run_sweep(const SweepSpec &spec, unsigned threads) {
    if (spec.trials < 1) {
        config_error("trials must be at least 1");
    }
    validate_config(spec.base);
    SweepResult result;
    result.trials.resize(static_cast<size_t>(spec.trials));
    parallel_for(result.trials.size(), threads, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            QHLConfig config = spec.base;
            config.seed = trial_seed(spec.base_seed, static_cast<int>(i));
            config.threads = 1;
            result.trials[i] = qhl_run(config);
        }
    });
    std::vector<std::vector<double>> losses;
    for (size_t i = 0; i < result.trials.size(); ++i) {
        losses.push_back(result.trials[i].losses());
        if (result.trials[i].aborted) {
            result.flagged.push_back(static_cast<int>(i));
        }
    }
    result.bands = bands_by_column(losses);
    std::vector<double> medians;
    for (const QuantileBand &b : result.bands) {
        medians.push_back(b.median);
    }
    size_t last = spec.fit.last == 0 ? medians.size() : spec.fit.last;
    try {
        result.fit = fit_gamma(medians, spec.fit.first, last);
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::NonPositiveLoss && e.kind() != ErrorKind::InvalidConfig) {
            throw;
        }
        result.fit_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }
    return result;
}

ModelSelectResult run_model_select(const ModelSelectSpec &spec, unsigned threads) {
    if (spec.trials < 1) {
        config_error("trials must be at least 1");
    }
    ModelSelectResult result;
    result.trials.resize(static_cast<size_t>(spec.trials));
    parallel_for(result.trials.size(), threads, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            uint64_t seed = trial_seed(spec.base_seed, static_cast<int>(i));
            QHLConfig null_config = spec.null_config;
            QHLConfig alt_config = spec.alt_config;
            // both clouds share a seed so identical models stay identical
            null_config.seed = alt_config.seed = derive_seed(seed, 6);
            null_config.threads = alt_config.threads = 1;
            result.trials[i] = model_select_run(null_config, alt_config, spec.experiments, seed, spec.initial_driver);
        }
    });
    std::vector<std::vector<double>> odds, loss_null, loss_alt;
    for (size_t i = 0; i < result.trials.size(); ++i) {
        const ModelSelectTrace &trace = result.trials[i];
        odds.push_back(trace.log10_odds());
        std::vector<double> ln, la;
        for (const ModelSelectRecord &r : trace.records) {
            ln.push_back(r.loss_null);
            la.push_back(r.loss_alt);
        }
        double fill_null = ln.empty() ? 0.0 : ln.back();
        double fill_alt = la.empty() ? 0.0 : la.back();
        ln.resize(static_cast<size_t>(trace.experiments), fill_null);
        la.resize(static_cast<size_t>(trace.experiments), fill_alt);
        loss_null.push_back(std::move(ln));
        loss_alt.push_back(std::move(la));
        if (trace.aborted) {
            result.flagged.push_back(static_cast<int>(i));
        }
    }
    result.log10_odds = bands_by_column(odds);
    result.loss_null = bands_by_column(loss_null);
    result.loss_alt = bands_by_column(loss_alt);
    return result;
}

std::string bands_csv(const std::vector<QuantileBand> &bands, const std::string &value_name) {
    std::ostringstream out;
    out << "experiment_index,median_" << value_name << ",q25,q75\n";
    for (size_t k = 0; k < bands.size(); ++k) {
        out << (k + 1) << ',' << format_double(bands[k].median) << ',' << format_double(bands[k].q25) << ','
            << format_double(bands[k].q75) << '\n';
    }
    return out.str();
}

std::string model_select_csv(const ModelSelectResult &result) {
    std::ostringstream out;
    out << "experiment_index,median_log10_odds,q25,q75,median_loss_null,median_loss_alt\n";
    for (size_t k = 0; k < result.log10_odds.size(); ++k) {
        out << (k + 1) << ',' << format_double(result.log10_odds[k].median) << ','
            << format_double(result.log10_odds[k].q25) << ',' << format_double(result.log10_odds[k].q75) << ','
            << format_double(result.loss_null[k].median) << ',' << format_double(result.loss_alt[k].median) << '\n';
    }
    return out.str();
}

std::vector<double> read_median_column(const std::filesystem::path &csv, const std::string &value_name) {
    std::istringstream in(read_file(csv));
    std::string line;
    const std::string wanted = "median_" + value_name;
    auto fail = [&](size_t line_no, const std::string &message) {
        throw ParseError(csv.string() + ": " + message, line_no, 1);
    };
    if (!std::getline(in, line)) {
        fail(1, "empty dataset");
    }
    int column = -1;
    {
        std::istringstream header(line);
        std::string cell;
        for (int k = 0; std::getline(header, cell, ','); ++k) {
            if (cell == wanted) {
                column = k;
            }
        }
    }
    if (column < 0) {
        fail(1, "no '" + wanted + "' column");
    }
    std::vector<double> values;
    for (size_t line_no = 2; std::getline(in, line); ++line_no) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        for (int k = 0; k <= column; ++k) {
            if (!std::getline(row, cell, ',')) {
                fail(line_no, "row has too few columns");
            }
        }
        char *end = nullptr;
        double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0') {
            fail(line_no, "'" + cell + "' is not a number");
        }
        values.push_back(v);
    }
    return values;
}

namespace {

std::string trial_file_name(size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "trial_%04zu.json", i);
    return buf;
}

void make_dirs(const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
    }
}

Json config_summary(const QHLConfig &config) {
    return {{"model_family", config.family->id()},
            {"qubits", config.family->n()},
            {"d", config.family->d()},
            {"truth_family", config.truth().id()},
            {"particles", config.particles},
            {"experiments", config.experiments},
            {"likelihood", config.likelihood.kind == LikelihoodMode::Kind::Exact
                               ? Json("exact")
                               : Json{{"samples", config.likelihood.samples}}},
            {"depolarizing", config.noise.depolarizing},
            {"swap_channel", config.noise.swap_channel.has_value()},
            {"noise_assumed_known", config.noise.assumed_known},
            {"protocol", config.protocol == Protocol::IQLE ? "iqle" : "qle"},
            {"initial_state", config.initial_state == InitialStateSpec::Kind::Plus ? "plus" : "random-clifford"},
            {"measurement", config.measurement == MeasurementSpec::TwoOutcome ? "two-outcome" : "product-basis"},
            {"resample_a", config.resample_a},
            {"resample_threshold", config.resample_threshold}};
}

}  // namespace

void write_sweep(const SweepSpec &spec, const SweepResult &result, const std::filesystem::path &out) {
    Json trial_seeds = Json::array();
    for (const TrialTrace &t : result.trials) {
        trial_seeds.push_back(t.seed);
    }
    Json meta = {{"name", spec.name},
                 {"base_seed", spec.base_seed},
                 {"seed_derivation", "trial i uses derive_seed(base_seed, i) (splitmix64 mix)"},
                 {"trials", spec.trials},
                 {"trial_seeds", trial_seeds},
                 {"band", "interquartile range: 25th to 75th percentile, linear interpolation"},
                 {"config", config_summary(spec.base)},
                 {"fit_range", {{"first", spec.fit.first}, {"last", spec.fit.last == 0 ? result.bands.size() : spec.fit.last}}},
                 {"gamma_fit", result.fit ? to_json(*result.fit) : Json(nullptr)},
                 {"gamma_fit_error", result.fit_error},
                 {"flagged_trials", result.flagged}};
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    files.emplace_back(out / "sweep.csv", bands_csv(result.bands, "loss"));
    for (size_t i = 0; i < result.trials.size(); ++i) {
        files.emplace_back(out / "trials" / trial_file_name(i), to_json(result.trials[i]).dump(1) + "\n");
    }
    files.emplace_back(out / "sweep.json", meta.dump(2) + "\n");
    make_dirs(out / "trials");
    for (const auto &[path, content] : files) {
        write_file_atomic(path, content);
    }
}

void write_model_select(const ModelSelectSpec &spec, const ModelSelectResult &result,
                        const std::filesystem::path &out) {
    Json meta = {{"name", spec.name},
                 {"base_seed", spec.base_seed},
                 {"seed_derivation", "trial i uses derive_seed(base_seed, i); both clouds use derive_seed(trial seed, 6)"},
                 {"trials", spec.trials},
                 {"experiments", spec.experiments},
                 {"initial_driver", role_name(spec.initial_driver)},
                 {"odds", "log10 Pr(D|alt) / Pr(D|null)"},
                 {"band", "interquartile range: 25th to 75th percentile, linear interpolation"},
                 {"null", config_summary(spec.null_config)},
                 {"alt", config_summary(spec.alt_config)},
                 {"flagged_trials", result.flagged}};
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    files.emplace_back(out / "modelselect.csv", model_select_csv(result));
    for (size_t i = 0; i < result.trials.size(); ++i) {
        files.emplace_back(out / "trials" / trial_file_name(i), to_json(result.trials[i]).dump(1) + "\n");
    }
    files.emplace_back(out / "modelselect.json", meta.dump(2) + "\n");
    make_dirs(out / "trials");
    for (const auto &[path, content] : files) {
        write_file_atomic(path, content);
    }
}

}  // namespace qhl
