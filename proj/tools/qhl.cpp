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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qhl/errors.hpp"
#include "qhl/harness.hpp"
#include "qhl/io.hpp"
#include "qhl/parallel.hpp"

namespace {

using qhl::Json;
namespace fs = std::filesystem;

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<uint64_t> seed;
    std::optional<int> trials;
    std::optional<unsigned> threads;
};

void add_common(CLI::App *cmd, CommonOptions &opts, bool with_trials) {
    cmd->add_option("--config", opts.config, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out, "output directory")->required();
    cmd->add_option("--seed", opts.seed, "override the configured seed");
    if (with_trials) {
        cmd->add_option("--trials", opts.trials, "override the configured trial count")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--threads", opts.threads, "worker threads (default: QHL_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
}

unsigned thread_count(const CommonOptions &opts) {
    return opts.threads ? *opts.threads : qhl::default_threads();
}

Json config_json(const CommonOptions &opts) {
    return qhl::load_json(opts.config);
}

fs::path config_dir(const CommonOptions &opts) {
    return fs::absolute(opts.config).parent_path();
}

int cmd_run(const CommonOptions &opts) {
    qhl::QHLConfig config = qhl::parse_qhl_config(config_json(opts), config_dir(opts));
    if (opts.seed) {
        config.seed = *opts.seed;
    }
    config.threads = thread_count(opts);
    qhl::TrialTrace trace = qhl::qhl_run(config);
    fs::create_directories(opts.out);
    qhl::write_file_atomic(fs::path(opts.out) / "trace.json", qhl::to_json(trace).dump(1) + "\n");
    std::vector<double> losses = trace.losses();
    std::cout << "final loss " << qhl::format_double(losses.back()) << (trace.aborted ? " (aborted)" : "") << "\n";
    return 0;
}

int cmd_sweep(const CommonOptions &opts) {
    qhl::SweepSpec spec = qhl::parse_sweep_spec(config_json(opts), config_dir(opts));
    if (opts.seed) {
        spec.base_seed = *opts.seed;
    }
    if (opts.trials) {
        spec.trials = *opts.trials;
    }
    qhl::SweepResult result = qhl::run_sweep(spec, thread_count(opts));
    qhl::write_sweep(spec, result, opts.out);
    std::cout << spec.name << ": " << spec.trials << " trials, median loss at N=" << result.bands.size() << " "
              << qhl::format_double(result.bands.back().median);
    if (result.fit) {
        std::cout << ", gamma " << qhl::format_double(result.fit->gamma);
    }
    std::cout << "\n";
    return 0;
}

int cmd_modelselect(const CommonOptions &opts) {
    qhl::ModelSelectSpec spec = qhl::parse_model_select_spec(config_json(opts), config_dir(opts));
    if (opts.seed) {
        spec.base_seed = *opts.seed;
    }
    if (opts.trials) {
        spec.trials = *opts.trials;
    }
    qhl::ModelSelectResult result = qhl::run_model_select(spec, thread_count(opts));
    qhl::write_model_select(spec, result, opts.out);
    std::cout << spec.name << ": median log10 odds (alt vs null) at N=" << result.log10_odds.size() << " "
              << qhl::format_double(result.log10_odds.back().median) << "\n";
    return 0;
}

int cmd_channel_build(const std::string &config, const std::string &out) {
    qhl::Superoperator channel = qhl::build_channel(qhl::load_json(config));
    qhl::save_superop(channel, out);
    std::cout << "channel " << channel.dim_out() << "x" << channel.dim_in() << " tp=" << channel.trace_preserving()
              << " cp=" << channel.completely_positive() << "\n";
    return 0;
}

int cmd_fit_gamma(const std::string &dataset, std::optional<size_t> first, std::optional<size_t> last,
                  const std::string &out) {
    fs::path dir(dataset);
    Json meta = qhl::load_json(dir / "sweep.json");
    std::vector<double> medians = qhl::read_median_column(dir / "sweep.csv", "loss");
    size_t lo = first ? *first : meta.at("fit_range").at("first").get<size_t>();
    size_t hi = last ? *last : meta.at("fit_range").at("last").get<size_t>();
    Json record = qhl::to_json(qhl::fit_gamma(medians, lo, hi));
    std::string text = record.dump(2) + "\n";
    if (!out.empty()) {
        qhl::write_file_atomic(out, text);
    }
    std::cout << text;
    return 0;
}

void report(const std::string &kind, const std::string &message, std::optional<size_t> line = std::nullopt,
            std::optional<size_t> column = std::nullopt) {
    Json record = {{"error", kind}, {"message", message}};
    if (line) {
        record["line"] = *line;
        record["column"] = *column;
    }
    std::cerr << record.dump() << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum Hamiltonian learning by sequential Monte Carlo"};
    app.require_subcommand(1);

    CommonOptions run_opts, sweep_opts, select_opts;
    CLI::App *run = app.add_subcommand("run", "run one learning trial and write trace.json");
    add_common(run, run_opts, false);
    CLI::App *sweep = app.add_subcommand("sweep", "run a seeded Monte-Carlo sweep of trials");
    add_common(sweep, sweep_opts, true);
    CLI::App *select = app.add_subcommand("modelselect", "run paired-model Bayes factor trials");
    add_common(select, select_opts, true);

    std::string channel_config, channel_out;
    CLI::App *channel = app.add_subcommand("channel-build", "build a channel file from a Lindblad schedule");
    channel->add_option("--config", channel_config, "schedule (JSON)")->required()->check(CLI::ExistingFile);
    channel->add_option("--out", channel_out, "channel file to write")->required();

    std::string dataset, fit_out;
    std::optional<size_t> fit_first, fit_last;
    CLI::App *fit = app.add_subcommand("fit-gamma", "fit A exp(-gamma N) to a sweep's median loss");
    fit->add_option("--dataset", dataset, "sweep output directory")->required()->check(CLI::ExistingDirectory);
    fit->add_option("--first", fit_first, "first experiment index of the fit");
    fit->add_option("--last", fit_last, "last experiment index of the fit");
    fit->add_option("--out", fit_out, "also write the fit record here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        report("UsageError", e.what());
        std::cerr << app.help();
        return 2;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*sweep) return cmd_sweep(sweep_opts);
        if (*select) return cmd_modelselect(select_opts);
        if (*channel) return cmd_channel_build(channel_config, channel_out);
        if (*fit) return cmd_fit_gamma(dataset, fit_first, fit_last, fit_out);
    } catch (const qhl::ParseError &e) {
        report(std::string(qhl::error_kind_name(e.kind())), e.what(), e.line(), e.column());
        return 1;
    } catch (const qhl::Error &e) {
        report(std::string(qhl::error_kind_name(e.kind())), e.what());
        return 1;
    } catch (const nlohmann::json::exception &e) {
        report("InvalidConfig", e.what());
        return 1;
    } catch (const std::exception &e) {
        report("IoError", e.what());
        return 1;
    }
    return 2;
}
