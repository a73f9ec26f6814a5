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

// Acceptance runner: `qhl_acceptance --criterion K` runs one criterion,
// prints a PASS/FAIL line and exits nonzero on FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "model_error.hpp"
#include "oracles.hpp"
#include "qhl/channels.hpp"
#include "qhl/errors.hpp"
#include "qhl/harness.hpp"
#include "qhl/likelihood.hpp"
#include "qhl/metrics.hpp"
#include "qhl/parallel.hpp"
#include "qhl/protocols.hpp"
#include "qhl/smc.hpp"

namespace {

using namespace qhl;
namespace fs = std::filesystem;

struct Options {
    std::optional<int> trials;
    unsigned threads = 1;
};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
        }
        detail << (ok ? "[ok] " : "[FAILED] ") << what << "\n";
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

fs::path recipe(const std::string &name) {
    return fs::path(QHL_RECIPES_DIR) / name;
}

SweepSpec load_sweep(const std::string &name, const Options &opts) {
    SweepSpec spec = parse_sweep_spec(load_json(recipe(name)), recipe(name).parent_path());
    if (opts.trials) {
        spec.trials = *opts.trials;
    }
    return spec;
}

ModelSelectSpec load_select(const std::string &name, const Options &opts) {
    ModelSelectSpec spec = parse_model_select_spec(load_json(recipe(name)), recipe(name).parent_path());
    if (opts.trials) {
        spec.trials = *opts.trials;
    }
    return spec;
}

double median_at(const SweepResult &r, size_t n) {
    return r.bands.at(n - 1).median;
}

SweepResult sweep(const SweepSpec &spec, const Options &opts, std::ostream &log) {
    auto start = std::chrono::steady_clock::now();
    SweepResult r = run_sweep(spec, opts.threads);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << "  sweep " << spec.name << ": " << spec.trials << " trials x " << spec.base.experiments
        << " experiments, " << fmt(secs) << " s";
    if (r.fit) {
        log << ", A = " << fmt(r.fit->amplitude) << ", gamma = " << fmt(r.fit->gamma) << " over [" << r.fit->first
            << ", " << r.fit->last << "]";
    } else {
        log << ", no fit (" << r.fit_error << ")";
    }
    if (!r.flagged.empty()) {
        log << ", " << r.flagged.size() << " aborted trials";
    }
    log << "\n  median loss at N = 1, 10, 25, 50, 75, 100:";
    for (size_t n : {1, 10, 25, 50, 75, 100}) {
        if (n <= r.bands.size()) {
            log << " " << fmt(median_at(r, n));
        }
    }
    log << "\n";
    return r;
}

double fitted_gamma(const SweepResult &r) {
    return r.fit ? r.fit->gamma : std::nan("");
}

// 1. Exponential learning on the Ising line.
Outcome exponential_learning(const Options &opts) {
    Outcome out;
    SweepResult r = sweep(load_sweep("fig2_ising_line.json", opts), opts, out.detail);
    double ratio = median_at(r, 1) / median_at(r, 100);
    out.check(ratio >= 1e5, "median loss ratio N=1 / N=100 = " + fmt(ratio) + " (need >= 1e5)");
    out.check(fitted_gamma(r) > 0.05, "gamma over [5, 100] = " + fmt(fitted_gamma(r)) + " (need > 0.05)");
    return out;
}

// 2. Depolarizing noise slows learning by about (1 − N).
Outcome depolarizing_slowdown(const Options &opts) {
    Outcome out;
    std::vector<double> strengths = {0.0, 0.25, 0.5};
    std::vector<double> gammas;
    for (double s : strengths) {
        SweepSpec spec = load_sweep("fig2_ising_line.json", opts);
        spec.name = "depolarizing-" + fmt(s);
        spec.base.noise.depolarizing = s;
        gammas.push_back(fitted_gamma(sweep(spec, opts, out.detail)));
    }
    for (size_t k = 1; k < gammas.size(); ++k) {
        out.check(gammas[k] < gammas[k - 1],
                  "gamma(" + fmt(strengths[k]) + ") = " + fmt(gammas[k]) + " < gamma(" + fmt(strengths[k - 1]) +
                      ") = " + fmt(gammas[k - 1]));
        double ratio = gammas[k] / gammas[0];
        double lo = 0.5 * (1.0 - strengths[k]), hi = 1.5 * (1.0 - strengths[k]);
        out.check(ratio >= lo && ratio <= hi, "gamma(" + fmt(strengths[k]) + ")/gamma(0) = " + fmt(ratio) +
                                                  " in [" + fmt(lo) + ", " + fmt(hi) + "]");
    }
    return out;
}

// 3. Learning rate falls with the number of parameters.
Outcome dimension_scaling(const Options &opts) {
    Outcome out;
    std::vector<double> gammas;
    for (int n : {3, 4, 5}) {
        SweepSpec spec = load_sweep("fig2_ising_line.json", opts);
        spec.name = "ising-line-n" + std::to_string(n);
        spec.base.family = make_family("ising-line", n);
        gammas.push_back(fitted_gamma(sweep(spec, opts, out.detail)));
    }
    for (size_t k = 1; k < gammas.size(); ++k) {
        out.check(gammas[k] < gammas[k - 1], "gamma(d=" + std::to_string(k + 2) + ") = " + fmt(gammas[k]) +
                                                 " < gamma(d=" + std::to_string(k + 1) + ") = " + fmt(gammas[k - 1]));
    }
    return out;
}

// 4. A line model fitted to a complete-graph truth saturates.
Outcome misspecification_plateau(const Options &opts) {
    Outcome out;
    SweepResult r = sweep(load_sweep("fig_badmodel.json", opts), opts, out.detail);
    double l100 = median_at(r, 100), l200 = median_at(r, 200);
    out.detail << "  median loss at N = 150, 200: " << fmt(median_at(r, 150)) << " " << fmt(l200) << "\n";
    double ratio = std::max(l100, l200) / std::min(l100, l200);
    out.check(ratio <= 10.0, "median loss N=100 vs N=200 differ by " + fmt(ratio) + "x (need <= 10x)");
    out.check(l200 >= 1e-9 && l200 <= 1e-5, "plateau median loss " + fmt(l200) + " in [1e-9, 1e-5]");
    return out;
}

// 5. Bayes factors pick the complete model for complete truth and the line
// model for line truth.
Outcome model_selection(const Options &opts) {
    Outcome out;
    auto run = [&](const std::string &name) {
        ModelSelectSpec spec = load_select(name, opts);
        auto start = std::chrono::steady_clock::now();
        ModelSelectResult r = run_model_select(spec, opts.threads);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.detail << "  " << spec.name << ": " << spec.trials << " trials, " << fmt(secs) << " s"
                   << ", median log10 odds at N = 10, 25, 50, 75, 100:";
        for (size_t n : {10, 25, 50, 75, 100}) {
            out.detail << " " << fmt(r.log10_odds.at(n - 1).median);
        }
        out.detail << "\n";
        return r;
    };
    ModelSelectResult complete = run("fig7_modelselect_complete_truth.json");
    std::vector<double> tail;
    for (size_t n = 51; n <= 100; ++n) {
        tail.push_back(complete.log10_odds.at(n - 1).median);
    }
    double end = tail.back();
    // least-squares slope of the median over N = 51..100
    double mean_n = 75.5, mean_v = 0.0;
    for (double v : tail) {
        mean_v += v / static_cast<double>(tail.size());
    }
    double sxy = 0.0, sxx = 0.0;
    for (size_t k = 0; k < tail.size(); ++k) {
        double dn = static_cast<double>(k + 51) - mean_n;
        sxy += dn * (tail[k] - mean_v);
        sxx += dn * dn;
    }
    double slope = sxy / sxx;
    out.check(end > 5.0, "complete truth: median log10 odds at N=100 = " + fmt(end) + " (need > 5)");
    out.check(slope > 0.0 && end > tail.front(), "complete truth: median log10 odds rising over N=51..100 (slope " +
                                                     fmt(slope) + ", " + fmt(tail.front()) + " -> " + fmt(end) + ")");

    ModelSelectResult line = run("fig8_modelselect_line_truth.json");
    double line_end = line.log10_odds.at(99).median;
    out.check(line_end < 0.0, "line truth: median log10 odds at N=100 = " + fmt(line_end) + " (need < 0)");
    return out;
}

// 6. |ΔPr| ≤ ‖H − H̃‖² t² on random instances with ‖H − H̃‖ t ≤ 1.
Outcome likelihood_error_bound(const Options &) {
    Outcome out;
    Rng rng(derive_seed(6, 0));
    int violations = 0, amplitude_violations = 0, out_of_range = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        testing_support::BoundSample s = testing_support::model_error_sample(rng);
        out_of_range += s.scale > 1.0;
        double bound = s.scale * s.scale;
        if (s.delta_pr > bound) {
            ++violations;
            worst = std::max(worst, s.delta_pr / bound);
        }
        amplitude_violations += s.amplitude_sq > bound * (1.0 + 1e-12);
    }
    out.detail << "  amplitude form |<D|(U - U')|psi>|^2 <= (|H - H'| t)^2 violations: " << amplitude_violations
               << "/1000\n";
    out.check(out_of_range == 0, "all instances satisfy |H - H'| t <= 1");
    out.check(violations == 0, "|dPr| <= (|H - H'| t)^2 violations: " + std::to_string(violations) +
                                   "/1000 (worst ratio " + fmt(worst) + ")");
    return out;
}

// 7. SWAP-channel superoperators.
Outcome superoperator_fidelity(const Options &) {
    Outcome out;
    ComplexMatrix prep = ComplexMatrix::Zero(16, 4);
    prep(0, 0) = prep(2, 1) = prep(8, 2) = prep(10, 3) = 1;
    ComplexMatrix trace = ComplexMatrix::Zero(4, 16);
    trace(0, 0) = trace(0, 10) = trace(1, 1) = trace(1, 11) = 1;
    trace(2, 4) = trace(2, 14) = trace(3, 5) = trace(3, 15) = 1;
    out.check(prep_superop().matrix() == prep, "prep superoperator equals the explicit 16x4 matrix");
    out.check(trace_superop().matrix() == trace, "trace superoperator equals the explicit 4x16 matrix");
    double swap_err = (lambda_noise(swap_superop()).matrix() - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff();
    out.check(swap_err <= 1e-12, "noise map of the ideal SWAP is the identity (max error " + fmt(swap_err) + ")");

    Rng rng(derive_seed(7, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        oracle::Lindblad o;
        o.h = oracle::random_hermitian(4, rng);
        LindbladSpec spec{o.h, {}};
        for (int k = 0; k < 2; ++k) {
            ComplexMatrix l(4, 4);
            for (Eigen::Index j = 0; j < l.size(); ++j) {
                l.data()[j] = Complex(normal(rng), normal(rng)) * 0.5;
            }
            double rate = 0.05 + 0.45 * unit(rng);
            o.ops.push_back(l);
            o.rates.push_back(rate);
            spec.collapse.push_back({l, rate});
        }
        double duration = 0.2 + unit(rng);
        PiecewiseGenerator schedule;
        schedule.add(lindblad_generator(spec), duration);
        ComplexMatrix propagator = magnus2_propagator(schedule).matrix();
        for (Eigen::Index col = 0; col < 16; ++col) {
            ComplexMatrix basis = ComplexMatrix::Zero(4, 4);
            basis(col / 4, col % 4) = 1;
            ComplexMatrix reference = oracle::evolve_rk4(o, basis, duration, 4000);
            ComplexMatrix got = unvec(propagator.col(col));
            worst = std::max(worst, (got - reference).cwiseAbs().maxCoeff());
        }
    }
    out.check(worst <= 1e-6, "propagator vs RK4 on 10 random two-qubit Lindblad generators (max error " +
                                 fmt(worst) + ")");
    return out;
}

// 8. Depolarized two-outcome likelihoods.
Outcome depolarized_likelihood(const Options &) {
    Outcome out;
    Rng rng(derive_seed(8, 0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        int n = 2 + i % 3;
        FamilyPtr family = make_family(i % 2 == 0 ? "ising-line" : "transverse-ising", n);
        ExperimentDesign design;
        design.t = 0.1 + 10.0 * unit(rng);
        design.protocol = i % 4 < 2 ? Protocol::IQLE : Protocol::QLE;
        if (design.protocol == Protocol::IQLE) {
            design.x_minus = sample_prior(*family, rng);
            design.inversion_family = family;
        }
        if (i % 3 == 0) {
            design.initial = InitialStateSpec::random_clifford(rng());
        }
        ModelParameters x = sample_prior(*family, rng);
        double strength = unit(rng);
        NoiseConfig noise;
        noise.depolarizing = strength;
        double a = outcome_distribution(x, design, NoiseConfig{}, *family)[0];
        std::vector<double> p = outcome_distribution(x, design, noise, *family);
        double dim = std::ldexp(1.0, n);
        worst = std::max(worst, std::abs(p[0] - (a * (1 - strength) + strength / dim)));
        worst = std::max(worst, std::abs(p[1] - ((1 - a) * (1 - strength) + strength * (dim - 1) / dim)));
    }
    out.check(worst <= 1e-12, "depolarized outcome probabilities on 100 random designs (max error " + fmt(worst) +
                                  ")");
    return out;
}

// 9. SMC unit properties.
Outcome smc_properties(const Options &) {
    Outcome out;
    Rng rng(derive_seed(9, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int m = 10000;
    ParticleMatrix loc(m, 3);
    RealVector w(m);
    for (int i = 0; i < m; ++i) {
        double z0 = normal(rng), z1 = normal(rng), z2 = normal(rng);
        loc(i, 0) = 0.3 + 0.1 * z0;
        loc(i, 1) = -0.2 + 0.05 * z0 + 0.2 * z1;
        loc(i, 2) = 0.01 * z2;
        w[i] = 0.2 + unit(rng);
    }
    ParticleCloud cloud(loc, w / w.sum());
    PosteriorSummary before = posterior_summary(cloud);
    PosteriorSummary after = posterior_summary(liu_west_resample(cloud, 0.9, rng));
    double mean_err = (after.mean - before.mean).norm();
    double mean_tol = 4.0 * std::sqrt(before.covariance.trace() / m);
    out.check(mean_err <= mean_tol, "Liu-West mean shift " + fmt(mean_err) + " <= " + fmt(mean_tol));
    double cov_err = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double scale = std::sqrt(before.covariance(i, i) * before.covariance(j, j));
            cov_err = std::max(cov_err, std::abs(after.covariance(i, j) - before.covariance(i, j)) / scale);
        }
    }
    out.check(cov_err <= 0.1, "Liu-West covariance relative error " + fmt(cov_err) + " <= 0.1");

    bool ess_ok = true;
    ParticleCloud c = cloud;
    for (int step = 0; step < 100; ++step) {
        std::vector<double> p(m);
        for (double &v : p) {
            v = unit(rng);
        }
        c = bayes_update(c, p).cloud;
        double ess = effective_sample_size(c);
        ess_ok = ess_ok && ess >= 1.0 && ess <= m * (1.0 + 1e-12);
    }
    ParticleMatrix single(3, 1);
    single << 0, 1, 2;
    RealVector spike(3);
    spike << 1, 0, 0;
    ess_ok = ess_ok && effective_sample_size(ParticleCloud(single, spike)) == 1.0 &&
             std::abs(effective_sample_size(ParticleCloud(single, RealVector::Constant(3, 1.0 / 3))) - 3.0) < 1e-12;
    out.check(ess_ok, "ESS stays in [1, M] over 100 random updates; ESS = 1 and ESS = M at the extremes");

    double loschmidt = 0.0;
    for (int i = 0; i < 20; ++i) {
        FamilyPtr family = make_family(i % 2 == 0 ? "ising-line" : "transverse-ising", 2 + i % 3);
        ModelParameters x = sample_prior(*family, rng);
        ExperimentDesign design;
        design.t = 0.1 + 20.0 * unit(rng);
        design.x_minus = x;
        design.inversion_family = family;
        if (i % 4 >= 2) {
            design.initial = InitialStateSpec::random_clifford(rng());
        }
        loschmidt = std::max(loschmidt, std::abs(outcome_distribution(x, design, {}, *family)[0] - 1.0));
    }
    out.check(loschmidt <= 1e-12, "Loschmidt echo at x_minus = x_true returns with probability 1 (max error " +
                                      fmt(loschmidt) + ")");

    bool reproducible = true;
    for (const char *id : {"ising-line", "transverse-ising"}) {
        QHLConfig config;
        config.family = make_family(id, id[0] == 'i' ? 4 : 2);
        config.particles = 1000;
        config.experiments = 30;
        config.seed = 99;
        config.threads = 1;
        TrialTrace a = qhl_run(config);
        TrialTrace b = qhl_run(config);
        config.threads = 4;
        TrialTrace c4 = qhl_run(config);
        reproducible = reproducible && a.losses() == b.losses() && a.losses() == c4.losses() &&
                       a.estimate == c4.estimate;
    }
    out.check(reproducible, "qhl_run is bit-reproducible across reruns and thread counts");
    return out;
}

// 10. Translation-invariant transverse Ising learns faster than the general one.
Outcome non_commuting_learning(const Options &opts) {
    Outcome out;
    SweepResult ti = sweep(load_sweep("fig4_ti_transverse_ising.json", opts), opts, out.detail);
    SweepResult general = sweep(load_sweep("fig3_transverse_ising.json", opts), opts, out.detail);
    double ratio = median_at(ti, 1) / median_at(ti, 100);
    out.check(ratio >= 1e3, "translation-invariant: median loss ratio N=1 / N=100 = " + fmt(ratio) +
                                " (need >= 1e3)");
    out.check(median_at(general, 100) > median_at(ti, 100),
              "median loss at N=100: general " + fmt(median_at(general, 100)) + " > translation-invariant " +
                  fmt(median_at(ti, 100)));
    return out;
}

const std::map<int, std::pair<std::string, std::function<Outcome(const Options &)>>> &criteria() {
    static const std::map<int, std::pair<std::string, std::function<Outcome(const Options &)>>> table = {
        {1, {"exponential learning, ising-line n=4", exponential_learning}},
        {2, {"depolarizing slowdown", depolarizing_slowdown}},
        {3, {"dimension scaling", dimension_scaling}},
        {4, {"misspecification plateau", misspecification_plateau}},
        {5, {"model selection sign tests", model_selection}},
        {6, {"likelihood error bound", likelihood_error_bound}},
        {7, {"superoperator fidelity", superoperator_fidelity}},
        {8, {"depolarized likelihood exactness", depolarized_likelihood}},
        {9, {"SMC unit properties", smc_properties}},
        {10, {"non-commuting learning", non_commuting_learning}},
    };
    return table;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> selected;
    Options opts;
    opts.threads = qhl::default_threads();
    app.add_option("--criterion", selected, "criterion number(s), default all")->check(CLI::Range(1, 10));
    app.add_option("--trials", opts.trials, "override sweep trial counts (diagnostics only)");
    app.add_option("--threads", opts.threads, "worker threads for sweeps");
    CLI11_PARSE(app, argc, argv);
    if (selected.empty()) {
        for (const auto &[k, entry] : criteria()) {
            selected.push_back(k);
        }
    }

    bool all_pass = true;
    for (int k : selected) {
        const auto &[name, run] = criteria().at(k);
        Outcome outcome;
        try {
            outcome = run(opts);
        } catch (const std::exception &e) {
            outcome.pass = false;
            outcome.detail << "  error: " << e.what() << "\n";
        }
        std::cout << outcome.detail.str();
        std::cout << "CRITERION " << k << " (" << name << "): " << (outcome.pass ? "PASS" : "FAIL") << std::endl;
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
