#include "klslab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <thread>

#include "klslab/bounds.hpp"
#include "klslab/errors.hpp"
#include "klslab/localization.hpp"
#include "klslab/tensor.hpp"

namespace klslab {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

void for_each_index(int count, const std::function<void(int)>& body) {
    const int threads = std::min(max_threads(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&body, t, threads, count] {
            for (int i = t; i < count; i += threads) body(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

std::vector<int> first_half_subset(int n) {
    std::vector<int> subset(n / 2);
    for (int i = 0; i < n / 2; ++i) subset[i] = i;
    return subset;
}

void write_path_csv(const fs::path& file, const PathResult& path) {
    std::ofstream out(file);
    out.precision(17);
    out << "t,gamma,spec_Q,g_E,qv_rate,v_norm,delta\n";
    for (const PathRecord& rec : path.records) {
        out << rec.t << ',' << rec.gamma << ',' << rec.spec_q << ',' << rec.g_e << ','
            << rec.qv_rate << ',' << rec.v_norm << ',' << rec.delta << '\n';
    }
}

json config_echo(const ExperimentConfig& config) {
    return json{{"command", config.command},
                {"family", to_string(config.family)},
                {"dim", config.dim},
                {"n_atoms", config.n_atoms},
                {"q", config.q},
                {"T", config.t_end},
                {"dt", config.dt},
                {"seed", config.master_seed},
                {"n_paths", config.n_paths},
                {"slack", config.slack},
                {"log_convention", "natural"}};
}

CheckResult hard_gate(const std::string& name, double worst_margin, int violations,
                      int cases) {
    CheckResult r;
    r.check = name;
    r.lhs = worst_margin;  // max over cases of lhs - rhs, <= 0 when clean
    r.rhs = 0.0;
    r.seeds = cases;
    r.violations = violations;
    r.status = violations == 0 ? Status::Pass : Status::Fail;
    return r;
}

void suite_trace(const ExperimentConfig& config, VerificationReport& report) {
    int violations = 0;
    double worst = -1e300;
    for (int i = 0; i < config.trace_cases; ++i) {
        Rng rng(derive_seed(config.master_seed, 0x1000 + i));
        const int d = 2 + static_cast<int>(rng.below(7));
        const Mat g = random_spd(rng, d, 0.0, 2.0);
        const Mat f = random_symmetric(rng, d);
        const double delta = rng.uniform();
        const TwoSidedCheck check = check_trace_inequality(g, f, delta);
        worst = std::max(worst, check.lhs - check.rhs);
        if (!check.pass) ++violations;
    }
    report.add(hard_gate("trace_inequality", worst, violations, config.trace_cases));
    if (config.inject_trace_violation) {
        // failure-path fixture: negated left-hand side with flipped comparison
        CheckResult corrupted = hard_gate("trace_inequality_corrupted", 0.0, 0, 1);
        Rng rng(derive_seed(config.master_seed, 0x1fff));
        const Mat g = random_spd(rng, 4, 0.0, 2.0);
        const Mat f = random_symmetric(rng, 4);
        const TwoSidedCheck check = check_trace_inequality(g, f, 0.5);
        corrupted.lhs = -check.lhs;
        corrupted.rhs = check.rhs;
        corrupted.violations = corrupted.rhs <= corrupted.lhs ? 0 : 1;
        corrupted.status = corrupted.violations == 0 ? Status::Pass : Status::Fail;
        report.add(corrupted);
    }
}

void suite_swap(const ExperimentConfig& config, VerificationReport& report) {
    int violations = 0;
    double worst = -1e300;
    for (int i = 0; i < config.swap_cases; ++i) {
        Rng rng(derive_seed(config.master_seed, 0x2000 + i));
        const int d = 2 + static_cast<int>(rng.below(4));
        const int n = 20 + static_cast<int>(rng.below(30));
        AtomicMeasure cloud;
        cloud.points.resize(n, d);
        for (int r = 0; r < n; ++r) cloud.points.row(r) = rng.normal_vector(d).transpose();
        Vec w(n);
        for (int r = 0; r < n; ++r) w[r] = rng.exponential(1.0);
        cloud.weights = w / w.sum();
        const Mat a = random_spd(rng, d, 0.0, 2.0);
        const Mat b = random_spd(rng, d, 0.0, 2.0);
        const Mat c = random_spd(rng, d, 0.0, 2.0);
        const double delta = rng.uniform();
        const TwoSidedCheck check = check_tensor_swap(cloud, a, b, c, delta);
        worst = std::max(worst, check.lhs - check.rhs);
        if (!check.pass) ++violations;
    }
    report.add(hard_gate("tensor_swap", worst, violations, config.swap_cases));
}

void suite_moments(const ExperimentConfig& config, VerificationReport& report) {
    (void)config;
    const std::pair<double, double> pairs[] = {{4, 2}, {3, 1}, {6, 2}};
    const Vec one = Vec::Constant(1, 1.0);
    const Density families[] = {
        Density::gaussian(Vec::Zero(1), Mat::Identity(1, 1)),
        Density::product_exponential(one),
        Density::uniform_box(-one, one)};
    for (const Density& density : families) {
        for (const auto& [a, b] : pairs) {
            const TwoSidedCheck check = check_moment_inequality(density, a, b);
            CheckResult r;
            r.check = "moment_inequality_" + to_string(density.family()) + "_" +
                      std::to_string(static_cast<int>(a)) + "_" +
                      std::to_string(static_cast<int>(b));
            r.lhs = check.lhs;
            r.rhs = check.rhs;
            r.violations = check.pass ? 0 : 1;
            r.status = check.pass ? Status::Pass : Status::Fail;
            report.add(r);
        }
    }
}

AtomicMeasure lemma_cloud(const ExperimentConfig& config, std::uint64_t seed, int* d_out,
                          Family* family_out) {
    Rng rng(seed);
    const int d = 2 + static_cast<int>(rng.below(4));
    const Family families[] = {Family::Gaussian, Family::UniformBox, Family::UniformBall,
                               Family::ProductExponential};
    const Family family = families[rng.below(4)];
    Density density = Density::gaussian(Vec::Zero(d), Mat::Identity(d, d));
    const Vec one = Vec::Constant(d, 1.0);
    if (family == Family::UniformBox) density = Density::uniform_box(-one, one);
    if (family == Family::UniformBall) density = Density::uniform_ball(Vec::Zero(d), 1.0);
    if (family == Family::ProductExponential) density = Density::product_exponential(one);
    if (d_out) *d_out = d;
    if (family_out) *family_out = family;
    return sample_atomic(density, config.n_atoms, rng.bits());
}

void merge_statistical(VerificationReport& report, const std::string& name,
                       const std::vector<CheckResult>& results) {
    CheckResult merged;
    merged.check = name;
    merged.seeds = static_cast<int>(results.size());
    double worst_ratio = -1e300;
    for (const CheckResult& r : results) {
        merged.violations += r.violations;
        merged.slack = r.slack;
        const double ratio = r.rhs != 0.0 ? r.lhs / r.rhs : r.lhs;
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            merged.lhs = r.lhs;
            merged.rhs = r.rhs;
        }
    }
    merged.status = merged.violations == 0 ? Status::Pass : Status::Flag;
    report.add(merged);
}

void suite_tensor_lemmas(const ExperimentConfig& config, VerificationReport& report) {
    std::vector<CheckResult> vector_bound, isoperimetric, strong_logconcave, projection,
        psd;
    for (int s = 0; s < config.lemma_seeds; ++s) {
        const std::uint64_t seed = derive_seed(config.master_seed, 0x3000 + s);
        int d = 0;
        Family family = Family::Gaussian;
        const AtomicMeasure cloud = lemma_cloud(config, seed, &d, &family);
        Rng rng(derive_seed(seed, 7));
        const Mat b = random_spd(rng, d, 0.0, 2.0);
        const Mat c = random_spd(rng, d, 0.0, 2.0);
        vector_bound.push_back(check_tensor_vector_bound(cloud, b, c, config.slack));
        isoperimetric.push_back(check_tensor_isoperimetric(
            cloud, config.q, config.alpha, config.beta, config.slack));
        if (family == Family::Gaussian && config.q >= 3) {
            // unit covariance: the density is 1-strongly log-concave
            strong_logconcave.push_back(
                check_tensor_strong_logconcave(cloud, 1.0, config.q, config.slack));
        }
        const Moments moments = moments_and_whiten(cloud);
        const Vec v = rng.on_sphere(d);
        const int rank = 1 + static_cast<int>(rng.below(d));
        Mat basis = Mat::Zero(d, rank);
        const SymEig eig = sym_eig(random_spd(rng, d, 0.5, 2.0));
        for (int j = 0; j < rank; ++j) basis.col(j) = eig.vectors.col(j);
        const Mat proj = basis * basis.transpose();
        projection.push_back(check_trace_delta_projection(
            moments.whitened, v, proj, rank, config.alpha, config.beta, config.slack));
        psd.push_back(check_trace_delta_psd(moments.whitened, v,
                                            random_spd(rng, d, 0.0, 2.0), config.alpha,
                                            config.beta, config.slack));
    }
    merge_statistical(report, "tensor_vector_bound", vector_bound);
    merge_statistical(report, "tensor_isoperimetric", isoperimetric);
    merge_statistical(report, "tensor_strong_logconcave", strong_logconcave);
    merge_statistical(report, "trace_delta_projection", projection);
    merge_statistical(report, "trace_delta_psd", psd);
}

void suite_drift(const ExperimentConfig& config, VerificationReport& report) {
    std::vector<CheckResult> v_bounds, delta_bounds;
    for (int s = 0; s < config.lemma_seeds; ++s) {
        const std::uint64_t seed = derive_seed(config.master_seed, 0x4000 + s);
        const AtomicMeasure cloud = lemma_cloud(config, seed, nullptr, nullptr);
        LocalizationState state = init_state(cloud, config.q);
        Rng rng(derive_seed(seed, 11));
        const int steps = static_cast<int>(rng.below(4));
        for (int k = 0; k < steps; ++k) {
            state = euler_step(state, std::sqrt(0.01) * rng.normal_vector(state.dim()),
                               0.01);
        }
        const DriftBoundsReport bounds =
            check_drift_bounds(state, config.alpha, config.beta, config.slack);
        v_bounds.push_back(bounds.v_bound);
        delta_bounds.push_back(bounds.delta_bound);
    }
    merge_statistical(report, "drift_v_bound", v_bounds);
    merge_statistical(report, "drift_delta_bound", delta_bounds);

    const Density density = density_from_config(config);
    const AtomicMeasure base =
        sample_atomic(density, config.n_atoms, derive_seed(config.master_seed, 0x4fff));
    const DriftDominationReport dd = check_cov_drift_and_domination(
        base, config.q, config.t_end, config.dt, config.n_paths,
        derive_seed(config.master_seed, 0x4ffe));
    report.add(dd.drift);
    report.add(dd.domination);
}

void suite_martingale(const ExperimentConfig& config, VerificationReport& report) {
    const Density density = density_from_config(config);
    const AtomicMeasure base =
        sample_atomic(density, config.n_atoms, derive_seed(config.master_seed, 0x5000));
    const MartingaleReport mg = check_martingale(
        base, config.q, first_half_subset(config.n_atoms), config.n_paths, config.t_end,
        config.dt, derive_seed(config.master_seed, 0x5001));
    report.add(mg.subset);
    CheckResult atoms;
    atoms.check = "martingale_atoms";
    atoms.lhs = mg.max_atom_z;
    atoms.rhs = 4.0;
    atoms.seeds = mg.n_paths;
    atoms.z = mg.max_atom_z;
    atoms.violations = mg.max_atom_z <= 4.0 ? 0 : 1;
    atoms.status = atoms.violations == 0 ? Status::Pass : Status::Flag;
    report.add(atoms);
}

void suite_potential(const ExperimentConfig& config, VerificationReport& report) {
    const Density density = density_from_config(config);
    const AtomicMeasure base =
        sample_atomic(density, config.n_atoms, derive_seed(config.master_seed, 0x6000));
    const std::vector<double> grid = {0.25 * config.t_end, 0.5 * config.t_end,
                                      config.t_end};
    const PotentialReport pot = check_potential_lemmas(
        base, config.q, config.alpha, config.beta, config.n_paths, config.t_end,
        config.dt, derive_seed(config.master_seed, 0x6001), grid);
    report.add(pot.excursion);
    merge_statistical(report, "potential_f_growth", pot.f_growth);
}

void emit_report(const ExperimentConfig& config, const VerificationReport& report) {
    const json doc = to_json(report);
    if (config.out_dir.empty()) {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    fs::create_directories(config.out_dir);
    std::ofstream out(fs::path(config.out_dir) / "report.json");
    out << doc.dump(2) << '\n';
}

}  // namespace

int max_threads() {
    const char* env = std::getenv("KLSLAB_THREADS");
    if (!env) return 1;
    const int value = std::atoi(env);
    return std::max(1, value);
}

Density density_from_config(const ExperimentConfig& config) {
    const int d = config.dim;
    const Vec one = Vec::Constant(d, 1.0);
    switch (config.family) {
        case Family::Gaussian:
            return Density::gaussian(Vec::Zero(d), Mat::Identity(d, d));
        case Family::UniformBox:
            return Density::uniform_box(-one, one);
        case Family::UniformBall:
            return Density::uniform_ball(Vec::Zero(d), 1.0);
        case Family::ProductExponential:
            return Density::product_exponential(one);
    }
    throw ConfigError("unknown density family");
}

int run_simulate(const ExperimentConfig& config) {
    validate_config(config);
    const Density density = density_from_config(config);
    const AtomicMeasure base =
        sample_atomic(density, config.n_atoms, derive_seed(config.master_seed, 0x51));
    const std::vector<int> subset = first_half_subset(config.n_atoms);

    fs::create_directories(config.out_dir);
    std::vector<double> final_gamma(config.n_paths), final_g(config.n_paths);
    for_each_index(config.n_paths, [&](int p) {
        SimulateOptions options;
        options.record_every = config.record_every;
        options.subset = subset;
        options.drift_terms = true;
        const PathResult path = simulate_path(base, config.q, config.t_end, config.dt,
                                              derive_seed(config.master_seed, p), options);
        char name[32];
        std::snprintf(name, sizeof(name), "path_%04d.csv", p);
        write_path_csv(fs::path(config.out_dir) / name, path);
        final_gamma[p] = path.records.back().gamma;
        final_g[p] = path.records.back().g_e;
    });

    double gamma_mean = 0.0, g_mean = 0.0;
    for (int p = 0; p < config.n_paths; ++p) {
        gamma_mean += final_gamma[p] / config.n_paths;
        g_mean += final_g[p] / config.n_paths;
    }
    json summary = {{"config", config_echo(config)},
                    {"final_gamma_mean", gamma_mean},
                    {"final_g_mean", g_mean},
                    {"initial_gamma", static_cast<double>(config.dim)}};
    std::ofstream out(fs::path(config.out_dir) / "summary.json");
    out << summary.dump(2) << '\n';
    return 0;
}

int run_verify(const ExperimentConfig& config, VerificationReport* out) {
    validate_config(config);
    VerificationReport report;
    report.master_seed = config.master_seed;
    report.suite = config.suite;
    const bool all = config.suite == "all";
    if (all || config.suite == "trace") suite_trace(config, report);
    if (all || config.suite == "swap") suite_swap(config, report);
    if (all || config.suite == "moments") suite_moments(config, report);
    if (all || config.suite == "tensor-lemmas") suite_tensor_lemmas(config, report);
    if (all || config.suite == "drift") suite_drift(config, report);
    if (all || config.suite == "martingale") suite_martingale(config, report);
    if (all || config.suite == "potential") suite_potential(config, report);
    emit_report(config, report);
    if (out) *out = report;
    return report.any_fail() ? 1 : 0;
}

int run_bounds(const ExperimentConfig& config) {
    validate_config(config);
    const ComparisonTable table = comparison_table(config.d_list, config.c, config.c_lv);
    if (config.out_dir.empty()) {
        write_comparison_csv(std::cout, table);
        write_comparison_sidecar(std::cout, table);
        return 0;
    }
    fs::create_directories(config.out_dir);
    std::ofstream csv(fs::path(config.out_dir) / "bounds.csv");
    write_comparison_csv(csv, table);
    std::ofstream sidecar(fs::path(config.out_dir) / "bounds.json");
    write_comparison_sidecar(sidecar, table);
    return 0;
}

int run_command(const ExperimentConfig& config) {
    try {
        if (config.command == "simulate") return run_simulate(config);
        if (config.command == "verify") return run_verify(config);
        if (config.command == "bounds") return run_bounds(config);
        throw ConfigError("unknown command '" + config.command + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace klslab
