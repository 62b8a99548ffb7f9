#include "klslab/localization.hpp"

#include <cmath>
#include <limits>

#include "klslab/errors.hpp"

namespace klslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::shared_ptr<const LocalizerCore> make_core(const AtomicMeasure& base, int q) {
    if (q < 2) throw PreconditionError("localization: q >= 2 required");
    base.validate();
    auto core = std::make_shared<LocalizerCore>();
    core->base = base;
    core->q = q;
    Vec mean;
    mean_and_cov(base, mean, core->cov);
    core->inv = sym_inv(core->cov, 1e-12);
    core->inv_sqrt = sym_inv_sqrt(core->cov, 1e-12);
    core->log_w0 = base.weights.array().log();
    core->quad = ((base.points * core->inv).array() * base.points.array()).rowwise().sum();
    core->whitened_points = base.points * core->inv_sqrt;
    return core;
}

Vec tilted_weights(const LocalizerCore& core, const Vec& c, double t) {
    Vec log_w = core.log_w0 + core.base.points * c - (0.5 * t) * core.quad;
    double max_lw = -kInf;
    for (int i = 0; i < log_w.size(); ++i) {
        if (std::isfinite(log_w[i])) max_lw = std::max(max_lw, log_w[i]);
    }
    if (!std::isfinite(max_lw)) {
        throw DegenerateTiltError("localization: all weights degenerate under the tilt");
    }
    Vec w = (log_w.array() - max_lw).exp();
    for (int i = 0; i < w.size(); ++i) {
        if (!std::isfinite(w[i])) w[i] = 0.0;
    }
    const double total = w.sum();
    if (!(total > 0.0)) {
        throw DegenerateTiltError("localization: weight mass vanished under the tilt");
    }
    return w / total;
}

double gamma_from_q_matrix(const Mat& q_matrix, int q) {
    const SymEig eig = sym_eig(q_matrix);
    double gamma = 0.0;
    for (int i = 0; i < eig.values.size(); ++i) {
        gamma += std::pow(eig.values[i], q);
    }
    return gamma;
}

LocalizationState assemble_state(std::shared_ptr<const LocalizerCore> core,
                                 const Vec& c, double t) {
    LocalizationState s;
    s.core = std::move(core);
    s.t = t;
    s.tilt.c = c;
    s.tilt.b = t * s.core->inv;
    s.tilt.t = t;
    s.current.points = s.core->base.points;
    s.current.weights = tilted_weights(*s.core, c, t);
    mean_and_cov(s.current, s.mu, s.cov);
    s.q_matrix = symmetrize(s.core->inv_sqrt * s.cov * s.core->inv_sqrt);
    s.gamma = gamma_from_q_matrix(s.q_matrix, s.core->q);
    return s;
}

}  // namespace

NoisePath generate_noise_path(int d, int steps, double dt, std::uint64_t seed) {
    if (dt <= 0.0) throw PreconditionError("generate_noise_path: dt > 0 required");
    NoisePath path;
    path.dt = dt;
    path.seed = seed;
    path.increments.resize(steps, d);
    Rng rng(seed);
    const double scale = std::sqrt(dt);
    for (int k = 0; k < steps; ++k) {
        for (int j = 0; j < d; ++j) path.increments(k, j) = scale * rng.normal();
    }
    return path;
}

LocalizationState init_state(const AtomicMeasure& base, int q) {
    auto core = make_core(base, q);
    const int d = base.dim();
    return assemble_state(std::move(core), Vec::Zero(d), 0.0);
}

LocalizationState euler_step(const LocalizationState& state, const Vec& d_w, double dt) {
    if (dt <= 0.0) throw PreconditionError("euler_step: dt > 0 required");
    if (d_w.size() != state.dim()) throw DimensionError("euler_step: noise dimension mismatch");
    const Vec c = state.tilt.c + state.core->inv_sqrt * d_w +
                  dt * (state.core->inv * state.mu);
    return assemble_state(state.core, c, state.t + dt);
}

SubsetProcess subset_process(const LocalizationState& state,
                             const std::vector<int>& members) {
    const int d = state.dim();
    Vec accum = Vec::Zero(d);
    double g = 0.0;
    for (int idx : members) {
        g += state.current.weights[idx];
        accum += state.current.weights[idx] *
                 state.core->whitened_points.row(idx).transpose();
    }
    accum -= g * (state.core->inv_sqrt * state.mu);
    SubsetProcess out;
    out.g = g;
    out.qv_rate = accum.squaredNorm();
    const double spec_q = spectral_norm_sym(state.q_matrix);
    if (out.qv_rate > spec_q + 1e-9) {
        throw Error("subset_process: quadratic variation rate exceeds |Q_t|_2");
    }
    return out;
}

PathResult simulate_path(const AtomicMeasure& base, int q, double T, double dt,
                         std::uint64_t seed, const SimulateOptions& options) {
    if (T < 0.0) throw PreconditionError("simulate_path: T >= 0 required");
    if (T > 0.0 && (dt <= 0.0 || dt > T + 1e-15)) {
        throw PreconditionError("simulate_path: 0 < dt <= T required");
    }
    auto core = make_core(base, q);
    const int d = base.dim();
    const int steps = T > 0.0 ? static_cast<int>(std::ceil(T / dt - 1e-12)) : 0;
    const NoisePath noise = generate_noise_path(d, std::max(steps, 1), dt, seed);

    const bool track_subset = !options.subset.empty();
    PathResult result;
    Vec c = Vec::Zero(d);
    double t = 0.0;
    double last_record_t = 0.0;
    double last_spec_q = 0.0;

    auto record_state = [&](const Vec& w, const Vec& mu, double g, double rate,
                            bool with_drift) {
        PathRecord rec;
        rec.t = t;
        rec.mu = mu;
        Mat centered = core->base.points.rowwise() - mu.transpose();
        rec.cov = symmetrize(centered.transpose() * w.asDiagonal() * centered);
        const Mat q_mat = symmetrize(core->inv_sqrt * rec.cov * core->inv_sqrt);
        rec.gamma = gamma_from_q_matrix(q_mat, q);
        rec.spec_q = spectral_norm_sym(q_mat);
        rec.g_e = g;
        rec.qv_rate = rate;
        if (with_drift) {
            LocalizationState st;
            st.core = core;
            st.t = t;
            st.tilt = TiltParams{c, t * core->inv, t};
            st.current = AtomicMeasure{core->base.points, w};
            st.mu = mu;
            st.cov = rec.cov;
            st.q_matrix = q_mat;
            st.gamma = rec.gamma;
            const DriftDiffusion dd = gamma_drift_terms(st);
            rec.v_norm = dd.v.norm();
            rec.delta = dd.delta;
        }
        // trapezoid accumulation of |Q_s|_2 between records
        if (!result.records.empty()) {
            result.int_spec_q += 0.5 * (last_spec_q + rec.spec_q) * (t - last_record_t);
        }
        last_record_t = t;
        last_spec_q = rec.spec_q;
        result.records.push_back(std::move(rec));
    };

    for (int k = 0; k <= steps; ++k) {
        const Vec w = tilted_weights(*core, c, t);
        const Vec mu = core->base.points.transpose() * w;
        double g = 0.0, rate = 0.0;
        if (track_subset) {
            Vec accum = Vec::Zero(d);
            for (int idx : options.subset) {
                g += w[idx];
                accum += w[idx] * core->whitened_points.row(idx).transpose();
            }
            accum -= g * (core->inv_sqrt * mu);
            rate = accum.squaredNorm();
        }
        const bool is_record = (k % options.record_every == 0) || k == steps;
        if (is_record) record_state(w, mu, g, rate, options.drift_terms);
        if (k == steps) break;

        const double h = std::min(dt, T - t);
        Vec d_w = noise.increments.row(k).transpose();
        if (h < dt) d_w *= std::sqrt(h / dt);
        if (track_subset) result.qv_accum += rate * h;
        c += core->inv_sqrt * d_w + h * (core->inv * mu);
        t += h;
    }

    result.final_state = assemble_state(core, c, t);
    return result;
}

DriftDiffusion gamma_drift_terms(const LocalizationState& state, TensorMode mode,
                                 int pair_cap) {
    const int d = state.dim();
    const int q = state.q();
    const SymEig eig = sym_eig(state.q_matrix);
    auto q_power = [&eig, d](int p) {
        if (p == 0) return Mat(Mat::Identity(d, d));
        Vec lam(eig.values.size());
        for (int i = 0; i < lam.size(); ++i) lam[i] = std::pow(eig.values[i], p);
        return Mat(eig.vectors * lam.asDiagonal() * eig.vectors.transpose());
    };

    // whitened current atoms z_i = A^{-1/2}(x_i - mu_t)
    AtomicMeasure whitened;
    whitened.points = state.core->whitened_points.rowwise() -
                      (state.core->inv_sqrt * state.mu).transpose();
    whitened.weights = state.current.weights;

    const Mat q_qm1 = q_power(q - 1);
    const Vec quad = ((whitened.points * q_qm1).array() * whitened.points.array())
                         .rowwise()
                         .sum();
    DriftDiffusion out;
    out.v = q * whitened.points.transpose() *
            (whitened.weights.array() * quad.array()).matrix();

    double trace_qp1 = 0.0;
    for (int i = 0; i < eig.values.size(); ++i) trace_qp1 += std::pow(eig.values[i], q + 1);
    double tensor_sum = 0.0;
    for (int a = 0; a <= q - 2; ++a) {
        tensor_sum += three_tensor(whitened, q_power(a), q_power(q - 2 - a),
                                   Mat::Identity(d, d), mode, pair_cap);
    }
    out.delta = -q * trace_qp1 + 0.5 * q * tensor_sum;
    return out;
}

MartingaleReport check_martingale(const AtomicMeasure& base, int q,
                                  const std::vector<int>& subset, int n_paths,
                                  double T, double dt, std::uint64_t master_seed) {
    if (n_paths < 2) throw PreconditionError("check_martingale: need at least 2 paths");
    const int n = base.size();
    double g0 = 0.0;
    for (int idx : subset) g0 += base.weights[idx];

    Vec atom_sum = Vec::Zero(n), atom_sumsq = Vec::Zero(n);
    double g_sum = 0.0, g_sumsq = 0.0;
    SimulateOptions options;
    options.record_every = std::max(1, static_cast<int>(std::ceil(T / dt)));
    options.subset = subset;
    for (int p = 0; p < n_paths; ++p) {
        const PathResult path =
            simulate_path(base, q, T, dt, derive_seed(master_seed, p), options);
        const Vec& w = path.final_state.current.weights;
        atom_sum += w;
        atom_sumsq += w.cwiseProduct(w);
        double g_t = 0.0;
        for (int idx : subset) g_t += w[idx];
        g_sum += g_t;
        g_sumsq += g_t * g_t;
    }

    MartingaleReport report;
    report.n_paths = n_paths;
    const double mean_g = g_sum / n_paths;
    const double var_g =
        std::max(0.0, (g_sumsq - n_paths * mean_g * mean_g) / (n_paths - 1));
    const double se_g = std::sqrt(var_g / n_paths);
    report.subset.check = "martingale_subset";
    report.subset.lhs = std::abs(mean_g - g0);
    report.subset.rhs = 4.0 * se_g;
    report.subset.seeds = n_paths;
    report.subset.z = se_g > 0.0 ? (mean_g - g0) / se_g : 0.0;
    report.subset.status =
        std::abs(report.subset.z) <= 4.0 ? Status::Pass : Status::Flag;
    if (report.subset.status == Status::Flag) report.subset.violations = 1;

    for (int i = 0; i < n; ++i) {
        const double mean_w = atom_sum[i] / n_paths;
        const double var_w = std::max(
            0.0, (atom_sumsq[i] - n_paths * mean_w * mean_w) / (n_paths - 1));
        const double se_w = std::sqrt(var_w / n_paths);
        const double z = se_w > 0.0 ? (mean_w - base.weights[i]) / se_w : 0.0;
        report.max_atom_z = std::max(report.max_atom_z, std::abs(z));
    }
    report.pass =
        report.subset.status == Status::Pass && report.max_atom_z <= 4.0;
    return report;
}

DriftDominationReport check_cov_drift_and_domination(const AtomicMeasure& base, int q,
                                                     double T, double dt, int n_paths,
                                                     std::uint64_t master_seed) {
    if (n_paths < 2) {
        throw PreconditionError("check_cov_drift_and_domination: need >= 2 paths");
    }
    const int d = base.dim();
    Vec base_mean;
    Mat base_cov;
    mean_and_cov(base, base_mean, base_cov);
    const Mat base_inv = sym_inv(base_cov, 1e-12);
    const double spec_a = spectral_norm_sym(base_cov);

    const int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
    std::vector<Mat> res_sum(steps, Mat::Zero(d, d));
    std::vector<Mat> res_sumsq(steps, Mat::Zero(d, d));
    double worst_margin = kInf;
    int domination_violations = 0;

    for (int p = 0; p < n_paths; ++p) {
        const PathResult path =
            simulate_path(base, q, T, dt, derive_seed(master_seed, p), SimulateOptions{});
        for (int k = 0; k + 1 < static_cast<int>(path.records.size()); ++k) {
            const PathRecord& a = path.records[k];
            const PathRecord& b = path.records[k + 1];
            const double h = b.t - a.t;
            if (h <= 0.0 || k >= steps) continue;
            const Mat residual = (b.cov - a.cov) / h + a.cov * base_inv * a.cov;
            res_sum[k] += residual;
            res_sumsq[k] += residual.cwiseProduct(residual);
        }
        for (const PathRecord& rec : path.records) {
            if (rec.t <= 0.0) continue;
            const double margin = min_eigenvalue_sym(base_cov / rec.t - rec.cov);
            const double tol = 1e-6 * spec_a / rec.t;
            worst_margin = std::min(worst_margin, margin);
            if (margin < -tol) ++domination_violations;
        }
    }

    DriftDominationReport report;
    report.drift.check = "cov_drift_residual";
    report.drift.seeds = n_paths;
    double worst_z = 0.0, worst_norm = 0.0, worst_band = 0.0;
    for (int k = 0; k < steps; ++k) {
        const Mat mean = res_sum[k] / n_paths;
        const Mat var =
            ((res_sumsq[k] - n_paths * mean.cwiseProduct(mean)) / (n_paths - 1))
                .cwiseMax(0.0);
        const double se_f = std::sqrt(var.sum() / n_paths);
        const double norm = mean.norm();
        const double z = se_f > 0.0 ? norm / se_f : 0.0;
        if (z > worst_z) {
            worst_z = z;
            worst_norm = norm;
            worst_band = 4.0 * se_f;
        }
    }
    report.drift.lhs = worst_norm;
    report.drift.rhs = worst_band;
    report.drift.z = worst_z;
    report.drift.status = worst_z <= 4.0 ? Status::Pass : Status::Flag;
    if (report.drift.status == Status::Flag) report.drift.violations = 1;

    report.domination.check = "cov_domination";
    report.domination.seeds = n_paths;
    report.domination.lhs = worst_margin;
    report.domination.rhs = 0.0;
    report.domination.violations = domination_violations;
    report.domination.status =
        domination_violations == 0 ? Status::Pass : Status::Flag;
    return report;
}

DriftBoundsReport check_drift_bounds(const LocalizationState& state, double alpha,
                                     double beta, double slack) {
    const int q = state.q();
    const int d = state.dim();
    const DriftDiffusion dd = gamma_drift_terms(state);
    const double gamma = state.gamma;

    DriftBoundsReport report;
    report.v_bound.check = "drift_v_bound";
    report.v_bound.lhs = dd.v.norm();
    report.v_bound.rhs = 16.0 * q * std::pow(gamma, 1.0 + 0.5 / q);
    report.v_bound.slack = slack;
    report.v_bound.status =
        report.v_bound.lhs <= report.v_bound.rhs * slack ? Status::Pass : Status::Flag;
    if (report.v_bound.status == Status::Flag) report.v_bound.violations = 1;

    const double arm1 = 64.0 * q * q * alpha * alpha * std::log(static_cast<double>(d)) *
                        std::pow(static_cast<double>(d), 2.0 * beta - 1.0 / q) *
                        std::pow(gamma, 1.0 + 1.0 / q);
    const double arm2 = state.t > 0.0 ? 2.0 * q * q * gamma / state.t : kInf;
    report.delta_bound.check = "drift_delta_bound";
    report.delta_bound.lhs = dd.delta;
    report.delta_bound.rhs = std::min(arm1, arm2);
    report.delta_bound.slack = slack;
    report.delta_bound.status = report.delta_bound.lhs <= report.delta_bound.rhs * slack
                                    ? Status::Pass
                                    : Status::Flag;
    if (report.delta_bound.status == Status::Flag) report.delta_bound.violations = 1;
    return report;
}

PotentialReport check_potential_lemmas(const AtomicMeasure& base, int q, double alpha,
                                       double beta, int n_paths, double T, double dt,
                                       std::uint64_t master_seed,
                                       const std::vector<double>& t_grid) {
    if (n_paths < 2) throw PreconditionError("check_potential_lemmas: need >= 2 paths");
    const int d = base.dim();
    const double t1_time = 1.0 / (32768.0 * q * alpha * alpha *
                                  std::log(static_cast<double>(d)) *
                                  std::pow(static_cast<double>(d), 2.0 * beta));
    const double excursion_level = -0.5 * std::pow(d + 1.0, -1.0 / q);
    auto h_transform = [q](double a) { return -std::pow(a + 1.0, -1.0 / q); };

    int excursions = 0;
    const int n_grid = static_cast<int>(t_grid.size());
    Vec f_sum = Vec::Zero(n_grid), f_sumsq = Vec::Zero(n_grid);
    for (int p = 0; p < n_paths; ++p) {
        const PathResult path =
            simulate_path(base, q, T, dt, derive_seed(master_seed, p), SimulateOptions{});
        double max_h = -kInf;
        for (const PathRecord& rec : path.records) {
            if (rec.t <= std::min(t1_time, T) + 1e-15) {
                max_h = std::max(max_h, h_transform(rec.gamma));
            }
        }
        if (max_h >= excursion_level) ++excursions;
        for (int g = 0; g < n_grid; ++g) {
            // snap grid times to the nearest record
            const PathRecord* best = nullptr;
            double best_dist = kInf;
            for (const PathRecord& rec : path.records) {
                const double dist = std::abs(rec.t - t_grid[g]);
                if (dist < best_dist) {
                    best_dist = dist;
                    best = &rec;
                }
            }
            const double f = std::pow(best->gamma, 1.0 / q);
            f_sum[g] += f;
            f_sumsq[g] += f * f;
        }
    }

    PotentialReport report;
    report.excursion.check = "potential_h_excursion";
    report.excursion.lhs = static_cast<double>(excursions) / n_paths;
    report.excursion.rhs = 0.3;
    report.excursion.seeds = n_paths;
    report.excursion.violations = excursions;
    report.excursion.status =
        report.excursion.lhs <= report.excursion.rhs ? Status::Pass : Status::Flag;

    Vec f_mean = f_sum / n_paths;
    Vec f_se(n_grid);
    for (int g = 0; g < n_grid; ++g) {
        const double var = std::max(
            0.0, (f_sumsq[g] - n_paths * f_mean[g] * f_mean[g]) / (n_paths - 1));
        f_se[g] = std::sqrt(var / n_paths);
    }
    for (int i = 0; i < n_grid; ++i) {
        for (int j = i; j < n_grid; ++j) {
            if (t_grid[i] <= 0.0 || t_grid[j] < t_grid[i]) continue;
            const double growth = std::pow(t_grid[j] / t_grid[i], 2.0 * q);
            CheckResult c;
            c.check = "potential_f_growth";
            c.lhs = f_mean[j];
            c.rhs = f_mean[i] * growth;
            c.seeds = n_paths;
            const double se = std::sqrt(f_se[j] * f_se[j] +
                                        growth * growth * f_se[i] * f_se[i]);
            c.z = se > 0.0 ? (c.lhs - c.rhs) / se : (c.lhs <= c.rhs ? 0.0 : kInf);
            c.status = c.z <= 4.0 ? Status::Pass : Status::Flag;
            if (c.status == Status::Flag) c.violations = 1;
            report.f_growth.push_back(std::move(c));
        }
    }
    return report;
}

}  // namespace klslab
