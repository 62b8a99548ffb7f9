#include "klslab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>

#include "klslab/errors.hpp"
#include "klslab/rng.hpp"

namespace klslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// 1-d marginal of the density along a unit direction: analytic where available,
// otherwise a gaussian KDE over projected samples with the normal-reference rule.
struct Marginal {
    bool analytic = false;
    double mean = 0.0;
    double sd = 1.0;
    std::vector<double> proj;  // sorted projections (empty when analytic)
    double bandwidth = 0.0;

    double pdf(double s) const {
        if (analytic) return normal_pdf(s, mean, sd);
        double acc = 0.0;
        for (double x : proj) acc += normal_pdf(s, x, bandwidth);
        return acc / static_cast<double>(proj.size());
    }
    double cdf(double s) const {
        if (analytic) return normal_cdf(s, mean, sd);
        const auto it = std::upper_bound(proj.begin(), proj.end(), s);
        return static_cast<double>(it - proj.begin()) / static_cast<double>(proj.size());
    }
};

constexpr int kMarginalSamples = 100000;

Marginal make_marginal(const Density& density, const Vec& u, std::uint64_t seed) {
    Marginal m;
    m.mean = u.dot(density.mean());
    m.sd = std::sqrt(std::max(u.dot(density.covariance() * u), 1e-300));
    if (density.family() == Family::Gaussian) {
        m.analytic = true;
        return m;
    }
    Rng rng(seed);
    m.proj.resize(kMarginalSamples);
    for (int i = 0; i < kMarginalSamples; ++i) m.proj[i] = u.dot(density.sample(rng));
    std::sort(m.proj.begin(), m.proj.end());
    m.bandwidth = 1.06 * m.sd * std::pow(static_cast<double>(kMarginalSamples), -0.2);
    return m;
}

double exact_marginal_pdf_1d(const Density& density, double u, double s) {
    Vec x(1);
    x[0] = u * s;
    const double ld = density.log_density(x);
    return std::isfinite(ld) ? std::exp(ld) : 0.0;
}

}  // namespace

void Halfspace::validate(double tol) const {
    if (direction.size() == 0 || std::abs(direction.norm() - 1.0) > tol) {
        throw PreconditionError("halfspace: direction must be a unit vector");
    }
}

std::string to_string(EstimateKind kind) {
    switch (kind) {
        case EstimateKind::UpperViaHalfspace: return "upper-via-halfspace";
        case EstimateKind::LowerViaGaussianComponent: return "lower-via-gaussian-component";
        case EstimateKind::ConductanceProxy: return "conductance-proxy";
    }
    return "unknown";
}

ShellEstimate boundary_measure_shell(const Density& density, const Halfspace& halfspace,
                                     double eps) {
    if (eps <= 0.0) throw PreconditionError("boundary_measure_shell: eps > 0 required");
    halfspace.validate(1e-10);
    ShellEstimate out;
    if (density.dim() == 1 && density.family() != Family::Gaussian) {
        out.value = exact_marginal_pdf_1d(density, halfspace.direction[0],
                                          halfspace.threshold);
    } else {
        const Marginal m = make_marginal(density, halfspace.direction, 0x5eedULL);
        out.value = m.pdf(halfspace.threshold);
    }
    // shell coverage in the marginal: mass beyond s + eps
    const Marginal m = make_marginal(density, halfspace.direction, 0x5eedULL);
    const double mass_s = m.cdf(halfspace.threshold);
    const double mass_shifted = m.cdf(halfspace.threshold + eps);
    out.vacuous = mass_shifted >= 1.0 - 1e-12 && mass_s < 1.0 - 1e-12;
    return out;
}

ShellEstimate boundary_measure_shell(const AtomicMeasure& measure,
                                     const Halfspace& halfspace, double eps) {
    if (eps <= 0.0) throw PreconditionError("boundary_measure_shell: eps > 0 required");
    halfspace.validate(1e-10);
    const Vec proj = measure.points * halfspace.direction;
    double mass = 0.0, mass_eps = 0.0;
    for (int i = 0; i < measure.size(); ++i) {
        if (proj[i] <= halfspace.threshold) mass += measure.weights[i];
        if (proj[i] <= halfspace.threshold + eps) mass_eps += measure.weights[i];
    }
    ShellEstimate out;
    out.value = (mass_eps - mass) / eps;
    out.vacuous = mass_eps >= 1.0 - 1e-12 && mass < 1.0 - 1e-12;
    return out;
}

ShellEstimate boundary_measure_shell(const AtomicMeasure& measure,
                                     const std::vector<int>& subset, double eps) {
    if (eps <= 0.0) throw PreconditionError("boundary_measure_shell: eps > 0 required");
    std::vector<char> in_set(measure.size(), 0);
    double mass = 0.0;
    for (int idx : subset) {
        if (idx < 0 || idx >= measure.size()) {
            throw PreconditionError("boundary_measure_shell: subset index out of range");
        }
        if (!in_set[idx]) mass += measure.weights[idx];
        in_set[idx] = 1;
    }
    double mass_eps = 0.0;
    for (int j = 0; j < measure.size(); ++j) {
        if (in_set[j]) {
            mass_eps += measure.weights[j];
            continue;
        }
        double dist = kInf;
        for (int idx : subset) {
            dist = std::min(dist, (measure.points.row(j) - measure.points.row(idx)).norm());
        }
        if (dist <= eps) mass_eps += measure.weights[j];
    }
    ShellEstimate out;
    out.value = (mass_eps - mass) / eps;
    out.vacuous = mass_eps >= 1.0 - 1e-12 && mass < 1.0 - 1e-12;
    return out;
}

IsoperimetryEstimate halfspace_isoperimetry(const Density& density, int direction_count,
                                            const std::vector<double>& threshold_grid,
                                            std::uint64_t seed) {
    if (direction_count <= 0) {
        throw PreconditionError("halfspace_isoperimetry: vacuous scan, direction_count >= 1");
    }
    if (threshold_grid.empty()) {
        throw PreconditionError("halfspace_isoperimetry: empty threshold grid");
    }
    const int d = density.dim();
    std::vector<Vec> directions;
    const SymEig eig = sym_eig(density.covariance());
    for (int i = 0; i < d; ++i) directions.push_back(eig.vectors.col(i));
    Rng rng(seed);
    for (int i = 0; i < direction_count; ++i) directions.push_back(rng.on_sphere(d));

    IsoperimetryEstimate best;
    best.kind = EstimateKind::UpperViaHalfspace;
    best.value = kInf;
    for (std::size_t di = 0; di < directions.size(); ++di) {
        const Vec& u = directions[di];
        const Marginal m = make_marginal(density, u, derive_seed(seed, di + 1));
        const bool exact_1d = d == 1 && density.family() != Family::Gaussian;
        for (double g : threshold_grid) {
            const double s = m.mean + g * m.sd;
            const double f = m.cdf(s);
            const double tail = std::min(f, 1.0 - f);
            if (tail <= 1e-6) continue;
            const double pdf =
                exact_1d ? exact_marginal_pdf_1d(density, u[0], s) : m.pdf(s);
            const double ratio = pdf / tail;
            if (ratio < best.value) {
                best.value = ratio;
                best.witness.direction = u;
                best.witness.threshold = s;
            }
        }
    }
    if (!std::isfinite(best.value)) {
        throw PreconditionError("halfspace_isoperimetry: no admissible threshold in the grid");
    }
    return best;
}

namespace {

bool graph_connected(const Mat& adj) {
    const int n = static_cast<int>(adj.rows());
    std::vector<char> seen(n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int count = 1;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int j = 0; j < n; ++j) {
            if (adj(v, j) > 0.0 && !seen[j]) {
                seen[j] = 1;
                ++count;
                queue.push_back(j);
            }
        }
    }
    return count == n;
}

struct SweepResult {
    double conductance = kInf;
    int cut_size = 0;
};

SweepResult fiedler_sweep(const Mat& adj, int sweep_count) {
    const int n = static_cast<int>(adj.rows());
    const Vec deg = adj.rowwise().sum();
    const Vec dinv_sqrt = deg.array().max(1e-300).rsqrt();
    Mat lap = Mat::Identity(n, n) -
              (dinv_sqrt.asDiagonal() * adj * dinv_sqrt.asDiagonal());
    const SymEig eig = sym_eig(symmetrize(lap));
    const Vec fiedler = (eig.vectors.col(1).array() * dinv_sqrt.array()).matrix();

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&fiedler](int a, int b) { return fiedler[a] < fiedler[b]; });

    const double total_vol = deg.sum();
    const int stride = std::max(1, (n - 1) / std::max(1, sweep_count));
    std::vector<char> in_set(n, 0);
    double cut = 0.0, vol = 0.0;
    SweepResult best;
    for (int m = 1; m < n; ++m) {
        const int v = order[m - 1];
        double to_set = 0.0;
        for (int j = 0; j < n; ++j) {
            if (in_set[j]) to_set += adj(v, j);
        }
        cut += deg[v] - 2.0 * to_set;
        vol += deg[v];
        in_set[v] = 1;
        if (m % stride != 0 && m != n / 2) continue;
        const double denom = std::min(vol, total_vol - vol);
        if (denom <= 0.0) continue;
        const double phi = cut / denom;
        if (phi < best.conductance) {
            best.conductance = phi;
            best.cut_size = m;
        }
    }
    return best;
}

}  // namespace

IsoperimetryEstimate conductance_proxy(const AtomicMeasure& measure, int k_neighbors,
                                       int sweep_count) {
    const int n = measure.size();
    if (n < 100) throw PreconditionError("conductance_proxy: n >= 100 required");
    if (k_neighbors < 3) throw PreconditionError("conductance_proxy: k >= 3 required");
    if (sweep_count < 1) throw PreconditionError("conductance_proxy: sweep_count >= 1");

    Mat dist(n, n);
    for (int i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double v = (measure.points.row(i) - measure.points.row(j)).norm();
            dist(i, j) = v;
            dist(j, i) = v;
        }
    }

    int k = std::min(k_neighbors, n - 1);
    Mat adj;
    double mean_radius = 0.0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        Mat mask = Mat::Zero(n, n);
        Vec radius(n);
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) {
            std::iota(idx.begin(), idx.end(), 0);
            std::nth_element(idx.begin(), idx.begin() + k, idx.end(),
                             [&dist, i](int a, int b) { return dist(i, a) < dist(i, b); });
            // positions 0..k hold self plus the k nearest neighbors
            radius[i] = 0.0;
            for (int r = 0; r <= k; ++r) {
                const int j = idx[r];
                if (j == i) continue;
                mask(i, j) = 1.0;
                radius[i] = std::max(radius[i], dist(i, j));
            }
        }
        mean_radius = radius.mean();
        mask = mask.cwiseMax(mask.transpose()).eval();
        if (graph_connected(mask)) {
            // self-tuning gaussian weights on the k-NN structure
            adj = Mat::Zero(n, n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (mask(i, j) > 0.0) {
                        adj(i, j) = std::exp(-dist(i, j) * dist(i, j) /
                                             std::max(radius[i] * radius[j], 1e-300));
                    }
                }
            }
            break;
        }
        if (attempt == 1) throw Error("conductance_proxy: k-NN graph disconnected");
        k = std::min(n - 1, 2 * k);
    }

    const SweepResult sweep = fiedler_sweep(adj, sweep_count);
    // empirical calibration of the kernel-graph cut against the continuum
    // half-space value on gaussian clouds
    constexpr double kCutCalibration = 9.0;
    IsoperimetryEstimate out;
    out.kind = EstimateKind::ConductanceProxy;
    out.value = kCutCalibration * sweep.conductance / mean_radius;
    out.witness_cut_size = sweep.cut_size;
    return out;
}

Truncation truncate_to_ball(const Density& density, double mass_target, int n_atoms,
                            std::uint64_t seed) {
    if (!(mass_target > 0.0 && mass_target < 1.0)) {
        throw PreconditionError("truncate_to_ball: mass_target in (0,1) required");
    }
    const AtomicMeasure atoms = sample_atomic(density, n_atoms, seed);
    const Vec center = density.mean();
    std::vector<std::pair<double, int>> by_dist(n_atoms);
    for (int i = 0; i < n_atoms; ++i) {
        by_dist[i] = {(atoms.points.row(i).transpose() - center).norm(), i};
    }
    std::sort(by_dist.begin(), by_dist.end());

    // smallest sampled radius keeping tail weight at or below the target
    double kept = 0.0;
    int cut = n_atoms;
    for (int i = 0; i < n_atoms; ++i) {
        kept += atoms.weights[by_dist[i].second];
        if (1.0 - kept <= mass_target) {
            cut = i + 1;
            break;
        }
    }
    Truncation out;
    out.radius = by_dist[cut - 1].first;
    out.tail_mass = std::max(0.0, 1.0 - kept);
    out.atoms.points.resize(cut, density.dim());
    out.atoms.weights.resize(cut);
    for (int i = 0; i < cut; ++i) {
        out.atoms.points.row(i) = atoms.points.row(by_dist[i].second);
        out.atoms.weights[i] = atoms.weights[by_dist[i].second];
    }
    out.atoms.weights /= out.atoms.weights.sum();
    return out;
}

double gaussian_component_lower_bound(const Mat& b_matrix, double stability_prob) {
    if (!(stability_prob >= 0.0 && stability_prob <= 1.0)) {
        throw PreconditionError("gaussian_component_lower_bound: stability_prob in [0,1]");
    }
    if (!is_spd(b_matrix)) {
        throw PreconditionError("gaussian_component_lower_bound: B must be SPD");
    }
    // |B^{-1}|_2^{-1/2} = lambda_min(B)^{1/2}
    return 0.25 * std::sqrt(min_eigenvalue_sym(b_matrix)) * stability_prob;
}

void write_estimates_csv(std::ostream& out,
                         const std::vector<IsoperimetryEstimate>& estimates) {
    int d = 0;
    for (const auto& e : estimates) {
        d = std::max(d, static_cast<int>(e.witness.direction.size()));
    }
    out << "kind,value";
    for (int j = 1; j <= d; ++j) out << ",direction" << j;
    out << ",threshold\n";
    out.precision(17);
    for (const auto& e : estimates) {
        out << to_string(e.kind) << ',' << e.value;
        for (int j = 0; j < d; ++j) {
            out << ',';
            if (j < e.witness.direction.size()) out << e.witness.direction[j];
        }
        out << ',' << e.witness.threshold << '\n';
    }
}

}  // namespace klslab
