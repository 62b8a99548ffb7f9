#include "klslab/measures.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "klslab/errors.hpp"

namespace klslab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_ball_volume(int d, double radius) {
    // log vol = (d/2) log(pi) - lgamma(d/2 + 1) + d log(R)
    return 0.5 * d * std::log(M_PI) - std::lgamma(0.5 * d + 1.0) + d * std::log(radius);
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::UniformBox: return "uniform-box";
        case Family::UniformBall: return "uniform-ball";
        case Family::ProductExponential: return "product-exponential";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    if (name == "gaussian") return Family::Gaussian;
    if (name == "uniform-box") return Family::UniformBox;
    if (name == "uniform-ball") return Family::UniformBall;
    if (name == "product-exponential") return Family::ProductExponential;
    throw ConstructionError("unknown density family: " + name);
}

Density Density::gaussian(Vec mean, Mat covariance) {
    if (covariance.rows() != covariance.cols() || covariance.rows() != mean.size()) {
        throw DimensionError("gaussian: mean/covariance dimension mismatch");
    }
    if (!is_spd(covariance, 1e-10)) {
        throw ConstructionError("gaussian: covariance is not SPD (lambda_min <= 1e-10)");
    }
    Density p;
    p.family_ = Family::Gaussian;
    p.mean_ = std::move(mean);
    p.covariance_ = symmetrize(covariance);
    Eigen::LLT<Mat> llt(p.covariance_);
    if (llt.info() != Eigen::Success) {
        throw ConstructionError("gaussian: Cholesky factorization failed");
    }
    p.chol_lower_ = llt.matrixL();
    p.precision_ = sym_inv(p.covariance_);
    const double log_det = 2.0 * p.chol_lower_.diagonal().array().log().sum();
    p.log_norm_ = -0.5 * (p.dim() * std::log(2.0 * M_PI) + log_det);
    return p;
}

Density Density::uniform_box(Vec lower, Vec upper) {
    if (lower.size() != upper.size()) throw DimensionError("uniform_box: bound sizes differ");
    if (((upper - lower).array() <= 0.0).any()) {
        throw ConstructionError("uniform_box: upper must exceed lower in every coordinate");
    }
    Density p;
    p.family_ = Family::UniformBox;
    p.box_lower_ = std::move(lower);
    p.box_upper_ = std::move(upper);
    p.mean_ = 0.5 * (p.box_lower_ + p.box_upper_);
    Vec side = p.box_upper_ - p.box_lower_;
    p.covariance_ = (side.array().square() / 12.0).matrix().asDiagonal();
    p.log_norm_ = -side.array().log().sum();
    return p;
}

Density Density::uniform_ball(Vec center, double radius) {
    if (radius <= 0.0) throw ConstructionError("uniform_ball: radius must be positive");
    Density p;
    p.family_ = Family::UniformBall;
    const int d = static_cast<int>(center.size());
    p.mean_ = std::move(center);
    p.ball_radius_ = radius;
    p.covariance_ = (radius * radius / (d + 2.0)) * Mat::Identity(d, d);
    p.log_norm_ = -log_ball_volume(d, radius);
    return p;
}

Density Density::product_exponential(Vec rate) {
    if ((rate.array() <= 0.0).any()) {
        throw ConstructionError("product_exponential: rates must be positive");
    }
    Density p;
    p.family_ = Family::ProductExponential;
    p.exp_rate_ = std::move(rate);
    p.mean_ = p.exp_rate_.array().inverse();
    p.covariance_ = p.exp_rate_.array().square().inverse().matrix().asDiagonal();
    p.log_norm_ = p.exp_rate_.array().log().sum();
    return p;
}

bool Density::in_support(const Vec& x) const {
    switch (family_) {
        case Family::Gaussian: return true;
        case Family::UniformBox:
            return (x.array() >= box_lower_.array()).all() &&
                   (x.array() <= box_upper_.array()).all();
        case Family::UniformBall: return (x - mean_).norm() <= ball_radius_;
        case Family::ProductExponential: return (x.array() >= 0.0).all();
    }
    return false;
}

double Density::log_density(const Vec& x) const {
    if (x.size() != mean_.size()) throw DimensionError("log_density: dimension mismatch");
    if (!in_support(x)) return kNegInf;
    switch (family_) {
        case Family::Gaussian: {
            const Vec r = x - mean_;
            return log_norm_ - 0.5 * r.dot(precision_ * r);
        }
        case Family::UniformBox:
        case Family::UniformBall:
            return log_norm_;
        case Family::ProductExponential:
            return log_norm_ - exp_rate_.dot(x);
    }
    return kNegInf;
}

Vec Density::sample(Rng& rng) const {
    const int d = dim();
    switch (family_) {
        case Family::Gaussian:
            return mean_ + chol_lower_ * rng.normal_vector(d);
        case Family::UniformBox: {
            Vec x(d);
            for (int i = 0; i < d; ++i) x[i] = rng.uniform(box_lower_[i], box_upper_[i]);
            return x;
        }
        case Family::UniformBall: {
            const Vec u = rng.on_sphere(d);
            const double r = ball_radius_ * std::pow(rng.uniform(), 1.0 / d);
            return mean_ + r * u;
        }
        case Family::ProductExponential: {
            Vec x(d);
            for (int i = 0; i < d; ++i) x[i] = rng.exponential(exp_rate_[i]);
            return x;
        }
    }
    throw Error("unreachable");
}

void AtomicMeasure::validate(double tol) const {
    if (points.rows() != weights.size()) {
        throw DimensionError("atomic measure: points/weights size mismatch");
    }
    if ((weights.array() < 0.0).any()) throw Error("atomic measure: negative weight");
    if (std::abs(weights.sum() - 1.0) > tol) {
        throw Error("atomic measure: weights do not sum to 1");
    }
}

TiltParams TiltParams::identity(int d) {
    return TiltParams{Vec::Zero(d), Mat::Zero(d, d), 0.0};
}

LogConcavityReport check_logconcavity(
    const std::function<double(const Vec&)>& log_density,
    const std::function<Vec(Rng&)>& sampler, int n_pairs,
    const std::vector<double>& lambda_grid, std::uint64_t seed, double tol) {
    if (n_pairs < 1) throw PreconditionError("check_logconcavity: n_pairs >= 1 required");
    for (double lambda : lambda_grid) {
        if (lambda < 0.0 || lambda > 1.0) {
            throw PreconditionError("check_logconcavity: lambda_grid must lie in [0,1]");
        }
    }
    Rng rng(seed);
    LogConcavityReport report;
    for (int k = 0; k < n_pairs; ++k) {
        const Vec x = sampler(rng);
        const Vec y = sampler(rng);
        const double lx = log_density(x);
        const double ly = log_density(y);
        for (double lambda : lambda_grid) {
            const Vec z = lambda * x + (1.0 - lambda) * y;
            const double lz = log_density(z);
            // log p(z) >= lambda log p(x) + (1-lambda) log p(y)
            const double violation = lambda * lx + (1.0 - lambda) * ly - lz;
            report.worst_violation = std::max(report.worst_violation, violation);
            ++report.pairs_checked;
        }
    }
    report.pass = report.worst_violation <= tol;
    return report;
}

LogConcavityReport check_logconcavity(const Density& density, int n_pairs,
                                      const std::vector<double>& lambda_grid,
                                      std::uint64_t seed, double tol) {
    return check_logconcavity(
        [&density](const Vec& x) { return density.log_density(x); },
        [&density](Rng& rng) { return density.sample(rng); }, n_pairs, lambda_grid,
        seed, tol);
}

AtomicMeasure sample_atomic(const Density& density, int n, std::uint64_t seed) {
    if (n < 1) throw PreconditionError("sample_atomic: n >= 1 required");
    Rng rng(seed);
    AtomicMeasure m;
    m.points.resize(n, density.dim());
    for (int i = 0; i < n; ++i) m.points.row(i) = density.sample(rng).transpose();
    m.weights = Vec::Constant(n, 1.0 / n);
    return m;
}

AtomicMeasure tilt_atomic(const AtomicMeasure& measure, const TiltParams& tilt) {
    const int d = measure.dim();
    if (tilt.c.size() != d || tilt.b.rows() != d || tilt.b.cols() != d) {
        throw DimensionError("tilt_atomic: tilt dimension mismatch");
    }
    const int n = measure.size();
    Vec log_w(n);
    const bool has_b = tilt.b.cwiseAbs().maxCoeff() > 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec x = measure.points.row(i).transpose();
        double lw = std::log(measure.weights[i]) + tilt.c.dot(x);
        if (has_b) lw -= 0.5 * x.dot(tilt.b * x);
        log_w[i] = lw;
    }
    double max_lw = kNegInf;
    for (int i = 0; i < n; ++i) {
        if (std::isfinite(log_w[i])) max_lw = std::max(max_lw, log_w[i]);
    }
    if (!std::isfinite(max_lw)) {
        throw DegenerateTiltError("tilt_atomic: all weights degenerate under the tilt");
    }
    Vec w = (log_w.array() - max_lw).exp();
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(w[i])) w[i] = 0.0;
    }
    const double total = w.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DegenerateTiltError("tilt_atomic: weight mass vanished under the tilt");
    }
    AtomicMeasure out;
    out.points = measure.points;
    out.weights = w / total;
    return out;
}

Density closed_form_gaussian_tilt(const Density& gaussian, const TiltParams& tilt) {
    if (gaussian.family() != Family::Gaussian) {
        throw PreconditionError("closed_form_gaussian_tilt: base must be gaussian");
    }
    const Mat precision = sym_inv(gaussian.covariance()) + symmetrize(tilt.b);
    const Mat cov = sym_inv(precision);
    const Vec mean =
        cov * (sym_inv(gaussian.covariance()) * gaussian.mean() + tilt.c);
    return Density::gaussian(mean, cov);
}

void mean_and_cov(const AtomicMeasure& measure, Vec& mean, Mat& cov) {
    const int d = measure.dim();
    mean = measure.points.transpose() * measure.weights;
    Mat centered = measure.points.rowwise() - mean.transpose();
    cov = centered.transpose() * measure.weights.asDiagonal() * centered;
    cov = symmetrize(cov);
    (void)d;
}

Moments moments_and_whiten(const AtomicMeasure& measure) {
    if (measure.size() < measure.dim() + 1) {
        throw PreconditionError(
            "moments_and_whiten: need at least d+1 atoms for covariance extraction");
    }
    Moments m;
    mean_and_cov(measure, m.mean, m.covariance);
    const Mat w = sym_inv_sqrt(m.covariance, 1e-12);
    m.whitened.points = (measure.points.rowwise() - m.mean.transpose()) * w;
    m.whitened.weights = measure.weights;
    return m;
}

void write_atoms_csv(std::ostream& out, const AtomicMeasure& measure) {
    const int d = measure.dim();
    out << "w";
    for (int j = 1; j <= d; ++j) out << ",x" << j;
    out << "\n";
    out.precision(17);
    for (int i = 0; i < measure.size(); ++i) {
        out << measure.weights[i];
        for (int j = 0; j < d; ++j) out << "," << measure.points(i, j);
        out << "\n";
    }
}

AtomicMeasure read_atoms_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("read_atoms_csv: empty stream");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("read_atoms_csv: no atoms");
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(rows.front().size()) - 1;
    AtomicMeasure m;
    m.points.resize(n, d);
    m.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != d + 1) {
            throw Error("read_atoms_csv: ragged row");
        }
        m.weights[i] = rows[i][0];
        for (int j = 0; j < d; ++j) m.points(i, j) = rows[i][j + 1];
    }
    return m;
}

}  // namespace klslab
