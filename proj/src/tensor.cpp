#include "klslab/tensor.hpp"

#include <cmath>
#include <iostream>

#include "klslab/errors.hpp"

namespace klslab {

namespace {

void require_square(const Mat& m, int d, const char* what) {
    if (m.rows() != d || m.cols() != d) {
        throw DimensionError(std::string(what) + ": argument dimension mismatch");
    }
}

void require_psd(const Mat& m, const char* what) {
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    if (min_eigenvalue_sym(m) < -1e-10 * scale) {
        throw PreconditionError(std::string(what) + ": argument is not PSD");
    }
}

Mat centered_points(const AtomicMeasure& measure) {
    const Vec mean = measure.points.transpose() * measure.weights;
    return measure.points.rowwise() - mean.transpose();
}

double three_tensor_naive(const Mat& xc, const Vec& w, const Mat& a_arg,
                          const Mat& b_arg, const Mat& c_arg) {
    const int n = static_cast<int>(xc.rows());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec xi = xc.row(i).transpose();
        const Vec ra = xc * (a_arg * xi);
        const Vec rb = xc * (b_arg * xi);
        const Vec rc = xc * (c_arg * xi);
        total += w[i] * (ra.array() * rb.array() * rc.array() * w.array()).sum();
    }
    return total;
}

double three_tensor_factored(const Mat& xc, const Vec& w, const Mat& a_arg,
                             const Mat& b_arg, const Mat& c_arg) {
    const int n = static_cast<int>(xc.rows());
    const int d = static_cast<int>(xc.cols());
    const SymEig c_eig = sym_eig(c_arg);
    double total = 0.0;
    for (int k = 0; k < d; ++k) {
        const double lambda = c_eig.values[k];
        if (lambda == 0.0) continue;
        const Vec proj = xc * c_eig.vectors.col(k);  // x_i' . v_k
        Mat m_k = Mat::Zero(d, d);
        for (int i = 0; i < n; ++i) {
            m_k.noalias() += (w[i] * proj[i]) * (xc.row(i).transpose() * xc.row(i));
        }
        total += lambda * (a_arg * m_k * b_arg * m_k).trace();
    }
    return total;
}

}  // namespace

double three_tensor(const AtomicMeasure& measure, const Mat& a_arg, const Mat& b_arg,
                    const Mat& c_arg, TensorMode mode, int pair_cap) {
    const int d = measure.dim();
    require_square(a_arg, d, "three_tensor");
    require_square(b_arg, d, "three_tensor");
    require_square(c_arg, d, "three_tensor");
    const Mat xc = centered_points(measure);
    const int n = measure.size();
    if (mode == TensorMode::Auto) {
        mode = n <= 512 ? TensorMode::Naive : TensorMode::Factored;
    }
    if (mode == TensorMode::Naive) {
        if (n > pair_cap) {
            throw PreconditionError(
                "three_tensor: cloud exceeds the pair-sum cap; subsample or use the "
                "factored route");
        }
        return three_tensor_naive(xc, measure.weights, a_arg, b_arg, c_arg);
    }
    return three_tensor_factored(xc, measure.weights, a_arg, b_arg, c_arg);
}

DeltaMatrix delta_matrix(const AtomicMeasure& whitened, Vec v, double isotropy_tol) {
    const int d = whitened.dim();
    if (v.size() != d) throw DimensionError("delta_matrix: direction dimension mismatch");
    Vec mean;
    Mat cov;
    mean_and_cov(whitened, mean, cov);
    if (spectral_norm_sym(cov - Mat::Identity(d, d)) > isotropy_tol) {
        throw PreconditionError("delta_matrix: measure is not isotropic within tolerance");
    }
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        std::cerr << "delta_matrix: normalizing non-unit direction (|v| = " << norm
                  << ")\n";
        v /= norm;
    }
    const Vec proj = whitened.points * v;
    Mat delta = Mat::Zero(d, d);
    for (int i = 0; i < whitened.size(); ++i) {
        delta.noalias() += (whitened.weights[i] * proj[i]) *
                           (whitened.points.row(i).transpose() * whitened.points.row(i));
    }
    return DeltaMatrix{symmetrize(delta), v};
}

TwoSidedCheck check_trace_inequality(const Mat& g, const Mat& f, double delta,
                                     double tol) {
    if (delta < 0.0 || delta > 1.0) {
        throw PreconditionError("check_trace_inequality: delta must lie in [0,1]");
    }
    require_square(f, static_cast<int>(g.rows()), "check_trace_inequality");
    require_psd(g, "check_trace_inequality");
    const SymEig eig = sym_eig(g);
    const Mat fs = symmetrize(f);
    auto power = [&eig](double p) {
        Vec lam(eig.values.size());
        for (int i = 0; i < lam.size(); ++i) lam[i] = std::pow(std::max(eig.values[i], 0.0), p);
        return Mat(eig.vectors * lam.asDiagonal() * eig.vectors.transpose());
    };
    const Mat g_d = power(delta);
    const Mat g_1d = power(1.0 - delta);
    const Mat g_full = power(1.0);
    TwoSidedCheck r;
    r.lhs = (g_d * fs * g_1d * fs).trace();
    r.rhs = (g_full * fs * fs).trace();
    r.pass = r.lhs <= r.rhs + tol * (1.0 + std::abs(r.rhs));
    return r;
}

namespace {

// E |X - mu|^c of a 1-d density by composite Simpson on [lo, hi], split at mu.
double abs_central_moment(const Density& p, double c) {
    const double mu = p.mean()[0];
    const double sigma = std::sqrt(p.covariance()(0, 0));
    double lo, hi;
    switch (p.family()) {
        case Family::Gaussian:
            lo = mu - 14.0 * sigma;
            hi = mu + 14.0 * sigma;
            break;
        case Family::UniformBox:
            lo = p.box_lower()[0];
            hi = p.box_upper()[0];
            break;
        case Family::UniformBall:
            lo = mu - p.ball_radius();
            hi = mu + p.ball_radius();
            break;
        case Family::ProductExponential:
            lo = 0.0;
            hi = mu + 60.0 * sigma;
            break;
        default:
            throw PreconditionError("abs_central_moment: unsupported family");
    }
    auto integrand = [&](double x) {
        Vec v(1);
        v[0] = x;
        const double ld = p.log_density(v);
        if (!std::isfinite(ld)) return 0.0;
        return std::pow(std::abs(x - mu), c) * std::exp(ld);
    };
    auto simpson = [&](double a, double b) {
        if (b <= a) return 0.0;
        const int n = 20000;  // even
        const double h = (b - a) / n;
        double s = integrand(a) + integrand(b);
        for (int i = 1; i < n; ++i) s += integrand(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    return simpson(lo, mu) + simpson(mu, hi);
}

}  // namespace

TwoSidedCheck check_moment_inequality(const Density& density_1d, double a, double b,
                                      double tol) {
    if (density_1d.dim() != 1) {
        throw PreconditionError("check_moment_inequality: density must be 1-d");
    }
    if (!(a >= b && b > 0.0)) {
        throw PreconditionError("check_moment_inequality: requires a >= b > 0");
    }
    TwoSidedCheck r;
    r.lhs = std::pow(abs_central_moment(density_1d, a), 1.0 / a);
    r.rhs = 2.0 * (a / b) * std::pow(abs_central_moment(density_1d, b), 1.0 / b);
    r.pass = r.lhs <= r.rhs + tol * (1.0 + r.rhs);
    return r;
}

TwoSidedCheck check_moment_inequality_samples(const AtomicMeasure& samples_1d,
                                              double a, double b) {
    if (samples_1d.dim() != 1) {
        throw PreconditionError("check_moment_inequality_samples: 1-d samples required");
    }
    if (!(a >= b && b > 0.0)) {
        throw PreconditionError("check_moment_inequality_samples: requires a >= b > 0");
    }
    const double mu = samples_1d.points.col(0).dot(samples_1d.weights);
    const Eigen::ArrayXd dev = (samples_1d.points.col(0).array() - mu).abs();
    TwoSidedCheck r;
    r.lhs = std::pow((dev.pow(a) * samples_1d.weights.array()).sum(), 1.0 / a);
    r.rhs = 2.0 * (a / b) *
            std::pow((dev.pow(b) * samples_1d.weights.array()).sum(), 1.0 / b);
    r.pass = r.lhs <= r.rhs;
    return r;
}

CheckResult check_tensor_vector_bound(const AtomicMeasure& measure, const Mat& b_arg,
                                      const Mat& c_arg, double slack) {
    require_psd(b_arg, "check_tensor_vector_bound");
    require_psd(c_arg, "check_tensor_vector_bound");
    Vec mean;
    Mat cov;
    mean_and_cov(measure, mean, cov);
    const Mat xc = measure.points.rowwise() - mean.transpose();
    const Vec quad = ((xc * c_arg).array() * xc.array()).rowwise().sum();
    const Vec s = xc.transpose() * (measure.weights.array() * quad.array()).matrix();
    const Mat a_half = sym_sqrt(cov);
    CheckResult r;
    r.check = "tensor_vector_bound";
    r.lhs = (sym_sqrt(b_arg) * s).norm();
    r.rhs = 16.0 * std::sqrt(spectral_norm_sym(a_half * b_arg * a_half)) *
            (a_half * c_arg * a_half).trace();
    r.slack = slack;
    r.status = r.lhs <= r.rhs * slack ? Status::Pass : Status::Flag;
    if (r.status == Status::Flag) r.violations = 1;
    return r;
}

TwoSidedCheck check_tensor_swap(const AtomicMeasure& measure, const Mat& a_arg,
                                const Mat& b_arg, const Mat& c_arg, double delta,
                                double rel_tol) {
    if (delta < 0.0 || delta > 1.0) {
        throw PreconditionError("check_tensor_swap: delta must lie in [0,1]");
    }
    require_psd(a_arg, "check_tensor_swap");
    require_psd(b_arg, "check_tensor_swap");
    require_psd(c_arg, "check_tensor_swap");
    const Mat b_half = sym_sqrt(b_arg);
    const Mat lhs_first = symmetrize(b_half * sym_power(a_arg, delta) * b_half);
    const Mat lhs_second = symmetrize(b_half * sym_power(a_arg, 1.0 - delta) * b_half);
    const Mat rhs_first = symmetrize(b_half * symmetrize(a_arg) * b_half);
    TwoSidedCheck r;
    r.lhs = three_tensor(measure, lhs_first, lhs_second, c_arg);
    r.rhs = three_tensor(measure, rhs_first, b_arg, c_arg);
    r.pass = r.lhs <= r.rhs + rel_tol * (1.0 + std::abs(r.rhs));
    return r;
}

CheckResult check_tensor_isoperimetric(const AtomicMeasure& measure, int q,
                                       double alpha, double beta, double slack) {
    if (q < 1.0 / (2.0 * beta)) {
        throw PreconditionError("check_tensor_isoperimetric: requires q >= 1/(2 beta)");
    }
    const int d = measure.dim();
    Vec mean;
    Mat cov;
    mean_and_cov(measure, mean, cov);
    CheckResult r;
    r.check = "tensor_isoperimetric";
    r.lhs = three_tensor(measure, sym_power(cov, q - 2), Mat::Identity(d, d),
                         Mat::Identity(d, d), TensorMode::Factored);
    const double trace_aq = sym_power(cov, q).trace();
    r.rhs = 128.0 * alpha * alpha * std::log(static_cast<double>(d)) *
            std::pow(static_cast<double>(d), 2.0 * beta - 1.0 / q) *
            std::pow(trace_aq, 1.0 + 1.0 / q);
    r.slack = slack;
    r.status = r.lhs <= r.rhs * slack ? Status::Pass : Status::Flag;
    if (r.status == Status::Flag) r.violations = 1;
    return r;
}

CheckResult check_tensor_strong_logconcave(const AtomicMeasure& measure, double tau,
                                           int q, double slack) {
    if (q < 3) {
        throw PreconditionError("check_tensor_strong_logconcave: requires q >= 3");
    }
    const int d = measure.dim();
    Vec mean;
    Mat cov;
    mean_and_cov(measure, mean, cov);
    CheckResult r;
    r.check = "tensor_strong_logconcave";
    r.lhs = three_tensor(measure, sym_power(cov, q - 2), Mat::Identity(d, d),
                         Mat::Identity(d, d), TensorMode::Factored);
    r.rhs = 4.0 / tau * sym_power(cov, q).trace();
    r.slack = slack;
    r.status = r.lhs <= r.rhs * slack ? Status::Pass : Status::Flag;
    if (r.status == Status::Flag) r.violations = 1;
    return r;
}

CheckResult check_trace_delta_projection(const AtomicMeasure& whitened, const Vec& v,
                                         const Mat& projection, int rank, double alpha,
                                         double beta, double slack) {
    const int d = whitened.dim();
    require_square(projection, d, "check_trace_delta_projection");
    if (spectral_norm_sym(projection * projection - projection) > 1e-10) {
        throw PreconditionError(
            "check_trace_delta_projection: argument is not an orthogonal projection");
    }
    const DeltaMatrix dm = delta_matrix(whitened, v);
    CheckResult r;
    r.check = "trace_delta_projection";
    r.lhs = (dm.delta * projection * dm.delta).trace();
    const double k = std::min(2.0 * rank, static_cast<double>(d));
    // psi_k = 1/(alpha k^beta)  =>  16 psi_k^{-2} = 16 alpha^2 k^{2 beta}
    r.rhs = 16.0 * alpha * alpha * std::pow(k, 2.0 * beta);
    r.slack = slack;
    r.status = r.lhs <= r.rhs * slack ? Status::Pass : Status::Flag;
    if (r.status == Status::Flag) r.violations = 1;
    return r;
}

CheckResult check_trace_delta_psd(const AtomicMeasure& whitened, const Vec& v,
                                  const Mat& psd_arg, double alpha, double beta,
                                  double slack) {
    const int d = whitened.dim();
    require_square(psd_arg, d, "check_trace_delta_psd");
    require_psd(psd_arg, "check_trace_delta_psd");
    const DeltaMatrix dm = delta_matrix(whitened, v);
    CheckResult r;
    r.check = "trace_delta_psd";
    r.lhs = (dm.delta * psd_arg * dm.delta).trace();
    r.rhs = 128.0 * alpha * alpha * std::log(static_cast<double>(d)) *
            std::pow(sym_power(psd_arg, 1.0 / (2.0 * beta)).trace(), 2.0 * beta);
    r.slack = slack;
    r.status = r.lhs <= r.rhs * slack ? Status::Pass : Status::Flag;
    if (r.status == Status::Flag) r.violations = 1;
    return r;
}

}  // namespace klslab
