#include "klslab/linalg.hpp"

#include <cmath>

#include "klslab/errors.hpp"

namespace klslab {

SymEig sym_eig(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(symmetrize(m));
    if (solver.info() != Eigen::Success) {
        throw Error("symmetric eigendecomposition failed");
    }
    return SymEig{solver.eigenvalues(), solver.eigenvectors()};
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

Mat sym_power(const Mat& m, double p) {
    if (p == 0.0) return Mat::Identity(m.rows(), m.cols());
    if (p == 1.0) return symmetrize(m);
    const SymEig eig = sym_eig(m);
    Vec powered(eig.values.size());
    for (int i = 0; i < eig.values.size(); ++i) {
        const double lambda = std::max(eig.values[i], 0.0);
        powered[i] = std::pow(lambda, p);
    }
    return eig.vectors * powered.asDiagonal() * eig.vectors.transpose();
}

Mat sym_sqrt(const Mat& m) { return sym_power(m, 0.5); }

Mat sym_inv_sqrt(const Mat& m, double tol) {
    const SymEig eig = sym_eig(m);
    if (eig.values.minCoeff() <= tol) {
        throw DegenerateCovarianceError("matrix is numerically singular (lambda_min <= tol)");
    }
    Vec inv_sqrt = eig.values.array().rsqrt();
    return eig.vectors * inv_sqrt.asDiagonal() * eig.vectors.transpose();
}

Mat sym_inv(const Mat& m, double tol) {
    const SymEig eig = sym_eig(m);
    if (eig.values.minCoeff() <= tol) {
        throw DegenerateCovarianceError("matrix is numerically singular (lambda_min <= tol)");
    }
    Vec inv = eig.values.array().inverse();
    return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

double spectral_norm_sym(const Mat& m) {
    const SymEig eig = sym_eig(m);
    return eig.values.array().abs().maxCoeff();
}

double min_eigenvalue_sym(const Mat& m) { return sym_eig(m).values.minCoeff(); }

bool is_spd(const Mat& m, double tol) {
    if (m.rows() != m.cols()) return false;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + m.cwiseAbs().maxCoeff())) {
        return false;
    }
    return min_eigenvalue_sym(m) > tol;
}

Mat random_symmetric(Rng& rng, int d) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
    return symmetrize(m);
}

Mat random_spd(Rng& rng, int d, double lo, double hi) {
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Vec lambda(d);
    for (int i = 0; i < d; ++i) lambda[i] = rng.uniform(lo, hi);
    return symmetrize(q * lambda.asDiagonal() * q.transpose());
}

}  // namespace klslab
