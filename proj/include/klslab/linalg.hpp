#pragma once

#include <Eigen/Dense>

#include "klslab/rng.hpp"

namespace klslab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct SymEig {
    Vec values;   // ascending
    Mat vectors;  // columns
};

SymEig sym_eig(const Mat& m);

Mat symmetrize(const Mat& m);

// V diag(max(lambda, 0)^p) V^T; p == 0 returns the identity.
Mat sym_power(const Mat& m, double p);

Mat sym_sqrt(const Mat& m);

// Throws DegenerateCovarianceError when lambda_min <= tol.
Mat sym_inv_sqrt(const Mat& m, double tol = 1e-12);
Mat sym_inv(const Mat& m, double tol = 1e-12);

double spectral_norm_sym(const Mat& m);
double min_eigenvalue_sym(const Mat& m);

bool is_spd(const Mat& m, double tol = 1e-10);

// Random symmetric matrix with independent N(0,1) entries (symmetrized).
Mat random_symmetric(Rng& rng, int d);

// Random SPD matrix with eigenvalues uniform in [lo, hi] and Haar-ish basis.
Mat random_spd(Rng& rng, int d, double lo = 0.1, double hi = 2.0);

}  // namespace klslab
