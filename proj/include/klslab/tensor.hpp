#pragma once

#include <vector>

#include "klslab/linalg.hpp"
#include "klslab/measures.hpp"
#include "klslab/report.hpp"

namespace klslab {

// Evaluation route for the 3-tensor
//   T(A,B,C) = sum_{i,j} w_i w_j (x_i'.A.x_j')(x_i'.B.x_j')(x_i'.C.x_j')
// on centered atoms x' = x - mu. Naive is the O(n^2 d) double sum; Factored
// eigendecomposes C = sum_k l_k v_k v_k^T and uses
//   T = sum_k l_k tr(A M_k B M_k),  M_k = sum_i w_i (x_i'.v_k) x_i' x_i'^T,
// which is algebraically identical and O(n d^3). Auto picks Naive for small
// clouds and Factored otherwise.
enum class TensorMode { Auto, Naive, Factored };

inline constexpr int kPairSumCap = 4000;

double three_tensor(const AtomicMeasure& measure, const Mat& a_arg, const Mat& b_arg,
                    const Mat& c_arg, TensorMode mode = TensorMode::Auto,
                    int pair_cap = kPairSumCap);

struct DeltaMatrix {
    Mat delta;      // sum_i w_i (x_i . v) x_i x_i^T on the isotropic cloud
    Vec direction;  // unit vector
};

DeltaMatrix delta_matrix(const AtomicMeasure& whitened, Vec v,
                         double isotropy_tol = 0.05);

struct TwoSidedCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
};

// tr(G^delta F G^(1-delta) F) <= tr(G F^2); exact linear algebra, hard gate.
TwoSidedCheck check_trace_inequality(const Mat& g, const Mat& f, double delta,
                                     double tol = 1e-10);

// Centered absolute moment norms L_c = (E|X-mu|^c)^(1/c) of a 1-d density;
// asserts L_a <= 2 (a/b) L_b.
TwoSidedCheck check_moment_inequality(const Density& density_1d, double a, double b,
                                      double tol = 1e-6);
TwoSidedCheck check_moment_inequality_samples(const AtomicMeasure& samples_1d,
                                              double a, double b);

// statistical checks (log-concavity only approximate on atoms): flag, not fail
CheckResult check_tensor_vector_bound(const AtomicMeasure& measure, const Mat& b_arg,
                                      const Mat& c_arg, double slack = 1.1);

// hard gate: holds for any centered atomic measure
TwoSidedCheck check_tensor_swap(const AtomicMeasure& measure, const Mat& a_arg,
                                const Mat& b_arg, const Mat& c_arg, double delta,
                                double rel_tol = 1e-9);

CheckResult check_tensor_isoperimetric(const AtomicMeasure& measure, int q,
                                       double alpha, double beta,
                                       double slack = 1.1);

CheckResult check_tensor_strong_logconcave(const AtomicMeasure& measure, double tau,
                                           int q, double slack = 1.1);

// Lemma-3.5-style bounds with psi_k = 1/(alpha k^beta)
CheckResult check_trace_delta_projection(const AtomicMeasure& whitened, const Vec& v,
                                         const Mat& projection, int rank,
                                         double alpha = 4.0, double beta = 0.5,
                                         double slack = 1.1);
CheckResult check_trace_delta_psd(const AtomicMeasure& whitened, const Vec& v,
                                  const Mat& psd_arg, double alpha = 4.0,
                                  double beta = 0.5, double slack = 1.1);

}  // namespace klslab
