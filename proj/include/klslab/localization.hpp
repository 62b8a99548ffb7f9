#pragma once

#include <memory>
#include <vector>

#include "klslab/linalg.hpp"
#include "klslab/measures.hpp"
#include "klslab/report.hpp"
#include "klslab/tensor.hpp"

namespace klslab {

struct NoisePath {
    double dt = 0.0;
    Mat increments;  // steps x d, rows are Wiener increments ~ N(0, dt I)
    std::uint64_t seed = 0;
};

NoisePath generate_noise_path(int d, int steps, double dt, std::uint64_t seed);

// Immutable per-trajectory data shared by all states of one localization run:
// base atoms, base covariance A and its inverse/inverse square root, and the
// per-atom quadratic forms x_i^T A^{-1} x_i entering the tilt weights.
struct LocalizerCore {
    AtomicMeasure base;
    int q = 2;
    Mat cov;       // A
    Mat inv;       // A^{-1}
    Mat inv_sqrt;  // A^{-1/2}
    Vec log_w0;
    Vec quad;      // x_i^T A^{-1} x_i
    Mat whitened_points;  // x_i^T A^{-1/2} rows (uncentered)
};

struct LocalizationState {
    std::shared_ptr<const LocalizerCore> core;
    double t = 0.0;
    TiltParams tilt;  // b is t * A^{-1} throughout
    AtomicMeasure current;
    Vec mu;
    Mat cov;       // A_t
    Mat q_matrix;  // Q_t = A^{-1/2} A_t A^{-1/2}
    double gamma = 0.0;

    int q() const { return core->q; }
    int dim() const { return core->base.dim(); }
    const AtomicMeasure& base() const { return core->base; }
};

// t = 0, identity tilt, Q_0 = I, Gamma_0 = d.
LocalizationState init_state(const AtomicMeasure& base, int q);

// c += A^{-1/2} dW + A^{-1} mu_t dt; B += A^{-1} dt; full recompute.
LocalizationState euler_step(const LocalizationState& state, const Vec& d_w, double dt);

struct SubsetProcess {
    double g = 0.0;        // p_t(E)
    double qv_rate = 0.0;  // |sum_{i in E} w_i A^{-1/2}(x_i - mu_t)|^2
};

// Throws on violation of the Cauchy-Schwarz bound qv_rate <= |Q_t|_2 + 1e-9,
// which is exact on atoms.
SubsetProcess subset_process(const LocalizationState& state,
                             const std::vector<int>& members);

struct PathRecord {
    double t = 0.0;
    double gamma = 0.0;
    double spec_q = 0.0;
    double g_e = 0.0;
    double qv_rate = 0.0;
    double v_norm = 0.0;
    double delta = 0.0;
    Vec mu;
    Mat cov;
};

struct SimulateOptions {
    int record_every = 1;
    std::vector<int> subset;   // empty disables subset tracking
    bool drift_terms = false;  // evaluate (v_t, delta_t) at record points
};

struct PathResult {
    std::vector<PathRecord> records;
    LocalizationState final_state;
    double qv_accum = 0.0;    // accumulated [g]_t (per-step rate * dt)
    double int_spec_q = 0.0;  // integral of |Q_s|_2 ds at record granularity
};

PathResult simulate_path(const AtomicMeasure& base, int q, double T, double dt,
                         std::uint64_t seed, const SimulateOptions& options = {});

struct DriftDiffusion {
    Vec v;
    double delta = 0.0;
};

// Ito terms of dGamma_t = v_t . dW_t + delta_t dt, exact on atoms.
DriftDiffusion gamma_drift_terms(const LocalizationState& state,
                                 TensorMode mode = TensorMode::Auto,
                                 int pair_cap = kPairSumCap);

struct MartingaleReport {
    CheckResult subset;      // ensemble mean of g_T against g_0
    double max_atom_z = 0.0; // worst per-atom weight martingale z-score
    int n_paths = 0;
    bool pass = true;
};

MartingaleReport check_martingale(const AtomicMeasure& base, int q,
                                  const std::vector<int>& subset, int n_paths,
                                  double T, double dt, std::uint64_t master_seed);

struct DriftDominationReport {
    CheckResult drift;       // ensemble mean of (A_{t+dt}-A_t)/dt + A_t A^{-1} A_t
    CheckResult domination;  // pointwise lambda_min(A/t - A_t) >= -tol
};

DriftDominationReport check_cov_drift_and_domination(const AtomicMeasure& base, int q,
                                                     double T, double dt, int n_paths,
                                                     std::uint64_t master_seed);

struct DriftBoundsReport {
    CheckResult v_bound;      // |v_t| <= 16 q Gamma^(1+1/(2q))
    CheckResult delta_bound;  // delta_t <= min(...) of the two arms
};

DriftBoundsReport check_drift_bounds(const LocalizationState& state, double alpha,
                                     double beta, double slack = 1.1);

struct PotentialReport {
    CheckResult excursion;  // h-excursion fraction over [0, T_1] vs the 3/10 ceiling
    std::vector<CheckResult> f_growth;  // E f(Gamma_t2) <= E f(Gamma_t1) (t2/t1)^(2q)
};

PotentialReport check_potential_lemmas(const AtomicMeasure& base, int q, double alpha,
                                       double beta, int n_paths, double T, double dt,
                                       std::uint64_t master_seed,
                                       const std::vector<double>& t_grid);

}  // namespace klslab
