#pragma once

#include <iosfwd>
#include <vector>

#include "klslab/linalg.hpp"

namespace klslab {

struct BoundParams {
    double alpha = 4.0;  // >= 1
    double beta = 0.5;   // in (0, 1/2]
    int ell = 1;
    int q = 3;  // ceil(1/beta) + 1 when derived from beta
    double c = 1.0;
    int d = 1;
};

// log(2) / sqrt(tr A)
double kls_original_bound(const Mat& a);

// c_lv / (tr A^2)^{1/4}
double lee_vempala_bound(const Mat& a, double c_lv = 1.0);

// 1 / ([c l (log d + 1)]^{l/2} d^{16/l} sqrt(spec_norm)), evaluated in log space
double main_theorem_bound(double d, int ell, double c, double spec_norm);

struct OptimalEll {
    int formula_ell = 1;  // ceil sqrt(log d / log log d)
    int scan_ell = 1;     // argmax of the bound over ell in [1, 10 * formula_ell]
    double exponent = 0.0;  // achieved exponent of d at formula_ell (negative)
};

OptimalEll optimal_ell(double d, double c = 1.0);

struct RecursionSequences {
    std::vector<double> beta;       // beta[l-1] = beta_l
    std::vector<double> log_alpha;  // log_alpha[l-1] = log alpha_l
    bool bounds_hold = true;        // 1/(l+1) <= beta_l <= 16/l and the alpha bound
    int first_violation = 0;        // l of the first violated bound, 0 if none
};

// alpha_{l+1} = 2c alpha_l beta_l^{-1/2}, beta_{l+1} = beta_l - beta_l^2/16,
// alpha_1 = 4, beta_1 = 1/2; alpha in log space.
RecursionSequences recursion_sequences(int ell_max, double c);

struct TimeConstants {
    int q = 0;
    double t1 = 0.0;
    double t2 = 0.0;
    double identity_residual = 0.0;  // |t2 * 1310720 q a^2 log(d) d^(2b - b/(4q)) - 1|
    bool small_dimension = false;    // d < 3 regime flag
};

TimeConstants time_constants(double d, double alpha, double beta);

struct ComparisonRow {
    double d = 0.0;
    double kls_original = 0.0;  // log2 / sqrt(d), isotropic
    double lee_vempala = 0.0;   // c_lv d^{-1/4}
    double main_thm = 0.0;      // at the scan-optimal ell
    int ell_star = 0;
    double exponent = 0.0;
    bool crossover = false;  // first d where main_thm beats lee_vempala
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    double c = 1.0;
    double c_lv = 1.0;
    double crossover_d = 0.0;      // 0 when no crossover within the list
    double crossover_log_d = 0.0;  // log-space scan beyond the list; 0 if none found
};

ComparisonTable comparison_table(const std::vector<double>& d_list, double c = 1.0,
                                 double c_lv = 1.0);

// CSV: d,kls_original,lee_vempala,main_thm,ell_star,exponent
void write_comparison_csv(std::ostream& out, const ComparisonTable& table);
// constants echo: {"c": ..., "c_lv": ..., "crossover_d": ..., "log_convention": "natural"}
void write_comparison_sidecar(std::ostream& out, const ComparisonTable& table);

}  // namespace klslab
