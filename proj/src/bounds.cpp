#include "klslab/bounds.hpp"

#include <cmath>
#include <ostream>

#include "klslab/errors.hpp"

namespace klslab {

double kls_original_bound(const Mat& a) {
    if (!is_spd(a)) throw PreconditionError("kls_original_bound: A must be SPD");
    return std::log(2.0) / std::sqrt(a.trace());
}

double lee_vempala_bound(const Mat& a, double c_lv) {
    if (!is_spd(a)) throw PreconditionError("lee_vempala_bound: A must be SPD");
    if (c_lv <= 0.0) throw PreconditionError("lee_vempala_bound: c_lv > 0 required");
    return c_lv * std::pow((a * a).trace(), -0.25);
}

namespace {

// log of the bound; safe at any ell
double log_main_theorem_bound(double d, int ell, double c, double spec_norm) {
    const double log_d = std::log(d);
    return -0.5 * ell * std::log(c * ell * (log_d + 1.0)) - (16.0 / ell) * log_d -
           0.5 * std::log(spec_norm);
}

}  // namespace

double main_theorem_bound(double d, int ell, double c, double spec_norm) {
    if (d < 1.0 || ell < 1) throw PreconditionError("main_theorem_bound: d, ell >= 1");
    if (c <= 0.0 || spec_norm <= 0.0) {
        throw PreconditionError("main_theorem_bound: c, spec_norm > 0 required");
    }
    return std::exp(log_main_theorem_bound(d, ell, c, spec_norm));
}

OptimalEll optimal_ell(double d, double c) {
    if (d < 16.0) throw PreconditionError("optimal_ell: d >= 16 required");
    const double log_d = std::log(d);
    OptimalEll out;
    out.formula_ell = static_cast<int>(std::ceil(std::sqrt(log_d / std::log(log_d))));
    double best = -1e300;
    for (int ell = 1; ell <= 10 * out.formula_ell; ++ell) {
        const double value = log_main_theorem_bound(d, ell, c, 1.0);
        if (value > best) {
            best = value;
            out.scan_ell = ell;
        }
    }
    out.exponent = log_main_theorem_bound(d, out.formula_ell, c, 1.0) / log_d;
    return out;
}

RecursionSequences recursion_sequences(int ell_max, double c) {
    if (ell_max < 1) throw PreconditionError("recursion_sequences: ell_max >= 1");
    if (c <= 0.0) throw PreconditionError("recursion_sequences: c > 0 required");
    RecursionSequences out;
    out.beta.reserve(ell_max);
    out.log_alpha.reserve(ell_max);
    double beta = 0.5;
    double log_alpha = std::log(4.0);
    for (int ell = 1; ell <= ell_max; ++ell) {
        out.beta.push_back(beta);
        out.log_alpha.push_back(log_alpha);
        const bool ok = beta >= 1.0 / (ell + 1.0) && beta <= 16.0 / ell &&
                        log_alpha <= 0.5 * ell * std::log(4.0 * c * c * ell) + 1e-12;
        if (!ok && out.first_violation == 0) {
            out.bounds_hold = false;
            out.first_violation = ell;
        }
        log_alpha += std::log(2.0 * c) - 0.5 * std::log(beta);
        beta -= beta * beta / 16.0;
    }
    return out;
}

TimeConstants time_constants(double d, double alpha, double beta) {
    if (alpha < 1.0) throw PreconditionError("time_constants: alpha >= 1 required");
    if (!(beta > 0.0 && beta <= 0.5)) {
        throw PreconditionError("time_constants: beta in (0, 1/2] required");
    }
    TimeConstants out;
    out.small_dimension = d < 3.0;
    out.q = static_cast<int>(std::ceil(1.0 / beta)) + 1;
    const double log_d = std::log(d);
    out.t1 = 1.0 / (32768.0 * out.q * alpha * alpha * log_d * std::pow(d, 2.0 * beta));
    out.t2 = std::pow(d, beta / (4.0 * out.q)) / 40.0 * out.t1;
    out.identity_residual =
        std::abs(out.t2 * 1310720.0 * out.q * alpha * alpha * log_d *
                     std::pow(d, 2.0 * beta - beta / (4.0 * out.q)) -
                 1.0);
    return out;
}

ComparisonTable comparison_table(const std::vector<double>& d_list, double c,
                                 double c_lv) {
    if (d_list.empty()) throw PreconditionError("comparison_table: empty d list");
    ComparisonTable table;
    table.c = c;
    table.c_lv = c_lv;
    for (double d : d_list) {
        ComparisonRow row;
        row.d = d;
        row.kls_original = std::log(2.0) / std::sqrt(d);
        row.lee_vempala = c_lv * std::pow(d, -0.25);
        if (d >= 16.0) {
            const OptimalEll opt = optimal_ell(d, c);
            row.ell_star = opt.scan_ell;
            row.exponent = opt.exponent;
            row.main_thm = main_theorem_bound(d, opt.scan_ell, c, 1.0);
        } else {
            row.ell_star = 1;
            row.main_thm = main_theorem_bound(d, 1, c, 1.0);
            row.exponent = std::log(row.main_thm) / std::log(d);
        }
        if (table.crossover_d == 0.0 && row.main_thm > row.lee_vempala) {
            row.crossover = true;
            table.crossover_d = d;
        }
        table.rows.push_back(row);
    }
    // the crossover against c_lv d^{-1/4} sits far beyond double range of d
    // (log d ~ thousands for c = c_lv = 1), so scan log d directly
    for (double log_d = 3.0; log_d <= 1e6; log_d *= 1.02) {
        double best = 1e300;
        const int ell_hi =
            std::max(4, static_cast<int>(4.0 * std::sqrt(log_d)));
        for (int ell = 1; ell <= ell_hi; ++ell) {
            best = std::min(best, 0.5 * ell * std::log(c * ell * (log_d + 1.0)) +
                                      (16.0 / ell) * log_d);
        }
        if (best < 0.25 * log_d - std::log(c_lv)) {
            table.crossover_log_d = log_d;
            break;
        }
    }
    return table;
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
    out << "d,kls_original,lee_vempala,main_thm,ell_star,exponent\n";
    out.precision(17);
    for (const ComparisonRow& row : table.rows) {
        out << row.d << ',' << row.kls_original << ',' << row.lee_vempala << ','
            << row.main_thm << ',' << row.ell_star << ',' << row.exponent << '\n';
    }
}

void write_comparison_sidecar(std::ostream& out, const ComparisonTable& table) {
    out.precision(17);
    out << "{\"c\": " << table.c << ", \"c_lv\": " << table.c_lv
        << ", \"crossover_d\": " << table.crossover_d
        << ", \"crossover_log_d\": " << table.crossover_log_d
        << ", \"log_convention\": \"natural\"}\n";
}

}  // namespace klslab
