#include <doctest.h>

#include <cmath>
#include <sstream>

#include "klslab/bounds.hpp"
#include "klslab/errors.hpp"

using namespace klslab;

TEST_CASE("classical bound values") {
    CHECK(kls_original_bound(Mat::Identity(4, 4)) ==
          doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-14));
    CHECK(kls_original_bound(Mat::Identity(1, 1)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));

    CHECK(lee_vempala_bound(Mat::Identity(2, 2) * 2.0) ==
          doctest::Approx(std::pow(8.0, -0.25)).epsilon(1e-14));
    CHECK(lee_vempala_bound(Mat::Identity(16, 16), 1.0) ==
          doctest::Approx(0.5).epsilon(1e-14));

    Mat indef = Mat::Identity(2, 2);
    indef(1, 1) = -1.0;
    CHECK_THROWS_AS(kls_original_bound(indef), PreconditionError);
    CHECK_THROWS_AS(lee_vempala_bound(indef), PreconditionError);
    CHECK_THROWS_AS(lee_vempala_bound(Mat::Identity(2, 2), 0.0), PreconditionError);
}

TEST_CASE("main theorem bound in log space") {
    // log d = 0 kills every factor
    CHECK(main_theorem_bound(1.0, 1, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    // log-space route agrees with the direct product where it is representable
    const double d = 1e4, c = 1.5, spec = 2.0;
    const int ell = 3;
    const double naive = 1.0 / (std::pow(c * ell * (std::log(d) + 1.0), ell / 2.0) *
                                std::pow(d, 16.0 / ell) * std::sqrt(spec));
    CHECK(main_theorem_bound(d, ell, c, spec) == doctest::Approx(naive).epsilon(1e-12));

    // sub-unit for isotropic inputs with c >= 1
    for (double dd : {16.0, 1e3, 1e9, 1e30}) {
        for (int l : {1, 2, 5, 20}) {
            CHECK(main_theorem_bound(dd, l, 1.0, 1.0) <= 1.0);
        }
    }

    // ||A|| scaling enters as an inverse square root
    CHECK(main_theorem_bound(100.0, 2, 1.0, 4.0) ==
          doctest::Approx(0.5 * main_theorem_bound(100.0, 2, 1.0, 1.0)).epsilon(1e-12));

    CHECK_THROWS_AS(main_theorem_bound(0.5, 1, 1.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(main_theorem_bound(10.0, 0, 1.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(main_theorem_bound(10.0, 1, -1.0, 1.0), PreconditionError);
}

TEST_CASE("optimal ell formula values") {
    // log(1e6) = 13.8155, log log = 2.6257, sqrt of ratio = 2.2938 -> ceil 3
    CHECK(optimal_ell(1e6).formula_ell == 3);
    // d = e^100: sqrt(100 / log(100)) = 4.660 -> ceil 5
    CHECK(optimal_ell(std::exp(100.0)).formula_ell == 5);
    CHECK_THROWS_AS(optimal_ell(15.0), PreconditionError);

    // achieved exponent is negative and decays in magnitude as d grows
    double prev = -1e300;
    for (double exp10 = 3.0; exp10 <= 30.0; exp10 += 3.0) {
        const OptimalEll opt = optimal_ell(std::pow(10.0, exp10));
        CHECK(opt.exponent < 0.0);
        CHECK(opt.exponent > prev);
        prev = opt.exponent;
    }

    // the scan argmax genuinely maximizes over [1, 10 formula_ell]
    const OptimalEll opt = optimal_ell(1e12);
    const double at_scan = main_theorem_bound(1e12, opt.scan_ell, 1.0, 1.0);
    for (int l = 1; l <= 10 * opt.formula_ell; ++l) {
        CHECK(main_theorem_bound(1e12, l, 1.0, 1.0) <= at_scan * (1.0 + 1e-12));
    }
}

TEST_CASE("recursion sequences") {
    const RecursionSequences seq = recursion_sequences(10000, 1.0);
    REQUIRE(seq.beta.size() == 10000);

    CHECK(seq.beta[0] == 0.5);
    CHECK(seq.log_alpha[0] == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    CHECK(seq.beta[1] == 31.0 / 64.0);  // exact in binary arithmetic
    CHECK(seq.log_alpha[1] ==
          doctest::Approx(std::log(8.0 * std::sqrt(2.0))).epsilon(1e-14));

    // beta envelope holds everywhere
    for (int ell = 1; ell <= 10000; ++ell) {
        const double b = seq.beta[ell - 1];
        CHECK(b >= 1.0 / (ell + 1.0));
        CHECK(b <= 16.0 / ell);
    }

    // with c = 1 the alpha envelope fails at ell = 1 (4 > 2) and ell = 2
    // (8 sqrt 2 > 8): the paper's constant there is at least 2
    CHECK_FALSE(seq.bounds_hold);
    CHECK(seq.first_violation == 1);
    for (int ell = 3; ell <= 10000; ++ell) {
        CHECK(seq.log_alpha[ell - 1] <= 0.5 * ell * std::log(4.0 * ell) + 1e-12);
    }

    // c = 2 makes ell = 1 an equality and the whole envelope holds
    const RecursionSequences wide = recursion_sequences(10000, 2.0);
    CHECK(wide.bounds_hold);
    CHECK(wide.first_violation == 0);

    CHECK_THROWS_AS(recursion_sequences(0, 1.0), PreconditionError);
    CHECK_THROWS_AS(recursion_sequences(10, 0.0), PreconditionError);
}

TEST_CASE("time constants") {
    const TimeConstants tc = time_constants(100.0, 4.0, 0.5);
    CHECK(tc.q == 3);
    const double t1_oracle = 1.0 / (32768.0 * 3 * 16.0 * std::log(100.0) * 100.0);
    CHECK(tc.t1 == doctest::Approx(t1_oracle).epsilon(1e-14));
    CHECK(tc.t1 == doctest::Approx(1.381e-9).epsilon(2e-3));
    CHECK(tc.t2 == doctest::Approx(std::pow(100.0, 1.0 / 24.0) / 40.0 * t1_oracle)
                       .epsilon(1e-14));
    CHECK(tc.identity_residual < 1e-12);
    CHECK_FALSE(tc.small_dimension);

    CHECK(time_constants(2.0, 4.0, 0.5).small_dimension);
    CHECK(time_constants(100.0, 1.0, 0.4).q == 4);  // ceil(2.5) + 1

    Rng rng(55);
    for (int i = 0; i < 20; ++i) {
        const double d = 3.0 + rng.below(1000);
        const double alpha = 1.0 + 9.0 * rng.uniform();
        const double beta = 0.05 + 0.45 * rng.uniform();
        CHECK(time_constants(d, alpha, beta).identity_residual <= 1e-12);
    }

    CHECK_THROWS_AS(time_constants(100.0, 0.5, 0.5), PreconditionError);
    CHECK_THROWS_AS(time_constants(100.0, 4.0, 0.6), PreconditionError);
    CHECK_THROWS_AS(time_constants(100.0, 4.0, 0.0), PreconditionError);
}

TEST_CASE("comparison table") {
    std::vector<double> ds;
    for (double e = 3.0; e <= 12.0; e += 1.0) ds.push_back(std::pow(10.0, e));
    const ComparisonTable table = comparison_table(ds, 1.0, 1.0);
    REQUIRE(table.rows.size() == 10);

    CHECK(table.rows[0].kls_original ==
          doctest::Approx(std::log(2.0) / std::sqrt(1e3)).epsilon(1e-12));
    CHECK(table.rows[0].lee_vempala ==
          doctest::Approx(std::pow(10.0, -0.75)).epsilon(1e-12));

    // with unit constants the crossover sits near log d = 7050, far beyond
    // any double-representable dimension, so the in-list flag stays unset
    CHECK(table.crossover_d == 0.0);
    for (const ComparisonRow& row : table.rows) CHECK_FALSE(row.crossover);
    CHECK(table.crossover_log_d > 6000.0);
    CHECK(table.crossover_log_d < 8500.0);

    // a generous constant on the new bound pulls the crossover into the list
    const ComparisonTable boosted = comparison_table({16.0, 1e6}, 1e-30, 1.0);
    CHECK(boosted.crossover_d > 0.0);

    CHECK_THROWS_AS(comparison_table({}), PreconditionError);

    std::stringstream csv;
    write_comparison_csv(csv, table);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "d,kls_original,lee_vempala,main_thm,ell_star,exponent");
    int lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines == 10);

    std::stringstream sidecar;
    write_comparison_sidecar(sidecar, table);
    CHECK(sidecar.str().find("\"log_convention\": \"natural\"") != std::string::npos);
}
