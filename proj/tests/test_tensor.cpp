#include <doctest.h>

#include <cmath>

#include "klslab/errors.hpp"
#include "klslab/tensor.hpp"

using namespace klslab;

namespace {

AtomicMeasure random_cloud(Rng& rng, int n, int d, bool random_weights = true) {
    AtomicMeasure m;
    m.points.resize(n, d);
    for (int i = 0; i < n; ++i) m.points.row(i) = rng.normal_vector(d).transpose();
    if (random_weights) {
        Vec w(n);
        for (int i = 0; i < n; ++i) w[i] = rng.exponential(1.0);
        m.weights = w / w.sum();
    } else {
        m.weights = Vec::Constant(n, 1.0 / n);
    }
    return m;
}

AtomicMeasure mirror_cloud(Rng& rng, int half, int d) {
    AtomicMeasure m;
    m.points.resize(2 * half, d);
    for (int i = 0; i < half; ++i) {
        const Vec x = rng.normal_vector(d);
        m.points.row(2 * i) = x.transpose();
        m.points.row(2 * i + 1) = -x.transpose();
    }
    m.weights = Vec::Constant(2 * half, 0.5 / half);
    return m;
}

}  // namespace

TEST_CASE("three tensor on symmetric atoms vanishes") {
    AtomicMeasure m;
    m.points.resize(2, 1);
    m.points << -1.0, 1.0;
    m.weights = Vec::Constant(2, 0.5);
    const Mat one = Mat::Identity(1, 1);
    CHECK(three_tensor(m, one, one, one) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("three tensor routes agree") {
    Rng rng(17);
    for (int rep = 0; rep < 5; ++rep) {
        const int d = 2 + static_cast<int>(rng.below(3));
        const AtomicMeasure m = random_cloud(rng, 50, d);
        const Mat a = random_spd(rng, d, 0.0, 2.0);
        const Mat b = random_symmetric(rng, d);
        const Mat c = random_symmetric(rng, d);
        const double naive = three_tensor(m, a, b, c, TensorMode::Naive);
        const double factored = three_tensor(m, a, b, c, TensorMode::Factored);
        CHECK(std::abs(naive - factored) <= 1e-8 * (1.0 + std::abs(naive)));
    }
    // identity arguments on a whitened-scale cloud: kernel cubed, nonnegative
    const AtomicMeasure big = random_cloud(rng, 800, 3);
    const Mat eye = Mat::Identity(3, 3);
    const double naive = three_tensor(big, eye, eye, eye, TensorMode::Naive);
    const double factored = three_tensor(big, eye, eye, eye, TensorMode::Factored);
    CHECK(naive >= 0.0);
    CHECK(std::abs(naive - factored) <= 1e-8 * (1.0 + std::abs(naive)));
}

TEST_CASE("pair-sum cap requests subsampling") {
    Rng rng(19);
    const AtomicMeasure m = random_cloud(rng, 60, 2);
    const Mat eye = Mat::Identity(2, 2);
    CHECK_THROWS_AS(three_tensor(m, eye, eye, eye, TensorMode::Naive, 50),
                    PreconditionError);
}

TEST_CASE("three tensor slot symmetry and linearity") {
    Rng rng(23);
    const AtomicMeasure m = random_cloud(rng, 40, 3);
    const Mat a = random_symmetric(rng, 3);
    const Mat b = random_symmetric(rng, 3);
    const Mat c = random_symmetric(rng, 3);
    const double base = three_tensor(m, a, b, c);
    CHECK(three_tensor(m, b, a, c) == doctest::Approx(base).epsilon(1e-12));
    CHECK(three_tensor(m, c, b, a) == doctest::Approx(base).epsilon(1e-12));
    const Mat a2 = random_symmetric(rng, 3);
    CHECK(three_tensor(m, a + a2, b, c) ==
          doctest::Approx(base + three_tensor(m, a2, b, c)).epsilon(1e-10));
}

TEST_CASE("delta matrix oracles") {
    Rng rng(29);
    const AtomicMeasure sym = mirror_cloud(rng, 400, 2);
    // mirrored cloud is isotropic only approximately; rescale to pass the gate
    Vec mean;
    Mat cov;
    mean_and_cov(sym, mean, cov);
    AtomicMeasure iso = sym;
    iso.points = sym.points * sym_inv_sqrt(cov);
    const DeltaMatrix zero = delta_matrix(iso, Vec::Unit(2, 0));
    CHECK(zero.delta.norm() < 1e-12);

    // mean 0, variance 2, third moment 2
    AtomicMeasure skew;
    skew.points.resize(2, 1);
    skew.points << -1.0, 2.0;
    skew.weights.resize(2);
    skew.weights << 2.0 / 3, 1.0 / 3;
    const DeltaMatrix dm = delta_matrix(skew, Vec::Unit(1, 0), 1.1);
    CHECK(dm.delta(0, 0) == doctest::Approx(2.0).epsilon(1e-12));

    AtomicMeasure stretched = iso;
    stretched.points *= 3.0;
    CHECK_THROWS_AS(delta_matrix(stretched, Vec::Unit(2, 0)), PreconditionError);

    const DeltaMatrix renorm = delta_matrix(iso, Vec::Constant(2, 5.0));
    CHECK(renorm.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("trace inequality hard gate") {
    Rng rng(31);
    SUBCASE("boundary deltas give equality") {
        const Mat g = random_spd(rng, 4, 0.0, 2.0);
        const Mat f = random_symmetric(rng, 4);
        for (double delta : {0.0, 1.0}) {
            const TwoSidedCheck r = check_trace_inequality(g, f, delta);
            CHECK(r.pass);
            CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-10));
        }
    }
    SUBCASE("identity G collapses both sides") {
        const Mat f = random_symmetric(rng, 3);
        const TwoSidedCheck r = check_trace_inequality(Mat::Identity(3, 3), f, 0.37);
        CHECK(r.lhs == doctest::Approx((f * f).trace()).epsilon(1e-12));
        CHECK(r.rhs == doctest::Approx((f * f).trace()).epsilon(1e-12));
    }
    SUBCASE("randomized sweep never violates") {
        int violations = 0;
        for (int i = 0; i < 300; ++i) {
            const int d = 2 + static_cast<int>(rng.below(7));
            const Mat g = random_spd(rng, d, 0.0, 2.0);
            const Mat f = random_symmetric(rng, d);
            if (!check_trace_inequality(g, f, rng.uniform()).pass) ++violations;
        }
        CHECK(violations == 0);
    }
    SUBCASE("non-PSD G rejected") {
        Mat g = Mat::Identity(2, 2);
        g(1, 1) = -1.0;
        CHECK_THROWS_AS(check_trace_inequality(g, Mat::Identity(2, 2), 0.5),
                        PreconditionError);
    }
}

TEST_CASE("moment inequality quadrature") {
    const Density g = Density::gaussian(Vec::Zero(1), Mat::Identity(1, 1));
    const TwoSidedCheck gauss = check_moment_inequality(g, 4.0, 2.0);
    CHECK(gauss.pass);
    CHECK(gauss.lhs == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-6));
    CHECK(gauss.rhs == doctest::Approx(4.0).epsilon(1e-6));

    CHECK(check_moment_inequality(g, 2.0, 2.0).pass);

    const Density expo = Density::product_exponential(Vec::Constant(1, 1.0));
    CHECK(check_moment_inequality(expo, 6.0, 2.0).pass);
    const Density box =
        Density::uniform_box(Vec::Constant(1, -1.0), Vec::Constant(1, 1.0));
    CHECK(check_moment_inequality(box, 3.0, 1.0).pass);

    CHECK_THROWS_AS(check_moment_inequality(g, 1.0, 2.0), PreconditionError);

    const AtomicMeasure samples = sample_atomic(expo, 20000, 4);
    CHECK(check_moment_inequality_samples(samples, 4.0, 2.0).pass);
}

TEST_CASE("tensor swap hard gate") {
    Rng rng(37);
    SUBCASE("delta zero is slot symmetry") {
        const AtomicMeasure m = random_cloud(rng, 30, 3);
        const Mat a = random_spd(rng, 3, 0.0, 2.0);
        const Mat b = random_spd(rng, 3, 0.0, 2.0);
        const Mat c = random_spd(rng, 3, 0.0, 2.0);
        const TwoSidedCheck r = check_tensor_swap(m, a, b, c, 0.0);
        CHECK(r.pass);
        CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-9));
    }
    SUBCASE("identity A gives equality") {
        const AtomicMeasure m = random_cloud(rng, 30, 2);
        const Mat b = random_spd(rng, 2, 0.0, 2.0);
        const Mat c = random_spd(rng, 2, 0.0, 2.0);
        const TwoSidedCheck r = check_tensor_swap(m, Mat::Identity(2, 2), b, c, 0.6);
        CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-9));
    }
    SUBCASE("randomized sweep never violates") {
        int violations = 0;
        for (int i = 0; i < 100; ++i) {
            const int d = 2 + static_cast<int>(rng.below(4));
            const AtomicMeasure m = random_cloud(rng, 25, d);
            const Mat a = random_spd(rng, d, 0.0, 2.0);
            const Mat b = random_spd(rng, d, 0.0, 2.0);
            const Mat c = random_spd(rng, d, 0.0, 2.0);
            if (!check_tensor_swap(m, a, b, c, rng.uniform()).pass) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("statistical tensor lemma checks on gaussian clouds") {
    Rng rng(41);
    const Density g = Density::gaussian(Vec::Zero(3), Mat::Identity(3, 3));
    const AtomicMeasure cloud = sample_atomic(g, 5000, rng.bits());

    const CheckResult vb =
        check_tensor_vector_bound(cloud, Mat::Identity(3, 3), Mat::Identity(3, 3));
    CHECK(vb.status == Status::Pass);
    CHECK(vb.lhs < 1.0);  // gaussian third moments vanish
    CHECK(vb.rhs > 40.0);

    const CheckResult iso = check_tensor_isoperimetric(cloud, 3, 4.0, 0.5);
    CHECK(iso.status == Status::Pass);
    CHECK_THROWS_AS(check_tensor_isoperimetric(cloud, 0, 4.0, 0.5), PreconditionError);

    const CheckResult slc = check_tensor_strong_logconcave(cloud, 1.0, 3);
    CHECK(slc.status == Status::Pass);
    CHECK_THROWS_AS(check_tensor_strong_logconcave(cloud, 1.0, 2), PreconditionError);

    const Moments moments = moments_and_whiten(cloud);
    const Vec v = Vec::Unit(3, 1);
    const CheckResult proj = check_trace_delta_projection(
        moments.whitened, v, Mat::Identity(3, 3), 3);
    CHECK(proj.status == Status::Pass);
    CHECK(proj.rhs == doctest::Approx(16.0 * 16.0 * 3.0));  // 16 alpha^2 d^(2 beta)

    Mat tilted = Mat::Identity(3, 3);
    tilted(0, 1) = tilted(1, 0) = 0.5;
    CHECK_THROWS_AS(check_trace_delta_projection(moments.whitened, v, tilted, 2),
                    PreconditionError);

    const CheckResult psd =
        check_trace_delta_psd(moments.whitened, v, Mat::Identity(3, 3));
    CHECK(psd.status == Status::Pass);
}
