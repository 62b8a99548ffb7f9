#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "klslab/errors.hpp"
#include "klslab/measures.hpp"

using namespace klslab;

namespace {

AtomicMeasure two_atoms_1d(double x0, double x1, double w0, double w1) {
    AtomicMeasure m;
    m.points.resize(2, 1);
    m.points << x0, x1;
    m.weights.resize(2);
    m.weights << w0, w1;
    return m;
}

}  // namespace

TEST_CASE("density constructors and closed-form moments") {
    const Density box =
        Density::uniform_box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
    CHECK((box.covariance() - Mat::Identity(2, 2) / 3.0).norm() < 1e-12);

    const Density ball = Density::uniform_ball(Vec::Zero(3), 2.0);
    CHECK((ball.covariance() - Mat::Identity(3, 3) * (4.0 / 5.0)).norm() < 1e-12);

    const Density expo = Density::product_exponential(Vec::Constant(2, 2.0));
    CHECK(expo.mean()[0] == doctest::Approx(0.5));
    CHECK(expo.covariance()(0, 0) == doctest::Approx(0.25));

    Mat degenerate = Mat::Zero(2, 2);
    degenerate(0, 0) = 1.0;
    CHECK_THROWS_AS(Density::gaussian(Vec::Zero(2), degenerate), ConstructionError);
}

TEST_CASE("normalized log densities") {
    const Density g = Density::gaussian(Vec::Zero(1), Mat::Identity(1, 1));
    CHECK(g.log_density(Vec::Zero(1)) ==
          doctest::Approx(-0.9189385332046727).epsilon(1e-12));

    const Density expo = Density::product_exponential(Vec::Constant(1, 1.0));
    CHECK(expo.log_density(Vec::Constant(1, 1.0)) == doctest::Approx(-1.0));
    CHECK(std::isinf(expo.log_density(Vec::Constant(1, -0.5))));

    const Density ball = Density::uniform_ball(Vec::Zero(2), 1.0);
    CHECK(ball.log_density(Vec::Zero(2)) == doctest::Approx(-std::log(M_PI)));
    CHECK(std::isinf(ball.log_density(Vec::Constant(2, 1.0))));
}

TEST_CASE("log-concavity midpoint test") {
    const std::vector<double> grid = {0.25, 0.5, 0.75};
    const Density g = Density::gaussian(Vec::Zero(2), Mat::Identity(2, 2));
    CHECK(check_logconcavity(g, 1000, grid, 5).pass);

    const Density box =
        Density::uniform_box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
    CHECK(check_logconcavity(box, 500, grid, 5).pass);

    // bimodal mixture violates midpoint concavity between the modes
    auto log_density = [](const Vec& x) {
        const double a = -0.5 * (x[0] - 10.0) * (x[0] - 10.0);
        const double b = -0.5 * (x[0] + 10.0) * (x[0] + 10.0);
        const double hi = std::max(a, b);
        return hi + std::log(0.5 * std::exp(a - hi) + 0.5 * std::exp(b - hi));
    };
    auto sampler = [](Rng& rng) {
        Vec x(1);
        x[0] = rng.normal() + (rng.uniform() < 0.5 ? 10.0 : -10.0);
        return x;
    };
    const LogConcavityReport bimodal =
        check_logconcavity(log_density, sampler, 500, grid, 5);
    CHECK_FALSE(bimodal.pass);
    CHECK(bimodal.worst_violation > 1.0);
}

TEST_CASE("atom sampling determinism and accuracy") {
    const Density g = Density::gaussian(Vec::Zero(2), Mat::Identity(2, 2));
    const AtomicMeasure one = sample_atomic(g, 1, 9);
    CHECK(one.size() == 1);
    CHECK(one.weights[0] == 1.0);

    const AtomicMeasure a = sample_atomic(g, 1000, 7);
    const AtomicMeasure b = sample_atomic(g, 1000, 7);
    CHECK((a.points - b.points).norm() == 0.0);

    const AtomicMeasure big = sample_atomic(g, 10000, 7);
    Vec mean;
    Mat cov;
    mean_and_cov(big, mean, cov);
    CHECK(spectral_norm_sym(cov - Mat::Identity(2, 2)) < 0.05);
}

TEST_CASE("two-atom tilt arithmetic") {
    AtomicMeasure m = two_atoms_1d(-1.0, 1.0, 0.5, 0.5);
    TiltParams tilt = TiltParams::identity(1);
    AtomicMeasure same = tilt_atomic(m, tilt);
    CHECK((same.weights - m.weights).norm() < 1e-15);

    tilt.c = Vec::Constant(1, std::log(3.0));
    const AtomicMeasure tilted = tilt_atomic(m, tilt);
    CHECK(tilted.weights[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(tilted.weights[1] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("tilting composes additively") {
    Rng rng(21);
    AtomicMeasure m;
    m.points.resize(6, 2);
    for (int i = 0; i < 6; ++i) m.points.row(i) = rng.normal_vector(2).transpose();
    Vec w(6);
    for (int i = 0; i < 6; ++i) w[i] = rng.exponential(1.0);
    m.weights = w / w.sum();

    TiltParams t1{rng.normal_vector(2), random_spd(rng, 2, 0.1, 1.0), 0.3};
    TiltParams t2{rng.normal_vector(2), random_spd(rng, 2, 0.1, 1.0), 0.4};
    TiltParams sum{t1.c + t2.c, t1.b + t2.b, t1.t + t2.t};
    const AtomicMeasure stepwise = tilt_atomic(tilt_atomic(m, t1), t2);
    const AtomicMeasure direct = tilt_atomic(m, sum);
    CHECK((stepwise.weights - direct.weights).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degenerate tilt is rejected") {
    AtomicMeasure m = two_atoms_1d(1.0, 2.0, 0.5, 0.5);
    TiltParams tilt = TiltParams::identity(1);
    tilt.c = Vec::Constant(1, -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(tilt_atomic(m, tilt), DegenerateTiltError);
}

TEST_CASE("gaussian tilt conjugacy") {
    const Density base = Density::gaussian(Vec::Zero(2), Mat::Identity(2, 2));
    TiltParams tilt{Vec::Zero(2), Mat::Identity(2, 2), 1.0};
    const Density tilted = closed_form_gaussian_tilt(base, tilt);
    CHECK((tilted.covariance() - 0.5 * Mat::Identity(2, 2)).norm() < 1e-12);

    Mat a = Mat::Zero(2, 2);
    a(0, 0) = 4.0;
    a(1, 1) = 1.0;
    const Density wide = Density::gaussian(Vec::Zero(2), a);
    TiltParams t_one{Vec::Zero(2), sym_inv(a), 1.0};
    const Density halved = closed_form_gaussian_tilt(wide, t_one);
    CHECK(halved.covariance()(0, 0) == doctest::Approx(2.0));
    CHECK(halved.covariance()(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("atomic tilt converges to the conjugacy oracle") {
    Rng rng(33);
    const Mat a = random_spd(rng, 3, 0.5, 2.0);
    const Density base = Density::gaussian(Vec::Zero(3), a);
    TiltParams tilt{Vec::Constant(3, 0.2), sym_inv(a), 1.0};
    const Density oracle = closed_form_gaussian_tilt(base, tilt);

    const AtomicMeasure atoms = sample_atomic(base, 100000, 12);
    const AtomicMeasure tilted = tilt_atomic(atoms, tilt);
    Vec mean;
    Mat cov;
    mean_and_cov(tilted, mean, cov);
    CHECK(spectral_norm_sym(cov - oracle.covariance()) <
          0.05 * spectral_norm_sym(oracle.covariance()));
    CHECK((mean - oracle.mean()).norm() < 0.05);
}

TEST_CASE("moments and whitening") {
    AtomicMeasure cross;
    cross.points.resize(4, 2);
    cross.points << 1, 0, -1, 0, 0, 1, 0, -1;
    cross.weights = Vec::Constant(4, 0.25);
    const Moments moments = moments_and_whiten(cross);
    CHECK(moments.mean.norm() < 1e-14);
    CHECK((moments.covariance - 0.5 * Mat::Identity(2, 2)).norm() < 1e-14);

    Vec wmean;
    Mat wcov;
    mean_and_cov(moments.whitened, wmean, wcov);
    CHECK(wmean.norm() < 1e-10);
    CHECK((wcov - Mat::Identity(2, 2)).norm() < 1e-10);

    AtomicMeasure line;
    line.points.resize(3, 2);
    line.points << 0, 0, 1, 1, 2, 2;
    line.weights = Vec::Constant(3, 1.0 / 3);
    CHECK_THROWS_AS(moments_and_whiten(line), DegenerateCovarianceError);
}

TEST_CASE("atom csv format") {
    AtomicMeasure m = two_atoms_1d(-1.5, 0.25, 0.375, 0.625);
    std::stringstream stream;
    write_atoms_csv(stream, m);
    std::string header;
    std::getline(stream, header);
    CHECK(header == "w,x1");
    stream.seekg(0);
    const AtomicMeasure back = read_atoms_csv(stream);
    CHECK((back.points - m.points).norm() == 0.0);
    CHECK((back.weights - m.weights).norm() == 0.0);
}
