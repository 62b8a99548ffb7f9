#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "klslab/linalg.hpp"
#include "klslab/rng.hpp"

namespace klslab {

enum class Family { Gaussian, UniformBox, UniformBall, ProductExponential };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

// Analytic log-concave density. Seeds atom clouds and provides closed-form
// moments; the atomic representation is what the rest of the code computes on.
class Density {
public:
    static Density gaussian(Vec mean, Mat covariance);
    static Density uniform_box(Vec lower, Vec upper);
    static Density uniform_ball(Vec center, double radius);
    // coordinates are independent Exponential(rate_i) on the positive orthant
    static Density product_exponential(Vec rate);

    Family family() const { return family_; }
    int dim() const { return static_cast<int>(mean_.size()); }
    const Vec& mean() const { return mean_; }
    const Mat& covariance() const { return covariance_; }

    double log_density(const Vec& x) const;  // -inf outside the support
    bool in_support(const Vec& x) const;
    Vec sample(Rng& rng) const;

    // support descriptors (only meaningful for the matching family)
    const Vec& box_lower() const { return box_lower_; }
    const Vec& box_upper() const { return box_upper_; }
    double ball_radius() const { return ball_radius_; }
    const Vec& exp_rate() const { return exp_rate_; }

private:
    Density() = default;

    Family family_ = Family::Gaussian;
    Vec mean_;
    Mat covariance_;
    Vec box_lower_, box_upper_;
    double ball_radius_ = 0.0;
    Vec exp_rate_;
    // gaussian caches
    Mat chol_lower_;
    Mat precision_;
    double log_norm_ = 0.0;  // normalization constant of the log-density
};

struct AtomicMeasure {
    Mat points;   // n x d
    Vec weights;  // probabilities, sum to 1

    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
    void validate(double tol = 1e-12) const;  // throws on broken invariants
};

// B = t * A^{-1} in the localization scheme; kept explicit so tilts compose.
struct TiltParams {
    Vec c;
    Mat b;
    double t = 0.0;

    static TiltParams identity(int d);
};

struct LogConcavityReport {
    bool pass = true;
    double worst_violation = 0.0;  // positive means Eq-in-log-space violated
    int pairs_checked = 0;
};

LogConcavityReport check_logconcavity(const Density& density, int n_pairs,
                                      const std::vector<double>& lambda_grid,
                                      std::uint64_t seed, double tol = 1e-9);

// Generic variant for test fixtures (e.g. a bimodal mixture that must fail).
LogConcavityReport check_logconcavity(
    const std::function<double(const Vec&)>& log_density,
    const std::function<Vec(Rng&)>& sampler, int n_pairs,
    const std::vector<double>& lambda_grid, std::uint64_t seed, double tol = 1e-9);

AtomicMeasure sample_atomic(const Density& density, int n, std::uint64_t seed);

// w_i <- w_i * exp(c.x_i - x_i.B.x_i / 2), renormalized via log-sum-exp.
AtomicMeasure tilt_atomic(const AtomicMeasure& measure, const TiltParams& tilt);

// Conjugacy oracle: gaussian base N(m, A) tilted by (c, B) is gaussian with
// precision A^{-1} + B and mean (A^{-1} + B)^{-1} (A^{-1} m + c).
Density closed_form_gaussian_tilt(const Density& gaussian, const TiltParams& tilt);

struct Moments {
    Vec mean;
    Mat covariance;
    AtomicMeasure whitened;
};

Moments moments_and_whiten(const AtomicMeasure& measure);

// mean/covariance only, no whitening and no singularity gate
void mean_and_cov(const AtomicMeasure& measure, Vec& mean, Mat& cov);

// CSV: header `w,x1,...,xd`, 17 significant digits.
void write_atoms_csv(std::ostream& out, const AtomicMeasure& measure);
AtomicMeasure read_atoms_csv(std::istream& in);

}  // namespace klslab
