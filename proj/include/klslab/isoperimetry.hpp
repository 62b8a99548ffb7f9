#pragma once

#include <iosfwd>
#include <vector>

#include "klslab/linalg.hpp"
#include "klslab/measures.hpp"

namespace klslab {

struct Halfspace {
    Vec direction;  // unit vector
    double threshold = 0.0;

    void validate(double tol = 1e-12) const;  // throws on non-unit direction
};

enum class EstimateKind { UpperViaHalfspace, LowerViaGaussianComponent, ConductanceProxy };

std::string to_string(EstimateKind kind);

struct IsoperimetryEstimate {
    double value = 0.0;
    EstimateKind kind = EstimateKind::UpperViaHalfspace;
    Halfspace witness;        // meaningful for the half-space scan
    int witness_cut_size = 0;  // meaningful for the conductance proxy
};

struct ShellEstimate {
    double value = 0.0;
    bool vacuous = false;  // the eps-shell already covers the support
};

// (p(S_eps) - p(S)) / eps for S = {u.x <= s}. On analytic marginals the exact
// eps -> 0 limit, i.e. the marginal density at the threshold, is returned.
ShellEstimate boundary_measure_shell(const Density& density, const Halfspace& halfspace,
                                     double eps);
ShellEstimate boundary_measure_shell(const AtomicMeasure& measure,
                                     const Halfspace& halfspace, double eps);
// S given as an explicit atom subset; the shell uses euclidean distance to S.
ShellEstimate boundary_measure_shell(const AtomicMeasure& measure,
                                     const std::vector<int>& subset, double eps);

// Upper estimate of the isoperimetric coefficient: minimize
// marginal(s) / min(F(s), 1 - F(s)) over directions x standardized thresholds.
// Directions: covariance eigenvectors plus direction_count uniform on the sphere.
// Thresholds are offsets in marginal standard deviations from the marginal mean.
IsoperimetryEstimate halfspace_isoperimetry(const Density& density, int direction_count,
                                            const std::vector<double>& threshold_grid,
                                            std::uint64_t seed);

// Minimum normalized sweep cut of a symmetrized k-NN graph, Fiedler-ordered,
// divided by the mean k-NN radius to match the 1/length units of psi.
IsoperimetryEstimate conductance_proxy(const AtomicMeasure& measure, int k_neighbors,
                                       int sweep_count);

struct Truncation {
    AtomicMeasure atoms;  // renormalized atoms inside B(mean, radius)
    double radius = 0.0;
    double tail_mass = 0.0;        // weight left outside, <= target by construction
    double boundary_factor = 0.5;  // p(dE) >= factor * psi(truncated) * min(p(E), p(E^c))
};

Truncation truncate_to_ball(const Density& density, double mass_target = 0.2,
                            int n_atoms = 100000, std::uint64_t seed = 0);

// (1/4) |B^{-1}|_2^{-1/2} * stability_prob; with B = t A^{-1} this is
// (1/4) t^{1/2} |A|_2^{-1/2} * stability_prob.
double gaussian_component_lower_bound(const Mat& b_matrix, double stability_prob);

// CSV: kind,value,direction...,threshold
void write_estimates_csv(std::ostream& out,
                         const std::vector<IsoperimetryEstimate>& estimates);

}  // namespace klslab
