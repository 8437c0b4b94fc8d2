#pragma once

#include <optional>
#include <string>
#include <vector>

#include "markov_embed/synthesis.hpp"

namespace markov_embed {

struct EmbedOptions {
    bool want_witness = false;   ///< synthesize and verify witness generators
    bool all_branches = false;   ///< enumerate every feasible logarithm branch
    Tolerances tol{};
};

/// One side-by-side inequality evaluation (lhs vs rhs).
struct Comparison {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Full analysis record for one input matrix.
struct Verdict {
    int n = 3;
    bool indecomposable = true;
    std::optional<Vec> mu;
    std::optional<SpectrumClass> spectrum;  ///< absent for 2x2 inputs
    std::optional<bool> goodman;            ///< determinant precheck, 3x3 only
    std::optional<double> lambda_bound;     ///< sharpest embeddable negative eigenvalue, coinciding case
    bool embeddable = false;
    std::string criterion;  ///< name of the rule that decided
    double lhs = 0.0;       ///< deciding inequality, left side
    double rhs = 0.0;       ///< deciding inequality, right side
    std::vector<Comparison> branch_checks;  ///< complex case: both band inequalities
    bool reversible = false;                ///< detailed-balance shortcut applied
    std::vector<SynthesisReport> witnesses;
};

/// 2x2 criterion: embeddable iff p11 + p22 > 1 (strict). The witness is the
/// unique principal logarithm log(lambda)/(lambda - 1) (P - I), lambda = trace - 1.
Verdict embeddable_2x2(const StochasticMatrix& P, const EmbedOptions& opts = {});

/// Coinciding negative eigenvalue lambda: embeddable iff
/// max_oscillation_ratio(mu) >= pi / (-log|lambda|). Requires the rank-one
/// structure P = P_inf + lambda (I - P_inf); throws Error{structure_violation}
/// when it fails (such P is not diagonalizable and not embeddable here).
Verdict embeddable_coinciding_negative(const StochasticMatrix& P, const StationaryDistribution& mu,
                                       double lambda, const EmbedOptions& opts = {});

/// Sharpest negative coinciding eigenvalue that stays embeddable for this mu:
///   -exp(-pi / sqrt(b)), b = 4 mu1 mu2 mu3 / (mu1 mu2 + mu1 mu3 + mu2 mu3)^2 - 1
/// on the triangle branch, otherwise -exp(-pi sqrt((1-m)/m)), m = min mu_i.
/// P_inf + lambda (I - P_inf) is embeddable iff lambda_lower_bound <= lambda < 0.
double lambda_lower_bound(const StationaryDistribution& mu);

/// Off-diagonal threshold for positive spectra {1, l1, l2}:
///   c(l1, l2) = ((l2 - 1) log l1 - (l1 - 1) log l2) / (log l2 - log l1),
/// continued across the coincidence band by its limit l log l - l + 1 at the
/// midpoint. Throws Error{domain_error} outside (0, 1)^2.
double positive_spectrum_threshold(double l1, double l2, const Tolerances& tol = default_tolerances());

/// Positive spectrum (distinct or coinciding): embeddable iff
/// p_ij >= mu_j c(l1, l2) for every i != j. Detailed balance halves the
/// inequality set.
Verdict embeddable_positive_spectrum(const StochasticMatrix& P, const StationaryDistribution& mu,
                                     double l1, double l2, const EmbedOptions& opts = {});

/// Complex pair r e^{+-i theta}: embeddable iff all off-diagonals satisfy
/// p_ij >= mu_j (1 - r cos theta + (sin theta / theta) r log r)  [lower band]
/// or all satisfy
/// p_ij <= mu_j (1 - r cos theta + (sin theta / (theta - 2 pi)) r log r) [upper band].
/// The bands correspond to the logarithm branches theta and theta - 2 pi;
/// both may hold, and the verdict records each.
Verdict embeddable_complex_spectrum(const StochasticMatrix& P, const StationaryDistribution& mu,
                                    double r, double theta, const EmbedOptions& opts = {});

/// Top-level decision: validation -> indecomposability -> determinant
/// precheck -> spectrum classification -> the matching criterion, plus
/// witness synthesis on request. Throws Error{decomposable} for 3x3 inputs
/// with more than one closed set.
Verdict embeddable(const StochasticMatrix& P, const EmbedOptions& opts = {});

}  // namespace markov_embed
