#pragma once

#include <vector>

#include "markov_embed/cycle.hpp"
#include "markov_embed/expm.hpp"

namespace markov_embed {

/// A synthesized witness generator G with ||e^G - P||_max = residual.
struct SynthesisReport {
    GeneratorMatrix generator;
    int branch = 0;          ///< logarithm branch index k (0 = principal)
    double time_scale = 1.0; ///< h with G = h Q for the bisection-based route
    double residual = 0.0;
    int iterations = 0;
};

/// ||expm(G) - P||_max.
double verification_residual(const GeneratorMatrix& G, const StochasticMatrix& P);

/// All branch indices k >= 0 for which a generator eigenvalue ratio of
/// (2k+1) pi / (-log|lambda|) is achievable, i.e. at most max_ratio.
/// Empty iff P_inf + lambda (I - P_inf) is not embeddable for this mu.
std::vector<int> enumerate_branches(double lambda, double max_ratio);

/// Witness for P = P_inf + lambda (I - P_inf) with coinciding negative
/// eigenvalue lambda. Finds cycle parameters whose oscillation ratio equals
/// (2 branch + 1) pi / (-log|lambda|) by bisection along the straight-line
/// path from the zero-ratio direction to the ratio argmax, then scales time
/// so the generator's eigenvalues land on log|lambda| +- (2 branch + 1) i pi.
/// Throws Error{not_embeddable} when the target ratio exceeds the maximum.
SynthesisReport synthesize_coinciding_negative(const StationaryDistribution& mu, double lambda,
                                               int branch = 0, const Tolerances& tol = default_tolerances());

/// Witness for distinct eigenvalues {1, l1, l2}, both in (0, 1):
/// G = log(l1) A1 + log(l2) A2 built from the closed-form spectral projectors
///   A1 = (P - l2 I - (1 - l2) P_inf) / (l1 - l2),  A2 symmetric.
/// Throws Error{projector_degenerate} if |l1 - l2| <= tol.coincide and
/// Error{not_embeddable} if the resulting off-diagonals are negative.
SynthesisReport synthesize_distinct_real(const StochasticMatrix& P, const StationaryDistribution& mu,
                                         double l1, double l2, const Tolerances& tol = default_tolerances());

/// Witness for a coinciding positive eigenvalue. Diagonalizable case:
/// G = log(lambda) (I - P_inf). Defective case adds the nilpotent correction
/// N / lambda with N = P - P_inf - lambda (I - P_inf); if that correction
/// drives an off-diagonal negative the construction is reported as
/// Error{verification_failure} (the embeddability verdict stands on its own).
SynthesisReport synthesize_coinciding_positive(const StochasticMatrix& P, const StationaryDistribution& mu,
                                               double lambda, const Tolerances& tol = default_tolerances());

/// Witnesses for a complex eigenvalue pair r e^{+-i theta}. Each feasible
/// logarithm branch b in {theta, theta - 2 pi} yields
/// G_b = 2 Re[(log r + i b) A] with A the complex spectral projector of
/// r e^{i theta}. Returns every branch that verifies when all_branches is
/// set, otherwise just the first; throws Error{not_embeddable} when neither
/// branch produces a valid generator.
std::vector<SynthesisReport> synthesize_complex(const StochasticMatrix& P, const StationaryDistribution& mu,
                                                double r, double theta, bool all_branches = false,
                                                const Tolerances& tol = default_tolerances());

}  // namespace markov_embed
