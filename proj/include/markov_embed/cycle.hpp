#pragma once

#include "markov_embed/matrix.hpp"

namespace markov_embed {

// A 3x3 transition rate matrix Q with prescribed stationary vector mu is
// equivalent to four probability fluxes: three symmetric edge fluxes
// (kappa, gamma, delta) and one net cyclic flux nu. With
// Q = [[-a2-a3, a2, a3], [b1, -b1-b3, b3], [c1, c2, -c1-c2]] they are
//   nu    = (mu1 a2 - mu2 b1) / 2      gamma = (mu1 a2 + mu2 b1) / 2
//   delta = (mu2 b3 + mu3 c2) / 2      kappa = (mu3 c1 + mu1 a3) / 2
// and the map is one-to-one on the feasible set below.

/// Flux coordinates of a 3x3 generator with prescribed stationary vector.
/// Feasible iff kappa, gamma, delta >= 0, all pairwise sums positive, and
/// |nu| <= min(kappa, gamma, delta).
struct CycleParams {
    double kappa = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double nu = 0.0;

    double min_edge() const { return std::min(kappa, std::min(gamma, delta)); }
};

/// Throws Error{degenerate_params} unless p is feasible.
void validate(const CycleParams& p, const Tolerances& tol = default_tolerances());

/// Rate matrix: zero row sums, nonnegative off-diagonal entries.
class GeneratorMatrix {
public:
    int n() const { return static_cast<int>(m_.rows()); }
    const Mat& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    /// Validates row sums and off-diagonal signs; off-diagonal entries within
    /// -tol.entry of zero are clamped to zero.
    static GeneratorMatrix validated(const Mat& raw, const Tolerances& tol = default_tolerances());

    /// Zero generator (exp = identity).
    static GeneratorMatrix zero(int n = 3);

private:
    explicit GeneratorMatrix(Mat m) : m_(std::move(m)) {}
    Mat m_;
};

/// Coefficients of the eigen-equation x (x^2 + alpha x + beta) = 0 of the
/// generator built from cycle parameters; alpha, beta > 0 for feasible,
/// nondegenerate parameters.
struct EigenCoeffs {
    double alpha;
    double beta;
};

/// Recovers cycle parameters from a generator. Requires mu'Q = 0 within
/// tol.fixed_point (throws Error{not_stationary} otherwise) and feasible
/// output (throws Error{degenerate_params} for e.g. Q = 0).
CycleParams params_from_generator(const GeneratorMatrix& Q, const StationaryDistribution& mu,
                                  const Tolerances& tol = default_tolerances());

/// Builds the generator with entries
///   q12 = (gamma+nu)/mu1  q13 = (kappa-nu)/mu1
///   q21 = (gamma-nu)/mu2  q23 = (delta+nu)/mu2
///   q31 = (kappa+nu)/mu3  q32 = (delta-nu)/mu3
/// and diagonals the negated row sums; mu'Q = 0 holds by construction.
GeneratorMatrix generator_from_params(const CycleParams& p, const StationaryDistribution& mu,
                                      const Tolerances& tol = default_tolerances());

/// alpha = (kappa+gamma)/mu1 + (gamma+delta)/mu2 + (delta+kappa)/mu3,
/// beta  = (kappa gamma + gamma delta + delta kappa + nu^2) / (mu1 mu2 mu3).
EigenCoeffs eigen_coeffs(const CycleParams& p, const StationaryDistribution& mu);

/// Ratio |Im/Re| of the nonzero eigenvalue pair -alpha/2 +- i sqrt(beta - alpha^2/4)
/// of the generator, i.e. sqrt(4 beta / alpha^2 - 1). Scale-invariant in p.
/// The radicand is clamped to 0 inside a band of width 1e-12 around zero:
/// genuinely positive ratios that small would need |log P-eigenvalue| beyond
/// double range, so nothing representable is lost. Outside the band a
/// negative radicand throws Error{real_eigenvalues}.
double oscillation_ratio(const CycleParams& p, const StationaryDistribution& mu);

/// Closed-form maximum of the scale-invariant objective
///   F(x) = (x1 x2 + x2 x3 + x3 x1 + min(x)^2) /
///          ((x1+x2)/mu1 + (x2+x3)/mu2 + (x3+x1)/mu3)^2
/// over x >= 0 with positive pairwise sums. The oscillation ratio satisfies
/// ratio^2 = 4 F / (mu1 mu2 mu3) - 1 at nu = min(x), so this maximum yields
/// max_oscillation_ratio. Branches on whether the reciprocals 1/mu_i satisfy
/// the triangle inequality; the argmax direction is normalized to max
/// component 1 and carries nu = min component.
struct SpectralObjectiveMax {
    double value;
    CycleParams argmax;
    bool triangle_branch;
};
SpectralObjectiveMax max_spectral_objective(const StationaryDistribution& mu);

/// Largest achievable oscillation ratio over all generators with stationary
/// vector mu:
///   sqrt(4 mu1 mu2 mu3 / (mu1 mu2 + mu1 mu3 + mu2 mu3)^2 - 1)  (triangle branch)
///   sqrt(m / (1 - m)), m = min mu_i                            (otherwise)
/// Bounded by 1/sqrt(3) for every mu.
double max_oscillation_ratio(const StationaryDistribution& mu);

/// Direction with oscillation ratio exactly zero:
/// nu = 0, (kappa, gamma, delta) proportional to (1/mu2, 1/mu3, 1/mu1).
CycleParams zero_ratio_direction(const StationaryDistribution& mu);

}  // namespace markov_embed
