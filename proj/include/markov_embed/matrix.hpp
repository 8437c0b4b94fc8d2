#pragma once

#include <variant>

#include "markov_embed/common.hpp"

namespace markov_embed {

/// Row-stochastic n x n matrix, n in {2, 3}. Construct through
/// validate_stochastic(); instances are immutable once built.
class StochasticMatrix {
public:
    int n() const { return static_cast<int>(m_.rows()); }
    const Mat& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    friend StochasticMatrix validate_stochastic(const Mat& raw, const Tolerances& tol);

private:
    explicit StochasticMatrix(Mat m) : m_(std::move(m)) {}
    Mat m_;
};

/// Strictly positive probability vector mu with mu'P = mu'.
class StationaryDistribution {
public:
    int n() const { return static_cast<int>(mu_.size()); }
    const Vec& vec() const { return mu_; }
    double operator[](int i) const { return mu_(i); }
    double min() const { return mu_.minCoeff(); }

    /// Validates positivity and normalization of a candidate vector.
    static StationaryDistribution from_vector(const Vec& mu, const Tolerances& tol = default_tolerances());

private:
    explicit StationaryDistribution(Vec mu) : mu_(std::move(mu)) {}
    Vec mu_;
};

// Spectrum of an indecomposable 3x3 stochastic matrix, with the trivial
// eigenvalue 1 left implicit. The nontrivial pair solves x^2 + a x + b = 0
// with a = 1 - trace(P), b = det(P).
struct DistinctReal {
    double lambda1;  ///< larger root
    double lambda2;  ///< smaller root
};
struct CoincidingPositive {
    double lambda;
    bool diagonalizable;  ///< rank(P - lambda I) == 1 within tolerance
};
struct CoincidingNegative {
    double lambda;
};
struct ComplexPair {
    double modulus;   ///< r in (0, 1) for matrices that pass the determinant check
    double argument;  ///< theta strictly inside (0, pi)
};
using SpectrumClass = std::variant<DistinctReal, CoincidingPositive, CoincidingNegative, ComplexPair>;

/// Coefficients of the quadratic eigenvalue factor of P: x^2 + alpha x + beta.
struct QuadraticFactor {
    double alpha;
    double beta;
};

/// Validates dimension (2 or 3), entry range and row sums.
/// Throws Error{bad_dimension | negative_entry | row_sum_violation}.
StochasticMatrix validate_stochastic(const Mat& raw, const Tolerances& tol = default_tolerances());

/// True iff the state space has no two disjoint closed sets, i.e. the
/// directed graph {(i,j): p_ij > 0} has at most one recurrent communicating
/// class.
bool is_indecomposable(const StochasticMatrix& P);

/// Unique stationary distribution of an indecomposable P, solved from the
/// linear system (P' - I) mu = 0 with a normalization row appended.
/// Throws Error{decomposable} when P is decomposable and Error{domain_error}
/// when a state is transient (stationary weight 0), since every criterion in
/// this library requires strictly positive mu.
StationaryDistribution stationary_distribution(const StochasticMatrix& P,
                                               const Tolerances& tol = default_tolerances());

/// Quadratic factor of the characteristic polynomial of a 3x3 stochastic
/// matrix, computed in compensated arithmetic.
QuadraticFactor quadratic_factor(const StochasticMatrix& P);

/// Classifies the nontrivial eigenvalue pair of an indecomposable 3x3 P.
/// Coincidence is decided on |lambda1 - lambda2| <= tol.coincide * max(1, |lambda|);
/// complex pairs whose imaginary part collapses under that test are
/// reclassified as real.
SpectrumClass classify_spectrum(const StochasticMatrix& P, const Tolerances& tol = default_tolerances());

/// Rank-one limiting matrix e mu' (all rows equal mu').
Mat limiting_matrix(const StationaryDistribution& mu);

/// True iff P = P_inf + lambda (I - P_inf) within tol.spec, equivalently all
/// rows of lambda I - P are equal. Requires lambda < 1.
bool check_rank_one_structure(const StochasticMatrix& P, double lambda, const StationaryDistribution& mu,
                              const Tolerances& tol = default_tolerances());

/// Necessary condition for embeddability: det(P) > 0 and every diagonal
/// entry dominates det(P). A false result is conclusive (not embeddable);
/// a true result decides nothing by itself.
bool goodman_precheck(const StochasticMatrix& P);

/// Human-readable tag of a spectrum case ("distinct-real", ...).
const char* spectrum_case_name(const SpectrumClass& s);

}  // namespace markov_embed
