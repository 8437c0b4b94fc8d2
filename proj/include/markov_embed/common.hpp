#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace markov_embed {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Numeric tolerances used throughout the library. All of them are
/// configuration values; the defaults are the contract the test suite pins.
struct Tolerances {
    double entry = 1e-12;        ///< entrywise range checks on probabilities/rates
    double row = 1e-10;          ///< row-sum checks (stochastic rows, zero generator rows)
    double fixed_point = 1e-10;  ///< stationarity residual ||mu'P - mu'|| resp. ||mu'Q||
    double spec = 1e-9;          ///< spectral/structural identities
    double coincide = 1e-8;      ///< relative eigenvalue-coincidence threshold
    double verify = 1e-8;        ///< witness acceptance: ||exp(G) - P||_max
    double root = 1e-12;         ///< bisection target on the oscillation ratio
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

enum class errc {
    bad_dimension,
    negative_entry,
    row_sum_violation,
    decomposable,
    not_stationary,
    degenerate_params,
    real_eigenvalues,
    domain_error,
    structure_violation,
    not_embeddable,
    root_find_failure,
    projector_degenerate,
    verification_failure,
    overflow,
    ragged_rows,
    non_numeric,
};

const char* to_string(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/// Largest absolute entry (Chebyshev norm); the residual metric for witnesses.
inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

namespace detail {

// Compensated (double-double) arithmetic. The spectrum classifier needs the
// discriminant of the quadratic eigenvalue factor to far better than plain
// double: for a matrix with a coinciding eigenvalue pair the discriminant
// cancels to ~0 and sqrt turns an absolute error of 1e-16 into an eigenvalue
// gap of 1e-8, right at the coincidence threshold.
struct dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd dd_add(dd a, double b) { return dd_add(a, dd{b, 0.0}); }

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }

inline dd dd_sub(dd a, dd b) { return dd_add(a, dd_neg(b)); }

inline dd dd_mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd dd_mul(dd a, double b) { return dd_mul(a, dd{b, 0.0}); }

/// Product of three doubles, exactly accumulated.
inline dd triple_prod(double a, double b, double c) {
    return dd_mul(two_prod(a, b), c);
}

/// Determinant of a 3x3 matrix in compensated arithmetic.
dd det3(const Mat3& m);

/// Trace of a 3x3 matrix in compensated arithmetic.
dd trace3(const Mat3& m);

}  // namespace detail

}  // namespace markov_embed
