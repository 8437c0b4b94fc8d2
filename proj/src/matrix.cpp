#include "markov_embed/matrix.hpp"

#include <array>

#include <Eigen/SVD>

namespace markov_embed {

const char* to_string(errc code) {
    switch (code) {
        case errc::bad_dimension: return "bad dimension";
        case errc::negative_entry: return "negative entry";
        case errc::row_sum_violation: return "row sum violation";
        case errc::decomposable: return "decomposable";
        case errc::not_stationary: return "not stationary";
        case errc::degenerate_params: return "degenerate cycle parameters";
        case errc::real_eigenvalues: return "real eigenvalues";
        case errc::domain_error: return "domain error";
        case errc::structure_violation: return "structure violation";
        case errc::not_embeddable: return "not embeddable";
        case errc::root_find_failure: return "root finding failed";
        case errc::projector_degenerate: return "projector degenerate";
        case errc::verification_failure: return "verification failure";
        case errc::overflow: return "overflow";
        case errc::ragged_rows: return "ragged rows";
        case errc::non_numeric: return "non-numeric entry";
    }
    return "unknown error";
}

namespace detail {

dd det3(const Mat3& m) {
    // Cofactor expansion along the first row, all products exact.
    dd sum{0.0, 0.0};
    sum = dd_add(sum, triple_prod(m(0, 0), m(1, 1), m(2, 2)));
    sum = dd_add(sum, dd_neg(triple_prod(m(0, 0), m(1, 2), m(2, 1))));
    sum = dd_add(sum, dd_neg(triple_prod(m(0, 1), m(1, 0), m(2, 2))));
    sum = dd_add(sum, triple_prod(m(0, 1), m(1, 2), m(2, 0)));
    sum = dd_add(sum, triple_prod(m(0, 2), m(1, 0), m(2, 1)));
    sum = dd_add(sum, dd_neg(triple_prod(m(0, 2), m(1, 1), m(2, 0))));
    return sum;
}

dd trace3(const Mat3& m) {
    dd s = two_sum(m(0, 0), m(1, 1));
    return dd_add(s, m(2, 2));
}

}  // namespace detail

StochasticMatrix validate_stochastic(const Mat& raw, const Tolerances& tol) {
    const auto rows = raw.rows();
    const auto cols = raw.cols();
    if (rows != cols || (rows != 2 && rows != 3)) {
        throw Error(errc::bad_dimension,
                    "expected a 2x2 or 3x3 matrix, got " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    Mat m = raw;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            double v = m(i, j);
            if (!std::isfinite(v)) {
                throw Error(errc::non_numeric, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                   ") is not finite");
            }
            if (v < -tol.entry || v > 1.0 + tol.entry) {
                throw Error(errc::negative_entry, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                      ") = " + std::to_string(v) + " outside [0, 1]");
            }
            // Clamp tolerated excursions so downstream code sees clean probabilities.
            m(i, j) = std::min(1.0, std::max(0.0, v));
        }
        double s = m.row(i).sum();
        if (std::abs(s - 1.0) > tol.row) {
            throw Error(errc::row_sum_violation,
                        "row " + std::to_string(i) + " sums to " + std::to_string(s));
        }
    }
    return StochasticMatrix(std::move(m));
}

StationaryDistribution StationaryDistribution::from_vector(const Vec& mu, const Tolerances& tol) {
    if (mu.size() != 2 && mu.size() != 3) {
        throw Error(errc::bad_dimension, "stationary vector must have 2 or 3 components");
    }
    if (mu.minCoeff() <= 0.0) {
        throw Error(errc::domain_error, "stationary distribution has a nonpositive component");
    }
    if (std::abs(mu.sum() - 1.0) > tol.row) {
        throw Error(errc::row_sum_violation, "stationary components sum to " + std::to_string(mu.sum()));
    }
    return StationaryDistribution(mu);
}

namespace {

// Reachability closure of the positive-entry digraph.
template <int N>
std::array<std::array<bool, N>, N> reachability(const Mat& m) {
    std::array<std::array<bool, N>, N> reach{};
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) reach[i][j] = (i == j) || m(i, j) > 0.0;
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    return reach;
}

template <int N>
int count_recurrent_classes(const Mat& m) {
    auto reach = reachability<N>(m);
    int count = 0;
    std::array<bool, N> seen{};
    for (int i = 0; i < N; ++i) {
        if (seen[i]) continue;
        // Communicating class of i.
        std::array<bool, N> cls{};
        for (int j = 0; j < N; ++j) cls[j] = reach[i][j] && reach[j][i];
        bool closed = true;
        for (int a = 0; a < N; ++a)
            if (cls[a])
                for (int b = 0; b < N; ++b)
                    if (reach[a][b] && !cls[b]) closed = false;
        if (closed) ++count;
        for (int j = 0; j < N; ++j)
            if (cls[j]) seen[j] = true;
    }
    return count;
}

}  // namespace

bool is_indecomposable(const StochasticMatrix& P) {
    int classes = P.n() == 2 ? count_recurrent_classes<2>(P.mat()) : count_recurrent_classes<3>(P.mat());
    return classes <= 1;
}

StationaryDistribution stationary_distribution(const StochasticMatrix& P, const Tolerances& tol) {
    if (!is_indecomposable(P)) {
        throw Error(errc::decomposable, "no unique stationary distribution");
    }
    const int n = P.n();
    // (P' - I) mu = 0 plus the normalization row, solved least squares.
    Mat A(n + 1, n);
    A.topRows(n) = P.mat().transpose() - Mat::Identity(n, n);
    A.row(n).setOnes();
    Vec b = Vec::Zero(n + 1);
    b(n) = 1.0;
    Vec mu = A.colPivHouseholderQr().solve(b);
    if (mu.minCoeff() <= tol.entry) {
        throw Error(errc::domain_error,
                    "a state is transient (stationary weight ~0); criteria need strictly positive mu");
    }
    mu /= mu.sum();
    return StationaryDistribution::from_vector(mu, tol);
}

QuadraticFactor quadratic_factor(const StochasticMatrix& P) {
    if (P.n() != 3) throw Error(errc::bad_dimension, "quadratic factor is defined for 3x3 matrices");
    Mat3 m = P.mat();
    detail::dd tr = detail::trace3(m);
    detail::dd alpha = detail::dd_sub(detail::dd{1.0, 0.0}, tr);
    detail::dd beta = detail::det3(m);
    return {alpha.hi + alpha.lo, beta.hi + beta.lo};
}

SpectrumClass classify_spectrum(const StochasticMatrix& P, const Tolerances& tol) {
    Mat3 m = P.mat();
    detail::dd tr = detail::trace3(m);
    detail::dd alpha_dd = detail::dd_sub(detail::dd{1.0, 0.0}, tr);
    detail::dd beta_dd = detail::det3(m);
    detail::dd disc_dd = detail::dd_sub(detail::dd_mul(alpha_dd, alpha_dd), detail::dd_mul(beta_dd, 4.0));

    const double alpha = alpha_dd.hi + alpha_dd.lo;
    const double beta = beta_dd.hi + beta_dd.lo;
    const double disc = disc_dd.hi + disc_dd.lo;

    const double mid = -alpha / 2.0;                 // root pair midpoint
    const double gap = std::sqrt(std::abs(disc));    // |lambda1 - lambda2|
    if (gap <= tol.coincide * std::max(1.0, std::abs(mid))) {
        if (mid < 0.0) return CoincidingNegative{mid};
        Mat3 shifted = m - mid * Mat3::Identity();
        Eigen::JacobiSVD<Mat3> svd(shifted);
        const auto& sv = svd.singularValues();
        bool diagonalizable = sv(1) <= tol.spec * std::max(sv(0), 1.0);
        return CoincidingPositive{mid, diagonalizable};
    }
    if (disc > 0.0) {
        double sd = std::sqrt(disc);
        double q = -(alpha + std::copysign(sd, alpha)) / 2.0;
        double l1 = q;
        double l2 = (q != 0.0) ? beta / q : 0.0;
        if (l1 < l2) std::swap(l1, l2);
        return DistinctReal{l1, l2};
    }
    double imag = std::sqrt(-disc) / 2.0;
    double r = std::hypot(mid, imag);
    double theta = std::atan2(imag, mid);  // in (0, pi) since imag > 0
    return ComplexPair{r, theta};
}

Mat limiting_matrix(const StationaryDistribution& mu) {
    const int n = mu.n();
    Mat p_inf(n, n);
    for (int i = 0; i < n; ++i) p_inf.row(i) = mu.vec().transpose();
    return p_inf;
}

bool check_rank_one_structure(const StochasticMatrix& P, double lambda, const StationaryDistribution& mu,
                              const Tolerances& tol) {
    if (lambda >= 1.0) throw Error(errc::domain_error, "rank-one structure requires lambda < 1");
    Mat p_inf = limiting_matrix(mu);
    Mat expected = p_inf + lambda * (Mat::Identity(P.n(), P.n()) - p_inf);
    return max_abs(P.mat() - expected) <= tol.spec;
}

bool goodman_precheck(const StochasticMatrix& P) {
    double det = P.mat().determinant();
    if (det <= 0.0) return false;
    return P.mat().diagonal().minCoeff() >= det;
}

const char* spectrum_case_name(const SpectrumClass& s) {
    struct Visitor {
        const char* operator()(const DistinctReal&) const { return "distinct-real"; }
        const char* operator()(const CoincidingPositive&) const { return "coinciding-positive"; }
        const char* operator()(const CoincidingNegative&) const { return "coinciding-negative"; }
        const char* operator()(const ComplexPair&) const { return "complex-pair"; }
    };
    return std::visit(Visitor{}, s);
}

}  // namespace markov_embed
