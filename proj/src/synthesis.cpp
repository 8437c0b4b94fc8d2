#include "markov_embed/synthesis.hpp"

#include <complex>

namespace markov_embed {

namespace {

constexpr double kPi = 3.14159265358979323846;

CycleParams lerp(const CycleParams& a, const CycleParams& b, double t) {
    return CycleParams{(1.0 - t) * a.kappa + t * b.kappa, (1.0 - t) * a.gamma + t * b.gamma,
                       (1.0 - t) * a.delta + t * b.delta, (1.0 - t) * a.nu + t * b.nu};
}

// Rank-one target P = P_inf + lambda (I - P_inf).
Mat rank_one_matrix(const StationaryDistribution& mu, double lambda) {
    Mat p_inf = limiting_matrix(mu);
    return p_inf + lambda * (Mat::Identity(mu.n(), mu.n()) - p_inf);
}

GeneratorMatrix clamp_generator(Mat g, const Tolerances& tol) {
    // Synthesis arithmetic can leave off-diagonals a few ulp negative; widen
    // the clamp band to the structural tolerance before validating.
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            if (i != j && g(i, j) < 0.0 && g(i, j) >= -tol.spec) g(i, j) = 0.0;
    Tolerances t = tol;
    t.row = std::max(tol.row, 1e-9);
    return GeneratorMatrix::validated(g, t);
}

}  // namespace

double verification_residual(const GeneratorMatrix& G, const StochasticMatrix& P) {
    if (G.n() != P.n()) throw Error(errc::bad_dimension, "generator and matrix sizes differ");
    return max_abs(expm(G.mat()) - P.mat());
}

std::vector<int> enumerate_branches(double lambda, double max_ratio) {
    if (!(lambda > -1.0 && lambda < 0.0)) {
        throw Error(errc::domain_error, "branch enumeration needs lambda in (-1, 0)");
    }
    std::vector<int> branches;
    const double log_mag = -std::log(-lambda);
    for (int k = 0;; ++k) {
        double ratio = (2.0 * k + 1.0) * kPi / log_mag;
        if (ratio > max_ratio) break;
        branches.push_back(k);
    }
    return branches;
}

SynthesisReport synthesize_coinciding_negative(const StationaryDistribution& mu, double lambda,
                                               int branch, const Tolerances& tol) {
    if (!(lambda > -1.0 && lambda < 0.0)) {
        throw Error(errc::domain_error, "coinciding-negative synthesis needs lambda in (-1, 0)");
    }
    if (branch < 0) throw Error(errc::domain_error, "branch index must be nonnegative");

    const double log_mag = std::log(-lambda);  // < 0
    const double target = (2.0 * branch + 1.0) * kPi / (-log_mag);
    const double ratio_max = max_oscillation_ratio(mu);
    if (target > ratio_max + tol.spec) {
        throw Error(errc::not_embeddable, "required eigenvalue ratio " + std::to_string(target) +
                                              " exceeds the maximum " + std::to_string(ratio_max));
    }

    // Bisection on g(t) = ratio(path(t)) - target along the straight line
    // from the zero-ratio direction to the argmax direction. Both endpoints
    // are feasible and so is every convex combination (min is concave), and
    // g(0) = -target < 0 <= g(1). The ratio need not be monotone along the
    // path; bisection only needs the sign straddle.
    const CycleParams lo_pt = zero_ratio_direction(mu);
    const CycleParams hi_pt = max_spectral_objective(mu).argmax;
    auto ratio_at = [&](double t) { return oscillation_ratio(lerp(lo_pt, hi_pt, t), mu); };

    double t_lo = 0.0, t_hi = 1.0;
    double g_hi = ratio_at(1.0) - target;
    if (g_hi < -1e-9) {
        throw Error(errc::root_find_failure, "ratio at the argmax fell short of the target");
    }
    CycleParams root = hi_pt;
    int iterations = 0;
    if (g_hi > tol.root) {
        constexpr int kMaxIter = 200;
        bool converged = false;
        for (; iterations < kMaxIter; ++iterations) {
            double t_mid = 0.5 * (t_lo + t_hi);
            double g_mid = ratio_at(t_mid) - target;
            if (std::abs(g_mid) <= tol.root) {
                root = lerp(lo_pt, hi_pt, t_mid);
                converged = true;
                break;
            }
            if (g_mid >= 0.0)
                t_hi = t_mid;
            else
                t_lo = t_mid;
        }
        if (!converged) {
            root = lerp(lo_pt, hi_pt, t_hi);
            if (std::abs(ratio_at(t_hi) - target) > 1e-9) {
                throw Error(errc::root_find_failure, "bisection did not reach the target ratio");
            }
        }
    }

    GeneratorMatrix q = generator_from_params(root, mu, tol);
    double alpha0 = eigen_coeffs(root, mu).alpha;
    double h = -2.0 * log_mag / alpha0;
    GeneratorMatrix g = GeneratorMatrix::validated(h * q.mat(), tol);

    SynthesisReport report{g, branch, h, 0.0, iterations};
    report.residual = max_abs(expm(g.mat()) - rank_one_matrix(mu, lambda));
    if (report.residual > tol.verify) {
        throw Error(errc::verification_failure,
                    "synthesized generator misses the target, residual " + std::to_string(report.residual));
    }
    return report;
}

SynthesisReport synthesize_distinct_real(const StochasticMatrix& P, const StationaryDistribution& mu,
                                         double l1, double l2, const Tolerances& tol) {
    if (!(l1 > 0.0 && l1 < 1.0 && l2 > 0.0 && l2 < 1.0)) {
        throw Error(errc::domain_error, "distinct-real synthesis needs eigenvalues in (0, 1)");
    }
    if (std::abs(l1 - l2) <= tol.coincide * std::max(1.0, std::abs(l1))) {
        throw Error(errc::projector_degenerate, "eigenvalues too close; use the coinciding route");
    }
    const Mat identity = Mat::Identity(3, 3);
    Mat p_inf = limiting_matrix(mu);
    Mat a1 = (P.mat() - l2 * identity - (1.0 - l2) * p_inf) / (l1 - l2);
    Mat a2 = (P.mat() - l1 * identity - (1.0 - l1) * p_inf) / (l2 - l1);
    Mat g = std::log(l1) * a1 + std::log(l2) * a2;

    double min_off = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) min_off = std::min(min_off, g(i, j));
    if (min_off < -tol.spec) {
        throw Error(errc::not_embeddable, "principal logarithm has negative off-diagonal " +
                                              std::to_string(min_off));
    }
    SynthesisReport report{clamp_generator(std::move(g), tol), 0, 1.0, 0.0, 0};
    report.residual = verification_residual(report.generator, P);
    if (report.residual > tol.verify) {
        throw Error(errc::verification_failure,
                    "projector logarithm misses P, residual " + std::to_string(report.residual));
    }
    return report;
}

SynthesisReport synthesize_coinciding_positive(const StochasticMatrix& P, const StationaryDistribution& mu,
                                               double lambda, const Tolerances& tol) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw Error(errc::domain_error, "coinciding-positive synthesis needs lambda in (0, 1)");
    }
    const Mat identity = Mat::Identity(3, 3);
    Mat p_inf = limiting_matrix(mu);
    Mat e = identity - p_inf;
    Mat g = std::log(lambda) * e;

    // Nilpotent part of P; zero (to rounding) in the diagonalizable case.
    Mat n = P.mat() - p_inf - lambda * e;
    if (max_abs(n) > tol.spec) {
        // Defective eigenvalue: N commutes with E, N^2 = 0, and
        // exp(log(lambda) E + N/lambda) = (P_inf + lambda E)(I + N/lambda) = P.
        g += n / lambda;
    }

    double min_off = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) min_off = std::min(min_off, g(i, j));
    if (min_off < -tol.spec) {
        throw Error(errc::verification_failure,
                    "nilpotent correction drives an off-diagonal to " + std::to_string(min_off));
    }
    SynthesisReport report{clamp_generator(std::move(g), tol), 0, 1.0, 0.0, 0};
    report.residual = verification_residual(report.generator, P);
    if (report.residual > tol.verify) {
        throw Error(errc::verification_failure,
                    "coinciding-positive construction misses P, residual " + std::to_string(report.residual));
    }
    return report;
}

std::vector<SynthesisReport> synthesize_complex(const StochasticMatrix& P, const StationaryDistribution& mu,
                                                double r, double theta, bool all_branches,
                                                const Tolerances& tol) {
    if (!(r > 0.0 && r < 1.0) || !(theta > 0.0 && theta < kPi)) {
        throw Error(errc::domain_error, "complex synthesis needs r in (0,1), theta in (0,pi)");
    }
    using Cplx = std::complex<double>;
    using Mat3c = Eigen::Matrix3cd;

    const Cplx lambda(r * std::cos(theta), r * std::sin(theta));
    const Cplx lambda_bar = std::conj(lambda);
    Mat3c pc = P.mat().cast<Cplx>();
    Mat3c p_inf_c = limiting_matrix(mu).cast<Cplx>();
    Mat3c identity_c = Mat3c::Identity();
    // Complex spectral projector of lambda, from the same closed form as the
    // distinct-real case.
    Mat3c a = (pc - lambda_bar * identity_c - (1.0 - lambda_bar) * p_inf_c) / (lambda - lambda_bar);

    std::vector<SynthesisReport> out;
    const double branches[2] = {theta, theta - 2.0 * kPi};
    for (int bi = 0; bi < 2; ++bi) {
        Cplx log_branch(std::log(r), branches[bi]);
        Mat g = (2.0 * (log_branch * a.array()).real()).matrix();
        double min_off = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) min_off = std::min(min_off, g(i, j));
        if (min_off < -tol.spec) continue;
        SynthesisReport report{clamp_generator(std::move(g), tol), bi == 0 ? 0 : -1, 1.0, 0.0, 0};
        report.residual = verification_residual(report.generator, P);
        if (report.residual > tol.verify) continue;
        out.push_back(std::move(report));
        if (!all_branches) break;
    }
    if (out.empty()) {
        throw Error(errc::not_embeddable, "no logarithm branch yields a valid generator");
    }
    return out;
}

}  // namespace markov_embed
