#include "markov_embed/cycle.hpp"

namespace markov_embed {

void validate(const CycleParams& p, const Tolerances& tol) {
    if (!(std::isfinite(p.kappa) && std::isfinite(p.gamma) && std::isfinite(p.delta) && std::isfinite(p.nu))) {
        throw Error(errc::degenerate_params, "cycle parameters must be finite");
    }
    if (p.kappa < -tol.entry || p.gamma < -tol.entry || p.delta < -tol.entry) {
        throw Error(errc::degenerate_params, "kappa, gamma, delta must be nonnegative");
    }
    if (p.kappa + p.gamma <= 0.0 || p.gamma + p.delta <= 0.0 || p.delta + p.kappa <= 0.0) {
        throw Error(errc::degenerate_params, "pairwise sums of kappa, gamma, delta must be positive");
    }
    if (std::abs(p.nu) > p.min_edge() + tol.entry) {
        throw Error(errc::degenerate_params, "|nu| exceeds min(kappa, gamma, delta)");
    }
}

GeneratorMatrix GeneratorMatrix::validated(const Mat& raw, const Tolerances& tol) {
    const auto rows = raw.rows();
    if (rows != raw.cols() || (rows != 2 && rows != 3)) {
        throw Error(errc::bad_dimension, "generator must be a 2x2 or 3x3 matrix");
    }
    Mat m = raw;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < rows; ++j) {
            if (i == j) continue;
            double v = m(i, j);
            if (v < -tol.entry) {
                throw Error(errc::negative_entry, "off-diagonal rate (" + std::to_string(i) + "," +
                                                      std::to_string(j) + ") = " + std::to_string(v));
            }
            if (v < 0.0) m(i, j) = 0.0;
        }
        double s = m.row(i).sum();
        if (std::abs(s) > tol.row) {
            throw Error(errc::row_sum_violation,
                        "generator row " + std::to_string(i) + " sums to " + std::to_string(s));
        }
    }
    return GeneratorMatrix(std::move(m));
}

GeneratorMatrix GeneratorMatrix::zero(int n) { return GeneratorMatrix(Mat::Zero(n, n)); }

CycleParams params_from_generator(const GeneratorMatrix& Q, const StationaryDistribution& mu,
                                  const Tolerances& tol) {
    if (Q.n() != 3 || mu.n() != 3) {
        throw Error(errc::bad_dimension, "cycle parameters are defined for 3x3 generators");
    }
    Vec residual = Q.mat().transpose() * mu.vec();
    if (residual.cwiseAbs().maxCoeff() > tol.fixed_point) {
        throw Error(errc::not_stationary, "mu'Q != 0 (residual " +
                                              std::to_string(residual.cwiseAbs().maxCoeff()) + ")");
    }
    const double mu1 = mu[0], mu2 = mu[1], mu3 = mu[2];
    const double a2 = Q(0, 1), a3 = Q(0, 2);
    const double b1 = Q(1, 0), b3 = Q(1, 2);
    const double c1 = Q(2, 0), c2 = Q(2, 1);

    CycleParams p;
    p.nu = (mu1 * a2 - mu2 * b1) / 2.0;
    p.gamma = (mu1 * a2 + mu2 * b1) / 2.0;
    p.delta = (mu2 * b3 + mu3 * c2) / 2.0;
    p.kappa = (mu3 * c1 + mu1 * a3) / 2.0;

    // mu'Q = 0 is equivalent to the balance identity
    // mu1 a2 - mu2 b1 = mu2 b3 - mu3 c2 = mu3 c1 - mu1 a3; double-check it so
    // a violated identity cannot slip through as skewed parameters.
    const double f1 = mu1 * a2 - mu2 * b1;
    const double f2 = mu2 * b3 - mu3 * c2;
    const double f3 = mu3 * c1 - mu1 * a3;
    if (std::abs(f1 - f2) > 4.0 * tol.fixed_point || std::abs(f2 - f3) > 4.0 * tol.fixed_point) {
        throw Error(errc::not_stationary, "cyclic flux balance identity violated");
    }
    validate(p, tol);
    return p;
}

GeneratorMatrix generator_from_params(const CycleParams& p, const StationaryDistribution& mu,
                                      const Tolerances& tol) {
    validate(p, tol);
    if (mu.n() != 3) throw Error(errc::bad_dimension, "need a 3-state stationary vector");
    const double mu1 = mu[0], mu2 = mu[1], mu3 = mu[2];
    Mat q(3, 3);
    q(0, 1) = (p.gamma + p.nu) / mu1;
    q(0, 2) = (p.kappa - p.nu) / mu1;
    q(1, 0) = (p.gamma - p.nu) / mu2;
    q(1, 2) = (p.delta + p.nu) / mu2;
    q(2, 0) = (p.kappa + p.nu) / mu3;
    q(2, 1) = (p.delta - p.nu) / mu3;
    q(0, 0) = -(q(0, 1) + q(0, 2));
    q(1, 1) = -(q(1, 0) + q(1, 2));
    q(2, 2) = -(q(2, 0) + q(2, 1));
    return GeneratorMatrix::validated(q, tol);
}

EigenCoeffs eigen_coeffs(const CycleParams& p, const StationaryDistribution& mu) {
    const double mu1 = mu[0], mu2 = mu[1], mu3 = mu[2];
    double alpha = (p.kappa + p.gamma) / mu1 + (p.gamma + p.delta) / mu2 + (p.delta + p.kappa) / mu3;
    double beta = (p.kappa * p.gamma + p.gamma * p.delta + p.delta * p.kappa + p.nu * p.nu) / (mu1 * mu2 * mu3);
    return {alpha, beta};
}

double oscillation_ratio(const CycleParams& p, const StationaryDistribution& mu) {
    auto [alpha, beta] = eigen_coeffs(p, mu);
    if (alpha <= 0.0) throw Error(errc::degenerate_params, "degenerate parameters (alpha <= 0)");
    double radicand = 4.0 * beta / (alpha * alpha) - 1.0;
    constexpr double kZeroBand = 1e-12;
    if (radicand <= kZeroBand) {
        if (radicand >= -kZeroBand) return 0.0;
        throw Error(errc::real_eigenvalues, "4 beta < alpha^2: eigenvalue pair is real, no oscillation");
    }
    return std::sqrt(radicand);
}

SpectralObjectiveMax max_spectral_objective(const StationaryDistribution& mu) {
    if (mu.n() != 3) throw Error(errc::bad_dimension, "need a 3-state stationary vector");
    const double u1 = 1.0 / mu[0], u2 = 1.0 / mu[1], u3 = 1.0 / mu[2];
    const double pi3 = mu[0] * mu[1] * mu[2];

    // Degenerate boundary (one reciprocal equal to the sum of the others)
    // routes to the triangle branch; the two formulas agree there.
    const bool triangle = u1 < u2 + u3 && u2 < u3 + u1 && u3 < u1 + u2;

    SpectralObjectiveMax out{};
    out.triangle_branch = triangle;
    if (triangle) {
        double s = u1 + u2 + u3;
        out.value = 1.0 / (s * s);
        out.argmax = CycleParams{1.0, 1.0, 1.0, 1.0};
        return out;
    }
    double m = std::min(mu[0], std::min(mu[1], mu[2]));
    out.value = pi3 / (4.0 * (1.0 - m));
    double x1, x2, x3;
    if (u1 >= u2 + u3) {
        double rho = (u2 + u3) / (2.0 * u1 - u2 - u3);
        x1 = x2 = rho;
        x3 = 1.0;
    } else if (u2 >= u3 + u1) {
        double rho = (u3 + u1) / (2.0 * u2 - u3 - u1);
        x2 = x3 = rho;
        x1 = 1.0;
    } else {
        double rho = (u1 + u2) / (2.0 * u3 - u1 - u2);
        x3 = x1 = rho;
        x2 = 1.0;
    }
    out.argmax = CycleParams{x1, x2, x3, std::min(x1, std::min(x2, x3))};
    return out;
}

double max_oscillation_ratio(const StationaryDistribution& mu) {
    if (mu.n() != 3) throw Error(errc::bad_dimension, "need a 3-state stationary vector");
    const double u1 = 1.0 / mu[0], u2 = 1.0 / mu[1], u3 = 1.0 / mu[2];
    const bool triangle = u1 < u2 + u3 && u2 < u3 + u1 && u3 < u1 + u2;
    if (triangle) {
        double pi3 = mu[0] * mu[1] * mu[2];
        double sigma2 = mu[0] * mu[1] + mu[0] * mu[2] + mu[1] * mu[2];
        double radicand = 4.0 * pi3 / (sigma2 * sigma2) - 1.0;
        return std::sqrt(std::max(0.0, radicand));
    }
    double m = std::min(mu[0], std::min(mu[1], mu[2]));
    return std::sqrt(m / (1.0 - m));
}

CycleParams zero_ratio_direction(const StationaryDistribution& mu) {
    if (mu.n() != 3) throw Error(errc::bad_dimension, "need a 3-state stationary vector");
    double k = 1.0 / mu[1], g = 1.0 / mu[2], d = 1.0 / mu[0];
    double scale = std::max(k, std::max(g, d));
    return CycleParams{k / scale, g / scale, d / scale, 0.0};
}

}  // namespace markov_embed
