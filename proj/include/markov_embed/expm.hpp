#pragma once

#include <optional>

#include "markov_embed/cycle.hpp"

namespace markov_embed {

/// Scaling-and-squaring configuration for the small dense exponential.
/// For 3x3 inputs cost is irrelevant, so the defaults chase accuracy: scale
/// until the max-norm is below 0.5, then run the Taylor series far past the
/// point where the a-priori remainder bound drops under target_accuracy.
struct ExpmConfig {
    double scaling_threshold = 0.5;
    int taylor_terms = 24;
    double target_accuracy = 1e-13;
    double max_norm = 1e3;  ///< inputs above this norm are rejected as overflow
};

/// e^M for a small square matrix via scaling and squaring with a truncated
/// Taylor series. Throws Error{overflow} when ||M||_max > cfg.max_norm.
template <typename Scalar, int N>
Eigen::Matrix<Scalar, N, N> expm(const Eigen::Matrix<Scalar, N, N>& M, const ExpmConfig& cfg = ExpmConfig{}) {
    using MatT = Eigen::Matrix<Scalar, N, N>;
    const int n = static_cast<int>(M.rows());
    double norm = M.cwiseAbs().maxCoeff();
    if (!std::isfinite(norm) || norm > cfg.max_norm) {
        throw Error(errc::overflow, "matrix norm " + std::to_string(norm) + " too large for expm");
    }
    int squarings = 0;
    double scaled = norm;
    while (scaled > cfg.scaling_threshold) {
        scaled /= 2.0;
        ++squarings;
    }
    MatT a = M / std::ldexp(1.0, squarings);
    MatT term = MatT::Identity(n, n);
    MatT sum = term;
    for (int k = 1; k <= cfg.taylor_terms; ++k) {
        term = (term * a) / static_cast<Scalar>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-20 * sum.cwiseAbs().maxCoeff()) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

inline Mat expm(const Mat& M, const ExpmConfig& cfg = ExpmConfig{}) {
    if (M.rows() != M.cols()) throw Error(errc::bad_dimension, "expm needs a square matrix");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic> tmp = M;
    return expm<double, Eigen::Dynamic>(tmp, cfg);
}

/// Randomized search for a generator G with ||e^G - P||_max <= 1e-6, used as
/// an implementation-independent ground truth in tests. Draws `samples`
/// cycle-parameter directions inside the unit box (|nu| <= min edge flux),
/// scans each along a dyadic time-scale grid h in [1e-2, 1e2], then polishes
/// the most promising candidates with Nelder-Mead on the residual.
/// Deterministic for a fixed seed. Absence of a witness is evidence, not
/// proof.
std::optional<GeneratorMatrix> brute_force_search(const StochasticMatrix& P, const StationaryDistribution& mu,
                                                  int samples, std::uint64_t seed);

}  // namespace markov_embed
