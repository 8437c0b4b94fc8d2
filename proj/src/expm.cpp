#include "markov_embed/expm.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <vector>

namespace markov_embed {

namespace {

// Direction + dyadic time-scale grid used by the screening pass.
constexpr double kHMin = 1e-2;
constexpr int kHSteps = 14;  // 0.01 * 2^13 ~ 82, spans [1e-2, 1e2]
constexpr double kTarget = 1e-6;

Mat3 generator_raw(double kappa, double gamma, double delta, double nu, const Vec& mu) {
    Mat3 q;
    q(0, 1) = (gamma + nu) / mu(0);
    q(0, 2) = (kappa - nu) / mu(0);
    q(1, 0) = (gamma - nu) / mu(1);
    q(1, 2) = (delta + nu) / mu(1);
    q(2, 0) = (kappa + nu) / mu(2);
    q(2, 1) = (delta - nu) / mu(2);
    q(0, 0) = -(q(0, 1) + q(0, 2));
    q(1, 1) = -(q(1, 0) + q(1, 2));
    q(2, 2) = -(q(2, 0) + q(2, 1));
    return q;
}

struct Point {
    double kappa, gamma, delta, nu_frac, log2_h;
};

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// Residual of e^{hQ(p)} vs P; infeasible or overflowing points score large.
double objective(const Point& x, const Mat3& target, const Vec& mu, const ExpmConfig& cfg) {
    double k = clamp(x.kappa, 0.0, 4.0);
    double g = clamp(x.gamma, 0.0, 4.0);
    double d = clamp(x.delta, 0.0, 4.0);
    double mn = std::min(k, std::min(g, d));
    if (k + g <= 0.0 || g + d <= 0.0 || d + k <= 0.0) return 1e6;
    double nu = clamp(x.nu_frac, -1.0, 1.0) * mn;
    double h = std::exp2(clamp(x.log2_h, std::log2(kHMin) - 2.0, std::log2(1e2)));
    Mat3 q = generator_raw(k, g, d, nu, mu);
    Mat3 hq = h * q;
    if (hq.cwiseAbs().maxCoeff() > cfg.max_norm) return 1e6;
    return (expm<double, 3>(hq, cfg) - target).cwiseAbs().maxCoeff();
}

// Plain Nelder-Mead in 5 dimensions; good enough to pull a screening hit
// from ~1e-2 down to the 1e-6 acceptance radius when a witness exists.
double nelder_mead(Point& best, const Mat3& target, const Vec& mu, const ExpmConfig& cfg, int max_evals) {
    constexpr int dim = 5;
    using Arr = std::array<double, dim>;
    auto to_arr = [](const Point& p) { return Arr{p.kappa, p.gamma, p.delta, p.nu_frac, p.log2_h}; };
    auto to_point = [](const Arr& a) { return Point{a[0], a[1], a[2], a[3], a[4]}; };

    std::array<Arr, dim + 1> simplex;
    std::array<double, dim + 1> f{};
    simplex[0] = to_arr(best);
    const double step = 0.08;
    for (int i = 0; i < dim; ++i) {
        simplex[i + 1] = simplex[0];
        simplex[i + 1][i] += (i == 4 ? 0.3 : step);
    }
    int evals = 0;
    for (auto i = 0u; i < simplex.size(); ++i) {
        f[i] = objective(to_point(simplex[i]), target, mu, cfg);
        ++evals;
    }
    auto order = [&] {
        std::array<int, dim + 1> idx{};
        for (int i = 0; i <= dim; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
        std::array<Arr, dim + 1> s2;
        std::array<double, dim + 1> f2{};
        for (int i = 0; i <= dim; ++i) {
            s2[i] = simplex[idx[i]];
            f2[i] = f[idx[i]];
        }
        simplex = s2;
        f = f2;
    };
    order();
    while (evals < max_evals && f[0] > 0.2 * kTarget && f[dim] - f[0] > 1e-14) {
        Arr centroid{};
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) centroid[j] += simplex[i][j] / dim;
        auto blend = [&](double t) {
            Arr a;
            for (int j = 0; j < dim; ++j) a[j] = centroid[j] + t * (centroid[j] - simplex[dim][j]);
            return a;
        };
        Arr refl = blend(1.0);
        double fr = objective(to_point(refl), target, mu, cfg);
        ++evals;
        if (fr < f[0]) {
            Arr exp_pt = blend(2.0);
            double fe = objective(to_point(exp_pt), target, mu, cfg);
            ++evals;
            if (fe < fr) {
                simplex[dim] = exp_pt;
                f[dim] = fe;
            } else {
                simplex[dim] = refl;
                f[dim] = fr;
            }
        } else if (fr < f[dim - 1]) {
            simplex[dim] = refl;
            f[dim] = fr;
        } else {
            Arr contr = blend(fr < f[dim] ? 0.5 : -0.5);
            double fc = objective(to_point(contr), target, mu, cfg);
            ++evals;
            if (fc < std::min(fr, f[dim])) {
                simplex[dim] = contr;
                f[dim] = fc;
            } else {
                for (int i = 1; i <= dim; ++i) {
                    for (int j = 0; j < dim; ++j) simplex[i][j] = 0.5 * (simplex[i][j] + simplex[0][j]);
                    f[i] = objective(to_point(simplex[i]), target, mu, cfg);
                    ++evals;
                }
            }
        }
        order();
    }
    best = to_point(simplex[0]);
    return f[0];
}

}  // namespace

std::optional<GeneratorMatrix> brute_force_search(const StochasticMatrix& P, const StationaryDistribution& mu,
                                                  int samples, std::uint64_t seed) {
    if (P.n() != 3 || mu.n() != 3) {
        throw Error(errc::bad_dimension, "brute-force search handles 3x3 inputs");
    }
    const Mat3 target = P.mat();
    const ExpmConfig cfg{};

    // The zero generator is the h -> 0 corner of the box; test it outright so
    // P = I succeeds on the first probe.
    if ((Mat3::Identity() - target).cwiseAbs().maxCoeff() <= kTarget) {
        return GeneratorMatrix::zero(3);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);

    struct Candidate {
        double residual;
        int index;
        Point point;
    };
    std::vector<Candidate> best;
    constexpr std::size_t kKeep = 8;

    for (int i = 0; i < samples; ++i) {
        double k = unit(rng), g = unit(rng), d = unit(rng);
        double nf = sym(rng);
        if (k + g < 1e-3 || g + d < 1e-3 || d + k < 1e-3) continue;
        double nu = nf * std::min(k, std::min(g, d));
        Mat3 q = generator_raw(k, g, d, nu, mu.vec());

        // One exponential at the smallest scale, then squarings walk the
        // dyadic grid: e^{2hQ} = (e^{hQ})^2.
        Mat3 e = expm<double, 3>(Mat3(kHMin * q), cfg);
        double h = kHMin;
        for (int j = 0; j < kHSteps; ++j) {
            double res = (e - target).cwiseAbs().maxCoeff();
            if (res < (best.size() < kKeep ? 1e30 : best.back().residual)) {
                best.push_back({res, i, Point{k, g, d, nf, std::log2(h)}});
                std::sort(best.begin(), best.end(), [](const Candidate& a, const Candidate& b) {
                    return a.residual < b.residual || (a.residual == b.residual && a.index < b.index);
                });
                if (best.size() > kKeep) best.pop_back();
            }
            e = e * e;
            h *= 2.0;
        }
    }

    for (auto& cand : best) {
        Point pt = cand.point;
        double res = nelder_mead(pt, target, mu.vec(), cfg, 600);
        if (res <= kTarget) {
            double k = clamp(pt.kappa, 0.0, 4.0);
            double g = clamp(pt.gamma, 0.0, 4.0);
            double d = clamp(pt.delta, 0.0, 4.0);
            double nu = clamp(pt.nu_frac, -1.0, 1.0) * std::min(k, std::min(g, d));
            double h = std::exp2(pt.log2_h);
            Mat3 witness = h * generator_raw(k, g, d, nu, mu.vec());
            return GeneratorMatrix::validated(witness);
        }
    }
    return std::nullopt;
}

}  // namespace markov_embed
