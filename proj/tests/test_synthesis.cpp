#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "markov_embed/embeddability.hpp"
#include "test_support.hpp"

using namespace markov_embed;
using test_support::matrix3;
using test_support::random_mu;
using test_support::random_params;
using test_support::rank_one_matrix;

namespace {

constexpr double kPi = 3.14159265358979323846;

StationaryDistribution wrap(const Vec& v) { return StationaryDistribution::from_vector(v); }

StationaryDistribution uniform_mu() { return wrap(Vec::Constant(3, 1.0 / 3)); }

void check_generator_invariants(const SynthesisReport& rep, const StationaryDistribution& mu) {
    const auto& tol = default_tolerances();
    const Mat& g = rep.generator.mat();
    CHECK((g * Vec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(g(i, j) >= 0.0);
    CHECK((g.transpose() * mu.vec()).cwiseAbs().maxCoeff() <= 10 * tol.fixed_point);
}

}  // namespace

TEST_CASE("branch enumeration") {
    // lambda = -0.002, uniform cap 0.577: only the principal branch fits
    auto ks = enumerate_branches(-0.002, 0.57735026918962576);
    REQUIRE(ks.size() == 1);
    CHECK(ks[0] == 0);

    // above the threshold even the principal branch is infeasible
    CHECK(enumerate_branches(-0.01, 0.57735026918962576).empty());

    // k = 1 under the universal 1/sqrt(3) cap needs |lambda| <= e^{-3 sqrt(3) pi} ~ 8.1e-8
    CHECK(enumerate_branches(-8.2e-8, 1.0 / std::sqrt(3.0)).size() == 2);
    CHECK(enumerate_branches(-8.0e-8, 1.0 / std::sqrt(3.0)).size() == 1);
}

TEST_CASE("coinciding-negative synthesis: interior target") {
    auto mu = uniform_mu();
    auto rep = synthesize_coinciding_negative(mu, -0.002);
    CHECK(rep.residual <= 1e-8);
    CHECK(rep.time_scale > 0.0);
    check_generator_invariants(rep, mu);
    CHECK(max_abs(expm(rep.generator.mat()) - rank_one_matrix(mu.vec(), -0.002)) <= 1e-8);
}

TEST_CASE("coinciding-negative synthesis: boundary target uses the argmax direction") {
    auto mu = uniform_mu();
    double lambda = -std::exp(-kPi * std::sqrt(3.0));  // ratio demand exactly 1/sqrt(3)
    auto rep = synthesize_coinciding_negative(mu, lambda);
    CHECK(rep.residual <= 1e-8);
    // at the cap the bisection collapses to the endpoint: all fluxes equal,
    // nu maximal, so the generator is the pure cycle pattern
    const Mat& g = rep.generator.mat();
    CHECK(g(0, 2) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(g(1, 0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(g(2, 1) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("coinciding-negative synthesis: generator eigenvalues are log|lambda| +- i pi") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 25; ++trial) {
        auto mu = wrap(random_mu(rng));
        double bound = lambda_lower_bound(mu);
        std::uniform_real_distribution<double> frac(0.05, 0.95);
        double lambda = bound * frac(rng);
        auto rep = synthesize_coinciding_negative(mu, lambda);
        CHECK(rep.residual <= 1e-8);

        Eigen::EigenSolver<Mat> solver(rep.generator.mat());
        bool saw_zero = false, saw_pair = false;
        for (int i = 0; i < 3; ++i) {
            auto ev = solver.eigenvalues()(i);
            if (std::abs(ev) < 1e-9 * max_abs(rep.generator.mat())) {
                saw_zero = true;
            } else if (ev.imag() > 0) {
                CHECK(ev.real() == doctest::Approx(std::log(-lambda)).epsilon(1e-9));
                CHECK(ev.imag() == doctest::Approx(kPi).epsilon(1e-9));
                saw_pair = true;
            }
        }
        CHECK(saw_zero);
        CHECK(saw_pair);
    }
}

TEST_CASE("coinciding-negative synthesis: infeasible target throws") {
    try {
        synthesize_coinciding_negative(uniform_mu(), -0.01);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::not_embeddable);
    }
}

TEST_CASE("higher logarithm branches give distinct witnesses for the same matrix") {
    auto mu = uniform_mu();
    const double lambda = -1e-9;  // |lambda| small enough for k = 1
    REQUIRE(enumerate_branches(lambda, max_oscillation_ratio(mu)).size() >= 2);
    auto rep0 = synthesize_coinciding_negative(mu, lambda, 0);
    auto rep1 = synthesize_coinciding_negative(mu, lambda, 1);
    CHECK(rep0.residual <= 1e-8);
    CHECK(rep1.residual <= 1e-8);
    CHECK(max_abs(rep0.generator.mat() - rep1.generator.mat()) > 1e-3);

    Eigen::EigenSolver<Mat> solver(rep1.generator.mat());
    for (int i = 0; i < 3; ++i) {
        auto ev = solver.eigenvalues()(i);
        if (ev.imag() > 0) CHECK(ev.imag() == doctest::Approx(3.0 * kPi).epsilon(1e-8));
    }
}

TEST_CASE("distinct-real synthesis: projector algebra and round trip") {
    Mat f = matrix3({1, 1, 0, 1, -1, 1, 1, 0, -1});
    Mat d = Vec3(1.0, 0.5, 0.25).asDiagonal();
    auto P = validate_stochastic(f * d * f.inverse());
    auto mu = stationary_distribution(P);
    const double l1 = 0.5, l2 = 0.25;

    Mat p_inf = limiting_matrix(mu);
    Mat identity = Mat::Identity(3, 3);
    Mat a1 = (P.mat() - l2 * identity - (1 - l2) * p_inf) / (l1 - l2);
    Mat a2 = (P.mat() - l1 * identity - (1 - l1) * p_inf) / (l2 - l1);
    const auto& tol = default_tolerances();
    CHECK(max_abs(a1 * a1 - a1) <= tol.spec);
    CHECK(max_abs(a2 * a2 - a2) <= tol.spec);
    CHECK(max_abs(a1 * a2) <= tol.spec);
    CHECK(max_abs(p_inf + a1 + a2 - identity) <= tol.spec);

    auto rep = synthesize_distinct_real(P, mu, l1, l2);
    CHECK(rep.residual <= 1e-8);
    check_generator_invariants(rep, mu);
    // rows of the witness sum to zero because every projector annihilates e
    CHECK((rep.generator.mat() * Vec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("distinct-real synthesis: guards") {
    Mat f = matrix3({1, 1, 0, 1, -1, 1, 1, 0, -1});
    Mat d = Vec3(1.0, 0.5, 0.25).asDiagonal();
    auto P = validate_stochastic(f * d * f.inverse());
    auto mu = stationary_distribution(P);
    CHECK_THROWS_AS(synthesize_distinct_real(P, mu, 0.5, 0.5 + 1e-12), Error);
    CHECK_THROWS_AS(synthesize_distinct_real(P, mu, 1.2, 0.25), Error);
}

TEST_CASE("coinciding-positive synthesis: diagonalizable family") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        Vec mu_v = random_mu(rng);
        std::uniform_real_distribution<double> ls(0.05, 0.95);
        double lambda = ls(rng);
        auto P = validate_stochastic(rank_one_matrix(mu_v, lambda));
        auto mu = wrap(mu_v);
        auto rep = synthesize_coinciding_positive(P, mu, lambda);
        CHECK(rep.residual <= 1e-10);
        check_generator_invariants(rep, mu);
        // G = log(lambda) (I - P_inf): off-diagonals -log(lambda) mu_j
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j)
                    CHECK(rep.generator(i, j) ==
                          doctest::Approx(-std::log(lambda) * mu_v(j)).epsilon(1e-10));
    }
}

TEST_CASE("coinciding-positive synthesis: defective round trip") {
    // exact dyadic Jordan block: G0 = log(1/2)(I - P_inf) + 2 N
    Vec mu_v(3);
    mu_v << 0.5, 0.25, 0.25;
    auto mu = wrap(mu_v);
    auto P = validate_stochastic(
        matrix3({0.75, 0.1875, 0.0625, 0.25, 0.5625, 0.1875, 0.25, 0.0625, 0.6875}));
    auto rep = synthesize_coinciding_positive(P, mu, 0.5);
    CHECK(rep.residual <= 1e-8);
    check_generator_invariants(rep, mu);

    // start from the synthesized generator, exponentiate, synthesize again
    auto P2 = validate_stochastic(expm(rep.generator.mat()));
    auto rep2 = synthesize_coinciding_positive(P2, mu, 0.5);
    CHECK(rep2.residual <= 1e-8);
    CHECK(max_abs(rep2.generator.mat() - rep.generator.mat()) <= 1e-9);
}

TEST_CASE("complex synthesis: recovers the cycle and its transpose on the principal branch") {
    Mat q = matrix3({-1, 1, 0, 0, -1, 1, 1, 0, -1});
    for (bool transpose : {false, true}) {
        Mat qt = transpose ? Mat(q.transpose()) : q;
        auto P = validate_stochastic(expm(qt));
        auto mu = stationary_distribution(P);
        auto s = classify_spectrum(P);
        auto* c = std::get_if<ComplexPair>(&s);
        REQUIRE(c != nullptr);
        auto reports = synthesize_complex(P, mu, c->modulus, c->argument, true);
        REQUIRE(!reports.empty());
        CHECK(reports[0].branch == 0);
        CHECK(reports[0].residual <= 1e-8);
        CHECK(max_abs(reports[0].generator.mat() - qt) <= 1e-9);
    }
}

TEST_CASE("complex synthesis: both branches verify when both band inequalities hold") {
    // tiny modulus: r = e^{-p} with p large enough that a rotation past pi
    // stays within the generator cone; both logarithm branches are then valid
    auto mu = uniform_mu();
    CycleParams p{1.0, 1.0, 1.0, 1.0};  // ratio 1/sqrt(3), the cap
    auto q = generator_from_params(p, mu);
    // eigenvalues of Q are -9 +- i sqrt(27); pick h so the rotation is 1.25 pi
    double imag = std::sqrt(27.0);
    double h = 1.25 * kPi / imag;
    auto P = validate_stochastic(expm(Mat(h * q.mat())));
    auto s = classify_spectrum(P);
    auto* cp = std::get_if<ComplexPair>(&s);
    REQUIRE(cp != nullptr);
    auto reports = synthesize_complex(P, stationary_distribution(P), cp->modulus, cp->argument, true);
    REQUIRE(reports.size() == 2);
    for (const auto& rep : reports) CHECK(rep.residual <= 1e-8);
    CHECK(max_abs(reports[0].generator.mat() - reports[1].generator.mat()) > 1e-6);
    // the non-principal branch reproduces h Q
    CHECK(max_abs(reports[1].generator.mat() - h * q.mat()) <= 1e-8);
}

TEST_CASE("verification residual: zero generator, perturbation sensitivity") {
    auto identity = validate_stochastic(Mat::Identity(3, 3));
    CHECK(verification_residual(GeneratorMatrix::zero(3), identity) == 0.0);

    auto mu = uniform_mu();
    auto rep = synthesize_coinciding_negative(mu, -0.002);
    auto target = validate_stochastic(rank_one_matrix(mu.vec(), -0.002));
    CHECK(verification_residual(rep.generator, target) <= 1e-8);
    // nudge one symmetric rate pair: the residual must blow past the gate
    Mat g = rep.generator.mat();
    g(0, 1) += 0.01;
    g(0, 0) -= 0.01;
    CHECK(verification_residual(GeneratorMatrix::validated(g), target) > default_tolerances().verify);
}
