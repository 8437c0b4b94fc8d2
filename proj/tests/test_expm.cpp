#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "markov_embed/expm.hpp"
#include "test_support.hpp"

using namespace markov_embed;
using test_support::expm_reference;
using test_support::matrix3;
using test_support::random_mu;
using test_support::random_params;

namespace {

StationaryDistribution wrap(const Vec& v) { return StationaryDistribution::from_vector(v); }

GeneratorMatrix random_generator(std::mt19937_64& rng, double scale) {
    auto mu = wrap(random_mu(rng));
    auto q = generator_from_params(random_params(rng), mu);
    return GeneratorMatrix::validated(scale * q.mat());
}

}  // namespace

TEST_CASE("expm of zero is the identity") {
    CHECK(max_abs(expm(Mat::Zero(3, 3)) - Mat::Identity(3, 3)) == 0.0);
    CHECK(max_abs(expm(Mat::Zero(2, 2)) - Mat::Identity(2, 2)) == 0.0);
}

TEST_CASE("expm of a scaled idempotent: exp(c E) = I + (e^c - 1) E") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> cs(-5.0, 0.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vec mu = random_mu(rng);
        Mat p_inf = limiting_matrix(wrap(mu));
        Mat e = Mat::Identity(3, 3) - p_inf;
        double c = cs(rng);
        Mat expected = Mat::Identity(3, 3) + (std::exp(c) - 1.0) * e;
        CHECK(max_abs(expm(Mat(c * e)) - expected) <= default_tolerances().spec);
    }
    // the log(1/2) case lands exactly on P_inf + 0.5 (I - P_inf)
    Vec mu = random_mu(rng);
    Mat p_inf = limiting_matrix(wrap(mu));
    Mat e = Mat::Identity(3, 3) - p_inf;
    CHECK(max_abs(expm(Mat(std::log(0.5) * e)) - (p_inf + 0.5 * e)) <= 1e-14);
}

TEST_CASE("expm of a generator is stochastic with the same stationary vector") {
    Mat q = matrix3({-1, 1, 0, 0, -1, 1, 1, 0, -1});
    Mat p = expm(q);
    for (int i = 0; i < 3; ++i) CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.minCoeff() >= 0.0);
    Vec uniform = Vec::Constant(3, 1.0 / 3);
    CHECK((p.transpose() * uniform - uniform).cwiseAbs().maxCoeff() <= 1e-14);

    std::mt19937_64 rng(33);
    const auto& tol = default_tolerances();
    for (int trial = 0; trial < 50; ++trial) {
        auto mu = wrap(random_mu(rng));
        auto g = generator_from_params(random_params(rng), mu);
        std::uniform_real_distribution<double> hs(0.01, 5.0);
        Mat e = expm(Mat(hs(rng) * g.mat()));
        for (int i = 0; i < 3; ++i) CHECK(std::abs(e.row(i).sum() - 1.0) <= tol.row);
        CHECK(e.minCoeff() >= -tol.entry);
        CHECK((e.transpose() * mu.vec() - mu.vec()).cwiseAbs().maxCoeff() <= tol.fixed_point);
    }
}

TEST_CASE("expm matches a long-double reference for norms up to 50") {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> hs(0.5, 25.0);
    for (int trial = 0; trial < 100; ++trial) {
        GeneratorMatrix g = random_generator(rng, hs(rng));
        if (max_abs(g.mat()) > 50.0) continue;
        Mat ours = expm(g.mat());
        Mat ref = expm_reference(g.mat());
        CHECK(max_abs(ours - ref) <= 1e-12);
    }
    // small dense non-generator inputs
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Mat m(3, 3);
        for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = entry(rng);
        CHECK(max_abs(expm(m) - expm_reference(m)) <= 1e-13);
    }
}

TEST_CASE("expm rejects norms beyond the overflow guard") {
    Mat big = 2e3 * Mat::Identity(3, 3);
    try {
        expm(big);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::overflow);
    }
}

TEST_CASE("semigroup property: expm(G)^2 = expm(2G)") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> hs(0.1, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        GeneratorMatrix g = random_generator(rng, hs(rng));
        if (max_abs(g.mat()) > 10.0) continue;
        Mat once = expm(g.mat());
        CHECK(max_abs(once * once - expm(Mat(2.0 * g.mat()))) <= 1e-10);
    }
}

TEST_CASE("brute-force search: identity finds the zero generator immediately") {
    auto P = validate_stochastic(Mat::Identity(3, 3));
    auto mu = wrap(Vec::Constant(3, 1.0 / 3));
    auto found = brute_force_search(P, mu, 10, 1);
    REQUIRE(found.has_value());
    CHECK(max_abs(found->mat()) == 0.0);
}

TEST_CASE("brute-force search: recovers a witness for an exponential") {
    std::mt19937_64 rng(39);
    auto mu = wrap(random_mu(rng, 0.15));
    auto q = generator_from_params(random_params(rng), mu);
    auto P = validate_stochastic(expm(Mat(0.7 * q.mat())));
    auto found = brute_force_search(P, mu, 30000, 2024);
    REQUIRE(found.has_value());
    CHECK(max_abs(expm(found->mat()) - P.mat()) <= 1e-6);
}

TEST_CASE("brute-force search: no witness for a rank-one matrix past the eigenvalue bound") {
    auto mu = wrap(Vec::Constant(3, 1.0 / 3));
    auto P = validate_stochastic(test_support::rank_one_matrix(mu.vec(), -0.01));
    CHECK_FALSE(brute_force_search(P, mu, 20000, 7).has_value());
}

TEST_CASE("brute-force search is deterministic in the seed") {
    std::mt19937_64 rng(41);
    auto mu = wrap(random_mu(rng, 0.15));
    auto q = generator_from_params(random_params(rng), mu);
    auto P = validate_stochastic(expm(Mat(0.5 * q.mat())));
    auto a = brute_force_search(P, mu, 5000, 99);
    auto b = brute_force_search(P, mu, 5000, 99);
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(max_abs(a->mat() - b->mat()) == 0.0);
}
