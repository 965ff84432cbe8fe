#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shearflow/field.hpp"

using namespace shearflow;

TEST_CASE("self-similar ladder: powers of rho and gamma") {
    const auto lad = build_ladder(LadderRule::self_similar(100, 2.0, 3));
    REQUIRE(lad.radii == std::vector<std::int64_t>{1, 100, 10000, 1000000});
    REQUIRE(lad.gammas == std::vector<double>{1.0, 2.0, 4.0, 8.0});
    CHECK(lad.rho_min == 100.0);
    CHECK(lad.rho_max == 100.0);
    CHECK(lad.gamma_min == 2.0);
    CHECK(lad.gamma_max == 2.0);
}

TEST_CASE("fast-separation ladder follows the floor recursion") {
    // R_1 = 1*floor(2^1/1) = 2, R_2 = 2*floor(2^4/2) = 16, R_3 = 16*floor(2^9/16) = 512
    const auto lad = build_ladder(LadderRule::fast_separation(2, 2.0, 2.0, 3));
    CHECK(lad.radii == std::vector<std::int64_t>{1, 2, 16, 512});
    CHECK(lad.gamma_min == 2.0);
    CHECK(lad.gamma_max == 2.0);
}

TEST_CASE("explicit ladder exposes min/max ratios") {
    const auto lad = build_ladder(LadderRule::explicit_sequences({1, 2, 3}, {1.0, 3.0, 9.0}));
    CHECK(lad.rho_min == 2.0);
    CHECK(lad.rho_max == 3.0);
    CHECK(lad.gamma_min == 3.0);
    CHECK(lad.gamma_max == 3.0);
    CHECK(lad.radii == std::vector<std::int64_t>{1, 2, 6});
}

TEST_CASE("ladder validation errors are named") {
    CHECK_THROWS_WITH(build_ladder(LadderRule::explicit_sequences({1, 1}, {1.0, 2.0})),
                      Catch::Contains("must be an integer >= 2"));
    CHECK_THROWS_WITH(build_ladder(LadderRule::explicit_sequences({1, 2}, {1.0, 0.9})),
                      Catch::Contains("must be > 1"));
    CHECK_THROWS_AS(build_ladder(LadderRule::self_similar(1, 2.0, 2)), std::invalid_argument);
    CHECK_THROWS_WITH(build_ladder(LadderRule::explicit_sequences({2, 2}, {1.0, 2.0})),
                      Catch::Contains("r_0"));
}

TEST_CASE("ladder invariants hold for 100 random valid rules") {
    std::mt19937 gen(1234);
    std::uniform_int_distribution<int> rdist(2, 9), len(1, 6);
    std::uniform_real_distribution<double> gdist(1.1, 5.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int P = len(gen);
        std::vector<std::int64_t> r{1};
        std::vector<double> g{1.0};
        for (int n = 1; n <= P; ++n) {
            r.push_back(rdist(gen));
            g.push_back(g.back() * gdist(gen));
        }
        const auto lad = build_ladder(LadderRule::explicit_sequences(r, g));
        for (int n = 1; n <= P; ++n) {
            REQUIRE(lad.radii[n] == lad.radii[n - 1] * lad.ratios[n]);
            CHECK(lad.gammas[n] / lad.gammas[n - 1] >= lad.gamma_min - 1e-12);
            CHECK(lad.gammas[n] / lad.gammas[n - 1] <= lad.gamma_max + 1e-12);
        }
        CHECK(lad.rho_min >= 2.0);
        CHECK(lad.gamma_min > 1.0);
        CHECK(std::isfinite(lad.gamma_max));
    }
}

TEST_CASE("eval_field: single scale and periodicity basics") {
    auto field = make_field(build_ladder(LadderRule::self_similar(4, 2.0, 2)), sine_profile());
    // h_n(0) = 0 at every scale
    CHECK(field.eval_all(0.0) == Approx(0.0).margin(1e-12));
    // single scale 0 at the quarter period
    CHECK(field.eval(0.25, 0, 0) == Approx(std::numbers::sqrt2).epsilon(1e-14));
    // x = R_p: every included scale completes an integer number of periods
    const double Rp = field.ladder.radius_d(2);
    CHECK(field.eval_all(Rp) == Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(field.eval(0.1, 0, 5), std::out_of_range);
    CHECK_THROWS_AS(field.eval(0.1, 2, 1), std::out_of_range);
}

TEST_CASE("eval_field is R_p-periodic at all orders") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> xs(-50.0, 50.0);
    auto field = make_field(build_ladder(LadderRule::explicit_sequences({1, 3, 4}, {1.0, 2.5, 7.0})),
                            std::vector<FourierProfile>{oracle::random_profile(gen, 3),
                                                        oracle::random_profile(gen, 2),
                                                        oracle::random_profile(gen, 4)});
    const double Rp = field.ladder.radius_d(2);
    for (int order = 0; order <= 2; ++order) {
        for (int i = 0; i < 20; ++i) {
            const double x = xs(gen);
            const double a = field.eval(x, 0, 2, order);
            const double b = field.eval(x + Rp, 0, 2, order);
            CHECK(b == Approx(a).epsilon(1e-10).margin(1e-12));
        }
    }
}

TEST_CASE("derivative chain rule: field derivative scales by 1/R_n") {
    auto field = make_field(build_ladder(LadderRule::self_similar(8, 3.0, 1)), sine_profile());
    // d/dx [gamma_1 h(x/R_1)] at 0 = gamma_1 * h'(0) / R_1
    const double d = field.eval(0.0, 1, 1, 1);
    CHECK(d == Approx(3.0 * field.profiles[1].eval(0.0, 1) / 8.0).epsilon(1e-13));
}

TEST_CASE("hypothesis validation: the three spec configurations") {
    // rho=100, gamma=2, sine: H1 holds, epsilon = 8*sqrt(2)*pi/100 < 1
    auto f1 = make_field(build_ladder(LadderRule::self_similar(100, 2.0, 3)), sine_profile());
    const auto r1 = validate_hypotheses(f1);
    CHECK(r1.h1_holds);
    CHECK(r1.epsilon == Approx(8.0 * std::numbers::sqrt2 * std::numbers::pi / 100.0).epsilon(1e-9));
    CHECK(r1.epsilon < 1.0);
    CHECK(r1.epsilon == Approx(0.3554).epsilon(1e-3));

    // rho=4, gamma=2: H1 holds but epsilon > 1 (bracket precondition fails, reported not thrown)
    auto f2 = make_field(build_ladder(LadderRule::self_similar(4, 2.0, 3)), sine_profile());
    const auto r2 = validate_hypotheses(f2);
    CHECK(r2.h1_holds);
    CHECK(r2.epsilon == Approx(8.886).epsilon(1e-3));

    // Kolmogorov: rho=16, gamma=16^{4/3}, cosine valley: H1 fails, H2 holds
    const double g = std::pow(16.0, 4.0 / 3.0);
    auto f3 = make_field(build_ladder(LadderRule::self_similar(16, g, 2)), cosine_valley_profile());
    const auto r3 = validate_hypotheses(f3);
    CHECK_FALSE(r3.h1_holds);
    CHECK(r3.h2_holds);
    CHECK(!r3.violations.empty());

    // sine profiles have h'(0) != 0, so H2 fails even with a wide ratio
    auto f4 = make_field(build_ladder(LadderRule::self_similar(100, 2.0, 2)), sine_profile());
    CHECK_FALSE(validate_hypotheses(f4).h2_holds);
}

TEST_CASE("single-scale field: vacuous hypotheses and zero epsilon") {
    auto f = make_field(build_ladder(LadderRule::self_similar(5, 2.0, 0)), sine_profile());
    const auto r = validate_hypotheses(f);
    CHECK(r.h1_holds);
    CHECK(r.epsilon == 0.0);
    CHECK(r.bound_h1 == Approx(f.k1));
}

TEST_CASE("H1 envelope: |H^{k,P}(x)| <= K1 |x| / (1 - gamma_max/rho_min)") {
    std::mt19937 gen(17);
    auto field = make_field(build_ladder(LadderRule::self_similar(7, 2.0, 4)), sine_profile());
    const auto rep = validate_hypotheses(field);
    REQUIRE(rep.h1_holds);
    const double RP = field.ladder.radius_d(4);
    std::uniform_real_distribution<double> xs(-RP, RP);
    std::uniform_int_distribution<int> ks(0, 4);
    for (int i = 0; i < 200; ++i) {
        const double x = xs(gen);
        const int k = ks(gen);
        CHECK(std::abs(field.eval(x, k, 4)) <= rep.bound_h1 * std::abs(x) + 1e-9);
    }
}

TEST_CASE("H2 envelope: |H(x)| <= K2 x^2 / (1 - gamma_max/rho_min^2)") {
    std::mt19937 gen(19);
    const double g = std::pow(16.0, 4.0 / 3.0);
    auto field = make_field(build_ladder(LadderRule::self_similar(16, g, 3)), cosine_valley_profile());
    const auto rep = validate_hypotheses(field);
    REQUIRE(rep.h2_holds);
    const double RP = field.ladder.radius_d(3);
    std::uniform_real_distribution<double> xs(-RP, RP);
    for (int i = 0; i < 200; ++i) {
        const double x = xs(gen);
        CHECK(std::abs(field.eval(x, 0, 3)) <= rep.bound_h2 * x * x + 1e-9);
    }
}
