#include <doctest.h>

#include <cmath>

#include "polyak/problems.hpp"
#include "polyak/rng.hpp"

using namespace polyak;
using problems::FunctionOracle;
using problems::Problem;
using problems::StochasticProblem;

namespace {

FunctionOracle det(const std::string& spec) {
    return std::get<FunctionOracle>(problems::make_problem(spec));
}

// Deterministic convex zoo entries used by the sampling properties below.
const std::vector<std::string> kConvexZoo = {
    "fig1", "quad", "quad?dim=4", "abs1d", "linf?dim=3", "l1?dim=4",
    "shifted_quad?a=0.5", "abs_shifted?a=1", "cycle_quad"};

}  // namespace

TEST_CASE("eval returns value and canonical subgradient") {
    const auto quad = det("quad");
    auto [v, g] = quad.eval(Vec{2.0});
    CHECK(v == doctest::Approx(2.0));
    CHECK(g[0] == doctest::Approx(2.0));

    const auto fig1 = det("fig1");
    auto [v0, g0] = fig1.eval(Vec{0.0});
    CHECK(v0 == doctest::Approx(2.0));
    CHECK(g0[0] == doctest::Approx(1.0));

    // At the kink the absolute-value term contributes the midpoint element 0.
    auto [vk, gk] = fig1.eval(Vec{-2.0});
    CHECK(vk == doctest::Approx(2.0));
    CHECK(gk[0] == doctest::Approx(-2.0));
}

TEST_CASE("dimension mismatch is a contract violation") {
    const auto quad = det("quad?dim=3");
    CHECK_THROWS_AS(quad.value(Vec{1.0}), contract_error);
    CHECK_THROWS_AS(quad.eval(Vec{1.0, 2.0}), contract_error);
}

TEST_CASE("zoo catalog lookups") {
    CHECK_THROWS_AS(problems::make_problem("does_not_exist"), lookup_error);
    CHECK_THROWS_AS(problems::make_problem("quad?dim=0"), config_error);
    CHECK_THROWS_AS(problems::make_problem("shifted_quad?a"), config_error);

    const auto sq = det("shifted_quad?a=0.5");
    CHECK(*sq.opt_value == doctest::Approx(0.5));
    CHECK(sq.value(Vec{1.0}) == doctest::Approx(1.0));
}

TEST_CASE("fig1 optimum") {
    const auto fig1 = det("fig1");
    CHECK((*fig1.opt_point)[0] == doctest::Approx(-1.0));
    CHECK(*fig1.opt_value == doctest::Approx(1.5));
    CHECK(*fig1.declared.self_bounded_L == doctest::Approx(9.0));
}

TEST_CASE("quad at its minimum") {
    const auto quad = det("quad");
    auto [v, g] = quad.eval(Vec{0.0});
    CHECK(v == 0.0);
    CHECK(g[0] == 0.0);
}

TEST_CASE("value at opt_point equals opt_value") {
    for (const auto& name : kConvexZoo) {
        const auto f = det(name);
        REQUIRE(f.has_opt());
        CHECK(std::abs(f.value(*f.opt_point) - *f.opt_value) <= 1e-12);
    }
}

TEST_CASE("canonical subgradient vanishes at the optimum") {
    for (const auto& name : kConvexZoo) {
        const auto f = det(name);
        const Vec g = f.subgradient(*f.opt_point);
        CHECK(norm(g) == 0.0);
    }
}

TEST_CASE("subgradient inequality on sampled pairs") {
    for (const auto& name : kConvexZoo) {
        const auto f = det(name);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            Vec x(f.dim), y(f.dim);
            for (int j = 0; j < f.dim; ++j) {
                x[static_cast<std::size_t>(j)] =
                    uniform(11, static_cast<std::uint64_t>(i) * 2 * f.dim + j, -10.0, 10.0);
                y[static_cast<std::size_t>(j)] = uniform(
                    11, static_cast<std::uint64_t>(i) * 2 * f.dim + f.dim + j, -10.0, 10.0);
            }
            const Vec g = f.subgradient(x);
            double lin = f.value(x);
            for (int j = 0; j < f.dim; ++j)
                lin += g[static_cast<std::size_t>(j)] *
                       (y[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)]);
            worst = std::min(worst, f.value(y) - lin);
        }
        INFO("problem ", name);
        CHECK(worst >= -1e-10);
    }
}

TEST_CASE("sps_fail mixture and its minimum") {
    const auto sp = std::get<StochasticProblem>(problems::make_problem("sps_fail"));
    const auto F = sp.mixture();

    // F(x) = 1.5 x^2 - x + 7.5
    for (double x : {-2.0, 0.0, 1.0, 3.5}) {
        CHECK(F.value(Vec{x}) == doctest::Approx(1.5 * x * x - x + 7.5).epsilon(1e-14));
        CHECK(F.subgradient(Vec{x})[0] == doctest::Approx(3.0 * x - 1.0).epsilon(1e-14));
    }
    CHECK((*F.opt_point)[0] == doctest::Approx(1.0 / 3.0));
    CHECK(*F.opt_value == doctest::Approx(44.0 / 6.0));

    // Independent oracle: dense scan of F.
    double best = 1e18, best_x = 0.0;
    for (double x = -5.0; x <= 5.0; x += 1e-5) {
        const double v = F.value(Vec{x});
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    CHECK(best == doctest::Approx(44.0 / 6.0).epsilon(1e-8));
    CHECK(best_x == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("stochastic problem validation") {
    auto sp = std::get<StochasticProblem>(problems::make_problem("sps_fail"));
    CHECK_NOTHROW(sp.validate());

    auto bad = sp;
    bad.weights = {0.5, 0.6};
    CHECK_THROWS_AS(bad.validate(), config_error);

    auto neg = sp;
    neg.weights = {1.5, -0.5};
    CHECK_THROWS_AS(neg.validate(), config_error);

    auto empty = sp;
    empty.components.clear();
    empty.weights.clear();
    CHECK_THROWS_AS(empty.validate(), config_error);
}

TEST_CASE("declared constants are internally consistent") {
    for (const auto& name : kConvexZoo) CHECK_NOTHROW(det(name).declared.validate());
    problems::PropertyConstants bad;
    bad.lipschitz_G = 0.5;
    bad.sharp_s = 1.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("l1 and linf declared constants scale with dim") {
    const auto l1 = det("l1?dim=4");
    CHECK(*l1.declared.lipschitz_G == doctest::Approx(2.0));
    CHECK(*l1.declared.sharp_s == doctest::Approx(1.0));

    const auto linf = det("linf?dim=4");
    CHECK(*linf.declared.lipschitz_G == doctest::Approx(1.0));
    CHECK(*linf.declared.sharp_s == doctest::Approx(0.5));
}

TEST_CASE("one-sided subgradient selections at kinks") {
    const auto fig1 = det("fig1");
    const auto sides = fig1.subgradient_extremes(Vec{-2.0});
    REQUIRE(sides.size() == 2);
    CHECK(sides[0][0] == doctest::Approx(-3.0));
    CHECK(sides[1][0] == doctest::Approx(-1.0));
    // Away from the kink the canonical selection is the only one.
    CHECK(fig1.subgradient_extremes(Vec{1.0}).size() == 1);
}

TEST_CASE("nonconvex_mix component is flagged and has no optimum data") {
    const auto sp = std::get<StochasticProblem>(problems::make_problem("nonconvex_mix"));
    CHECK_FALSE(sp.components[0].convex);
    CHECK_FALSE(sp.components[0].opt_value.has_value());
    CHECK(sp.components[1].convex);
    // F = |x|/2
    CHECK(sp.mixture().value(Vec{3.0}) == doctest::Approx(1.5));
}

TEST_CASE("interp_quads is interpolating") {
    const auto sp = std::get<StochasticProblem>(problems::make_problem("interp_quads"));
    CHECK(sp.interpolating);
    for (const auto& c : sp.components) CHECK(c.value(*sp.opt_point) == 0.0);
}
