#include <doctest.h>

#include <cmath>

#include "polyak/problems.hpp"
#include "polyak/rng.hpp"
#include "polyak/surrogates.hpp"

using namespace polyak;
using problems::FunctionOracle;
using problems::StochasticProblem;
using surrogates::Hinge;
using surrogates::LowerBound;
using surrogates::ShiftByOpt;
using surrogates::SurrogateSpec;

namespace {

FunctionOracle det(const std::string& spec) {
    return std::get<FunctionOracle>(problems::make_problem(spec));
}

}  // namespace

TEST_CASE("shift_opt surrogate values") {
    const auto quad = surrogates::make_surrogate({det("quad"), ShiftByOpt{}});
    CHECK(quad.psi_value(Vec{2.0}) == doctest::Approx(2.0));

    const auto fig1 = surrogates::make_surrogate({det("fig1"), ShiftByOpt{}});
    CHECK(fig1.psi_value(Vec{-1.0}) == doctest::Approx(0.0));
    CHECK(fig1.psi_opt_value == 0.0);
}

TEST_CASE("hinge surrogate values") {
    const auto s = surrogates::make_surrogate({det("shifted_quad?a=0.5"), Hinge{0.0}});
    CHECK(s.h_value(Vec{1.0}) == doctest::Approx(1.0));
    CHECK(s.psi_value(Vec{1.0}) == doctest::Approx(0.5));
}

TEST_CASE("psi is exactly half h squared with the chain-rule subgradient") {
    for (const auto& name : {"fig1", "quad?dim=3", "l1?dim=4"}) {
        const auto s = surrogates::make_surrogate({det(name), ShiftByOpt{}});
        for (int i = 0; i < 200; ++i) {
            Vec x(s.base.dim);
            for (int j = 0; j < s.base.dim; ++j)
                x[static_cast<std::size_t>(j)] =
                    uniform(3, static_cast<std::uint64_t>(i) * s.base.dim + j, -8.0, 8.0);
            const double h = s.h_value(x);
            CHECK(s.psi_value(x) == 0.5 * h * h);
            const Vec gh = s.h_subgradient(x);
            const Vec gp = s.psi_subgradient(x);
            for (std::size_t j = 0; j < gh.size(); ++j) CHECK(gp[j] == h * gh[j]);
        }
    }
}

TEST_CASE("shift_opt without a known optimum is a configuration error") {
    FunctionOracle f;
    f.name = "no_opt";
    f.dim = 1;
    f.value_fn = [](Point x) { return x[0] * x[0]; };
    f.subgrad_fn = [](Point x) { return Vec{2.0 * x[0]}; };
    CHECK_THROWS_AS(surrogates::make_surrogate({f, ShiftByOpt{}}), config_error);
}

TEST_CASE("hinge subgradient selection") {
    const auto abs1d = det("abs1d");
    CHECK(surrogates::hinge_subgradient({abs1d, Hinge{0.0}}, Vec{3.0})[0] == doctest::Approx(1.0));
    CHECK(surrogates::hinge_subgradient({abs1d, Hinge{1.0}}, Vec{0.5})[0] == 0.0);
    // Boundary f(x) = a takes the alpha = 0 selection.
    CHECK(surrogates::hinge_subgradient({abs1d, Hinge{0.5}}, Vec{0.5})[0] == 0.0);
    CHECK_THROWS_AS(surrogates::hinge_subgradient({abs1d, ShiftByOpt{}}, Vec{1.0}),
                    config_error);
}

TEST_CASE("chain rule: h(x)g is a subgradient of psi") {
    for (const auto& name : {"fig1", "quad", "abs1d"}) {
        const auto s = surrogates::make_surrogate({det(name), ShiftByOpt{}});
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const Vec x{uniform(5, static_cast<std::uint64_t>(i), -10.0, 10.0)};
            const double psix = s.psi_value(x);
            const Vec gt = s.psi_subgradient(x);
            for (int k = 0; k < 1000; ++k) {
                const Vec y{uniform(6, static_cast<std::uint64_t>(i) * 1000 + k, -10.0, 10.0)};
                worst = std::min(worst, s.psi_value(y) - psix - gt[0] * (y[0] - x[0]));
            }
        }
        INFO("problem ", name);
        CHECK(worst >= -1e-10);
    }
}

TEST_CASE("psi subgradient norm is at most G h(x) for Lipschitz bases") {
    for (const auto& name : {"abs1d", "l1?dim=4", "linf?dim=4"}) {
        const auto base = det(name);
        const double G = *base.declared.lipschitz_G;
        const auto s = surrogates::make_surrogate({base, ShiftByOpt{}});
        for (int i = 0; i < 500; ++i) {
            Vec x(base.dim);
            for (int j = 0; j < base.dim; ++j)
                x[static_cast<std::size_t>(j)] =
                    uniform(7, static_cast<std::uint64_t>(i) * base.dim + j, -10.0, 10.0);
            CHECK(norm(s.psi_subgradient(x)) <= G * s.h_value(x) + 1e-12);
        }
    }
}

TEST_CASE("lower_bound transform warns when q exceeds inf f") {
    const auto ok = surrogates::make_surrogate({det("shifted_quad?a=0.5"), LowerBound{0.2}});
    CHECK(ok.warnings.empty());
    CHECK(ok.psi_opt_value == doctest::Approx(0.5 * 0.3 * 0.3));

    const auto bad = surrogates::make_surrogate({det("shifted_quad?a=0.5"), LowerBound{0.8}});
    CHECK_FALSE(bad.warnings.empty());
}

TEST_CASE("transform parsing") {
    CHECK(std::holds_alternative<ShiftByOpt>(surrogates::parse_transform("shift_opt")));
    CHECK(std::holds_alternative<ShiftByOpt>(
        surrogates::parse_transform("shift_per_component_inf")));
    CHECK(std::get<Hinge>(surrogates::parse_transform("hinge:2")).level == doctest::Approx(2.0));
    CHECK(std::get<LowerBound>(surrogates::parse_transform("lower_bound:0.5")).q ==
          doctest::Approx(0.5));
    CHECK_THROWS_AS(surrogates::parse_transform("nope"), config_error);
    CHECK_THROWS_AS(surrogates::parse_transform("hinge:xyz"), config_error);
}

TEST_CASE("family of sps_fail under the per-component shift") {
    const auto prob = problems::make_problem("sps_fail");
    const auto fam = surrogates::make_family(prob, "shift_opt");
    REQUIRE(fam.size() == 2);
    CHECK((*fam.comparator)[0] == doctest::Approx(1.0 / 3.0));
    // H(x) = F(x) - 6, so H(x*) = 44/6 - 6 = 4/3.
    CHECK(fam.H_at_comparator == doctest::Approx(4.0 / 3.0));
    CHECK_FALSE(fam.exact);
    CHECK(fam.H(Vec{1.0}) == doctest::Approx(2.0));
}

TEST_CASE("interpolating family is exact") {
    const auto fam = surrogates::make_family(problems::make_problem("interp_quads"), "shift_opt");
    CHECK(fam.exact);
    CHECK(fam.H_at_comparator == 0.0);
    CHECK(fam.H(Vec{2.0}) == doctest::Approx(3.0));  // 0.5*(2) + 0.5*(4)
}

TEST_CASE("hinge_opt family on the nonconvex mixture certifies H only") {
    const auto fam =
        surrogates::make_family(problems::make_problem("nonconvex_mix"), "hinge_opt");
    // h1 = (-|x| - 0)_+ = 0, h2 = (2|x|)_+, so H(x) = |x|.
    CHECK(fam.H(Vec{2.0}) == doctest::Approx(2.0));
    CHECK(fam.H(Vec{-0.5}) == doctest::Approx(0.5));
    CHECK(fam.H_at_comparator == 0.0);
    CHECK(fam.exact);
    // H dominates the suboptimality of F = |x|/2.
    for (double x : {-3.0, -1.0, 0.25, 2.0})
        CHECK(fam.H(Vec{x}) >= 0.5 * std::abs(x) - 1e-15);
}

TEST_CASE("deterministic family defaults") {
    const auto fam = surrogates::make_family(problems::make_problem("fig1"), "shift_opt");
    REQUIRE(fam.size() == 1);
    CHECK(fam.exact);
    CHECK((*fam.comparator)[0] == doctest::Approx(-1.0));
    CHECK(fam.H(Vec{0.0}) == doctest::Approx(0.5));
}
