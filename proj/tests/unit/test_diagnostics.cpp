#include <doctest.h>

#include <cmath>

#include "polyak/diagnostics.hpp"
#include "polyak/problems.hpp"
#include "polyak/rng.hpp"
#include "polyak/steppers.hpp"
#include "polyak/surrogates.hpp"

using namespace polyak;
using diagnostics::Certificate;
using diagnostics::Grid;
using problems::FunctionOracle;
using surrogates::ShiftByOpt;

namespace {

FunctionOracle det(const std::string& spec) {
    return std::get<FunctionOracle>(problems::make_problem(spec));
}

}  // namespace

TEST_CASE("standard grid skips kinks and adds one-sided sites") {
    const auto fig1 = det("fig1");
    const Grid grid = diagnostics::standard_grid(fig1);
    int kink_sites = 0;
    for (const auto& s : grid.sites) {
        if (s.x[0] == -2.0) ++kink_sites;
        CHECK(std::abs(s.x[0]) <= 10.0 + 1e-12);
    }
    CHECK(kink_sites == 2);  // both one-sided selections

    const Grid ball = diagnostics::standard_grid(det("quad?dim=4"));
    CHECK(ball.sites.size() == 10000);
    for (const auto& s : ball.sites) CHECK(norm(s.x) <= 10.0 + 1e-9);
}

TEST_CASE("fig1 curvature certificates") {
    const auto fig1 = det("fig1");
    const Grid grid = diagnostics::standard_grid(fig1);

    const auto pass = diagnostics::check_lsuc_const(fig1, 2.0, grid);
    CHECK(pass.holds);
    CHECK(pass.worst_margin >= -1e-9);

    const auto fail = diagnostics::check_lsuc_const(fig1, 0.5, grid);
    CHECK_FALSE(fail.holds);
    // A violation witness sits essentially on the kink.
    bool near_kink_violation = false;
    for (std::size_t i = 0; i < grid.sites.size(); ++i)
        if (std::abs(grid.sites[i].x[0] + 2.0) <= 0.1 && fail.margins[i] < -1e-9)
            near_kink_violation = true;
    CHECK(near_kink_violation);

    const auto sb = diagnostics::check_self_bounded(fig1, 9.0, grid);
    CHECK(sb.holds);
    // L = 9 is tight at the kink's left selection.
    CHECK(sb.worst_margin == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("surrogates are ||g||^2 star upper curved") {
    for (const auto& name : {"fig1", "quad", "abs1d", "l1?dim=4"}) {
        const auto base = det(name);
        const auto s = surrogates::make_surrogate({base, ShiftByOpt{}});
        const auto phi = s.as_oracle();
        const Grid grid = diagnostics::standard_grid(phi);
        const auto cert = diagnostics::check_lsuc(
            phi, [&](Point x) { return std::max(norm_sq(base.subgradient(x)), 1e-300); }, grid);
        INFO("problem ", name);
        CHECK(cert.holds);
    }
}

TEST_CASE("approximate curvature of psi") {
    // Interpolating case: epsilon = 0 and the exact inequality holds.
    const auto exact = surrogates::make_surrogate({det("shifted_quad?a=0"), ShiftByOpt{}});
    const auto g0 = diagnostics::standard_grid(exact.base);
    CHECK(diagnostics::check_approx_lsuc(exact, g0).holds);

    // h = x^2/2 + 0.5 via the raw transform: psi* = 1/8 and at x = 1 the
    // epsilon term is 2 sqrt(psi psi*) - psi* = 3/8.
    const auto s = surrogates::make_surrogate({det("shifted_quad?a=0.5"), surrogates::LowerBound{0.0}});
    CHECK(s.psi_opt_value == doctest::Approx(1.0 / 8.0));
    const double psi1 = s.psi_value(Vec{1.0});
    CHECK(psi1 == doctest::Approx(0.5));
    const double eps1 = 2.0 * std::sqrt(psi1 * s.psi_opt_value) - s.psi_opt_value;
    CHECK(eps1 == doctest::Approx(3.0 / 8.0));
    CHECK(diagnostics::check_approx_lsuc(s, diagnostics::standard_grid(s.base)).holds);

    // Hinged fig1 at level 2.
    const auto hinged = surrogates::make_surrogate({det("fig1"), surrogates::Hinge{2.0}});
    CHECK(diagnostics::check_approx_lsuc(hinged, diagnostics::standard_grid(hinged.base)).holds);
}

TEST_CASE("self-bounded, sharp, lipschitz checks on the zoo") {
    const auto quad = det("quad");
    const Grid gq = diagnostics::standard_grid(quad);
    const auto sb = diagnostics::check_self_bounded(quad, 1.0, gq);
    CHECK(sb.holds);
    CHECK(std::abs(sb.worst_margin) <= 1e-12);  // equality case

    const auto abs1d = det("abs1d");
    const Grid ga = diagnostics::standard_grid(abs1d);
    CHECK(diagnostics::check_sharp(abs1d, 1.0, ga).holds);
    CHECK_FALSE(diagnostics::check_sharp(abs1d, 1.01, ga).holds);
    CHECK(diagnostics::check_lipschitz(abs1d, 1.0, ga).holds);
    CHECK_FALSE(diagnostics::check_sharp(quad, 1.0, gq).holds);  // smooth min is not sharp
}

TEST_CASE("declared property constants pass their certificates") {
    for (const auto& name : {"fig1", "quad", "quad?dim=4", "abs1d", "linf?dim=3", "l1?dim=4",
                             "shifted_quad?a=0.5", "abs_shifted?a=1", "cycle_quad"}) {
        const auto f = det(name);
        const Grid grid = diagnostics::standard_grid(f);
        INFO("problem ", name);
        if (f.declared.lipschitz_G)
            CHECK(diagnostics::check_lipschitz(f, *f.declared.lipschitz_G, grid).holds);
        if (f.declared.self_bounded_L)
            CHECK(diagnostics::check_self_bounded(f, *f.declared.self_bounded_L, grid).holds);
        if (f.declared.sharp_s) CHECK(diagnostics::check_sharp(f, *f.declared.sharp_s, grid).holds);
        if (f.declared.quadratic_growth_mu)
            CHECK(diagnostics::check_qg(f, *f.declared.quadratic_growth_mu, grid).holds);
        if (f.declared.holder)
            CHECK(diagnostics::check_holder(f, f.declared.holder->L_nu, f.declared.holder->nu,
                                            grid)
                      .holds);
    }
}

TEST_CASE("certificates are monotone in their constants") {
    const auto fig1 = det("fig1");
    const Grid grid = diagnostics::standard_grid(fig1);
    CHECK(diagnostics::check_lsuc_const(fig1, 4.0, grid).holds);       // lambda doubled
    CHECK(diagnostics::check_self_bounded(fig1, 18.0, grid).holds);    // L doubled
    const auto abs1d = det("abs1d");
    const Grid ga = diagnostics::standard_grid(abs1d);
    CHECK(diagnostics::check_sharp(abs1d, 0.5, ga).holds);             // s halved
    CHECK(diagnostics::check_lipschitz(abs1d, 2.0, ga).holds);         // G doubled
}

TEST_CASE("quadratic growth and its upper counterpart") {
    const auto quad = det("quad");
    const Grid grid = diagnostics::standard_grid(quad);
    CHECK(diagnostics::check_qg(quad, 1.0, grid).holds);
    CHECK(diagnostics::check_qg_plus(quad, 1.0, grid).holds);
    const auto small = diagnostics::check_qg_plus(quad, 0.1, grid);
    CHECK_FALSE(small.holds);
    CHECK(norm(small.witness) > 0.0);
}

TEST_CASE("surrogate growth inherited from the base function") {
    // Sharp base: phi = psi of abs1d has quadratic growth with mu = s^2 = 1.
    const auto abs_phi = surrogates::make_surrogate({det("abs1d"), ShiftByOpt{}}).as_oracle();
    CHECK(diagnostics::check_qg(abs_phi, 1.0, diagnostics::standard_grid(abs_phi)).holds);

    // Self-bounded + QG base: phi(x) >= (mu ||g||^2 / (8L)) dist^2, tight for
    // the quadratic (mu = L = 1).
    const auto quad = det("quad");
    double worst = std::numeric_limits<double>::infinity();
    const auto s = surrogates::make_surrogate({quad, ShiftByOpt{}});
    for (int i = -1000; i <= 1000; ++i) {
        const Vec x{0.01 * i};
        const double gg = norm_sq(quad.subgradient(x));
        const double lhs = s.psi_value(x);
        const double rhs = (1.0 * gg / 8.0) * norm_sq(x);
        worst = std::min(worst, lhs - rhs);
    }
    CHECK(worst >= -1e-12);
}

TEST_CASE("QG+ and star upper curvature agree both ways") {
    for (const auto& name : {"quad", "fig1"}) {
        const auto f = det(name);
        const auto rep = diagnostics::check_lsuc_qgplus_equivalence(
            f, diagnostics::standard_grid(f));
        INFO("problem ", name);
        CHECK(rep.holds);
        CHECK(rep.lsuc_at_L.worst_margin >= -1e-9);
        CHECK(rep.worst_pointwise_margin >= -1e-9);
    }
    // For the quadratic the tight constant is 1 on both sides.
    const auto rep = diagnostics::check_lsuc_qgplus_equivalence(
        det("quad"), diagnostics::standard_grid(det("quad")));
    CHECK(rep.qgplus_L == doctest::Approx(1.0));
}

TEST_CASE("one-step ledger on the halving run") {
    const auto prob = problems::make_problem("quad");
    const auto fam = surrogates::make_family(prob, "shift_opt");
    const auto traj = steppers::run(steppers::parse_stepper("polyak"), prob, "", Vec{8.0}, 50, 0);
    const auto ledger = diagnostics::audit_one_step(traj, fam);
    CHECK(ledger.exact_mode);
    CHECK(ledger.satisfied);
    CHECK(ledger.worst_slack >= -1e-10);
    CHECK(ledger.cumulative_bound == doctest::Approx(32.0));
    // Geometric sum: 8 * (1 - (1/4)^50) / (3/4) = 32/3.
    CHECK(ledger.cumulative_lhs == doctest::Approx(32.0 / 3.0));
    CHECK(ledger.cumulative_ok);
}

TEST_CASE("one-step ledger is trivial after exact convergence") {
    const auto prob = problems::make_problem("abs1d");
    const auto fam = surrogates::make_family(prob, "shift_opt");
    const auto traj = steppers::run(steppers::parse_stepper("polyak"), prob, "", Vec{5.0}, 10, 0);
    const auto ledger = diagnostics::audit_one_step(traj, fam);
    CHECK(ledger.satisfied);
    CHECK(ledger.cumulative_lhs <= ledger.cumulative_bound);
}

TEST_CASE("approximate ledger covers clipped and shifted runs") {
    const auto prob = problems::make_problem("shifted_quad?a=0.5");
    const auto fam = surrogates::make_family(prob, "lower_bound:0");
    const auto traj = steppers::run(steppers::parse_stepper("alg1:0.1"), prob, "lower_bound:0",
                                    Vec{3.0}, 80, 0);
    const auto ledger = diagnostics::audit_one_step(traj, fam);
    CHECK_FALSE(ledger.exact_mode);
    CHECK(ledger.satisfied);
}

TEST_CASE("approximate ledger never reports a violation across random runs") {
    for (const auto& name : {"fig1", "quad", "shifted_quad?a=0.3", "interp_quads", "sps_fail"}) {
        const auto prob = problems::make_problem(name);
        for (std::uint64_t seed : {0ull, 5ull}) {
            const double gamma = 0.05 + 0.4 * uniform01(99, seed);
            const auto cfg = steppers::parse_stepper("alg1:" + std::to_string(gamma));
            const auto fam = surrogates::make_family(prob, "shift_opt");
            Vec x1(problems::problem_dim(prob), 2.0);
            const auto traj = steppers::run(cfg, prob, "shift_opt", x1, 60, seed);
            const auto ledger = diagnostics::audit_one_step(traj, fam);
            INFO("problem ", name, " seed ", seed, " gamma ", gamma);
            CHECK(ledger.satisfied);
        }
    }
}

TEST_CASE("one-step audit rejects mismatched trajectories") {
    const auto prob = problems::make_problem("quad");
    const auto fam = surrogates::make_family(prob, "shift_opt");
    const auto traj = steppers::run(steppers::parse_stepper("gd:0.2"), prob, "", Vec{4.0}, 20, 0);
    CHECK_THROWS_AS(diagnostics::audit_one_step(traj, fam), config_error);
}

TEST_CASE("deterministic rate audits") {
    const auto cfg = steppers::parse_stepper("polyak");

    // Lipschitz and sharp regimes on l1 in d = 4 (G = 2, s = 1).
    const auto l1 = problems::make_problem("l1?dim=4");
    const auto fam = surrogates::make_family(l1, "shift_opt");
    const auto traj = steppers::run(cfg, l1, "", Vec{1.0, 1.0, 1.0, 1.0}, 50, 0);
    const auto lip = diagnostics::audit_rate({traj}, fam, diagnostics::parse_rate_regime(
                                                              "lipschitz:G=2"));
    CHECK(lip.holds);
    CHECK(lip.violations == 0);
    const auto shp =
        diagnostics::audit_rate({traj}, fam, diagnostics::parse_rate_regime("sharp:s=1:G=2"));
    CHECK(shp.holds);

    // Self-bounded regime on quad for two horizons.
    const auto quad = problems::make_problem("quad");
    const auto famq = surrogates::make_family(quad, "shift_opt");
    for (int T : {10, 100}) {
        const auto tq = steppers::run(cfg, quad, "", Vec{8.0}, T, 0);
        const auto rep = diagnostics::audit_rate({tq}, famq,
                                                 diagnostics::parse_rate_regime("self_bounded:L=1"));
        INFO("T = ", T);
        CHECK(rep.holds);
    }
}

TEST_CASE("stochastic rate audit over seeds") {
    const auto prob = problems::make_problem("sps_fail");
    const auto fam = surrogates::make_family(prob, "shift_opt");
    const auto cfg = steppers::parse_stepper("alg1:0.1");
    std::vector<steppers::Trajectory> runs;
    for (std::uint64_t s = 0; s < 20; ++s)
        runs.push_back(steppers::run(cfg, prob, "shift_opt", Vec{1.0}, 300, s));
    const auto rep = diagnostics::audit_rate(
        runs, fam, diagnostics::parse_rate_regime("alg1_self_bounded:L=4:gamma=0.1"));
    CHECK(rep.holds);
    CHECK(rep.measured <= rep.bound);

    const auto regret = diagnostics::audit_rate(
        runs, fam, diagnostics::parse_rate_regime("alg1_regret:L=4:gamma=0.1"));
    CHECK(regret.holds);
}

TEST_CASE("linear regime on the interpolating pair") {
    const auto prob = problems::make_problem("interp_quads");
    const auto fam = surrogates::make_family(prob, "shift_opt");
    const auto cfg = steppers::parse_stepper("alg1:inf");
    std::vector<steppers::Trajectory> runs;
    for (std::uint64_t s = 0; s < 10; ++s)
        runs.push_back(steppers::run(cfg, prob, "shift_opt", Vec{2.0}, 30, s));
    const auto rep = diagnostics::audit_rate(
        runs, fam, diagnostics::parse_rate_regime("alg1_linear:L=2:mu=1.5:gamma=inf"));
    CHECK(rep.holds);
}

TEST_CASE("regime parsing and constants") {
    CHECK_THROWS_AS(diagnostics::parse_rate_regime("warp:G=1"), config_error);
    CHECK_THROWS_AS(diagnostics::parse_rate_regime("lipschitz:Z=1"), config_error);
    const auto r = diagnostics::parse_rate_regime("holder:L_nu=1:nu=1:gamma=0.5");
    CHECK(r.L_nu == doctest::Approx(1.0));
    CHECK(r.gamma == doctest::Approx(0.5));

    // Missing constants surface as configuration errors.
    const auto prob = problems::make_problem("quad");
    const auto fam = surrogates::make_family(prob, "shift_opt");
    const auto traj =
        steppers::run(steppers::parse_stepper("polyak"), prob, "", Vec{4.0}, 10, 0);
    CHECK_THROWS_AS(
        diagnostics::audit_rate({traj}, fam, diagnostics::parse_rate_regime("lipschitz")),
        config_error);
}

TEST_CASE("holder Q envelope") {
    // nu = 0 is the Lipschitz end, nu = 1 the self-bounded end.
    CHECK(diagnostics::holder_Q(2.0, 3.0, 0.0, 0.5) ==
          doctest::Approx(4.0 + 3.0 * std::sqrt(2.0)));
    CHECK(diagnostics::holder_Q(2.0, 3.0, 1.0, 0.5) == doctest::Approx(4.0 + 12.0 * 2.0 * 0.5));
}
