#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polyak/problems.hpp"
#include "polyak/steppers.hpp"
#include "polyak/surrogates.hpp"

namespace polyak::diagnostics {

using problems::FunctionOracle;
using steppers::Trajectory;
using surrogates::SurrogateFamily;
using surrogates::SurrogateOracle;

// Worst-margin threshold: double-precision slack on analytically tight
// inequalities.
inline constexpr double kCertTol = 1e-9;

// One evaluation site: a point plus the subgradient selection to test there.
// Kinks contribute one site per one-sided selection.
struct GridSite {
    Vec x;
    Vec g;
};

struct Grid {
    std::vector<GridSite> sites;
    std::string description;
};

// Standard certificate grid. 1-d: [-10,10] at step 1e-2, points within 1e-9
// of a kink replaced by the kink's one-sided selections. d>1: 10^4
// quasi-random points in the ball ||x - x*|| <= 10.
Grid standard_grid(const FunctionOracle& oracle);

enum class PropertyKind {
    lsuc,
    approx_lsuc,
    self_bounded,
    lipschitz,
    sharp,
    quad_growth,
    qg_plus,
    holder,
};

std::string property_name(PropertyKind p);

// Outcome of a property check over a grid; holds iff the most-violated slack
// stays above -kCertTol.
struct Certificate {
    PropertyKind property;
    double c1 = 0.0;  // lambda / L / G / s / mu / L_nu
    double c2 = 0.0;  // nu (holder only)
    long sample_count = 0;
    double worst_margin = 0.0;
    Vec witness;
    bool holds = false;
    std::vector<double> margins;  // aligned with the grid sites
};

// margin(y) = [f(x*) - f(y) - <g, x*-y>] - ||g||^2 / (2 lambda(y)).
// Convex L-smooth functions pass with the constant rule lambda = L.
Certificate check_lsuc(const FunctionOracle& f, const std::function<double(Point)>& lambda_rule,
                       const Grid& grid);
Certificate check_lsuc_const(const FunctionOracle& f, double lambda, const Grid& grid);

// Approximate star upper curvature of psi = h^2/2 with lambda = ||g||^2 for
// the h-subgradient g and eps = 2 sqrt(psi(x) psi(x*)) - psi(x*). The grid is
// built over the base oracle; h-subgradients are derived per site.
Certificate check_approx_lsuc(const SurrogateOracle& psi, const Grid& base_grid);

Certificate check_self_bounded(const FunctionOracle& f, double L, const Grid& grid);
Certificate check_lipschitz(const FunctionOracle& f, double G, const Grid& grid);
Certificate check_sharp(const FunctionOracle& f, double s, const Grid& grid);
Certificate check_qg(const FunctionOracle& f, double mu, const Grid& grid);
Certificate check_qg_plus(const FunctionOracle& f, double L, const Grid& grid);
Certificate check_holder(const FunctionOracle& f, double L_nu, double nu, const Grid& grid);

// Both directions of the QG+ <-> star-upper-curvature equivalence:
// the tightest grid QG+ constant must be a valid global LSUC constant, and
// the pointwise LSUC constant must bound f(x) - f* by (lambda_x/2) dist^2.
struct EquivalenceReport {
    double qgplus_L = 0.0;       // tightest QG+ constant measured on the grid
    Certificate lsuc_at_L;       // LSUC certificate at that constant
    double worst_pointwise_margin = 0.0;
    Vec pointwise_witness;
    bool holds = false;
};
EquivalenceReport check_lsuc_qgplus_equivalence(const FunctionOracle& f, const Grid& grid);

// ---- per-step and rate audits --------------------------------------------

struct LedgerRow {
    int t;
    double lhs;
    double rhs;
    double slack;  // rhs - lhs
};

// Per-step one-step inequality plus the summed bound. In exact mode
// (psi(x*) = 0 for every member) the rows are the descent inequality
// eta_t psi(x_t) <= d_t^2/2 - d_{t+1}^2/2 and the cumulative bound is
// sum eta_t psi(x_t) <= ||x_1 - x*||^2 / 2; otherwise the rows carry the
// clip and epsilon correction terms of the approximate-curvature bound.
struct BoundLedger {
    std::vector<LedgerRow> rows;
    double worst_slack = 0.0;
    bool satisfied = false;  // every row has lhs <= rhs + 1e-10
    bool exact_mode = false;
    double cumulative_lhs = 0.0;
    double cumulative_bound = 0.0;
    bool cumulative_ok = false;
};

BoundLedger audit_one_step(const Trajectory& traj, const SurrogateFamily& family);

struct RateRegime {
    enum class Kind {
        lipschitz,
        self_bounded,
        sharp,
        alg1_self_bounded,
        alg1_lipschitz,
        alg1_linear,
        holder,
        alg1_regret,  // per-seed sum form of the second self-bounded display
    };
    Kind kind = Kind::lipschitz;
    double G = 0.0;
    double L = 0.0;
    double s = 0.0;
    double mu = 0.0;
    double gamma = steppers::kInf;
    double L_nu = 0.0;
    double nu = 1.0;
};

// "lipschitz:G=2", "sharp:s=1:G=2", "alg1_self_bounded:L=4:gamma=0.1", ...
RateRegime parse_rate_regime(const std::string& spec);
std::string regime_name(RateRegime::Kind k);

// Q(y) = 2y + L_nu (2 gamma y)^((1+nu)/2) (1+1/nu)^nu, the Holder-regime
// bound envelope; nu = 1 specializes to the self-bounded form 2y + 4 L gamma y
// and nu -> 0 to the Lipschitz form.
double holder_Q(double y, double L_nu, double nu, double gamma);

struct RateReport {
    std::string regime;
    double measured = 0.0;  // worst prefix value, or seed mean + 3 SE
    double bound = 0.0;     // bound at the binding prefix / final horizon
    bool holds = false;
    int violations = 0;
    std::string detail;
};

// Evaluates the regime's convergence bound on one or more trajectories (same
// config, different seeds). Deterministic regimes check every prefix against
// the averaged and best iterate; stochastic regimes compare the seed mean
// plus three standard errors against the bound.
RateReport audit_rate(const std::vector<Trajectory>& runs, const SurrogateFamily& family,
                      const RateRegime& regime);

}  // namespace polyak::diagnostics
