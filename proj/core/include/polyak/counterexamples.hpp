#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyak/problems.hpp"
#include "polyak/steppers.hpp"

namespace polyak::counterexamples {

using problems::FunctionOracle;
using problems::StochasticProblem;

// Sublevel region around a strictly positive minimum inside which the map T
// strictly expands distances. The threshold is h* mu/(8L - mu) for
// self-bounded + quadratic-growth h, and h* mu/(2L - mu) for Lipschitz +
// sharp h.
struct InstabilityRegion {
    enum class Kind { self_bounded_qg, lipschitz_sharp };
    Kind kind = Kind::self_bounded_qg;
    double h_star = 1.0;
    double mu = 1.0;
    double L = 1.0;

    double c() const {
        const double denom =
            kind == Kind::self_bounded_qg ? 8.0 * L - mu : 2.0 * L - mu;
        if (!(denom > 0.0)) throw config_error("instability region: nonpositive denominator");
        return mu / denom;
    }
    double threshold() const { return h_star * c(); }
};

struct InstabilitySample {
    Vec x;
    double dist_before = 0.0;
    double dist_after = 0.0;
    double stepsize = 0.0;
    bool cutter_violated = false;
};

struct InstabilityReport {
    int requested = 0;
    int in_region = 0;
    int skipped = 0;  // draws that fell outside S
    int expanded = 0;
    int cutter_violations = 0;  // quasi-firm non-expansiveness failures
    double min_expansion_ratio = 0.0;
    Vec worst_point;
    bool all_expand = false;
    std::vector<InstabilitySample> samples;  // populated when record_samples
};

// Samples points of S (rejection from the ball the growth condition confines
// S to) and asserts every one satisfies ||T(x) - x*|| > ||x - x*||.
InstabilityReport instability_check(const FunctionOracle& h, const InstabilityRegion& region,
                                    int n_samples, std::uint64_t seed,
                                    bool record_samples = false);

struct SubregionReport {
    double k = 1.0;
    double c = 0.0;
    double bound = 0.0;         // stepsize bound valid on the subregion
    double max_stepsize = 0.0;  // largest h/||g||^2 seen among the samples
    int samples = 0;
    bool holds = false;
};

// Stepsize bound inside the unstable region: 2k(c+1)/(mu c) on S \ S_k for
// the quadratic-growth case, (c+1) h*/mu^2 on all of S for the sharp case.
SubregionReport bounded_subregion(const FunctionOracle& h, const InstabilityRegion& region,
                                  double k, int n_samples, std::uint64_t seed);

enum class CyclePrecision { double_prec, extended };

struct CycleReport {
    CyclePrecision precision;
    int t_max = 0;
    Vec cycle_points;            // first period (3 iterates)
    double closure_error = 0.0;  // |x4 - x1|
    double period_multiplier = 0.0;  // product of |T'| along the first period
    std::vector<double> avg_gap;     // h(mean of x_1..x_t) - h* per t
    double min_avg_gap = 0.0;
    std::vector<double> iterates;  // double approximations, for CSV export
};

// Iterates T for h(x) = x^2 + 1 from x1 = cot(pi/7). The 3-cycle is
// repelling with per-period multiplier 8, so rounding drift grows ~8^(t/3);
// double precision certifies the running-average gap to t <= ~45 and the
// extended mode (256-bit significands) far beyond t = 200.
CycleReport run_cycle(CyclePrecision precision, int t_max);

// Preimage levels T^-k({0}) of the map x -> (x^2 - 2a)/(2x): level k+1 is
// {x +- sqrt(x^2 + 2a) : x in level k}. Level k holds at most 2^k points.
struct PreimageTree {
    double a = 0.5;
    std::vector<std::vector<double>> levels;  // sorted per level
};

PreimageTree preimage_tree(double a, int depth);

struct NonconvergenceReport {
    int n_starts = 0;
    int n_steps = 0;
    int converged = 0;       // trajectories whose whole tail stays within 1e-3 of 0
    double min_tail_sup = 0.0;  // smallest per-trajectory settle radius
    double min_tail_abs = 0.0;  // closest any tail iterate came to 0 (informational)
    double tail_fraction = 0.1;
    double radius = 1e-3;
};

// Iterates the map from uniform [-10,10] starts and counts trajectories that
// enter and stay inside |x| < 1e-3 over the final 10% of steps. The unstable
// fixed point makes visits near 0 recurrent but never absorbing, so the
// converged count is the non-convergence verdict.
NonconvergenceReport verify_nonconvergence(double a, int n_starts, int n_steps,
                                           std::uint64_t seed);

struct MarkovChainState {
    std::vector<double> support;
    std::vector<double> probabilities;
    int step = 0;
};

struct ChainReport {
    std::vector<MarkovChainState> states;  // index t-1 holds the law of x_t
    std::vector<double> expected_F;
    std::vector<double> gap;  // E[F(x_t)] - min F
    double min_F = 0.0;
    bool exact = true;
    std::string warning;
};

// Exact distribution evolution of the stochastic Polyak update with
// h = f(.,xi) - inf f(.,xi) and gamma = inf on a finite 1-d family. The
// curvature slack defaults to 1/2, which on quadratics jumps exactly to the
// sampled component's minimizer (the random-walk construction). Support
// points within 1e-12 are merged; beyond support_cap the evolution falls
// back to a particle approximation and flags a warning.
ChainReport exact_sps_chain(const StochasticProblem& problem, double x1, int T,
                            double slack_c = 0.5, std::size_t support_cap = 10000);

// Both sides of the sublevel-gap identity: f - f* < c f*  iff
// f - f* < (c/(c+1)) f, for f* > 0.
inline std::pair<bool, bool> gap_equivalence_pair(double f_val, double f_star, double c) {
    return {f_val - f_star < c * f_star, f_val - f_star < (c / (c + 1.0)) * f_val};
}

}  // namespace polyak::counterexamples
