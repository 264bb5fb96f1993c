#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "polyak/problems.hpp"
#include "polyak/surrogates.hpp"

namespace polyak::steppers {

using problems::FunctionOracle;
using problems::Problem;
using surrogates::SurrogateFamily;
using surrogates::SurrogateOracle;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Iterates with norm above this abort the run; near an unstable fixed point
// unbounded escape is expected behaviour, not a bug.
inline constexpr double kDivergenceBound = 1e12;

struct StepRecord {
    int t = 0;       // 1-based iterate index
    Vec x;           // iterate the step starts from
    double f_val = 0.0;
    Vec g;           // h-subgradient used by the step (f-subgradient for gd)
    double eta = 0.0;    // stepsize applied to the update direction; 0 on the stay branch
    double h_val = 0.0;  // surrogate h at x (NaN when no surrogate is in play)
    bool clipped = false;  // whether the gamma/h branch of the min was active
    int component = -1;    // sampled component index; -1 for deterministic steps
};

struct Trajectory {
    std::vector<StepRecord> records;  // length steps+1; last record has eta = 0
    std::uint64_t seed = 0;
    std::string problem_name;
    std::string stepper_name;
    bool aborted = false;
    std::string abort_reason;

    int steps() const { return static_cast<int>(records.size()) - 1; }
    const Vec& x_first() const { return records.front().x; }
    const Vec& x_last() const { return records.back().x; }
};

// Classic Polyak update: x - ((f(x)-f*)/||g||^2) g, staying put when g = 0.
Vec polyak_step(const FunctionOracle& oracle, Point x);

// Subgradient descent on psi with stepsize 1/||g||^2. Requires the shift_opt
// transform; the arithmetic order matches polyak_step bit for bit.
Vec surrogate_gd_step(const SurrogateOracle& surrogate, Point x);

struct GenStep {
    StepRecord record;
    Vec next;
};

// One generalized-Polyak step: eta = min(1/(c ||g||^2), gamma/h) applied to
// the direction h*g. gamma = inf selects the pure 1/||g||^2 branch; c is the
// curvature slack (1 = the plain algorithm, 1/2 doubles the step).
// h = 0 with g != 0 gives zero displacement (the min is finite but the
// direction vanishes); that corner is recorded, not an error.
GenStep generalized_step(const SurrogateOracle& surrogate, Point x, double gamma,
                         double slack_c = 1.0, int t = 1, int component = -1);

// The deterministic map T: x - (h(x)/||g||^2) g when the canonical
// subgradient is nonzero, x otherwise. h* need not be 0.
Vec map_t_step(const FunctionOracle& h_oracle, Point x);

struct EtaRewrite {
    double eta_direct;     // h(x)/||g||^2
    double eta_rewritten;  // (h/(h-h*)) * (1/lambda)
    double lambda;         // curvature of (h-h*)^2/2 at x, as a multiplier of g
};

// Checks the stepsize rewrite through the surrogate curvature; the two forms
// agree to rounding. Throws std::domain_error when h(x) = h* or g = 0.
EtaRewrite eta_rewrite_check(const FunctionOracle& h_oracle, Point x);

struct StepperConfig {
    enum class Kind { polyak, gd, alg1, map_t };
    Kind kind = Kind::polyak;
    double eta = 0.1;      // gd only
    double gamma = kInf;   // alg1 only
    double slack_c = 1.0;  // alg1 only
    std::string label;     // canonical spelling for manifests
};

// Grammar: polyak | gd:<eta> | alg1:<gamma>[:<c>] | map_t. Values accept
// "inf"; "gamma="/"eta="/"c=" prefixes are allowed.
StepperConfig parse_stepper(const std::string& spec);

// Runs a stepper for `steps` steps. Stochastic problems sample component
// indices i.i.d. from the weights with a counter-based generator keyed on
// (seed, t), so identical configs replay byte-identically.
Trajectory run(const StepperConfig& cfg, const Problem& problem, const std::string& transform_spec,
               Point x1, int steps, std::uint64_t seed);

}  // namespace polyak::steppers
