#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polyak/problems.hpp"

namespace polyak::surrogates {

using problems::FunctionOracle;
using problems::Problem;
using problems::StochasticProblem;

// h-transforms of a base oracle. All of them aim to turn f into a
// nonnegative function h; the surrogate loss is psi = h^2/2.
struct ShiftByOpt {};             // h = f - f*
struct Hinge { double level; };   // h = (f - a)_+
struct LowerBound { double q; };  // h = f - q, q a per-component lower bound

using Transform = std::variant<ShiftByOpt, Hinge, LowerBound>;

struct SurrogateSpec {
    FunctionOracle base;
    Transform transform;
};

// psi = h^2/2 with the chain-rule subgradient h(x)*g, g in dh(x).
class SurrogateOracle {
public:
    FunctionOracle base;
    Transform transform;
    // Minimizer of psi (equivalently of h) and its psi value. psi_opt_value = 0
    // exactly when the transform reaches zero at the base optimum.
    std::optional<Vec> psi_opt_point;
    double psi_opt_value = 0.0;
    std::vector<std::string> warnings;

    double h_value(Point x) const;
    Vec h_subgradient(Point x) const;

    double psi_value(Point x) const {
        const double h = h_value(x);
        return 0.5 * h * h;
    }

    Vec psi_subgradient(Point x) const {
        const double h = h_value(x);
        Vec g = h_subgradient(x);
        for (double& v : g) v *= h;
        return g;
    }

    // View of psi as a plain oracle (for certificate checks on the surrogate).
    FunctionOracle as_oracle() const;
};

// Builds the surrogate. ShiftByOpt needs base.opt_value; LowerBound checks
// h >= 0 on a coarse sample grid and records a warning on violation.
SurrogateOracle make_surrogate(const SurrogateSpec& spec);

// Subgradient of the hinge transform: df when f > a, 0 when f < a, and the
// alpha = 0 selection (zero vector) at equality so the stay branch fires on
// the solution set.
Vec hinge_subgradient(const SurrogateSpec& spec, Point x);

// A surrogate per component plus exact mixture quantities for finite sums.
// Deterministic problems are families of size one.
struct SurrogateFamily {
    std::vector<SurrogateOracle> members;
    std::vector<double> weights;
    std::string transform_name;
    // Comparator point x* used by audits (argmin of H for the zoo transforms)
    // and the exact floor H(x*).
    std::optional<Vec> comparator;
    double H_at_comparator = 0.0;
    // True when every member has psi(x*) = 0, so the one-step descent
    // inequality applies with no epsilon term.
    bool exact = true;

    double H(Point x) const;

    const SurrogateOracle& member(int i) const { return members.at(static_cast<std::size_t>(i)); }
    int size() const { return static_cast<int>(members.size()); }
};

// transform spec grammar: "shift_opt" | "hinge:<a>" | "lower_bound:<q>" |
// "hinge_opt" (per-component hinge at f_i(x*), the plus-transform).
// "shift_inf" / "shift_per_component_inf" are aliases of shift_opt.
Transform parse_transform(const std::string& spec);
SurrogateFamily make_family(const Problem& problem, const std::string& transform_spec);

}  // namespace polyak::surrogates
