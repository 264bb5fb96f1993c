#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "polyak/errors.hpp"
#include "polyak/vec.hpp"

namespace polyak::problems {

struct HolderConstants {
    double L_nu = 0.0;
    double nu = 1.0;  // nu in [0,1]; nu=0 is the Lipschitz end, nu=1 the self-bounded end
};

// Constants a problem declares about itself. Every declared constant must pass
// the matching certificate check on the standard grid.
struct PropertyConstants {
    std::optional<double> lipschitz_G;
    std::optional<double> self_bounded_L;
    std::optional<double> sharp_s;
    std::optional<double> quadratic_growth_mu;
    std::optional<HolderConstants> holder;

    // A sharp minimum of a convex G-Lipschitz function forces G >= s.
    void validate() const {
        if (lipschitz_G && sharp_s && *lipschitz_G < *sharp_s)
            throw config_error("declared lipschitz_G < sharp_s");
    }
};

// First-order oracle: f(x) plus one canonical subgradient selection.
// Immutable value object; safe to evaluate concurrently.
//
// Canonical selection at kinks of |.|-type terms is the midpoint element 0,
// so "g = 0 => stay" fires exactly at sharp minima.
class FunctionOracle {
public:
    std::string name;
    int dim = 1;
    std::function<double(Point)> value_fn;
    std::function<Vec(Point)> subgrad_fn;
    std::optional<double> opt_value;  // f*, when known
    std::optional<Vec> opt_point;     // an x*, when known
    PropertyConstants declared;
    bool convex = true;
    // 1-d kink locations; certificate grids skip these and evaluate the
    // one-sided subgradient selections from subgrad_extremes_fn instead.
    std::vector<double> kink_points;
    std::function<std::vector<Vec>(Point)> subgrad_extremes_fn;

    double value(Point x) const {
        check_dim(x);
        return value_fn(x);
    }

    Vec subgradient(Point x) const {
        check_dim(x);
        return subgrad_fn(x);
    }

    std::pair<double, Vec> eval(Point x) const {
        check_dim(x);
        return {value_fn(x), subgrad_fn(x)};
    }

    // Extreme subgradient selections at x (both one-sided choices at a kink);
    // falls back to the canonical selection elsewhere.
    std::vector<Vec> subgradient_extremes(Point x) const {
        check_dim(x);
        if (subgrad_extremes_fn) return subgrad_extremes_fn(x);
        return {subgrad_fn(x)};
    }

    bool has_opt() const { return opt_value.has_value() && opt_point.has_value(); }

    double opt_value_or_throw() const {
        if (!opt_value) throw config_error("oracle '" + name + "': opt_value unknown");
        return *opt_value;
    }

    const Vec& opt_point_or_throw() const {
        if (!opt_point) throw config_error("oracle '" + name + "': opt_point unknown");
        return *opt_point;
    }

private:
    void check_dim(Point x) const {
        if (static_cast<int>(x.size()) != dim)
            throw contract_error("oracle '" + name + "': point has dim " +
                                 std::to_string(x.size()) + ", expected " + std::to_string(dim));
    }
};

// Finite family of component oracles with sampling weights.
// H(x) = E[h(x,xi)] is exact for finite sums.
struct StochasticProblem {
    std::string name;
    std::vector<FunctionOracle> components;
    std::vector<double> weights;
    bool interpolating = false;
    std::optional<Vec> opt_point;     // argmin of F = sum_i w_i f_i
    std::optional<double> opt_value;  // F*

    int dim() const { return components.empty() ? 0 : components.front().dim; }

    // F = sum_i w_i f_i as a plain oracle (value, subgradient, opt data).
    FunctionOracle mixture() const;

    void validate() const;
};

using Problem = std::variant<FunctionOracle, StochasticProblem>;

inline const std::string& problem_name(const Problem& p) {
    return std::visit([](const auto& q) -> const std::string& { return q.name; }, p);
}

inline int problem_dim(const Problem& p) {
    if (const auto* o = std::get_if<FunctionOracle>(&p)) return o->dim;
    return std::get<StochasticProblem>(p).dim();
}

inline std::pair<double, Vec> eval(const FunctionOracle& oracle, Point x) { return oracle.eval(x); }

// ---- zoo ----------------------------------------------------------------

using Params = std::map<std::string, double>;

// Splits "shifted_quad?a=0.5" into {"shifted_quad", {a: 0.5}}.
std::pair<std::string, Params> parse_problem_name(const std::string& spec);

class Catalog {
public:
    using Factory = std::function<Problem(const Params&)>;

    void add(const std::string& name, Factory f) { factories_[name] = std::move(f); }

    Problem make(const std::string& spec) const;

    std::vector<std::string> names() const;

private:
    std::map<std::string, Factory> factories_;
};

// The built-in problem zoo. Names: fig1, quad, abs1d, linf, l1, shifted_quad,
// abs_shifted, cycle_quad, sps_fail, interp_quads, nonconvex_mix.
const Catalog& zoo();

// Convenience: zoo().make(spec).
Problem make_problem(const std::string& spec);

}  // namespace polyak::problems
