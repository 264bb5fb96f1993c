#include "polyak/problems.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace polyak::problems {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double get_param(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

int get_dim(const Params& p, int fallback = 1) {
    const double d = get_param(p, "dim", fallback);
    const int dim = static_cast<int>(d);
    if (dim < 1 || d != dim) throw config_error("dim must be a positive integer");
    return dim;
}

// f(x) = |x+2| + x^2/2, the running nonsmooth-but-curved example.
FunctionOracle make_fig1() {
    FunctionOracle f;
    f.name = "fig1";
    f.dim = 1;
    f.value_fn = [](Point x) { return std::abs(x[0] + 2.0) + 0.5 * x[0] * x[0]; };
    f.subgrad_fn = [](Point x) { return Vec{sign(x[0] + 2.0) + x[0]}; };
    f.opt_point = Vec{-1.0};
    f.opt_value = 1.5;
    f.declared.self_bounded_L = 9.0;
    f.kink_points = {-2.0};
    f.subgrad_extremes_fn = [](Point x) -> std::vector<Vec> {
        if (x[0] == -2.0) return {Vec{-1.0 + x[0]}, Vec{1.0 + x[0]}};
        return {Vec{sign(x[0] + 2.0) + x[0]}};
    };
    return f;
}

FunctionOracle make_quad(int dim) {
    FunctionOracle f;
    f.name = "quad";
    f.dim = dim;
    f.value_fn = [](Point x) { return 0.5 * norm_sq(x); };
    f.subgrad_fn = [](Point x) { return to_vec(x); };
    f.opt_point = Vec(dim, 0.0);
    f.opt_value = 0.0;
    f.declared.self_bounded_L = 1.0;
    f.declared.quadratic_growth_mu = 1.0;
    f.declared.holder = HolderConstants{1.0, 1.0};
    return f;
}

FunctionOracle make_abs1d() {
    FunctionOracle f;
    f.name = "abs1d";
    f.dim = 1;
    f.value_fn = [](Point x) { return std::abs(x[0]); };
    f.subgrad_fn = [](Point x) { return Vec{sign(x[0])}; };
    f.opt_point = Vec{0.0};
    f.opt_value = 0.0;
    f.declared.lipschitz_G = 1.0;
    f.declared.sharp_s = 1.0;
    f.kink_points = {0.0};
    f.subgrad_extremes_fn = [](Point x) -> std::vector<Vec> {
        if (x[0] == 0.0) return {Vec{-1.0}, Vec{1.0}};
        return {Vec{sign(x[0])}};
    };
    return f;
}

// max_i |x_i|; canonical subgradient picks the first coordinate attaining the max.
FunctionOracle make_linf(int dim) {
    FunctionOracle f;
    f.name = "linf";
    f.dim = dim;
    f.value_fn = [](Point x) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
    };
    f.subgrad_fn = [dim](Point x) {
        Vec g(dim, 0.0);
        double m = 0.0;
        int arg = -1;
        for (int i = 0; i < dim; ++i) {
            if (std::abs(x[i]) > m) {
                m = std::abs(x[i]);
                arg = i;
            }
        }
        if (arg >= 0) g[arg] = sign(x[arg]);
        return g;
    };
    f.opt_point = Vec(dim, 0.0);
    f.opt_value = 0.0;
    f.declared.lipschitz_G = 1.0;
    f.declared.sharp_s = 1.0 / std::sqrt(static_cast<double>(dim));
    if (dim == 1) f.kink_points = {0.0};
    return f;
}

FunctionOracle make_l1(int dim) {
    FunctionOracle f;
    f.name = "l1";
    f.dim = dim;
    f.value_fn = [](Point x) {
        double s = 0.0;
        for (double v : x) s += std::abs(v);
        return s;
    };
    f.subgrad_fn = [dim](Point x) {
        Vec g(dim);
        for (int i = 0; i < dim; ++i) g[i] = sign(x[i]);
        return g;
    };
    f.opt_point = Vec(dim, 0.0);
    f.opt_value = 0.0;
    f.declared.lipschitz_G = std::sqrt(static_cast<double>(dim));
    f.declared.sharp_s = 1.0;
    if (dim == 1) f.kink_points = {0.0};
    return f;
}

// h(x) = x^2/2 + a. For a > 0 its generalized-Polyak map has an unstable
// fixed point at 0; this is the measure-zero / instability workhorse.
FunctionOracle make_shifted_quad(double a) {
    FunctionOracle f;
    std::ostringstream n;
    n << "shifted_quad?a=" << a;
    f.name = n.str();
    f.dim = 1;
    f.value_fn = [a](Point x) { return 0.5 * x[0] * x[0] + a; };
    f.subgrad_fn = [](Point x) { return Vec{x[0]}; };
    f.opt_point = Vec{0.0};
    f.opt_value = a;
    f.declared.self_bounded_L = 1.0;
    f.declared.quadratic_growth_mu = 1.0;
    f.declared.holder = HolderConstants{1.0, 1.0};
    return f;
}

// h(x) = |x| + a: Lipschitz with a sharp minimum, strictly positive for a > 0.
FunctionOracle make_abs_shifted(double a) {
    FunctionOracle f;
    std::ostringstream n;
    n << "abs_shifted?a=" << a;
    f.name = n.str();
    f.dim = 1;
    f.value_fn = [a](Point x) { return std::abs(x[0]) + a; };
    f.subgrad_fn = [](Point x) { return Vec{sign(x[0])}; };
    f.opt_point = Vec{0.0};
    f.opt_value = a;
    f.declared.lipschitz_G = 1.0;
    f.declared.sharp_s = 1.0;
    f.kink_points = {0.0};
    f.subgrad_extremes_fn = [](Point x) -> std::vector<Vec> {
        if (x[0] == 0.0) return {Vec{-1.0}, Vec{1.0}};
        return {Vec{sign(x[0])}};
    };
    return f;
}

// h(x) = x^2 + 1: the cycling example (its T map is the cotangent doubling map).
FunctionOracle make_cycle_quad() {
    FunctionOracle f;
    f.name = "cycle_quad";
    f.dim = 1;
    f.value_fn = [](Point x) { return x[0] * x[0] + 1.0; };
    f.subgrad_fn = [](Point x) { return Vec{2.0 * x[0]}; };
    f.opt_point = Vec{0.0};
    f.opt_value = 1.0;
    f.declared.self_bounded_L = 2.0;
    f.declared.quadratic_growth_mu = 2.0;
    return f;
}

FunctionOracle make_poly_quadratic(const std::string& name, double a2, double a1, double a0) {
    // a2*x^2 + a1*x + a0 with a2 > 0
    FunctionOracle f;
    f.name = name;
    f.dim = 1;
    f.value_fn = [=](Point x) { return a2 * x[0] * x[0] + a1 * x[0] + a0; };
    f.subgrad_fn = [=](Point x) { return Vec{2.0 * a2 * x[0] + a1}; };
    const double xs = -a1 / (2.0 * a2);
    f.opt_point = Vec{xs};
    f.opt_value = a0 - a1 * a1 / (4.0 * a2);
    f.declared.self_bounded_L = 2.0 * a2;
    f.declared.quadratic_growth_mu = 2.0 * a2;
    f.declared.holder = HolderConstants{2.0 * a2, 1.0};
    return f;
}

// Two quadratics whose SPS chain random-walks between their minimizers.
StochasticProblem make_sps_fail() {
    StochasticProblem p;
    p.name = "sps_fail";
    p.components = {make_poly_quadratic("sps_fail.f1", 1.0, 2.0, 5.0),
                    make_poly_quadratic("sps_fail.f2", 2.0, -4.0, 10.0)};
    p.weights = {0.5, 0.5};
    p.interpolating = false;
    // F(x) = 1.5 x^2 - x + 7.5
    p.opt_point = Vec{1.0 / 3.0};
    p.opt_value = 44.0 / 6.0;
    return p;
}

// Interpolating strongly convex pair: both components are minimized at 0.
StochasticProblem make_interp_quads() {
    StochasticProblem p;
    p.name = "interp_quads";
    p.components = {make_poly_quadratic("interp_quads.f1", 0.5, 0.0, 0.0),
                    make_poly_quadratic("interp_quads.f2", 1.0, 0.0, 0.0)};
    p.weights = {0.5, 0.5};
    p.interpolating = true;
    p.opt_point = Vec{0.0};
    p.opt_value = 0.0;
    return p;
}

// f1 = -|x| is not convex; only the hinged mixture H is certified.
StochasticProblem make_nonconvex_mix() {
    StochasticProblem p;
    p.name = "nonconvex_mix";

    FunctionOracle f1;
    f1.name = "nonconvex_mix.f1";
    f1.dim = 1;
    f1.value_fn = [](Point x) { return -std::abs(x[0]); };
    f1.subgrad_fn = [](Point x) { return Vec{-sign(x[0])}; };
    f1.convex = false;
    f1.kink_points = {0.0};

    FunctionOracle f2;
    f2.name = "nonconvex_mix.f2";
    f2.dim = 1;
    f2.value_fn = [](Point x) { return 2.0 * std::abs(x[0]); };
    f2.subgrad_fn = [](Point x) { return Vec{2.0 * sign(x[0])}; };
    f2.opt_point = Vec{0.0};
    f2.opt_value = 0.0;
    f2.declared.lipschitz_G = 2.0;
    f2.declared.sharp_s = 2.0;
    f2.kink_points = {0.0};

    p.components = {f1, f2};
    p.weights = {0.5, 0.5};
    p.interpolating = false;
    // F(x) = |x|/2
    p.opt_point = Vec{0.0};
    p.opt_value = 0.0;
    return p;
}

}  // namespace

FunctionOracle StochasticProblem::mixture() const {
    validate();
    FunctionOracle f;
    f.name = name + ".mixture";
    f.dim = dim();
    auto comps = components;
    auto w = weights;
    f.value_fn = [comps, w](Point x) {
        double s = 0.0;
        for (std::size_t i = 0; i < comps.size(); ++i) s += w[i] * comps[i].value_fn(x);
        return s;
    };
    f.subgrad_fn = [comps, w](Point x) {
        Vec g(x.size(), 0.0);
        for (std::size_t i = 0; i < comps.size(); ++i) {
            Vec gi = comps[i].subgrad_fn(x);
            for (std::size_t j = 0; j < g.size(); ++j) g[j] += w[i] * gi[j];
        }
        return g;
    };
    f.opt_point = opt_point;
    f.opt_value = opt_value;
    for (const auto& c : components) f.convex = f.convex && c.convex;
    return f;
}

void StochasticProblem::validate() const {
    if (components.empty()) throw config_error("stochastic problem '" + name + "' has no components");
    if (weights.size() != components.size())
        throw config_error("stochastic problem '" + name + "': weights/components size mismatch");
    double s = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw config_error("stochastic problem '" + name + "': negative weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw config_error("stochastic problem '" + name + "': weights sum to " + std::to_string(s));
    for (const auto& c : components)
        if (c.dim != dim())
            throw config_error("stochastic problem '" + name + "': component dim mismatch");
}

std::pair<std::string, Params> parse_problem_name(const std::string& spec) {
    const auto q = spec.find('?');
    if (q == std::string::npos) return {spec, {}};
    std::string name = spec.substr(0, q);
    Params params;
    std::string rest = spec.substr(q + 1);
    std::istringstream in(rest);
    std::string item;
    while (std::getline(in, item, '&')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw config_error("bad problem parameter '" + item + "'");
        const std::string key = item.substr(0, eq);
        char* end = nullptr;
        const std::string vs = item.substr(eq + 1);
        const double v = std::strtod(vs.c_str(), &end);
        if (end == vs.c_str() || *end != '\0')
            throw config_error("bad numeric value '" + vs + "' for parameter '" + key + "'");
        params[key] = v;
    }
    return {name, params};
}

Problem Catalog::make(const std::string& spec) const {
    auto [name, params] = parse_problem_name(spec);
    auto it = factories_.find(name);
    if (it == factories_.end()) throw lookup_error("unknown problem '" + name + "'");
    return it->second(params);
}

std::vector<std::string> Catalog::names() const {
    std::vector<std::string> out;
    out.reserve(factories_.size());
    for (const auto& [k, v] : factories_) out.push_back(k);
    return out;
}

const Catalog& zoo() {
    static const Catalog catalog = [] {
        Catalog c;
        c.add("fig1", [](const Params&) -> Problem { return make_fig1(); });
        c.add("quad", [](const Params& p) -> Problem { return make_quad(get_dim(p)); });
        c.add("abs1d", [](const Params&) -> Problem { return make_abs1d(); });
        c.add("linf", [](const Params& p) -> Problem { return make_linf(get_dim(p)); });
        c.add("l1", [](const Params& p) -> Problem { return make_l1(get_dim(p)); });
        c.add("shifted_quad", [](const Params& p) -> Problem {
            return make_shifted_quad(get_param(p, "a", 0.5));
        });
        c.add("abs_shifted", [](const Params& p) -> Problem {
            return make_abs_shifted(get_param(p, "a", 1.0));
        });
        c.add("cycle_quad", [](const Params&) -> Problem { return make_cycle_quad(); });
        c.add("sps_fail", [](const Params&) -> Problem { return make_sps_fail(); });
        c.add("interp_quads", [](const Params&) -> Problem { return make_interp_quads(); });
        c.add("nonconvex_mix", [](const Params&) -> Problem { return make_nonconvex_mix(); });
        return c;
    }();
    return catalog;
}

Problem make_problem(const std::string& spec) { return zoo().make(spec); }

}  // namespace polyak::problems
