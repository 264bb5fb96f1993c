#include "polyak/steppers.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "polyak/rng.hpp"

namespace polyak::steppers {

using problems::StochasticProblem;

Vec polyak_step(const FunctionOracle& oracle, Point x) {
    const double fstar = oracle.opt_value_or_throw();
    const double f = oracle.value(x);
    const Vec g = oracle.subgradient(x);
    if (is_zero(g)) return to_vec(x);
    return sub_scaled(x, (f - fstar) / norm_sq(g), g);
}

Vec surrogate_gd_step(const SurrogateOracle& surrogate, Point x) {
    if (!std::holds_alternative<surrogates::ShiftByOpt>(surrogate.transform))
        throw config_error("surrogate_gd_step requires the shift_opt transform");
    const double h = surrogate.h_value(x);
    const Vec g = surrogate.h_subgradient(x);
    if (is_zero(g)) return to_vec(x);
    return sub_scaled(x, h / norm_sq(g), g);
}

GenStep generalized_step(const SurrogateOracle& surrogate, Point x, double gamma, double slack_c,
                         int t, int component) {
    if (!(gamma > 0.0)) throw config_error("gamma must be positive (inf allowed)");
    if (!(slack_c > 0.0)) throw config_error("curvature slack c must be positive");

    GenStep out;
    out.record.t = t;
    out.record.x = to_vec(x);
    out.record.f_val = surrogate.base.value(x);
    out.record.h_val = surrogate.h_value(x);
    out.record.g = surrogate.h_subgradient(x);
    out.record.component = component;

    if (is_zero(out.record.g)) {
        out.record.eta = 0.0;
        out.next = to_vec(x);
        return out;
    }

    const double gg = norm_sq(out.record.g);
    const double h = out.record.h_val;
    // Multiplier of g; h/(c*gg) unclipped, gamma when the clip binds.
    double scalar = h / (slack_c * gg);
    out.record.eta = 1.0 / (slack_c * gg);
    if (h > 0.0 && std::isfinite(gamma) && gamma * slack_c * gg < h) {
        scalar = gamma;
        out.record.eta = gamma / h;
        out.record.clipped = true;
    }
    out.next = sub_scaled(x, scalar, out.record.g);
    return out;
}

Vec map_t_step(const FunctionOracle& h_oracle, Point x) {
    const double h = h_oracle.value(x);
    const Vec g = h_oracle.subgradient(x);
    if (is_zero(g)) return to_vec(x);
    return sub_scaled(x, h / norm_sq(g), g);
}

EtaRewrite eta_rewrite_check(const FunctionOracle& h_oracle, Point x) {
    const double hstar = h_oracle.opt_value_or_throw();
    const double h = h_oracle.value(x);
    const Vec g = h_oracle.subgradient(x);
    if (is_zero(g)) throw std::domain_error("eta rewrite needs g != 0");
    if (h == hstar) throw std::domain_error("eta rewrite undefined at h(x) = h*");
    const double gg = norm_sq(g);
    EtaRewrite r;
    r.eta_direct = h / gg;
    r.lambda = gg / (h - hstar);
    r.eta_rewritten = (h / (h - hstar)) * (1.0 / r.lambda);
    return r;
}

namespace {

double parse_value(std::string tok, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (tok.rfind(prefix, 0) == 0) tok = tok.substr(prefix.size());
    if (tok == "inf" || tok == "infinity") return kInf;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw config_error("bad stepper parameter '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

StepperConfig parse_stepper(const std::string& spec) {
    const auto toks = split(spec, ':');
    if (toks.empty()) throw config_error("empty stepper spec");
    StepperConfig cfg;
    cfg.label = spec;
    const std::string& kind = toks[0];
    if (kind == "polyak") {
        if (toks.size() != 1) throw config_error("polyak takes no parameters");
        cfg.kind = StepperConfig::Kind::polyak;
    } else if (kind == "gd") {
        if (toks.size() != 2) throw config_error("gd needs a stepsize: gd:<eta>");
        cfg.kind = StepperConfig::Kind::gd;
        cfg.eta = parse_value(toks[1], "eta");
        if (!(cfg.eta > 0.0) || !std::isfinite(cfg.eta))
            throw config_error("gd stepsize must be positive and finite");
    } else if (kind == "alg1") {
        if (toks.size() < 2 || toks.size() > 3)
            throw config_error("alg1 needs alg1:<gamma>[:<c>]");
        cfg.kind = StepperConfig::Kind::alg1;
        cfg.gamma = parse_value(toks[1], "gamma");
        if (!(cfg.gamma > 0.0)) throw config_error("gamma must be positive (inf allowed)");
        if (toks.size() == 3) {
            cfg.slack_c = parse_value(toks[2], "c");
            if (!(cfg.slack_c > 0.0) || !std::isfinite(cfg.slack_c))
                throw config_error("curvature slack c must be positive and finite");
        }
    } else if (kind == "map_t") {
        if (toks.size() != 1) throw config_error("map_t takes no parameters");
        cfg.kind = StepperConfig::Kind::map_t;
    } else {
        throw config_error("unknown stepper '" + kind +
                           "' (expected polyak | gd:eta | alg1:gamma | map_t)");
    }
    return cfg;
}

namespace {

const FunctionOracle& deterministic_oracle(const Problem& p, const char* who) {
    const auto* o = std::get_if<FunctionOracle>(&p);
    if (!o) throw config_error(std::string(who) + " requires a deterministic problem");
    return *o;
}

bool guard(Trajectory& traj, Point x) {
    if (!all_finite(x)) {
        traj.aborted = true;
        traj.abort_reason = "non-finite iterate";
        return false;
    }
    if (norm(x) > kDivergenceBound) {
        traj.aborted = true;
        traj.abort_reason = "iterate norm exceeded divergence bound";
        return false;
    }
    return true;
}

}  // namespace

Trajectory run(const StepperConfig& cfg, const Problem& problem, const std::string& transform_spec,
               Point x1, int steps, std::uint64_t seed) {
    if (steps < 1) throw config_error("steps must be >= 1");
    if (static_cast<int>(x1.size()) != problems::problem_dim(problem))
        throw contract_error("x1 has wrong dimension for problem '" +
                             problems::problem_name(problem) + "'");

    Trajectory traj;
    traj.seed = seed;
    traj.problem_name = problems::problem_name(problem);
    traj.stepper_name = cfg.label.empty() ? "stepper" : cfg.label;

    const double nan = std::numeric_limits<double>::quiet_NaN();

    switch (cfg.kind) {
        case StepperConfig::Kind::polyak:
        case StepperConfig::Kind::gd:
        case StepperConfig::Kind::map_t: {
            const FunctionOracle& oracle = deterministic_oracle(problem, cfg.label.c_str());
            if (cfg.kind == StepperConfig::Kind::polyak) oracle.opt_value_or_throw();
            Vec x = to_vec(x1);
            for (int t = 1; t <= steps; ++t) {
                if (!guard(traj, x)) return traj;
                StepRecord rec;
                rec.t = t;
                rec.x = x;
                rec.f_val = oracle.value(x);
                rec.g = oracle.subgradient(x);
                Vec next;
                if (is_zero(rec.g)) {
                    rec.eta = 0.0;
                    next = x;
                } else if (cfg.kind == StepperConfig::Kind::polyak) {
                    const double scalar = (rec.f_val - *oracle.opt_value) / norm_sq(rec.g);
                    rec.eta = 1.0 / norm_sq(rec.g);  // stepsize on the direction h*g
                    next = sub_scaled(x, scalar, rec.g);
                } else if (cfg.kind == StepperConfig::Kind::gd) {
                    rec.eta = cfg.eta;
                    next = sub_scaled(x, cfg.eta, rec.g);
                } else {
                    // map T; eta is kept in h*g units like the other Polyak steppers
                    const double scalar = rec.f_val / norm_sq(rec.g);
                    rec.eta = 1.0 / norm_sq(rec.g);
                    next = sub_scaled(x, scalar, rec.g);
                }
                if (cfg.kind == StepperConfig::Kind::map_t)
                    rec.h_val = rec.f_val;
                else
                    rec.h_val = oracle.opt_value ? rec.f_val - *oracle.opt_value : nan;
                traj.records.push_back(std::move(rec));
                x = std::move(next);
            }
            if (guard(traj, x)) {
                StepRecord last;
                last.t = steps + 1;
                last.x = x;
                last.f_val = oracle.value(x);
                last.g = oracle.subgradient(x);
                last.h_val = cfg.kind == StepperConfig::Kind::map_t
                                 ? last.f_val
                                 : (oracle.opt_value ? last.f_val - *oracle.opt_value : nan);
                traj.records.push_back(std::move(last));
            }
            return traj;
        }
        case StepperConfig::Kind::alg1: {
            const std::string tf = transform_spec.empty() ? "shift_opt" : transform_spec;
            const SurrogateFamily fam = surrogates::make_family(problem, tf);
            const bool stochastic = std::holds_alternative<StochasticProblem>(problem);
            Vec x = to_vec(x1);
            for (int t = 1; t <= steps; ++t) {
                if (!guard(traj, x)) return traj;
                const int idx =
                    stochastic ? draw_index(fam.weights, seed, static_cast<std::uint64_t>(t)) : 0;
                GenStep gs = generalized_step(fam.member(idx), x, cfg.gamma, cfg.slack_c, t,
                                              stochastic ? idx : -1);
                traj.records.push_back(std::move(gs.record));
                x = std::move(gs.next);
            }
            if (guard(traj, x)) {
                StepRecord last;
                last.t = steps + 1;
                last.x = x;
                if (stochastic) {
                    const FunctionOracle mix = std::get<StochasticProblem>(problem).mixture();
                    last.f_val = mix.value(x);
                    last.g = mix.subgradient(x);
                    last.h_val = fam.H(x);
                } else {
                    last.f_val = fam.member(0).base.value(x);
                    last.g = fam.member(0).h_subgradient(x);
                    last.h_val = fam.member(0).h_value(x);
                }
                traj.records.push_back(std::move(last));
            }
            return traj;
        }
    }
    throw config_error("unreachable stepper kind");
}

}  // namespace polyak::steppers
