#include "polyak/surrogates.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace polyak::surrogates {

namespace {

std::string transform_label(const Transform& t) {
    if (std::holds_alternative<ShiftByOpt>(t)) return "shift_opt";
    if (const auto* h = std::get_if<Hinge>(&t)) {
        std::ostringstream s;
        s << "hinge:" << h->level;
        return s.str();
    }
    std::ostringstream s;
    s << "lower_bound:" << std::get<LowerBound>(t).q;
    return s.str();
}

// Dense 1-d scan for the psi minimizer when no optimum is declared.
std::pair<Vec, double> scan_minimizer_1d(const SurrogateOracle& s) {
    double best_x = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (double x = -10.0; x <= 10.0; x += 1e-4) {
        const double v = s.psi_value(Point(&x, 1));
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return {Vec{best_x}, best};
}

}  // namespace

double SurrogateOracle::h_value(Point x) const {
    const double f = base.value(x);
    if (std::holds_alternative<ShiftByOpt>(transform)) return f - *base.opt_value;
    if (const auto* h = std::get_if<Hinge>(&transform)) return std::max(f - h->level, 0.0);
    return f - std::get<LowerBound>(transform).q;
}

Vec SurrogateOracle::h_subgradient(Point x) const {
    if (const auto* h = std::get_if<Hinge>(&transform)) {
        const double f = base.value(x);
        if (f <= h->level) return Vec(x.size(), 0.0);
        return base.subgradient(x);
    }
    return base.subgradient(x);
}

FunctionOracle SurrogateOracle::as_oracle() const {
    FunctionOracle f;
    f.name = base.name + "|psi[" + transform_label(transform) + "]";
    f.dim = base.dim;
    SurrogateOracle self = *this;
    f.value_fn = [self](Point x) { return self.psi_value(x); };
    f.subgrad_fn = [self](Point x) { return self.psi_subgradient(x); };
    f.opt_point = psi_opt_point;
    f.opt_value = psi_opt_value;
    f.kink_points = base.kink_points;
    if (base.subgrad_extremes_fn) {
        f.subgrad_extremes_fn = [self](Point x) {
            std::vector<Vec> out = self.base.subgrad_extremes_fn(x);
            const double h = self.h_value(x);
            for (auto& g : out)
                for (double& v : g) v *= h;
            return out;
        };
    }
    f.convex = base.convex;
    return f;
}

SurrogateOracle make_surrogate(const SurrogateSpec& spec) {
    SurrogateOracle s;
    s.base = spec.base;
    s.transform = spec.transform;

    if (std::holds_alternative<ShiftByOpt>(spec.transform)) {
        if (!spec.base.opt_value)
            throw config_error("shift_opt transform needs opt_value on '" + spec.base.name + "'");
        s.psi_opt_point = spec.base.opt_point;
        s.psi_opt_value = 0.0;
        return s;
    }

    if (const auto* hinge = std::get_if<Hinge>(&spec.transform)) {
        if (spec.base.opt_point) {
            s.psi_opt_point = spec.base.opt_point;
            const double hs = std::max(*spec.base.opt_value - hinge->level, 0.0);
            s.psi_opt_value = 0.5 * hs * hs;
        } else if (spec.base.dim == 1) {
            auto [xs, v] = scan_minimizer_1d(s);
            s.psi_opt_point = xs;
            s.psi_opt_value = v;
        }
        return s;
    }

    const auto& lb = std::get<LowerBound>(spec.transform);
    if (spec.base.opt_point) {
        s.psi_opt_point = spec.base.opt_point;
        const double hs = *spec.base.opt_value - lb.q;
        s.psi_opt_value = 0.5 * hs * hs;
        if (hs < 0.0) {
            std::ostringstream w;
            w << "lower_bound q=" << lb.q << " exceeds inf f=" << *spec.base.opt_value
              << " on '" << spec.base.name << "'; h < 0 near the optimum";
            s.warnings.push_back(w.str());
        }
    } else if (spec.base.dim == 1) {
        auto [xs, v] = scan_minimizer_1d(s);
        s.psi_opt_point = xs;
        s.psi_opt_value = v;
        // Sampled positivity check when no optimum is declared.
        for (double x = -10.0; x <= 10.0; x += 0.1) {
            if (s.h_value(Point(&x, 1)) < -1e-12) {
                s.warnings.push_back("lower_bound transform produced h < 0 on the sample grid");
                break;
            }
        }
    }
    return s;
}

Vec hinge_subgradient(const SurrogateSpec& spec, Point x) {
    if (!std::holds_alternative<Hinge>(spec.transform))
        throw config_error("hinge_subgradient requires a Hinge transform");
    SurrogateOracle s;
    s.base = spec.base;
    s.transform = spec.transform;
    return s.h_subgradient(x);
}

double SurrogateFamily::H(Point x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) s += weights[i] * members[i].h_value(x);
    return s;
}

Transform parse_transform(const std::string& spec) {
    if (spec == "shift_opt" || spec == "shift_inf" || spec == "shift_per_component_inf")
        return ShiftByOpt{};
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string head = spec.substr(0, colon);
        const std::string val = spec.substr(colon + 1);
        char* end = nullptr;
        const double v = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0')
            throw config_error("bad transform parameter in '" + spec + "'");
        if (head == "hinge") return Hinge{v};
        if (head == "lower_bound") return LowerBound{v};
    }
    throw config_error("unknown transform '" + spec +
                       "' (expected shift_opt | hinge:a | lower_bound:q | hinge_opt)");
}

SurrogateFamily make_family(const Problem& problem, const std::string& transform_spec) {
    SurrogateFamily fam;
    fam.transform_name = transform_spec;

    const bool hinge_at_opt = (transform_spec == "hinge_opt");

    auto member_for = [&](const FunctionOracle& base, const std::optional<Vec>& global_opt) {
        if (hinge_at_opt) {
            if (!global_opt)
                throw config_error("hinge_opt transform needs the problem optimum");
            const double level = base.value(*global_opt);
            return make_surrogate({base, Hinge{level}});
        }
        return make_surrogate({base, parse_transform(transform_spec)});
    };

    if (const auto* oracle = std::get_if<FunctionOracle>(&problem)) {
        fam.members = {member_for(*oracle, oracle->opt_point)};
        fam.weights = {1.0};
        fam.comparator = fam.members.front().psi_opt_point;
    } else {
        const auto& sp = std::get<StochasticProblem>(problem);
        sp.validate();
        for (const auto& c : sp.components) fam.members.push_back(member_for(c, sp.opt_point));
        fam.weights = sp.weights;
        fam.comparator = sp.opt_point;
    }

    if (fam.comparator) {
        fam.H_at_comparator = fam.H(*fam.comparator);
        for (std::size_t i = 0; i < fam.members.size(); ++i) {
            const double hi = fam.members[i].h_value(*fam.comparator);
            if (std::abs(hi) > 1e-14) fam.exact = false;
        }
    } else {
        fam.exact = false;
    }
    return fam;
}

}  // namespace polyak::surrogates
