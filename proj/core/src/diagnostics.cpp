#include "polyak/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace polyak::diagnostics {

namespace {

constexpr double kRowTol = 1e-10;

double halton(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i) {
        f /= base;
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
    }
    return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};

// Quasi-random point in the ball ||x - center|| <= radius: Box-Muller on
// Halton pairs for the direction, one more coordinate for the radius.
Vec ball_point(std::uint64_t i, const Vec& center, double radius) {
    const int d = static_cast<int>(center.size());
    Vec z(d);
    int k = 0;
    for (int j = 0; j < d; j += 2) {
        const double u = std::max(halton(i, kPrimes[k++]), 1e-16);
        const double v = halton(i, kPrimes[k++]);
        const double m = std::sqrt(-2.0 * std::log(u));
        z[j] = m * std::cos(2.0 * std::numbers::pi * v);
        if (j + 1 < d) z[j + 1] = m * std::sin(2.0 * std::numbers::pi * v);
    }
    const double r = radius * std::pow(halton(i, kPrimes[k]), 1.0 / d);
    const double nz = std::max(norm(z), 1e-300);
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = center[j] + r * z[j] / nz;
    return x;
}

Certificate finalize(Certificate cert, const Grid& grid) {
    cert.sample_count = static_cast<long>(grid.sites.size());
    cert.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cert.margins.size(); ++i) {
        if (cert.margins[i] < cert.worst_margin) {
            cert.worst_margin = cert.margins[i];
            cert.witness = grid.sites[i].x;
        }
    }
    cert.holds = cert.worst_margin >= -kCertTol;
    return cert;
}

Certificate pointwise_check(PropertyKind property, double c1, double c2, const Grid& grid,
                            const std::function<double(const GridSite&)>& margin) {
    Certificate cert;
    cert.property = property;
    cert.c1 = c1;
    cert.c2 = c2;
    cert.margins.reserve(grid.sites.size());
    for (const auto& site : grid.sites) cert.margins.push_back(margin(site));
    return finalize(std::move(cert), grid);
}

void require_opt(const FunctionOracle& f) {
    if (!f.has_opt()) throw config_error("certificate on '" + f.name + "' needs optimum data");
}

}  // namespace

Grid standard_grid(const FunctionOracle& oracle) {
    Grid grid;
    if (oracle.dim == 1) {
        grid.description = "1d:[-10,10]:step=0.01";
        for (int i = 0; i <= 2000; ++i) {
            const double x = -10.0 + 0.01 * i;
            bool near_kink = false;
            for (double k : oracle.kink_points) near_kink = near_kink || std::abs(x - k) < 1e-9;
            if (near_kink) continue;
            Vec p{x};
            grid.sites.push_back({p, oracle.subgradient(p)});
        }
        for (double k : oracle.kink_points) {
            if (k < -10.0 || k > 10.0) continue;
            Vec p{k};
            for (auto& g : oracle.subgradient_extremes(p)) grid.sites.push_back({p, std::move(g)});
        }
    } else {
        if (oracle.dim > 13)
            throw config_error("certificate grids support dim <= 13 (got " +
                               std::to_string(oracle.dim) + ")");
        grid.description = "ball:r=10:n=10000";
        const Vec center = oracle.opt_point ? *oracle.opt_point : Vec(oracle.dim, 0.0);
        for (std::uint64_t i = 1; i <= 10000; ++i) {
            Vec p = ball_point(i, center, 10.0);
            Vec g = oracle.subgradient(p);
            grid.sites.push_back({std::move(p), std::move(g)});
        }
    }
    return grid;
}

std::string property_name(PropertyKind p) {
    switch (p) {
        case PropertyKind::lsuc: return "lsuc";
        case PropertyKind::approx_lsuc: return "approx_lsuc";
        case PropertyKind::self_bounded: return "self_bounded";
        case PropertyKind::lipschitz: return "lipschitz";
        case PropertyKind::sharp: return "sharp";
        case PropertyKind::quad_growth: return "quad_growth";
        case PropertyKind::qg_plus: return "qg_plus";
        case PropertyKind::holder: return "holder";
    }
    return "?";
}

Certificate check_lsuc(const FunctionOracle& f, const std::function<double(Point)>& lambda_rule,
                       const Grid& grid) {
    require_opt(f);
    const Vec& xs = *f.opt_point;
    const double fs = *f.opt_value;
    return pointwise_check(PropertyKind::lsuc, 0.0, 0.0, grid, [&](const GridSite& s) {
        const double lambda = lambda_rule(s.x);
        const double gap = fs - f.value(s.x) - (dot(s.g, xs) - dot(s.g, s.x));
        const double gg = norm_sq(s.g);
        if (gg == 0.0) return gap;  // curvature term vanishes with the subgradient
        return gap - gg / (2.0 * lambda);
    });
}

Certificate check_lsuc_const(const FunctionOracle& f, double lambda, const Grid& grid) {
    if (!(lambda > 0.0)) throw config_error("lsuc lambda must be positive");
    Certificate c = check_lsuc(f, [lambda](Point) { return lambda; }, grid);
    c.c1 = lambda;
    return c;
}

Certificate check_approx_lsuc(const SurrogateOracle& psi, const Grid& base_grid) {
    if (!psi.psi_opt_point)
        throw config_error("approx-lsuc check needs the psi minimizer (declared or scanned)");
    const Vec& xs = *psi.psi_opt_point;
    const double psi_star = psi.psi_opt_value;
    const auto* hinge = std::get_if<surrogates::Hinge>(&psi.transform);

    return pointwise_check(PropertyKind::approx_lsuc, 0.0, 0.0, base_grid,
                           [&](const GridSite& s) {
        const double h = psi.h_value(s.x);
        const double psix = 0.5 * h * h;
        // h-subgradient induced by the site's base selection.
        Vec gh = s.g;
        if (hinge && psi.base.value(s.x) <= hinge->level) std::fill(gh.begin(), gh.end(), 0.0);
        Vec gt = gh;
        for (double& v : gt) v *= h;

        const double eps = 2.0 * std::sqrt(psix * psi_star) - psi_star;
        const double gap = psi_star - psix - (dot(gt, xs) - dot(gt, s.x));
        const double gg = norm_sq(gh);
        const double curv = gg == 0.0 ? 0.0 : norm_sq(gt) / (2.0 * gg);
        return gap - curv + eps;
    });
}

Certificate check_self_bounded(const FunctionOracle& f, double L, const Grid& grid) {
    require_opt(f);
    const double fs = *f.opt_value;
    return pointwise_check(PropertyKind::self_bounded, L, 0.0, grid, [&](const GridSite& s) {
        return 2.0 * L * (f.value(s.x) - fs) - norm_sq(s.g);
    });
}

Certificate check_lipschitz(const FunctionOracle&, double G, const Grid& grid) {
    return pointwise_check(PropertyKind::lipschitz, G, 0.0, grid,
                           [&](const GridSite& s) { return G - norm(s.g); });
}

Certificate check_sharp(const FunctionOracle& f, double s_const, const Grid& grid) {
    require_opt(f);
    const Vec& xs = *f.opt_point;
    const double fs = *f.opt_value;
    return pointwise_check(PropertyKind::sharp, s_const, 0.0, grid, [&](const GridSite& s) {
        return f.value(s.x) - fs - s_const * dist(s.x, xs);
    });
}

Certificate check_qg(const FunctionOracle& f, double mu, const Grid& grid) {
    require_opt(f);
    const Vec& xs = *f.opt_point;
    const double fs = *f.opt_value;
    return pointwise_check(PropertyKind::quad_growth, mu, 0.0, grid, [&](const GridSite& s) {
        return f.value(s.x) - fs - 0.5 * mu * dist_sq(s.x, xs);
    });
}

Certificate check_qg_plus(const FunctionOracle& f, double L, const Grid& grid) {
    require_opt(f);
    const Vec& xs = *f.opt_point;
    const double fs = *f.opt_value;
    return pointwise_check(PropertyKind::qg_plus, L, 0.0, grid, [&](const GridSite& s) {
        return 0.5 * L * dist_sq(s.x, xs) - (f.value(s.x) - fs);
    });
}

Certificate check_holder(const FunctionOracle& f, double L_nu, double nu, const Grid& grid) {
    require_opt(f);
    if (nu < 0.0 || nu > 1.0) throw config_error("holder nu must lie in [0,1]");
    const double fs = *f.opt_value;
    // nu -> 0 limit of (1+1/nu)^(2nu/(1+nu)) is 1 (the Lipschitz end).
    const double factor =
        nu > 0.0 ? std::pow(1.0 + 1.0 / nu, 2.0 * nu / (1.0 + nu)) : 1.0;
    const double K = factor * std::pow(L_nu, 2.0 / (1.0 + nu));
    const double expo = 2.0 * nu / (1.0 + nu);
    return pointwise_check(PropertyKind::holder, L_nu, nu, grid, [&](const GridSite& s) {
        const double gap = std::max(f.value(s.x) - fs, 0.0);
        return K * std::pow(gap, expo) - norm_sq(s.g);
    });
}

EquivalenceReport check_lsuc_qgplus_equivalence(const FunctionOracle& f, const Grid& grid) {
    require_opt(f);
    const Vec& xs = *f.opt_point;
    const double fs = *f.opt_value;

    EquivalenceReport rep;

    // Tightest QG+ constant seen on the grid.
    double L_hat = 0.0;
    for (const auto& s : grid.sites) {
        const double d2 = dist_sq(s.x, xs);
        if (d2 < 1e-16) continue;
        L_hat = std::max(L_hat, 2.0 * (f.value(s.x) - fs) / d2);
    }
    rep.qgplus_L = L_hat;
    rep.lsuc_at_L = check_lsuc_const(f, L_hat, grid);

    // Pointwise direction: the local constant lambda_x = ||g||^2 / (2 gap)
    // must dominate the growth of f at x.
    rep.worst_pointwise_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : grid.sites) {
        const double gap = fs - f.value(s.x) - (dot(s.g, xs) - dot(s.g, s.x));
        const double gg = norm_sq(s.g);
        if (gap <= 1e-15) continue;  // lambda_x unbounded; the bound is vacuous
        const double lambda_x = gg / (2.0 * gap);
        const double margin = 0.5 * lambda_x * dist_sq(s.x, xs) - (f.value(s.x) - fs);
        if (margin < rep.worst_pointwise_margin) {
            rep.worst_pointwise_margin = margin;
            rep.pointwise_witness = s.x;
        }
    }
    rep.holds = rep.lsuc_at_L.holds && rep.worst_pointwise_margin >= -kCertTol;
    return rep;
}

// ---- audits ---------------------------------------------------------------

BoundLedger audit_one_step(const Trajectory& traj, const SurrogateFamily& family) {
    if (!family.comparator)
        throw config_error("one-step audit needs a comparator point on the surrogate family");
    const Vec& u = *family.comparator;
    if (traj.records.empty() || traj.records.front().x.size() != u.size())
        throw config_error("trajectory/surrogate dimension mismatch");

    BoundLedger ledger;
    ledger.exact_mode = family.exact;
    double cum_lhs = 0.0;

    for (std::size_t i = 0; i + 1 < traj.records.size(); ++i) {
        const auto& rec = traj.records[i];
        const auto& nxt = traj.records[i + 1];
        const auto& member = family.member(rec.component >= 0 ? rec.component : 0);

        // The audit only applies to runs whose displacement is eta * h * g.
        Vec recon = sub_scaled(rec.x, rec.eta * rec.h_val, rec.g);
        if (dist(recon, nxt.x) > 1e-9 * std::max(1.0, norm(nxt.x)))
            throw config_error("trajectory was not produced by a Polyak-family stepper "
                               "matching this surrogate");

        const double psi_x = 0.5 * rec.h_val * rec.h_val;
        const double psi_u = member.psi_value(u);
        const double d2 = dist_sq(rec.x, u);
        const double d2n = dist_sq(nxt.x, u);

        LedgerRow row;
        row.t = rec.t;
        if (family.exact) {
            row.lhs = rec.eta * psi_x;
            row.rhs = 0.5 * d2 - 0.5 * d2n;
            cum_lhs += row.lhs;
        } else {
            const double gg = norm_sq(rec.g);
            const double gtilde_sq = rec.h_val * rec.h_val * gg;
            const double clip_term =
                gg == 0.0 ? 0.0 : 0.5 * rec.eta * (rec.eta - 1.0 / gg) * gtilde_sq;
            const double eps = 2.0 * std::sqrt(psi_x * psi_u) - psi_u;
            row.lhs = rec.eta * (psi_x - psi_u);
            row.rhs = 0.5 * d2 - 0.5 * d2n + clip_term + rec.eta * eps;
        }
        row.slack = row.rhs - row.lhs;
        ledger.rows.push_back(row);
    }

    ledger.worst_slack = std::numeric_limits<double>::infinity();
    ledger.satisfied = true;
    for (const auto& r : ledger.rows) {
        ledger.worst_slack = std::min(ledger.worst_slack, r.slack);
        ledger.satisfied = ledger.satisfied && r.slack >= -kRowTol;
    }
    if (ledger.rows.empty()) ledger.worst_slack = 0.0;

    if (family.exact) {
        ledger.cumulative_lhs = cum_lhs;
        ledger.cumulative_bound = 0.5 * dist_sq(traj.x_first(), u);
        ledger.cumulative_ok = cum_lhs <= ledger.cumulative_bound + kRowTol;
    } else {
        ledger.cumulative_ok = true;  // no clean summed form with the eps terms
    }
    return ledger;
}

namespace {

bool bound_ok(double measured, double bound) {
    return measured <= bound * (1.0 + 1e-12) + 1e-12;
}

struct SeedStats {
    double mean = 0.0;
    double se = 0.0;
};

SeedStats seed_stats(const std::vector<double>& vals) {
    SeedStats s;
    for (double v : vals) s.mean += v;
    s.mean /= static_cast<double>(vals.size());
    if (vals.size() > 1) {
        double var = 0.0;
        for (double v : vals) var += (v - s.mean) * (v - s.mean);
        var /= static_cast<double>(vals.size() - 1);
        s.se = std::sqrt(var / static_cast<double>(vals.size()));
    }
    return s;
}

}  // namespace

double holder_Q(double y, double L_nu, double nu, double gamma) {
    const double factor = nu > 0.0 ? std::pow(1.0 + 1.0 / nu, nu) : 1.0;
    return 2.0 * y + L_nu * std::pow(2.0 * gamma * y, 0.5 * (1.0 + nu)) * factor;
}

RateRegime parse_rate_regime(const std::string& spec) {
    std::istringstream in(spec);
    std::string head;
    std::getline(in, head, ':');
    RateRegime r;
    if (head == "lipschitz") r.kind = RateRegime::Kind::lipschitz;
    else if (head == "self_bounded") r.kind = RateRegime::Kind::self_bounded;
    else if (head == "sharp") r.kind = RateRegime::Kind::sharp;
    else if (head == "alg1_self_bounded") r.kind = RateRegime::Kind::alg1_self_bounded;
    else if (head == "alg1_lipschitz") r.kind = RateRegime::Kind::alg1_lipschitz;
    else if (head == "alg1_linear") r.kind = RateRegime::Kind::alg1_linear;
    else if (head == "holder") r.kind = RateRegime::Kind::holder;
    else if (head == "alg1_regret") r.kind = RateRegime::Kind::alg1_regret;
    else throw config_error("unknown rate regime '" + head + "'");

    std::string item;
    while (std::getline(in, item, ':')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw config_error("bad regime parameter '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string vs = item.substr(eq + 1);
        double v;
        if (vs == "inf" || vs == "infinity") v = steppers::kInf;
        else {
            char* end = nullptr;
            v = std::strtod(vs.c_str(), &end);
            if (end == vs.c_str() || *end != '\0')
                throw config_error("bad regime value '" + vs + "'");
        }
        if (key == "G") r.G = v;
        else if (key == "L") r.L = v;
        else if (key == "s") r.s = v;
        else if (key == "mu") r.mu = v;
        else if (key == "gamma") r.gamma = v;
        else if (key == "L_nu") r.L_nu = v;
        else if (key == "nu") r.nu = v;
        else throw config_error("unknown regime parameter '" + key + "'");
    }
    return r;
}

std::string regime_name(RateRegime::Kind k) {
    switch (k) {
        case RateRegime::Kind::lipschitz: return "lipschitz";
        case RateRegime::Kind::self_bounded: return "self_bounded";
        case RateRegime::Kind::sharp: return "sharp";
        case RateRegime::Kind::alg1_self_bounded: return "alg1_self_bounded";
        case RateRegime::Kind::alg1_lipschitz: return "alg1_lipschitz";
        case RateRegime::Kind::alg1_linear: return "alg1_linear";
        case RateRegime::Kind::holder: return "holder";
        case RateRegime::Kind::alg1_regret: return "alg1_regret";
    }
    return "?";
}

RateReport audit_rate(const std::vector<Trajectory>& runs, const SurrogateFamily& family,
                      const RateRegime& regime) {
    if (runs.empty()) throw config_error("rate audit needs at least one trajectory");
    if (!family.comparator) throw config_error("rate audit needs a comparator point");
    const Vec& u = *family.comparator;
    const double D2 = dist_sq(runs.front().x_first(), u);
    const double D = std::sqrt(D2);
    const double Hstar = family.H_at_comparator;

    RateReport rep;
    rep.regime = regime_name(regime.kind);

    auto require_pos = [&](double v, const char* what) {
        if (!(v > 0.0)) throw config_error(std::string("rate regime needs ") + what);
    };

    switch (regime.kind) {
        case RateRegime::Kind::lipschitz:
        case RateRegime::Kind::self_bounded: {
            if (regime.kind == RateRegime::Kind::lipschitz) require_pos(regime.G, "G");
            else require_pos(regime.L, "L");
            const auto& traj = runs.front();
            const auto& phi = family.member(0);
            // Weighted running average; an exactly-optimal iterate (g = 0)
            // carries infinite weight 1/||g||^2 and collapses the average.
            Vec num(u.size(), 0.0);
            double den = 0.0;
            Vec opt_sum(u.size(), 0.0);
            int opt_count = 0;
            double best_psi = std::numeric_limits<double>::infinity();
            double worst_excess = -std::numeric_limits<double>::infinity();
            int binding_T = 0;
            double binding_bound = 0.0;
            for (int t = 1; t <= traj.steps(); ++t) {
                const auto& rec = traj.records[static_cast<std::size_t>(t - 1)];
                if (is_zero(rec.g)) {
                    for (std::size_t j = 0; j < num.size(); ++j) opt_sum[j] += rec.x[j];
                    ++opt_count;
                } else {
                    for (std::size_t j = 0; j < num.size(); ++j)
                        num[j] += rec.eta * rec.x[j];
                    den += rec.eta;
                }
                best_psi = std::min(best_psi, 0.5 * rec.h_val * rec.h_val);
                Vec avg(u.size());
                for (std::size_t j = 0; j < avg.size(); ++j)
                    avg[j] = opt_count > 0 ? opt_sum[j] / opt_count : num[j] / den;
                const double measured = std::max(phi.psi_value(avg), best_psi);
                const double bound = regime.kind == RateRegime::Kind::lipschitz
                                         ? regime.G * regime.G * D2 / (2.0 * t)
                                         : 4.0 * regime.L * regime.L * D2 * D2 / (static_cast<double>(t) * t);
                if (!bound_ok(measured, bound)) ++rep.violations;
                if (measured - bound > worst_excess) {
                    worst_excess = measured - bound;
                    rep.measured = measured;
                    binding_T = t;
                    binding_bound = bound;
                }
            }
            rep.bound = binding_bound;
            rep.holds = rep.violations == 0;
            std::ostringstream d;
            d << "prefixes=" << traj.steps() << " binding_T=" << binding_T;
            rep.detail = d.str();
            return rep;
        }
        case RateRegime::Kind::sharp: {
            require_pos(regime.s, "s");
            require_pos(regime.G, "G");
            const auto& traj = runs.front();
            const double rho = 1.0 - (regime.s * regime.s) / (regime.G * regime.G);
            double worst_excess = -std::numeric_limits<double>::infinity();
            double pow_rho = 1.0;
            for (int t = 1; t <= traj.steps(); ++t) {
                pow_rho *= rho;
                const double measured = dist_sq(traj.records[static_cast<std::size_t>(t)].x, u);
                const double bound = pow_rho * D2;
                if (!bound_ok(measured, bound)) ++rep.violations;
                if (measured - bound > worst_excess) {
                    worst_excess = measured - bound;
                    rep.measured = measured;
                    rep.bound = bound;
                }
            }
            rep.holds = rep.violations == 0;
            rep.detail = "per-step contraction";
            return rep;
        }
        case RateRegime::Kind::alg1_self_bounded:
        case RateRegime::Kind::alg1_lipschitz:
        case RateRegime::Kind::holder: {
            const double gamma = regime.gamma;
            std::vector<double> vals;
            vals.reserve(runs.size());
            int T = runs.front().steps();
            for (const auto& traj : runs) {
                double acc = 0.0;
                for (int t = 1; t <= T; ++t)
                    acc += family.H(traj.records[static_cast<std::size_t>(t - 1)].x);
                double avgH = acc / T;
                if (regime.kind == RateRegime::Kind::alg1_self_bounded) {
                    require_pos(regime.L, "L");
                    avgH *= std::min(1.0 / (2.0 * regime.L), gamma);
                }
                vals.push_back(avgH);
            }
            const SeedStats st = seed_stats(vals);
            rep.measured = st.mean + 3.0 * st.se;
            if (regime.kind == RateRegime::Kind::alg1_self_bounded) {
                rep.bound = D2 / T + 2.0 * gamma * Hstar;
            } else if (regime.kind == RateRegime::Kind::alg1_lipschitz) {
                require_pos(regime.G, "G");
                if (!std::isfinite(gamma)) throw config_error("alg1_lipschitz needs finite gamma");
                rep.bound = D2 / (gamma * T) + 2.0 * Hstar + regime.G * D / std::sqrt(T) +
                            regime.G * std::sqrt(2.0 * gamma * Hstar);
            } else {
                require_pos(regime.L_nu, "L_nu");
                if (!std::isfinite(gamma)) throw config_error("holder regime needs finite gamma");
                rep.bound = holder_Q(D2 / (T * gamma) + 2.0 * Hstar, regime.L_nu, regime.nu, gamma);
            }
            rep.holds = rep.measured <= rep.bound + 1e-12;
            std::ostringstream d;
            d << "seeds=" << runs.size() << " T=" << T << " mean=" << st.mean << " se=" << st.se;
            rep.detail = d.str();
            return rep;
        }
        case RateRegime::Kind::alg1_linear: {
            require_pos(regime.L, "L");
            require_pos(regime.mu, "mu");
            const double m = std::min(1.0 / (2.0 * regime.L), regime.gamma);
            const double a = 0.5 * regime.mu * m;
            const int T = runs.front().steps();
            std::vector<double> vals;
            for (const auto& traj : runs) vals.push_back(dist_sq(traj.x_last(), u));
            const SeedStats st = seed_stats(vals);
            rep.measured = st.mean + 3.0 * st.se;
            const double decay = std::pow(1.0 - a, T);
            double floor_term = 0.0;
            if (Hstar > 0.0) {
                if (!std::isfinite(regime.gamma))
                    throw config_error("alg1_linear with H(x*)>0 needs finite gamma");
                floor_term = (2.0 * regime.gamma - m) * Hstar * (1.0 - decay) / a;
            }
            rep.bound = decay * D2 + floor_term;
            rep.holds = rep.measured <= rep.bound + 1e-12;
            std::ostringstream d;
            d << "seeds=" << runs.size() << " T=" << T << " a=" << a;
            rep.detail = d.str();
            return rep;
        }
        case RateRegime::Kind::alg1_regret: {
            require_pos(regime.L, "L");
            if (!std::isfinite(regime.gamma))
                throw config_error("alg1_regret needs finite gamma");
            const double m = std::min(1.0 / (2.0 * regime.L), regime.gamma);
            double worst_excess = -std::numeric_limits<double>::infinity();
            for (const auto& traj : runs) {
                double lhs = 0.0, gsum = 0.0;
                for (int t = 1; t <= traj.steps(); ++t) {
                    const auto& rec = traj.records[static_cast<std::size_t>(t - 1)];
                    const auto& member = family.member(rec.component >= 0 ? rec.component : 0);
                    lhs += m * rec.h_val - regime.gamma * member.h_value(u);
                    gsum += norm_sq(rec.g);
                }
                const double rhs = 0.5 * dist_sq(traj.x_first(), u) +
                                   0.5 * regime.gamma * regime.gamma * gsum;
                if (lhs - rhs > worst_excess) {
                    worst_excess = lhs - rhs;
                    rep.measured = lhs;
                    rep.bound = rhs;
                }
                if (!bound_ok(lhs, rhs)) ++rep.violations;
            }
            rep.holds = rep.violations == 0;
            rep.detail = "per-seed sum form (informational for the expectation statement)";
            return rep;
        }
    }
    throw config_error("unreachable rate regime");
}

}  // namespace polyak::diagnostics
