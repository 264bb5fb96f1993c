#include "polyak/counterexamples.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

#include "polyak/rng.hpp"

namespace polyak::counterexamples {

using steppers::map_t_step;

namespace {

// Radius of a ball certain to contain S, from the growth condition defining
// the region kind.
double region_radius(const InstabilityRegion& region) {
    const double thr = region.threshold();
    if (region.kind == InstabilityRegion::Kind::self_bounded_qg)
        return std::sqrt(2.0 * thr / region.mu);
    return thr / region.mu;
}

struct RegionSampler {
    const FunctionOracle& h;
    const InstabilityRegion& region;
    Vec center;
    double radius;
    double h_star;
    double thr;

    RegionSampler(const FunctionOracle& h_, const InstabilityRegion& region_)
        : h(h_), region(region_) {
        center = h.opt_point_or_throw();
        radius = region_radius(region);
        h_star = region.h_star;
        thr = region.threshold();
    }

    // Returns true when x landed strictly inside S (excluding x*).
    bool draw(std::uint64_t seed, std::uint64_t counter, Vec& x) {
        x.resize(center.size());
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = center[j] + uniform(seed, counter * x.size() + j, -radius, radius);
        const double d = dist(x, center);
        if (d == 0.0 || d > radius) return false;
        return h.value(x) - h_star < thr;
    }
};

}  // namespace

InstabilityReport instability_check(const FunctionOracle& h, const InstabilityRegion& region,
                                    int n_samples, std::uint64_t seed, bool record_samples) {
    RegionSampler sampler(h, region);
    InstabilityReport rep;
    rep.requested = n_samples;
    rep.min_expansion_ratio = std::numeric_limits<double>::infinity();

    std::uint64_t counter = 0;
    const std::uint64_t max_attempts = static_cast<std::uint64_t>(n_samples) * 1000;
    Vec x;
    while (rep.in_region < n_samples && counter < max_attempts) {
        if (!sampler.draw(seed, counter++, x)) {
            ++rep.skipped;
            continue;
        }
        ++rep.in_region;
        const Vec tx = map_t_step(h, x);
        const double before = dist(x, sampler.center);
        const double after = dist(tx, sampler.center);
        if (after > before) ++rep.expanded;
        const double ratio = after / before;
        if (ratio < rep.min_expansion_ratio) {
            rep.min_expansion_ratio = ratio;
            rep.worst_point = x;
        }
        const bool violated = after * after > before * before - dist_sq(tx, x);
        if (violated) ++rep.cutter_violations;
        if (record_samples) {
            InstabilitySample s;
            s.x = x;
            s.dist_before = before;
            s.dist_after = after;
            s.stepsize = h.value(x) / norm_sq(h.subgradient(x));
            s.cutter_violated = violated;
            rep.samples.push_back(std::move(s));
        }
    }
    rep.all_expand = rep.in_region == n_samples && rep.expanded == rep.in_region;
    return rep;
}

SubregionReport bounded_subregion(const FunctionOracle& h, const InstabilityRegion& region,
                                  double k, int n_samples, std::uint64_t seed) {
    if (!(k > 1.0)) throw config_error("bounded subregion needs k > 1");
    RegionSampler sampler(h, region);
    SubregionReport rep;
    rep.k = k;
    rep.c = region.c();
    const bool qg = region.kind == InstabilityRegion::Kind::self_bounded_qg;
    rep.bound = qg ? 2.0 * k * (rep.c + 1.0) / (region.mu * rep.c)
                   : (rep.c + 1.0) * region.h_star / (region.mu * region.mu);

    const double inner = region.threshold() / k;  // S_k sublevel
    std::uint64_t counter = 0;
    const std::uint64_t max_attempts = static_cast<std::uint64_t>(n_samples) * 2000;
    Vec x;
    while (rep.samples < n_samples && counter < max_attempts) {
        if (!sampler.draw(seed ^ 0x5b5b, counter++, x)) continue;
        const double gap = h.value(x) - region.h_star;
        if (qg && gap < inner) continue;  // inside S_k: excluded in the QG case
        ++rep.samples;
        const Vec g = h.subgradient(x);
        const double step = h.value(x) / norm_sq(g);
        rep.max_stepsize = std::max(rep.max_stepsize, step);
    }
    rep.holds = rep.samples > 0 && rep.max_stepsize <= rep.bound + 1e-12;
    return rep;
}

namespace {

// |T'| along one period, by central differences of the artifact's map.
double period_multiplier_fd(const FunctionOracle& h, const Vec& p0) {
    double mult = 1.0;
    Vec x = p0;
    for (int i = 0; i < 3; ++i) {
        const double step = 1e-6 * std::max(1.0, std::abs(x[0]));
        Vec xp{x[0] + step}, xm{x[0] - step};
        const double d = (map_t_step(h, xp)[0] - map_t_step(h, xm)[0]) / (2.0 * step);
        mult *= std::abs(d);
        x = map_t_step(h, x);
    }
    return mult;
}

CycleReport run_cycle_double(int t_max) {
    const auto h = std::get<FunctionOracle>(problems::make_problem("cycle_quad"));

    CycleReport rep;
    rep.precision = CyclePrecision::double_prec;
    rep.t_max = t_max;

    Vec x{1.0 / std::tan(std::numbers::pi / 7.0)};
    rep.period_multiplier = period_multiplier_fd(h, x);

    double sum = 0.0;
    rep.min_avg_gap = std::numeric_limits<double>::infinity();
    Vec x4_minus_x1;
    for (int t = 1; t <= std::max(t_max, 4); ++t) {
        rep.iterates.push_back(x[0]);
        if (t <= 3) rep.cycle_points.push_back(x[0]);
        if (t == 4) rep.closure_error = std::abs(x[0] - rep.iterates[0]);
        if (t <= t_max) {
            sum += x[0];
            const double mean = sum / t;
            const double gap = mean * mean;  // h(mean) - h* for h = x^2 + 1
            rep.avg_gap.push_back(gap);
            rep.min_avg_gap = std::min(rep.min_avg_gap, gap);
        }
        x = map_t_step(h, x);
    }
    return rep;
}

class MpfrValue {
public:
    explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~MpfrValue() { mpfr_clear(v_); }
    MpfrValue(const MpfrValue&) = delete;
    MpfrValue& operator=(const MpfrValue&) = delete;
    mpfr_ptr get() { return v_; }

private:
    mpfr_t v_;
};

// 256-bit evaluation of the same iteration. The repelling multiplier is 8
// per period = 2^t over t steps, so 256 bits keep ~2^(t-256) absolute error:
// still ~1e-17 at t = 200.
CycleReport run_cycle_extended(int t_max) {
    constexpr mpfr_prec_t prec = 256;
    const auto h = std::get<FunctionOracle>(problems::make_problem("cycle_quad"));

    CycleReport rep;
    rep.precision = CyclePrecision::extended;
    rep.t_max = t_max;

    MpfrValue x(prec), x1(prec), tmp(prec), num(prec), sum(prec), mean(prec), gap(prec);
    mpfr_const_pi(x.get(), MPFR_RNDN);
    mpfr_div_ui(x.get(), x.get(), 7, MPFR_RNDN);  // pi/7
    mpfr_cot(x.get(), x.get(), MPFR_RNDN);        // x1 = cot(pi/7)
    mpfr_set(x1.get(), x.get(), MPFR_RNDN);
    mpfr_set_ui(sum.get(), 0, MPFR_RNDN);

    rep.min_avg_gap = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= std::max(t_max, 4); ++t) {
        const double xd = mpfr_get_d(x.get(), MPFR_RNDN);
        rep.iterates.push_back(xd);
        if (t <= 3) rep.cycle_points.push_back(xd);
        if (t == 4) {
            mpfr_sub(tmp.get(), x.get(), x1.get(), MPFR_RNDN);
            mpfr_abs(tmp.get(), tmp.get(), MPFR_RNDN);
            rep.closure_error = mpfr_get_d(tmp.get(), MPFR_RNDN);
        }
        if (t <= t_max) {
            mpfr_add(sum.get(), sum.get(), x.get(), MPFR_RNDN);
            mpfr_div_ui(mean.get(), sum.get(), static_cast<unsigned long>(t), MPFR_RNDN);
            mpfr_sqr(gap.get(), mean.get(), MPFR_RNDN);
            const double g = mpfr_get_d(gap.get(), MPFR_RNDN);
            rep.avg_gap.push_back(g);
            rep.min_avg_gap = std::min(rep.min_avg_gap, g);
        }
        // x <- (x^2 - 1) / (2x)
        mpfr_sqr(num.get(), x.get(), MPFR_RNDN);
        mpfr_sub_ui(num.get(), num.get(), 1, MPFR_RNDN);
        mpfr_mul_ui(tmp.get(), x.get(), 2, MPFR_RNDN);
        mpfr_div(x.get(), num.get(), tmp.get(), MPFR_RNDN);
    }
    rep.period_multiplier = period_multiplier_fd(h, Vec{rep.cycle_points[0]});
    return rep;
}

}  // namespace

CycleReport run_cycle(CyclePrecision precision, int t_max) {
    if (t_max < 4) throw config_error("cycle run needs t_max >= 4");
    return precision == CyclePrecision::double_prec ? run_cycle_double(t_max)
                                                    : run_cycle_extended(t_max);
}

PreimageTree preimage_tree(double a, int depth) {
    if (!(a > 0.0)) throw config_error("preimage tree needs a > 0");
    if (depth < 0 || depth > 30) throw contract_error("preimage depth must lie in [0, 30]");
    PreimageTree tree;
    tree.a = a;
    tree.levels.push_back({0.0});
    for (int k = 1; k <= depth; ++k) {
        const auto& prev = tree.levels.back();
        std::vector<double> next;
        next.reserve(prev.size() * 2);
        for (double x : prev) {
            const double r = std::sqrt(x * x + 2.0 * a);
            next.push_back(x + r);
            next.push_back(x - r);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        tree.levels.push_back(std::move(next));
    }
    return tree;
}

NonconvergenceReport verify_nonconvergence(double a, int n_starts, int n_steps,
                                           std::uint64_t seed) {
    if (!(a > 0.0)) throw config_error("nonconvergence check needs a > 0");
    NonconvergenceReport rep;
    rep.n_starts = n_starts;
    rep.n_steps = n_steps;

    const int tail_start = n_steps - std::max(1, static_cast<int>(n_steps * rep.tail_fraction));

    struct Shard {
        int converged = 0;
        double min_tail_sup = std::numeric_limits<double>::infinity();
        double min_tail_abs = std::numeric_limits<double>::infinity();
    };

    auto run_shard = [&](int lo, int hi) {
        Shard sh;
        for (int i = lo; i < hi; ++i) {
            double x = uniform(seed, static_cast<std::uint64_t>(i), -10.0, 10.0);
            double tail_sup = 0.0;
            double tail_abs = std::numeric_limits<double>::infinity();
            bool finite = true;
            for (int t = 0; t < n_steps; ++t) {
                if (x != 0.0) x = 0.5 * x - a / x;
                if (!std::isfinite(x)) {
                    finite = false;
                    break;
                }
                if (t >= tail_start) {
                    tail_sup = std::max(tail_sup, std::abs(x));
                    tail_abs = std::min(tail_abs, std::abs(x));
                }
            }
            if (!finite) continue;  // escaped to overflow: certainly not converged
            if (tail_sup < rep.radius) ++sh.converged;
            sh.min_tail_sup = std::min(sh.min_tail_sup, tail_sup);
            sh.min_tail_abs = std::min(sh.min_tail_abs, tail_abs);
        }
        return sh;
    };

    const int n_shards = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
    std::vector<std::future<Shard>> futures;
    const int per = (n_starts + n_shards - 1) / n_shards;
    for (int s = 0; s < n_shards; ++s) {
        const int lo = s * per;
        const int hi = std::min(n_starts, lo + per);
        if (lo >= hi) break;
        futures.push_back(std::async(std::launch::async, run_shard, lo, hi));
    }
    rep.min_tail_sup = std::numeric_limits<double>::infinity();
    rep.min_tail_abs = std::numeric_limits<double>::infinity();
    for (auto& f : futures) {
        const Shard sh = f.get();
        rep.converged += sh.converged;
        rep.min_tail_sup = std::min(rep.min_tail_sup, sh.min_tail_sup);
        rep.min_tail_abs = std::min(rep.min_tail_abs, sh.min_tail_abs);
    }
    return rep;
}

namespace {

// One stochastic Polyak jump on component i: gamma = inf, curvature slack c.
double sps_jump(const FunctionOracle& f, double x, double slack_c) {
    const Vec xv{x};
    const double g = f.subgradient(xv)[0];
    if (g == 0.0) return x;
    const double h = f.value(xv) - f.opt_value_or_throw();
    return x - h / (slack_c * g * g) * g;
}

void merge_support(std::vector<std::pair<double, double>>& pts) {
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& [x, p] : pts) {
        if (!merged.empty() && std::abs(x - merged.back().first) <= 1e-12)
            merged.back().second += p;
        else
            merged.emplace_back(x, p);
    }
    pts = std::move(merged);
}

}  // namespace

ChainReport exact_sps_chain(const StochasticProblem& problem, double x1, int T, double slack_c,
                            std::size_t support_cap) {
    problem.validate();
    if (problem.dim() != 1) throw config_error("exact chain evolution is 1-d");
    const FunctionOracle F = problem.mixture();
    if (!problem.opt_value) throw config_error("exact chain needs min F");

    ChainReport rep;
    rep.min_F = *problem.opt_value;

    std::vector<std::pair<double, double>> law{{x1, 1.0}};
    std::vector<double> particles;  // used only after a support explosion

    for (int t = 1; t <= T; ++t) {
        MarkovChainState state;
        state.step = t;
        double ef = 0.0;
        if (rep.exact) {
            for (const auto& [x, p] : law) {
                state.support.push_back(x);
                state.probabilities.push_back(p);
                ef += p * F.value(Vec{x});
            }
        } else {
            for (double x : particles) ef += F.value(Vec{x});
            ef /= static_cast<double>(particles.size());
            state.support = {particles.front()};
            state.probabilities = {1.0};
        }
        rep.states.push_back(std::move(state));
        rep.expected_F.push_back(ef);
        rep.gap.push_back(ef - rep.min_F);

        if (t == T) break;
        if (rep.exact) {
            std::vector<std::pair<double, double>> next;
            next.reserve(law.size() * problem.components.size());
            for (const auto& [x, p] : law)
                for (std::size_t i = 0; i < problem.components.size(); ++i)
                    next.emplace_back(sps_jump(problem.components[i], x, slack_c),
                                      p * problem.weights[i]);
            merge_support(next);
            if (next.size() > support_cap) {
                rep.exact = false;
                rep.warning = "support exceeded cap at step " + std::to_string(t) +
                              "; falling back to a particle approximation";
                particles.clear();
                const std::size_t n = std::max<std::size_t>(support_cap, 1000);
                for (std::size_t j = 0; j < n; ++j) {
                    const double u = uniform01(0xc4a1ull, j);
                    double acc = 0.0;
                    double pick = next.back().first;
                    for (const auto& [x, p] : next) {
                        acc += p;
                        if (u < acc) {
                            pick = x;
                            break;
                        }
                    }
                    particles.push_back(pick);
                }
            } else {
                law = std::move(next);
            }
        } else {
            for (double& x : particles) {
                const int i = draw_index(problem.weights, 0xc4a2ull,
                                         static_cast<std::uint64_t>(t) * particles.size() +
                                             static_cast<std::uint64_t>(&x - particles.data()));
                x = sps_jump(problem.components[static_cast<std::size_t>(i)], x, slack_c);
            }
        }
    }
    return rep;
}

}  // namespace polyak::counterexamples
