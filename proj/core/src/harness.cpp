#include "polyak/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "polyak/surrogates.hpp"

namespace polyak::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;
using diagnostics::RateRegime;
using problems::FunctionOracle;
using problems::Problem;
using problems::StochasticProblem;
using steppers::StepperConfig;
using surrogates::SurrogateFamily;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == '?' || c == '&' || c == ':' || c == '=' || c == '/' || c == '|') c = '_';
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::validate() const {
    if (steps < 1) throw config_error("steps must be >= 1");
    if (problem.empty()) throw config_error("problem is required");
    if (stepper.empty()) throw config_error("stepper is required");
    if (x1.empty()) throw config_error("x1 is required");
    const StepperConfig sc = steppers::parse_stepper(stepper);
    const Problem prob = problems::make_problem(problem);
    if (sc.kind == StepperConfig::Kind::alg1 &&
        std::holds_alternative<StochasticProblem>(prob) && seeds.empty())
        throw config_error("stochastic runs need at least one seed");
    if (static_cast<int>(x1.size()) != problems::problem_dim(prob))
        throw config_error("x1 dimension does not match the problem");
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line is not key=value: '" + line + "'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    for (const auto& part : split(spec, ',')) {
        const auto dots = part.find("..");
        if (dots != std::string::npos) {
            const std::uint64_t lo = std::stoull(part.substr(0, dots));
            const std::uint64_t hi = std::stoull(part.substr(dots + 2));
            if (hi < lo) throw config_error("bad seed range '" + part + "'");
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } else if (!part.empty()) {
            seeds.push_back(std::stoull(part));
        }
    }
    if (seeds.empty()) throw config_error("no seeds in '" + spec + "'");
    return seeds;
}

Vec parse_vector(const std::string& spec) {
    Vec out;
    for (const auto& part : split(spec, ',')) {
        if (part.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(part.c_str(), &end);
        if (end == part.c_str() || *end != '\0')
            throw config_error("bad vector component '" + part + "'");
        out.push_back(v);
    }
    if (out.empty()) throw config_error("empty vector '" + spec + "'");
    return out;
}

RunConfig config_from_kv(const std::map<std::string, std::string>& kv) {
    RunConfig cfg;
    for (const auto& [key, value] : kv) {
        if (key == "problem") cfg.problem = value;
        else if (key == "stepper") cfg.stepper = value;
        else if (key == "transform") cfg.transform = value;
        else if (key == "x1") cfg.x1 = parse_vector(value);
        else if (key == "steps") cfg.steps = std::stoi(value);
        else if (key == "seeds") cfg.seeds = parse_seeds(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "audits") cfg.audits = split(value, ',');
        else throw config_error("unknown config key '" + key + "'");
    }
    return cfg;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const int d = traj.records.empty() ? 0 : static_cast<int>(traj.records.front().x.size());
    out << "t";
    for (int j = 0; j < d; ++j) out << ",x" << j;
    out << ",f,eta,h,clipped\n";
    for (const auto& rec : traj.records) {
        out << rec.t;
        for (int j = 0; j < d; ++j) out << ',' << fmt17(rec.x[static_cast<std::size_t>(j)]);
        out << ',' << fmt17(rec.f_val) << ',' << fmt17(rec.eta) << ',' << fmt17(rec.h_val) << ','
            << (rec.clipped ? 1 : 0) << '\n';
    }
}

std::string resolve_output_dir(const std::string& dir) {
    const fs::path p(dir);
    if (p.is_absolute()) return dir;
    if (const char* root = std::getenv(kOutputRootEnv)) return (fs::path(root) / p).string();
    return dir;
}

namespace {

// Fills regime constants that were left unset from what the problem declares.
void fill_regime_defaults(RateRegime& regime, const Problem& prob) {
    problems::PropertyConstants merged;
    if (const auto* o = std::get_if<FunctionOracle>(&prob)) {
        merged = o->declared;
    } else {
        // Per-sample constants: take the largest declared value across components.
        for (const auto& c : std::get<StochasticProblem>(prob).components) {
            auto take_max = [](std::optional<double>& dst, const std::optional<double>& src) {
                if (src) dst = dst ? std::max(*dst, *src) : *src;
            };
            take_max(merged.lipschitz_G, c.declared.lipschitz_G);
            take_max(merged.self_bounded_L, c.declared.self_bounded_L);
            take_max(merged.sharp_s, c.declared.sharp_s);
            take_max(merged.quadratic_growth_mu, c.declared.quadratic_growth_mu);
            if (c.declared.holder && !merged.holder) merged.holder = c.declared.holder;
        }
    }
    if (regime.G == 0.0 && merged.lipschitz_G) regime.G = *merged.lipschitz_G;
    if (regime.L == 0.0 && merged.self_bounded_L) regime.L = *merged.self_bounded_L;
    if (regime.s == 0.0 && merged.sharp_s) regime.s = *merged.sharp_s;
    if (regime.mu == 0.0 && merged.quadratic_growth_mu) regime.mu = *merged.quadratic_growth_mu;
    if (regime.L_nu == 0.0 && merged.holder) {
        regime.L_nu = merged.holder->L_nu;
        regime.nu = merged.holder->nu;
    }
}

AuditVerdict verdict_from_ledger(const std::string& name,
                                 const std::vector<diagnostics::BoundLedger>& ledgers) {
    AuditVerdict v;
    v.name = name;
    v.pass = true;
    v.measured = std::numeric_limits<double>::infinity();
    v.bound = -1e-10;
    int rows = 0;
    for (const auto& led : ledgers) {
        v.pass = v.pass && led.satisfied && led.cumulative_ok;
        v.measured = std::min(v.measured, led.worst_slack);
        rows += static_cast<int>(led.rows.size());
    }
    std::ostringstream d;
    d << "rows=" << rows << " seeds=" << ledgers.size() << " worst_slack=" << v.measured;
    v.detail = d.str();
    return v;
}

}  // namespace

RunManifest execute_run(const RunConfig& config) {
    config.validate();
    const Problem prob = problems::make_problem(config.problem);
    StepperConfig stepper = steppers::parse_stepper(config.stepper);

    const std::string out_dir = resolve_output_dir(config.output_dir);
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.artifact_version = kArtifactVersion;
    manifest.csv_schema_version = kCsvSchemaVersion;
    manifest.config = config;
    const int d = problems::problem_dim(prob);
    manifest.csv_columns = {"t"};
    for (int j = 0; j < d; ++j) manifest.csv_columns.push_back("x" + std::to_string(j));
    for (const char* c : {"f", "eta", "h", "clipped"}) manifest.csv_columns.push_back(c);

    // Seeds fan out to workers; each worker owns its output files. The
    // manifest is assembled by the coordinator once all workers are done.
    const auto& seeds = config.seeds;
    std::vector<Trajectory> trajectories(seeds.size());
    std::vector<std::string> paths(seeds.size());
    const unsigned n_workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(seeds.size())));
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < n_workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < seeds.size(); i += n_workers) {
                Trajectory traj = steppers::run(stepper, prob, config.transform, config.x1,
                                                config.steps, seeds[i]);
                const std::string file = sanitize("traj_" + config.problem + "_" +
                                                  config.stepper + "_seed" +
                                                  std::to_string(seeds[i])) + ".csv";
                const std::string path = (fs::path(out_dir) / file).string();
                std::ofstream out(path, std::ios::binary);
                write_trajectory_csv(out, traj);
                trajectories[i] = std::move(traj);
                paths[i] = path;
            }
        }));
    }
    for (auto& f : futures) f.get();
    for (std::size_t i = 0; i < seeds.size(); ++i) manifest.outputs.emplace_back(seeds[i], paths[i]);

    for (const auto& traj : trajectories)
        if (traj.aborted)
            manifest.verdicts.push_back({"run", false, 0.0, 0.0, "aborted: " + traj.abort_reason});

    if (!config.audits.empty()) {
        std::string tf = config.transform;
        if (tf.empty())
            tf = stepper.kind == StepperConfig::Kind::map_t ? "lower_bound:0" : "shift_opt";
        const SurrogateFamily family = surrogates::make_family(prob, tf);

        for (const auto& audit : config.audits) {
            if (audit == "one_step") {
                std::vector<diagnostics::BoundLedger> ledgers;
                for (const auto& traj : trajectories)
                    ledgers.push_back(diagnostics::audit_one_step(traj, family));
                manifest.verdicts.push_back(verdict_from_ledger(audit, ledgers));
            } else if (audit == "fejer") {
                if (!family.comparator) throw config_error("fejer audit needs a comparator");
                AuditVerdict v;
                v.name = audit;
                v.measured = -std::numeric_limits<double>::infinity();
                v.bound = 1e-12;
                for (const auto& traj : trajectories) {
                    for (std::size_t i = 0; i + 1 < traj.records.size(); ++i) {
                        const double before = dist(traj.records[i].x, *family.comparator);
                        const double after = dist(traj.records[i + 1].x, *family.comparator);
                        v.measured = std::max(v.measured, after - before);
                    }
                }
                v.pass = v.measured <= v.bound;
                v.detail = "max per-step distance increase";
                manifest.verdicts.push_back(v);
            } else if (audit.rfind("rate:", 0) == 0) {
                RateRegime regime = diagnostics::parse_rate_regime(audit.substr(5));
                fill_regime_defaults(regime, prob);
                if (stepper.kind == StepperConfig::Kind::alg1 &&
                    audit.find("gamma=") == std::string::npos)
                    regime.gamma = stepper.gamma;
                const auto rep = diagnostics::audit_rate(trajectories, family, regime);
                AuditVerdict v;
                v.name = audit;
                v.pass = rep.holds;
                v.measured = rep.measured;
                v.bound = rep.bound;
                v.detail = rep.detail;
                manifest.verdicts.push_back(v);
            } else {
                throw config_error("unknown audit '" + audit + "'");
            }
        }
    }

    for (const auto& v : manifest.verdicts) manifest.all_pass = manifest.all_pass && v.pass;

    std::ofstream mf(fs::path(out_dir) / "manifest.json", std::ios::binary);
    mf << manifest.to_json() << '\n';
    return manifest;
}

std::string RunManifest::to_json() const {
    json j;
    j["artifact_version"] = artifact_version;
    j["csv_schema"] = {{"version", csv_schema_version}, {"columns", csv_columns}};
    j["config"] = {{"problem", config.problem},   {"stepper", config.stepper},
                   {"transform", config.transform}, {"x1", config.x1},
                   {"steps", config.steps},       {"seeds", config.seeds},
                   {"output_dir", config.output_dir}, {"audits", config.audits}};
    j["outputs"] = json::array();
    for (const auto& [seed, path] : outputs)
        j["outputs"].push_back({{"seed", seed}, {"path", path}});
    j["verdicts"] = json::array();
    for (const auto& v : verdicts)
        j["verdicts"].push_back({{"name", v.name},
                                 {"pass", v.pass},
                                 {"measured", v.measured},
                                 {"bound", v.bound},
                                 {"detail", v.detail}});
    j["all_pass"] = all_pass;
    return j.dump(2);
}

// ---- certify ----------------------------------------------------------------

CertifyResult run_certify(const CertifyRequest& request) {
    const Problem prob = problems::make_problem(request.problem);
    const FunctionOracle oracle = std::holds_alternative<FunctionOracle>(prob)
                                      ? std::get<FunctionOracle>(prob)
                                      : std::get<StochasticProblem>(prob).mixture();
    const diagnostics::Grid grid = diagnostics::standard_grid(oracle);

    auto constant = [&](const char* key, const std::optional<double>& declared) {
        auto it = request.constants.find(key);
        if (it != request.constants.end()) return it->second;
        if (declared) return *declared;
        throw config_error(std::string("certify: constant '") + key + "' is required");
    };

    CertifyResult result;
    result.problem = request.problem;
    result.grid_description = grid.description;

    const auto& d = oracle.declared;
    if (request.property == "lsuc") {
        result.certificate =
            diagnostics::check_lsuc_const(oracle, constant("lambda", std::nullopt), grid);
    } else if (request.property == "approx_lsuc") {
        const std::string tf = request.transform.empty() ? "shift_opt" : request.transform;
        const auto surrogate =
            surrogates::make_surrogate({oracle, surrogates::parse_transform(tf)});
        result.certificate = diagnostics::check_approx_lsuc(surrogate, grid);
    } else if (request.property == "self_bounded") {
        result.certificate = diagnostics::check_self_bounded(oracle, constant("L", d.self_bounded_L), grid);
    } else if (request.property == "lipschitz") {
        result.certificate = diagnostics::check_lipschitz(oracle, constant("G", d.lipschitz_G), grid);
    } else if (request.property == "sharp") {
        result.certificate = diagnostics::check_sharp(oracle, constant("s", d.sharp_s), grid);
    } else if (request.property == "qg") {
        result.certificate = diagnostics::check_qg(oracle, constant("mu", d.quadratic_growth_mu), grid);
    } else if (request.property == "qg_plus") {
        result.certificate = diagnostics::check_qg_plus(oracle, constant("L", std::nullopt), grid);
    } else if (request.property == "holder") {
        const double lnu = constant("L_nu", d.holder ? std::optional<double>(d.holder->L_nu)
                                                     : std::nullopt);
        const double nu = constant("nu", d.holder ? std::optional<double>(d.holder->nu)
                                                  : std::nullopt);
        result.certificate = diagnostics::check_holder(oracle, lnu, nu, grid);
    } else {
        throw config_error("unknown property '" + request.property + "'");
    }

    std::ostringstream csv;
    const int dim = oracle.dim;
    csv << "site";
    for (int j = 0; j < dim; ++j) csv << ",x" << j;
    for (int j = 0; j < dim; ++j) csv << ",g" << j;
    csv << ",margin\n";
    for (std::size_t i = 0; i < grid.sites.size(); ++i) {
        csv << i;
        for (int j = 0; j < dim; ++j) csv << ',' << fmt17(grid.sites[i].x[static_cast<std::size_t>(j)]);
        for (int j = 0; j < dim; ++j) csv << ',' << fmt17(grid.sites[i].g[static_cast<std::size_t>(j)]);
        csv << ',' << fmt17(result.certificate.margins[i]) << '\n';
    }
    result.margins_csv = csv.str();
    return result;
}

std::string CertifyResult::to_json() const {
    json j;
    j["problem"] = problem;
    j["property"] = diagnostics::property_name(certificate.property);
    j["constant"] = certificate.c1;
    if (certificate.property == diagnostics::PropertyKind::holder) j["nu"] = certificate.c2;
    j["grid"] = grid_description;
    j["sample_count"] = certificate.sample_count;
    j["worst_margin"] = certificate.worst_margin;
    j["witness"] = certificate.witness;
    j["holds"] = certificate.holds;
    return j.dump(2);
}

// ---- reproduce ----------------------------------------------------------------

namespace {

using counterexamples::CyclePrecision;
using counterexamples::InstabilityRegion;

void claim(ExperimentResult& r, const std::string& text, double measured, double threshold,
           bool pass) {
    r.claims.push_back({text, measured, threshold, pass});
    r.all_pass = r.all_pass && pass;
}

ExperimentResult experiment_cycle() {
    ExperimentResult r;
    r.name = "cycle";
    const auto dbl = counterexamples::run_cycle(CyclePrecision::double_prec, 36);
    const auto ext = counterexamples::run_cycle(CyclePrecision::extended, 200);

    claim(r, "double: period-3 closure |x4-x1| <= 1e-12", dbl.closure_error, 1e-12,
          dbl.closure_error <= 1e-12);
    claim(r, "double: running-average gap >= 0.77 for t <= 36", dbl.min_avg_gap, 0.77,
          dbl.min_avg_gap >= 0.77);
    claim(r, "per-period multiplier in [7.5, 8.5]", dbl.period_multiplier, 8.0,
          dbl.period_multiplier >= 7.5 && dbl.period_multiplier <= 8.5);
    claim(r, "extended: period-3 closure <= 1e-12", ext.closure_error, 1e-12,
          ext.closure_error <= 1e-12);
    claim(r, "extended: running-average gap >= 0.77 for t <= 200", ext.min_avg_gap, 0.77,
          ext.min_avg_gap >= 0.77);

    std::ostringstream csv;
    csv << "mode,t,x,avg_gap\n";
    for (std::size_t i = 0; i < dbl.avg_gap.size(); ++i)
        csv << "double," << i + 1 << ',' << fmt17(dbl.iterates[i]) << ','
            << fmt17(dbl.avg_gap[i]) << '\n';
    for (std::size_t i = 0; i < ext.avg_gap.size(); ++i)
        csv << "extended," << i + 1 << ',' << fmt17(ext.iterates[i]) << ','
            << fmt17(ext.avg_gap[i]) << '\n';
    r.outputs.emplace_back("cycle_series.csv", csv.str());
    return r;
}

ExperimentResult experiment_measure_zero() {
    ExperimentResult r;
    r.name = "measure_zero";
    const double a = 0.5;
    const auto tree = counterexamples::preimage_tree(a, 20);

    double max_ratio = 0.0;
    std::ostringstream csv;
    csv << "level,size,bound\n";
    for (std::size_t k = 0; k < tree.levels.size(); ++k) {
        const double bound = std::pow(2.0, static_cast<double>(k));
        max_ratio = std::max(max_ratio, static_cast<double>(tree.levels[k].size()) / bound);
        csv << k << ',' << tree.levels[k].size() << ',' << fmt17(bound) << '\n';
    }
    claim(r, "preimage level sizes <= 2^k for k <= 20", max_ratio, 1.0, max_ratio <= 1.0);

    const double root = std::sqrt(2.0 * a);
    double lvl1_err = std::numeric_limits<double>::infinity();
    if (tree.levels[1].size() == 2)
        lvl1_err = std::max(std::abs(tree.levels[1][0] + root), std::abs(tree.levels[1][1] - root));
    claim(r, "level 1 equals {-sqrt(2a), +sqrt(2a)}", lvl1_err, 1e-12, lvl1_err <= 1e-12);

    const auto nc = counterexamples::verify_nonconvergence(a, 10000, 10000, 20250101);
    claim(r, "converged trajectories (enter and stay within 1e-3)", nc.converged, 0.0,
          nc.converged == 0);
    claim(r, "smallest settle radius across trajectories > 1e-3", nc.min_tail_sup, 1e-3,
          nc.min_tail_sup > 1e-3);

    r.outputs.emplace_back("measure_zero_levels.csv", csv.str());
    std::ostringstream nc_csv;
    nc_csv << "n_starts,n_steps,converged,min_tail_sup,min_tail_abs\n"
           << nc.n_starts << ',' << nc.n_steps << ',' << nc.converged << ','
           << fmt17(nc.min_tail_sup) << ',' << fmt17(nc.min_tail_abs) << '\n';
    r.outputs.emplace_back("measure_zero_nonconvergence.csv", nc_csv.str());
    return r;
}

ExperimentResult experiment_sps_fail() {
    ExperimentResult r;
    r.name = "sps_fail";
    const auto prob =
        std::get<StochasticProblem>(problems::make_problem("sps_fail"));
    const auto chain = counterexamples::exact_sps_chain(prob, 1.0, 1000);

    double worst_ef_err = 0.0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < chain.expected_F.size(); ++i) {
        if (i >= 1) worst_ef_err = std::max(worst_ef_err, std::abs(chain.expected_F[i] - 9.0));
        min_gap = std::min(min_gap, chain.gap[i]);
    }
    claim(r, "E[F(x_t)] = 9 within 1e-12 for 2 <= t <= 1000", worst_ef_err, 1e-12,
          worst_ef_err <= 1e-12);
    claim(r, "min F = 44/6 within 1e-12", std::abs(chain.min_F - 44.0 / 6.0), 1e-12,
          std::abs(chain.min_F - 44.0 / 6.0) <= 1e-12);
    claim(r, "gap E[F(x_t)] - min F >= 2/3 at every t", min_gap, 2.0 / 3.0,
          min_gap >= 2.0 / 3.0 - 1e-12);
    claim(r, "chain stayed exact (finite support)", chain.exact ? 1.0 : 0.0, 1.0, chain.exact);

    std::ostringstream csv;
    csv << "t,expected_F,gap,support_size\n";
    for (std::size_t i = 0; i < chain.expected_F.size(); ++i)
        csv << i + 1 << ',' << fmt17(chain.expected_F[i]) << ',' << fmt17(chain.gap[i]) << ','
            << chain.states[i].support.size() << '\n';
    r.outputs.emplace_back("sps_fail_series.csv", csv.str());
    return r;
}

ExperimentResult experiment_instability() {
    ExperimentResult r;
    r.name = "instability";

    const auto quad = std::get<FunctionOracle>(problems::make_problem("shifted_quad?a=1"));
    InstabilityRegion qg{InstabilityRegion::Kind::self_bounded_qg, 1.0, 1.0, 1.0};
    const auto qg_rep = counterexamples::instability_check(quad, qg, 1000, 7, true);
    claim(r, "shifted_quad(1): all 1000 samples in S expand strictly",
          qg_rep.min_expansion_ratio, 1.0, qg_rep.all_expand && qg_rep.min_expansion_ratio > 1.0);
    claim(r, "shifted_quad(1): quasi-firm non-expansiveness violated",
          qg_rep.cutter_violations, 1.0, qg_rep.cutter_violations >= 1);

    const auto sharp = std::get<FunctionOracle>(problems::make_problem("abs_shifted?a=1"));
    InstabilityRegion sh{InstabilityRegion::Kind::lipschitz_sharp, 1.0, 1.0, 1.0};
    const auto sh_rep = counterexamples::instability_check(sharp, sh, 1000, 7, true);
    claim(r, "abs_shifted(1): all 1000 samples in S expand strictly", sh_rep.min_expansion_ratio,
          1.0, sh_rep.all_expand && sh_rep.min_expansion_ratio > 1.0);

    std::ostringstream csv;
    csv << "kind,x,dist_before,dist_after,stepsize,cutter_violated\n";
    for (const auto& s : qg_rep.samples)
        csv << "self_bounded_qg," << fmt17(s.x[0]) << ',' << fmt17(s.dist_before) << ','
            << fmt17(s.dist_after) << ',' << fmt17(s.stepsize) << ',' << s.cutter_violated << '\n';
    for (const auto& s : sh_rep.samples)
        csv << "lipschitz_sharp," << fmt17(s.x[0]) << ',' << fmt17(s.dist_before) << ','
            << fmt17(s.dist_after) << ',' << fmt17(s.stepsize) << ',' << s.cutter_violated << '\n';
    r.outputs.emplace_back("instability_samples.csv", csv.str());
    return r;
}

ExperimentResult experiment_bounded_region() {
    ExperimentResult r;
    r.name = "bounded_region";

    const auto quad = std::get<FunctionOracle>(problems::make_problem("shifted_quad?a=1"));
    InstabilityRegion qg{InstabilityRegion::Kind::self_bounded_qg, 1.0, 1.0, 1.0};
    const auto qg_rep = counterexamples::bounded_subregion(quad, qg, 2.0, 1000, 11);
    claim(r, "QG case: stepsizes on S\\S_2 within 2k(c+1)/(mu c)", qg_rep.max_stepsize,
          qg_rep.bound, qg_rep.holds);

    const auto sharp = std::get<FunctionOracle>(problems::make_problem("abs_shifted?a=1"));
    InstabilityRegion sh{InstabilityRegion::Kind::lipschitz_sharp, 1.0, 1.0, 1.0};
    const auto sh_rep = counterexamples::bounded_subregion(sharp, sh, 2.0, 1000, 11);
    claim(r, "sharp case: stepsizes on S within (c+1)h*/mu^2", sh_rep.max_stepsize, sh_rep.bound,
          sh_rep.holds);

    std::ostringstream csv;
    csv << "kind,k,c,bound,max_stepsize,samples\n";
    csv << "self_bounded_qg," << fmt17(qg_rep.k) << ',' << fmt17(qg_rep.c) << ','
        << fmt17(qg_rep.bound) << ',' << fmt17(qg_rep.max_stepsize) << ',' << qg_rep.samples
        << '\n';
    csv << "lipschitz_sharp," << fmt17(sh_rep.k) << ',' << fmt17(sh_rep.c) << ','
        << fmt17(sh_rep.bound) << ',' << fmt17(sh_rep.max_stepsize) << ',' << sh_rep.samples
        << '\n';
    r.outputs.emplace_back("bounded_region.csv", csv.str());
    return r;
}

}  // namespace

std::vector<std::string> experiment_names() {
    return {"cycle", "measure_zero", "sps_fail", "instability", "bounded_region"};
}

ExperimentResult run_experiment(const std::string& name) {
    if (name == "cycle") return experiment_cycle();
    if (name == "measure_zero") return experiment_measure_zero();
    if (name == "sps_fail") return experiment_sps_fail();
    if (name == "instability") return experiment_instability();
    if (name == "bounded_region") return experiment_bounded_region();
    std::string known;
    for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
    throw lookup_error("unknown experiment '" + name + "' (registry: " + known + ")");
}

std::string ExperimentResult::verdict_json() const {
    json j;
    j["experiment"] = name;
    j["all_pass"] = all_pass;
    j["claims"] = json::array();
    for (const auto& c : claims)
        j["claims"].push_back({{"claim", c.claim},
                               {"measured", c.measured},
                               {"threshold", c.threshold},
                               {"pass", c.pass}});
    return j.dump(2);
}

}  // namespace polyak::harness
