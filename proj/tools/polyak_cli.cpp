// Command-line front end: run steppers with audits, certify function-class
// constants, and reproduce the negative-result experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "polyak/harness.hpp"

namespace fs = std::filesystem;
using namespace polyak;

namespace {

constexpr const char* kCsvDoc =
    "Trajectory CSV columns: t, x0..x{d-1}, f, eta, h, clipped. Floats carry 17 "
    "significant digits; eta is the stepsize applied to the direction h*g "
    "(plain g for gd). The final row is the last iterate with eta = 0.";

int run_command(const std::map<std::string, std::string>& file_kv,
                const std::map<std::string, std::string>& flag_kv) {
    std::map<std::string, std::string> kv = file_kv;
    for (const auto& [k, v] : flag_kv) kv[k] = v;  // flags override the file
    const harness::RunConfig config = harness::config_from_kv(kv);
    const harness::RunManifest manifest = harness::execute_run(config);
    for (const auto& v : manifest.verdicts)
        std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  measured=" << v.measured
                  << " bound=" << v.bound << "  (" << v.detail << ")\n";
    std::cout << (manifest.all_pass ? "run: all audits passed\n" : "run: audit failures\n");
    return manifest.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polyak-stepsize laboratory: surrogate losses, curvature "
                 "certificates, and failure-mode reproductions"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", std::string("Run a stepper and audit it. ") + kCsvDoc);
    std::string problem, stepper, transform, x1, seeds, audits, config_file;
    std::string output_dir;
    int steps = -1;
    run->add_option("--problem", problem, "zoo name, e.g. quad?dim=4 or shifted_quad?a=0.5");
    run->add_option("--stepper", stepper, "polyak | gd:<eta> | alg1:<gamma>[:<c>] | map_t");
    run->add_option("--transform", transform,
                    "shift_opt | hinge:<a> | lower_bound:<q> | hinge_opt");
    run->add_option("--x1", x1, "start point, comma separated");
    run->add_option("--steps", steps, "number of steps (>= 1)");
    run->add_option("--seeds", seeds, "seed list/range, e.g. 0..99 or 1,2,3");
    run->add_option("--output-dir", output_dir, "output directory (default runs/)");
    run->add_option("--audit", audits,
                    "comma list: one_step, fejer, rate:<regime>[:k=v...] with regimes "
                    "lipschitz, self_bounded, sharp, alg1_self_bounded, alg1_lipschitz, "
                    "alg1_linear, holder, alg1_regret");
    run->add_option("--config", config_file, "key=value file; flags override it");

    // ---- certify ----
    auto* certify = app.add_subcommand(
        "certify", "Check a function-class constant on the standard grid; emits a JSON "
                   "certificate and a CSV of pointwise margins");
    std::string c_problem, c_property, c_transform, c_outdir = ".";
    std::map<std::string, double> c_constants;
    certify->add_option("--problem", c_problem, "zoo name")->required();
    certify->add_option("--property", c_property,
                        "lsuc | approx_lsuc | self_bounded | lipschitz | sharp | qg | "
                        "qg_plus | holder")
        ->required();
    certify->add_option("--transform", c_transform, "transform for approx_lsuc");
    certify->add_option("--output-dir", c_outdir, "where certificate.json/margins.csv land");
    for (const char* key : {"lambda", "L", "G", "s", "mu", "L_nu", "nu"})
        certify->add_option_function<double>(
            std::string("--") + key, [&c_constants, key](double v) { c_constants[key] = v; },
            std::string("constant ") + key);

    // ---- reproduce ----
    auto* reproduce = app.add_subcommand(
        "reproduce", "Re-run a pinned negative-result experiment and compare against its claims");
    std::string experiment, r_outdir = ".";
    reproduce->add_option("experiment", experiment,
                          "cycle | measure_zero | sps_fail | instability | bounded_region")
        ->required();
    reproduce->add_option("--output-dir", r_outdir, "where the series CSVs and verdict land");

    // ---- list ----
    auto* list = app.add_subcommand("list", "List problems, steppers, transforms, experiments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::map<std::string, std::string> file_kv;
            if (!config_file.empty()) file_kv = harness::parse_config_file(config_file);
            std::map<std::string, std::string> flag_kv;
            if (!problem.empty()) flag_kv["problem"] = problem;
            if (!stepper.empty()) flag_kv["stepper"] = stepper;
            if (!transform.empty()) flag_kv["transform"] = transform;
            if (!x1.empty()) flag_kv["x1"] = x1;
            if (steps >= 0) flag_kv["steps"] = std::to_string(steps);
            if (!seeds.empty()) flag_kv["seeds"] = seeds;
            if (!output_dir.empty()) flag_kv["output_dir"] = output_dir;
            if (!audits.empty()) flag_kv["audits"] = audits;
            return run_command(file_kv, flag_kv);
        }

        if (certify->parsed()) {
            harness::CertifyRequest req{c_problem, c_property, c_transform, c_constants};
            const auto result = harness::run_certify(req);
            const fs::path dir = harness::resolve_output_dir(c_outdir);
            fs::create_directories(dir);
            std::ofstream(dir / "certificate.json", std::ios::binary) << result.to_json() << '\n';
            std::ofstream(dir / "margins.csv", std::ios::binary) << result.margins_csv;
            std::cout << (result.certificate.holds ? "PASS " : "FAIL ") << c_property << " on "
                      << c_problem << "  worst_margin=" << result.certificate.worst_margin
                      << "\n";
            return result.certificate.holds ? 0 : 1;
        }

        if (reproduce->parsed()) {
            const auto result = harness::run_experiment(experiment);
            const fs::path dir = harness::resolve_output_dir(r_outdir);
            fs::create_directories(dir);
            for (const auto& [file, content] : result.outputs)
                std::ofstream(dir / file, std::ios::binary) << content;
            std::ofstream(dir / (result.name + "_verdict.json"), std::ios::binary)
                << result.verdict_json() << '\n';
            for (const auto& c : result.claims)
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.claim
                          << "  measured=" << c.measured << " threshold=" << c.threshold << "\n";
            return result.all_pass ? 0 : 1;
        }

        if (list->parsed()) {
            std::cout << "problems:\n";
            for (const auto& n : problems::zoo().names()) std::cout << "  " << n << "\n";
            std::cout << "steppers: polyak | gd:<eta> | alg1:<gamma>[:<c>] | map_t\n";
            std::cout << "transforms: shift_opt | hinge:<a> | lower_bound:<q> | hinge_opt\n";
            std::cout << "experiments:\n";
            for (const auto& n : harness::experiment_names()) std::cout << "  " << n << "\n";
            std::cout << "env: " << harness::kOutputRootEnv
                      << " overrides the output root for relative paths\n";
            return 0;
        }
    } catch (const lookup_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const contract_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
