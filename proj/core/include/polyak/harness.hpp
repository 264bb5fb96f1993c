#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "polyak/counterexamples.hpp"
#include "polyak/diagnostics.hpp"
#include "polyak/problems.hpp"
#include "polyak/steppers.hpp"

namespace polyak::harness {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kCsvSchemaVersion = "1";
// Output root override; relative output directories resolve under it.
inline constexpr const char* kOutputRootEnv = "POLYAK_OUT";

using steppers::Trajectory;

struct RunConfig {
    std::string problem;    // zoo name + params, e.g. "shifted_quad?a=0.5"
    std::string stepper;    // polyak | gd:eta | alg1:gamma[:c] | map_t
    std::string transform;  // shift_opt | hinge:a | lower_bound:q | hinge_opt
    Vec x1;
    int steps = 100;
    std::vector<std::uint64_t> seeds{0};
    std::string output_dir = "runs";
    std::vector<std::string> audits;  // "one_step", "fejer", "rate:<regime>[:k=v...]"

    void validate() const;
};

// Plain key=value text; '#' starts a comment. Keys: problem, stepper,
// transform, x1, steps, seeds, output_dir, audits.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Builds a config from key=value pairs (file contents merged with flag
// overrides; later sources win).
RunConfig config_from_kv(const std::map<std::string, std::string>& kv);

std::vector<std::uint64_t> parse_seeds(const std::string& spec);  // "0..99" or "1,5,7"
Vec parse_vector(const std::string& spec);                        // "1,1,1,1"

struct AuditVerdict {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct RunManifest {
    std::string artifact_version;
    std::string csv_schema_version;
    std::vector<std::string> csv_columns;
    RunConfig config;
    std::vector<std::pair<std::uint64_t, std::string>> outputs;  // seed -> csv path
    std::vector<AuditVerdict> verdicts;
    bool all_pass = true;

    std::string to_json() const;
};

// Fans seeds out to a worker pool, writes one trajectory CSV per seed plus a
// manifest JSON, and evaluates the requested audits.
RunManifest execute_run(const RunConfig& config);

// Columns: t, x0..x{d-1}, f, eta, h, clipped. Floats use 17 significant
// digits so replays round-trip exactly.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

// If POLYAK_OUT is set and dir is relative, the run lands under it.
std::string resolve_output_dir(const std::string& dir);

// ---- certify ---------------------------------------------------------------

struct CertifyRequest {
    std::string problem;
    std::string property;   // lsuc | approx_lsuc | self_bounded | lipschitz |
                            // sharp | qg | qg_plus | holder
    std::string transform;  // approx_lsuc only
    std::map<std::string, double> constants;  // lambda / L / G / s / mu / L_nu / nu
};

struct CertifyResult {
    diagnostics::Certificate certificate;
    std::string grid_description;
    std::string problem;
    std::string to_json() const;
    std::string margins_csv;  // pointwise margins, one row per grid site
};

CertifyResult run_certify(const CertifyRequest& request);

// ---- reproduce -------------------------------------------------------------

struct ClaimVerdict {
    std::string claim;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct ExperimentResult {
    std::string name;
    std::vector<ClaimVerdict> claims;
    bool all_pass = true;
    // filename -> file contents; the caller decides where they land
    std::vector<std::pair<std::string, std::string>> outputs;

    std::string verdict_json() const;
};

std::vector<std::string> experiment_names();

// Registry entries: cycle | measure_zero | sps_fail | instability |
// bounded_region, each with its pinned parameters.
ExperimentResult run_experiment(const std::string& name);

}  // namespace polyak::harness
