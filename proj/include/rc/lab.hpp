#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rc/stats.hpp"

namespace rc {

inline constexpr const char* kVersion = "0.1.0";

/// Flat experiment configuration. File format: one `key = value` per line,
/// '#' comments; CLI flags override file values.
struct ExperimentConfig {
    std::string experiment;
    double p = 0.5;
    double p_rel = 0.0; // when in (0,1): p = p_rel * p_u(q, delta)
    double q = 2.0;
    uint32_t delta = 3;
    std::vector<uint32_t> sizes{128, 256, 512, 1024};
    int reps = 20;
    uint64_t seed = 1;
    double cap_mult = 200.0;  // coupling-time cap, multiples of n ln n
    double burn_mult = 20.0;  // stationary-ish run length, multiples of n ln n
    std::vector<uint32_t> radii{2, 3, 4, 5};
    uint64_t mc_samples_base = 400000; // spatial-mixing MCMC samples at R=3
    double eps = 0.3;   // lower-bound probe exponent
    double c_small = 0.1;
    bool force = false; // allow p >= p_u
    std::string out_dir;

    // p after p_rel resolution
    double resolved_p() const;
    // throws parameter_error when p >= p_u(q, delta) and !force
    void validate_uniqueness() const;
};

ExperimentConfig load_config_file(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Result rows in the long CSV schema plus a JSON manifest that reproduces
/// the run bit-exactly.
struct Report {
    std::string name;
    std::string manifest_json;
    std::vector<std::string> rows; // experiment,n,delta,q,p,seed,rep,metric,value
    std::string summary;

    void add_row(const std::string& experiment, uint64_t n, uint32_t delta, double q, double p,
                 uint64_t seed, int64_t rep, const std::string& metric, double value);
    // writes <dir>/<name>.csv and <dir>/<name>.manifest.json
    void write(const std::string& dir) const;
};

// Coupling-time medians across the size list and the log-log slope of median
// against n ln n.
Report exp_mixing_sweep(const ExperimentConfig& cfg);

// TV between the two-leaf-wired and free boundary conditions on the root
// edge neighborhood of complete trees, exact for R <= 3, paired-stream MCMC
// for R >= 3, with the fitted exponential decay rate.
Report exp_spatial_mixing(const ExperimentConfig& cfg);

// Product-chain lower-bound probe: representative edges with disjoint tree
// balls, the A+ statistic at a short horizon against its stationary value.
Report exp_lower_bound(const ExperimentConfig& cfg);

// Command line entry. Returns the process exit code: 0 success, 1 usage,
// 2 parameter error, 3 runtime cap.
int run_cli(const std::vector<std::string>& args);

} // namespace rc
