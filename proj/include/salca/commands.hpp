#pragma once
/* Orchestration layer behind the CLI: configuration, the pipeline commands
 * (sample / build / certify / extend / synthesize / run / param-study) and
 * the three end-to-end benchmark scripts.  Every command is a deterministic
 * function of its configuration and input files; derived files carry the
 * fnv1a64 of their inputs and consumers refuse mismatched chains. */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "salca/io.hpp"
#include "salca/pac.hpp"
#include "salca/systems.hpp"

namespace salca {

// Lipschitz block of the config: constants for the horizon-extension
// formulas plus the ball/input bounds used by the contracting-horizon mode.
struct ExtensionConstants {
    LipschitzConstants lip;
    double u_sup = 0;
    double psi = 0;
    double r = 0;
};

struct PipelineConfig {
    std::string system = "linear";  // "linear" or "mountain_car"
    int hold = 1;                   // concrete steps per abstract step
    std::size_t n = 0;              // records to sample
    int horizon = 1;                // abstract steps per record
    int ell = 0;
    double beta = 1e-3;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out = "out";
    std::vector<std::string> goal;
    std::vector<std::string> avoid;
    std::size_t trials = 0;
    std::optional<ExtensionConstants> constants;
    std::vector<std::size_t> n_list;  // param study
    std::vector<int> ell_list;        // param study
};

PipelineConfig load_config(const std::string& path);
// SALCA_SEED and SALCA_OUT beat both the config file and the flags.
void apply_env_overrides(PipelineConfig& cfg);

// The concrete plant named by the config (hold not applied).
ControlSystem base_system(const PipelineConfig& cfg);
// The sampled plant: base system under a hold-`cfg.hold` zero-order hold.
ControlSystem sampled_system(const PipelineConfig& cfg);

// Analytic constants for the linear benchmark's dynamics (2-norm).
ExtensionConstants linear_benchmark_constants();

// Each command prints a short report to stdout and returns the paths it
// wrote.  Failures throw ConfigError / ProvenanceError / NumericError.
std::string cmd_sample(const PipelineConfig& cfg);
std::string cmd_build(const PipelineConfig& cfg, const std::string& dataset_path);
std::string cmd_certify(const PipelineConfig& cfg, const std::string& dataset_path,
                        const std::string& windows_path);
std::string cmd_extend(const PipelineConfig& cfg, const std::string& certificate_path,
                       const std::string& mode, int extra);
std::string cmd_synthesize(const PipelineConfig& cfg, const std::string& windows_path,
                           const std::string& certificate_path);
std::string cmd_run(const PipelineConfig& cfg, const std::string& windows_path,
                    const std::string& controller_path);
std::string cmd_param_study(const PipelineConfig& cfg);
std::string cmd_bench(const PipelineConfig& cfg, const std::string& name);

}  // namespace salca
