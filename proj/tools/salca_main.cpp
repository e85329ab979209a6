// salca — learn finite-state abstractions of black-box control systems from
// sampled trajectories, certify them, and synthesize reach-avoid controllers.
//
// Pipeline:  sample -> build -> certify [-> extend] -> synthesize -> run
// Each stage records the fnv1a64 hash of its inputs; later stages refuse to
// run on files that do not match the recorded chain (exit code 3).

#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "salca/commands.hpp"
#include "salca/io.hpp"

namespace {

struct CommonOpts {
    CLI::Option* config;
    CLI::Option* seed;
    CLI::Option* out;
    CLI::Option* threads;
};

struct Cli {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 1;

    std::string dataset;
    std::string windows;
    std::string certificate;
    std::string controller;
    int ell = 0;
    std::string mode = "nu";
    int t_extra = 1;
    std::size_t trials = 0;
    std::string bench_name;
};

CommonOpts add_common(CLI::App* cmd, Cli& v) {
    CommonOpts c;
    c.config = cmd->add_option("--config", v.config_path, "JSON configuration file");
    c.seed = cmd->add_option("--seed", v.seed, "RNG seed (beats the config file)");
    c.out = cmd->add_option("--out", v.out, "output directory (beats the config file)");
    c.threads = cmd->add_option("--threads", v.threads, "sampler worker threads");
    return c;
}

salca::PipelineConfig make_config(const CommonOpts& c, const Cli& v) {
    salca::PipelineConfig cfg;
    if (c.config->count()) cfg = salca::load_config(v.config_path);
    if (c.seed->count()) cfg.seed = v.seed;
    if (c.out->count()) cfg.out = v.out;
    if (c.threads->count()) cfg.workers = v.threads;
    salca::apply_env_overrides(cfg);  // env beats config and flags
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-driven finite-state abstraction and controller synthesis"};
    app.require_subcommand(1);
    Cli v;

    CLI::App* c_sample = app.add_subcommand("sample", "sample a trajectory dataset");
    const CommonOpts o_sample = add_common(c_sample, v);

    CLI::App* c_build = app.add_subcommand("build", "collect windows and build the abstraction");
    const CommonOpts o_build = add_common(c_build, v);
    c_build->add_option("--dataset", v.dataset, "dataset file")->required();
    CLI::Option* opt_ell = c_build->add_option("--ell", v.ell, "memory length (beats the config)");

    CLI::App* c_certify = app.add_subcommand("certify", "attach a scenario certificate");
    const CommonOpts o_certify = add_common(c_certify, v);
    c_certify->add_option("--dataset", v.dataset, "dataset file")->required();
    c_certify->add_option("--windows", v.windows, "window-set file")->required();

    CLI::App* c_extend = app.add_subcommand("extend", "extend a certificate to longer horizons");
    const CommonOpts o_extend = add_common(c_extend, v);
    c_extend->add_option("--certificate", v.certificate, "certificate file")->required();
    c_extend->add_option("--mode", v.mode, "nu or contracting")->capture_default_str();
    c_extend->add_option("--t", v.t_extra, "extra steps (nu mode)")->capture_default_str();

    CLI::App* c_synth = app.add_subcommand("synthesize", "solve the reach-avoid game");
    const CommonOpts o_synth = add_common(c_synth, v);
    c_synth->add_option("--windows", v.windows, "window-set file")->required();
    c_synth->add_option("--certificate", v.certificate, "certificate file")->required();

    CLI::App* c_run = app.add_subcommand("run", "refine the controller and run it on the plant");
    const CommonOpts o_run = add_common(c_run, v);
    c_run->add_option("--windows", v.windows, "window-set file")->required();
    c_run->add_option("--controller", v.controller, "controller file")->required();
    CLI::Option* opt_trials = c_run->add_option("--trials", v.trials, "runs (beats the config)");

    CLI::App* c_study = app.add_subcommand("param-study", "sweep memory length and sample count");
    const CommonOpts o_study = add_common(c_study, v);

    CLI::App* c_bench = app.add_subcommand("bench", "run a packaged benchmark end to end");
    const CommonOpts o_bench = add_common(c_bench, v);
    c_bench->add_option("--name", v.bench_name, "linear, mountaincar, or rl-compare")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is a configuration problem
    }

    try {
        if (c_sample->parsed()) {
            salca::cmd_sample(make_config(o_sample, v));
        } else if (c_build->parsed()) {
            salca::PipelineConfig cfg = make_config(o_build, v);
            if (opt_ell->count()) cfg.ell = v.ell;
            salca::cmd_build(cfg, v.dataset);
        } else if (c_certify->parsed()) {
            salca::cmd_certify(make_config(o_certify, v), v.dataset, v.windows);
        } else if (c_extend->parsed()) {
            salca::cmd_extend(make_config(o_extend, v), v.certificate, v.mode, v.t_extra);
        } else if (c_synth->parsed()) {
            salca::cmd_synthesize(make_config(o_synth, v), v.windows, v.certificate);
        } else if (c_run->parsed()) {
            salca::PipelineConfig cfg = make_config(o_run, v);
            if (opt_trials->count()) cfg.trials = v.trials;
            salca::cmd_run(cfg, v.windows, v.controller);
        } else if (c_study->parsed()) {
            salca::cmd_param_study(make_config(o_study, v));
        } else if (c_bench->parsed()) {
            salca::cmd_bench(make_config(o_bench, v), v.bench_name);
        }
        return 0;
    } catch (const salca::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const salca::ProvenanceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const salca::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
