#include "salca/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "json.hpp"
#include "salca/qlearn.hpp"

namespace salca {
namespace {

using nlohmann::json;

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
    return cfg.out + "/" + name;
}

ControlSystem named_system(const std::string& name) {
    if (name == "linear") return make_linear_benchmark();
    if (name == "mountain_car") return make_mountain_car();
    throw ConfigError("unknown system: " + name + " (expected linear or mountain_car)");
}

std::vector<std::string> run_row(std::size_t trial, const RunReport& rep, const StateVec& x0,
                                 const Salca& a) {
    std::vector<std::string> row{std::to_string(trial), to_string(rep.outcome),
                                 std::to_string(rep.macro_steps), std::to_string(rep.concrete_steps)};
    for (int d = 0; d < x0.n; ++d) row.push_back(format_double(x0[d]));
    row.push_back(a.output_labels.name(rep.outs.back()));
    return row;
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config unreadable: " + std::string(e.what()));
    }
    PipelineConfig cfg;
    try {
        cfg.system = j.value("system", cfg.system);
        cfg.hold = j.value("hold", cfg.hold);
        cfg.n = j.value("n", cfg.n);
        cfg.horizon = j.value("horizon", cfg.horizon);
        cfg.ell = j.value("ell", cfg.ell);
        cfg.beta = j.value("beta", cfg.beta);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.workers = j.value("workers", cfg.workers);
        cfg.out = j.value("out", cfg.out);
        cfg.goal = j.value("goal", cfg.goal);
        cfg.avoid = j.value("avoid", cfg.avoid);
        cfg.trials = j.value("trials", cfg.trials);
        cfg.n_list = j.value("n_list", cfg.n_list);
        cfg.ell_list = j.value("ell_list", cfg.ell_list);
        if (j.contains("lipschitz")) {
            const json& jl = j.at("lipschitz");
            ExtensionConstants ec;
            ec.lip.m_x = jl.at("m_x").get<double>();
            ec.lip.l_x = jl.at("l_x").get<double>();
            ec.lip.l_u = jl.at("l_u").get<double>();
            ec.lip.c = jl.value("c", 1.0);
            ec.lip.q = jl.value("q", 1.0);
            ec.lip.n = jl.at("n").get<int>();
            ec.u_sup = jl.value("u_sup", 0.0);
            ec.psi = jl.value("psi", 0.0);
            ec.r = jl.value("r", 0.0);
            cfg.constants = ec;
        }
    } catch (const json::exception& e) {
        throw ConfigError("config field: " + std::string(e.what()));
    }
    if (cfg.hold < 1 || cfg.horizon < 1 || cfg.ell < 0)
        throw ConfigError("config: need hold >= 1, horizon >= 1, ell >= 0");
    if (cfg.ell >= cfg.horizon) throw ConfigError("config: need ell < horizon");
    if (!(cfg.beta > 0.0) || !(cfg.beta < 1.0)) throw ConfigError("config: need 0 < beta < 1");
    named_system(cfg.system);  // validates the name early
    return cfg;
}

void apply_env_overrides(PipelineConfig& cfg) {
    if (const char* seed = std::getenv("SALCA_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(seed, &end, 10);
        if (end == seed || *end != '\0') throw ConfigError("SALCA_SEED is not an integer");
        cfg.seed = v;
    }
    if (const char* out = std::getenv("SALCA_OUT")) {
        if (*out == '\0') throw ConfigError("SALCA_OUT is empty");
        cfg.out = out;
    }
}

ControlSystem base_system(const PipelineConfig& cfg) { return named_system(cfg.system); }

ControlSystem sampled_system(const PipelineConfig& cfg) {
    const ControlSystem base = named_system(cfg.system);
    return cfg.hold == 1 ? base : zero_order_hold(base, cfg.hold);
}

ExtensionConstants linear_benchmark_constants() {
    const auto [smax, smin] = singular_values_2x2({0.25, 0.5, -0.45, 0.25});
    ExtensionConstants ec;
    ec.lip = {smin, smax, 1.0, 1.0, 1.0, 2};  // l_u = ||B||_2 with B = [0,1]^T
    ec.u_sup = 0.3;
    ec.psi = std::sqrt(18.0);  // diameter bound of [-3,3]^2 from the origin
    ec.r = 1.0;
    return ec;
}

std::string cmd_sample(const PipelineConfig& cfg) {
    if (cfg.n == 0) throw ConfigError("sample: config needs n >= 1");
    const ControlSystem sys = sampled_system(cfg);
    SampleConfig sc;
    sc.seed = cfg.seed;
    sc.count = cfg.n;
    sc.horizon = cfg.horizon;
    sc.workers = cfg.workers;
    const Dataset d = sample_dataset(sys, sc);
    const std::string path = out_path(cfg, "dataset.txt");
    save_dataset(d, path);
    std::printf("dataset  %s  records=%zu horizon=%d  %s\n", path.c_str(), d.size(), d.horizon,
                file_hash(path).c_str());
    return path;
}

std::string cmd_build(const PipelineConfig& cfg, const std::string& dataset_path) {
    const Dataset d = load_dataset(dataset_path);
    WindowSet w = collect_windows(d, cfg.ell);
    const Salca a = build_salca(std::move(w));  // stats only; the file stores the windows
    const std::string path = out_path(cfg, "windows.txt");
    save_windows(a.windows, d.system, file_hash(dataset_path), path);
    std::printf("windows  %s  members=%zu states=%zu transitions=%zu initial=%zu\n", path.c_str(),
                a.windows.size(), a.num_states(), a.num_transitions(), a.initial.size());
    return path;
}

std::string cmd_certify(const PipelineConfig& cfg, const std::string& dataset_path,
                        const std::string& windows_path) {
    const WindowsDoc doc = load_windows(windows_path);
    if (doc.dataset_hash != file_hash(dataset_path))
        throw ProvenanceError("certify: dataset file does not match the hash in " + windows_path);
    CertificateDoc cert;
    cert.system = doc.system;
    cert.dataset_hash = doc.dataset_hash;
    cert.abstraction_hash = file_hash(windows_path);
    cert.cert = certify(doc.w, doc.w.record_count(), cfg.beta,
                        static_cast<std::uint64_t>(doc.w.input_labels.size()), doc.w.horizon);
    const std::string path = out_path(cfg, "certificate.json");
    save_certificate(cert, path);
    std::printf("certificate  %s  s_star=%d eps=%s eps_bar=%s\n", path.c_str(), cert.cert.s_star,
                format_double(cert.cert.eps).c_str(), format_double(cert.cert.eps_bar).c_str());
    return path;
}

std::string cmd_extend(const PipelineConfig& cfg, const std::string& certificate_path,
                       const std::string& mode, int extra) {
    if (!cfg.constants) throw ConfigError("extend: config has no lipschitz block");
    const ExtensionConstants& ec = *cfg.constants;
    CertificateDoc doc = load_certificate(certificate_path);
    ExtensionNote note;
    note.method = mode;
    if (mode == "nu") {
        if (extra < 1) throw ConfigError("extend: nu mode needs --t >= 1");
        note.extra = extra;
        note.lambda = lambda_of(ec.lip, doc.cert.u_card);
        note.nu = nu_factor(note.lambda, doc.cert.horizon, extra);
        note.eps_bar_extended = std::min(1.0, note.nu * doc.cert.eps_bar);
        note.extended_horizon = doc.cert.horizon + extra;
    } else if (mode == "contracting") {
        note.k_bar = contracting_horizon(ec.lip.l_x, ec.lip.l_u, ec.psi, ec.r, ec.u_sup);
        note.rho = ec.lip.l_u * ec.u_sup / (1.0 - ec.lip.l_x);
        note.resample_needed = doc.cert.horizon < note.k_bar;
        note.extended_horizon = std::max(doc.cert.horizon, note.k_bar);
    } else {
        throw ConfigError("extend: mode must be nu or contracting");
    }
    doc.extension = note;
    const std::string path = out_path(cfg, "certificate_" + mode + ".json");
    save_certificate(doc, path);
    if (mode == "nu")
        std::printf("extension  %s  lambda=%s nu=%s eps_bar_extended=%s horizon=%d\n", path.c_str(),
                    format_double(note.lambda).c_str(), format_double(note.nu).c_str(),
                    format_double(note.eps_bar_extended).c_str(), note.extended_horizon);
    else
        std::printf("extension  %s  k_bar=%d rho=%s resample_needed=%s\n", path.c_str(), note.k_bar,
                    format_double(note.rho).c_str(), note.resample_needed ? "yes" : "no");
    return path;
}

std::string cmd_synthesize(const PipelineConfig& cfg, const std::string& windows_path,
                           const std::string& certificate_path) {
    const CertificateDoc cert = load_certificate(certificate_path);
    if (cert.abstraction_hash != file_hash(windows_path))
        throw ProvenanceError("synthesize: window-set file does not match the certificate");
    WindowsDoc doc = load_windows(windows_path);
    const Salca a = build_salca(std::move(doc.w));
    ReachAvoidSpec spec;
    spec.goal = cfg.goal;
    spec.avoid = cfg.avoid;
    spec.max_steps = cert.cert.horizon;
    if (spec.goal.empty()) throw ConfigError("synthesize: config needs a nonempty goal list");
    const AbstractController c = solve_reach_avoid(a, spec);
    const std::string path = out_path(cfg, "controller.txt");
    save_controller(c, a, cert.abstraction_hash, path);
    std::printf("controller  %s  winning=%zu of %zu states, winning_initial=%zu of %zu\n",
                path.c_str(), c.num_winning(), a.num_states(), c.winning_initial.size(),
                a.initial.size());
    return path;
}

std::string cmd_run(const PipelineConfig& cfg, const std::string& windows_path,
                    const std::string& controller_path) {
    WindowsDoc meta;
    const Salca a = [&] {
        WindowsDoc doc = load_windows(windows_path);
        meta.system = doc.system;
        return build_salca(std::move(doc.w));
    }();
    const ControllerDoc cdoc = load_controller_doc(controller_path);
    if (cdoc.abstraction_hash != file_hash(windows_path))
        throw ProvenanceError("run: window-set file does not match the controller");
    const AbstractController c = attach_controller(cdoc, a);
    const ControlSystem sys = base_system(cfg);
    if (sys.name != meta.system && meta.system != sys.name + "_hold" + std::to_string(cfg.hold))
        throw ConfigError("run: config system does not match the abstraction's");
    const int step_cap = cfg.horizon * cfg.hold;

    std::size_t n_success = 0, n_violation = 0, n_cap = 0, n_lost = 0;
    std::vector<std::vector<std::string>> rows;
    rows.reserve(cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        RecordRng rng(cfg.seed, t);
        const StateVec x0 = sys.domain.sample(rng);
        const RunReport rep = refine_and_run(sys, a, c, x0, cfg.hold, step_cap);
        switch (rep.outcome) {
            case RunOutcome::success: ++n_success; break;
            case RunOutcome::violation: ++n_violation; break;
            case RunOutcome::cap: ++n_cap; break;
            case RunOutcome::lost_start: ++n_lost; break;
        }
        rows.push_back(run_row(t, rep, x0, a));
    }
    std::vector<std::string> header{"trial", "outcome", "macro_steps", "concrete_steps"};
    for (int d = 0; d < sys.dyn->dim(); ++d) header.push_back("x0_" + std::to_string(d));
    header.push_back("final_output");
    const std::string path = out_path(cfg, "runs.csv");
    save_csv("salca.runs.v1", header, rows, path);
    std::printf("runs  %s  trials=%zu success=%zu violation=%zu cap=%zu lost_start=%zu\n",
                path.c_str(), cfg.trials, n_success, n_violation, n_cap, n_lost);
    return path;
}

std::string cmd_param_study(const PipelineConfig& cfg) {
    if (cfg.n_list.empty() || cfg.ell_list.empty())
        throw ConfigError("param-study: config needs n_list and ell_list");
    std::size_t n_max = 0;
    for (std::size_t n : cfg.n_list) n_max = std::max(n_max, n);
    const ControlSystem sys = sampled_system(cfg);
    SampleConfig sc;
    sc.seed = cfg.seed;
    sc.count = n_max;
    sc.horizon = cfg.horizon;
    sc.workers = cfg.workers;
    const Dataset d = sample_dataset(sys, sc);

    std::vector<std::vector<std::string>> rows;
    for (int ell : cfg.ell_list) {
        if (ell < 0 || ell >= cfg.horizon) throw ConfigError("param-study: need 0 <= ell < horizon");
        for (std::size_t n : cfg.n_list) {
            // same-seed datasets are prefixes of each other, so slicing the
            // largest one reproduces each smaller run exactly
            WindowSet w = collect_windows_stream(
                n, [&](std::size_t i) { return d.behavior(i); }, ell, cfg.horizon, d.input_labels,
                d.output_labels);
            const PacCertificate cert =
                certify(w, n, cfg.beta, static_cast<std::uint64_t>(d.input_labels.size()), cfg.horizon);
            const Salca a = build_salca(std::move(w));
            rows.push_back({cfg.system, std::to_string(ell), std::to_string(n),
                            std::to_string(a.windows.size()), std::to_string(a.num_states()),
                            std::to_string(a.num_transitions()), std::to_string(cert.s_star),
                            format_double(cert.eps), format_double(cert.eps_bar)});
            std::printf("param-study  ell=%d n=%zu windows=%zu transitions=%zu eps_bar=%s\n", ell, n,
                        a.windows.size(), a.num_transitions(), format_double(cert.eps_bar).c_str());
        }
    }
    const std::string path = out_path(cfg, "param_study.csv");
    save_csv("salca.param_study.v1",
             {"system", "ell", "n", "windows", "states", "transitions", "s_star", "eps", "eps_bar"},
             rows, path);
    return path;
}

namespace {

std::string bench_linear(PipelineConfig cfg) {
    cfg.system = "linear";
    cfg.hold = 1;
    if (cfg.n == 0) cfg.n = 2000000;
    cfg.horizon = 4;
    cfg.ell = 2;
    cfg.beta = 1e-6;
    cfg.constants = linear_benchmark_constants();
    const std::string dataset = cmd_sample(cfg);
    const std::string windows = cmd_build(cfg, dataset);
    const std::string certificate = cmd_certify(cfg, dataset, windows);
    cmd_extend(cfg, certificate, "nu", 1);
    cmd_extend(cfg, certificate, "contracting", 0);
    return certificate;
}

std::string bench_mountaincar(PipelineConfig cfg) {
    cfg.system = "mountain_car";
    cfg.hold = 50;
    if (cfg.n == 0) cfg.n = 1000000;
    cfg.horizon = 5;
    cfg.ell = 2;
    cfg.beta = 1e-3;
    cfg.goal = {"G"};
    cfg.avoid = {};
    if (cfg.trials == 0) cfg.trials = 10000;
    const std::string dataset = cmd_sample(cfg);
    const std::string windows = cmd_build(cfg, dataset);
    const std::string certificate = cmd_certify(cfg, dataset, windows);
    const std::string controller = cmd_synthesize(cfg, windows, certificate);
    return cmd_run(cfg, windows, controller);
}

std::string bench_rl_compare(PipelineConfig cfg) {
    cfg.system = "mountain_car";
    const ControlSystem mc = make_mountain_car();
    QLearnConfig qc;
    std::printf("training  episodes=%lld\n", static_cast<long long>(qc.episodes));
    const QTable q = train(mc, qc, cfg.seed);
    save_qtable(q, out_path(cfg, "qtable.txt"));

    std::size_t windows = 0;
    const PacCertificate cert =
        verify_closed_loop(mc, q, mc.labeler, 950000, 100, 250, 1e-3, cfg.seed + 1, &windows);
    CertificateDoc cdoc;
    cdoc.system = "mountain_car_cl";
    cdoc.cert = cert;
    save_certificate(cdoc, out_path(cfg, "certificate_closed_loop.json"));
    std::printf("closed-loop certificate  windows=%zu s_star=%d eps_bar=%s (= eps, single input)\n",
                windows, cert.s_star, format_double(cert.eps_bar).c_str());

    // abstraction-based controller for the comparison
    PipelineConfig mcfg = cfg;
    mcfg.out = cfg.out + "/abstract";
    mcfg.hold = 50;
    if (mcfg.n == 0) mcfg.n = 1000000;
    mcfg.horizon = 5;
    mcfg.ell = 2;
    mcfg.beta = 1e-3;
    mcfg.goal = {"G"};
    const std::string dataset = cmd_sample(mcfg);
    const std::string windows_path = cmd_build(mcfg, dataset);
    const std::string certificate = cmd_certify(mcfg, dataset, windows_path);
    const std::string controller = cmd_synthesize(mcfg, windows_path, certificate);

    WindowsDoc wdoc = load_windows(windows_path);
    const Salca a = build_salca(std::move(wdoc.w));
    const AbstractController actrl = attach_controller(load_controller_doc(controller), a);
    const StepsRunner abs_runner = [&](const StateVec& x0) {
        const RunReport rep = refine_and_run(mc, a, actrl, x0, 50, 250);
        return rep.outcome == RunOutcome::success ? rep.concrete_steps : -1;
    };
    const StepsRunner q_runner = make_q_runner(mc, q, 250);
    const std::size_t trials = cfg.trials ? cfg.trials : 10000;
    const CompareResult res = compare_controllers(q.grid, abs_runner, q_runner, trials, cfg.seed + 2);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(res.rows.size());
    for (const CompareRow& r : res.rows)
        rows.push_back({std::to_string(r.trial), std::to_string(r.steps_a), std::to_string(r.steps_b),
                        r.steps_a >= 0 && r.steps_b >= 0 ? std::to_string(r.steps_a - r.steps_b) : ""});
    const std::string path = out_path(cfg, "compare.csv");
    save_csv("salca.compare.v1", {"trial", "steps_abstract", "steps_rl", "diff"}, rows, path);
    std::printf("compare  %s  abstract=%zu/%zu rl=%zu/%zu mean_diff=%s\n", path.c_str(),
                res.a_success, trials, res.b_success, trials, format_double(res.mean_diff).c_str());
    return path;
}

}  // namespace

std::string cmd_bench(const PipelineConfig& cfg, const std::string& name) {
    if (name == "linear") return bench_linear(cfg);
    if (name == "mountaincar") return bench_mountaincar(cfg);
    if (name == "rl-compare") return bench_rl_compare(cfg);
    throw ConfigError("bench: name must be linear, mountaincar, or rl-compare");
}

}  // namespace salca
