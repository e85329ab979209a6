#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "salca/abstraction.hpp"
#include "salca/commands.hpp"
#include "salca/io.hpp"

using namespace salca;
namespace fs = std::filesystem;

namespace {

struct TmpDir {
    fs::path path;
    TmpDir() {
        std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("salca_cli_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~TmpDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

#ifdef SALCA_BIN_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(SALCA_BIN_PATH) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    return WEXITSTATUS(raw);
}
#endif

}  // namespace

TEST_CASE("config files parse with defaults and validation") {
    TmpDir tmp;
    const std::string path = tmp.file("cfg.json");

    SUBCASE("full round-trip") {
        spit(path, R"({
            "system": "mountain_car", "hold": 50, "n": 1000, "horizon": 5,
            "ell": 2, "beta": 0.001, "seed": 42, "workers": 3,
            "out": "results", "goal": ["G"], "avoid": ["R1"], "trials": 7,
            "n_list": [10, 20], "ell_list": [0, 1],
            "lipschitz": {"m_x": 1.7, "l_x": 0.5, "l_u": 1.0, "n": 2,
                          "u_sup": 0.3, "psi": 4.0, "r": 1.0}
        })");
        const PipelineConfig cfg = load_config(path);
        CHECK(cfg.system == "mountain_car");
        CHECK(cfg.hold == 50);
        CHECK(cfg.n == 1000);
        CHECK(cfg.horizon == 5);
        CHECK(cfg.ell == 2);
        CHECK(cfg.beta == 0.001);
        CHECK(cfg.seed == 42);
        CHECK(cfg.workers == 3);
        CHECK(cfg.out == "results");
        REQUIRE(cfg.goal.size() == 1);
        CHECK(cfg.goal[0] == "G");
        REQUIRE(cfg.avoid.size() == 1);
        CHECK(cfg.avoid[0] == "R1");
        CHECK(cfg.trials == 7);
        CHECK(cfg.n_list == std::vector<std::size_t>{10, 20});
        CHECK(cfg.ell_list == std::vector<int>{0, 1});
        REQUIRE(cfg.constants.has_value());
        CHECK(cfg.constants->lip.m_x == 1.7);
        CHECK(cfg.constants->lip.l_x == 0.5);
        CHECK(cfg.constants->lip.c == 1.0);  // defaulted
        CHECK(cfg.constants->lip.q == 1.0);
        CHECK(cfg.constants->lip.n == 2);
        CHECK(cfg.constants->u_sup == 0.3);
        CHECK(cfg.constants->psi == 4.0);
        CHECK(cfg.constants->r == 1.0);
    }

    SUBCASE("defaults fill missing keys") {
        spit(path, R"({"system": "linear"})");
        const PipelineConfig cfg = load_config(path);
        CHECK(cfg.hold == 1);
        CHECK(cfg.horizon == 1);
        CHECK(cfg.ell == 0);
        CHECK(cfg.beta == 1e-3);
        CHECK(cfg.out == "out");
        CHECK_FALSE(cfg.constants.has_value());
    }

    SUBCASE("rejections") {
        spit(path, R"({"system": "pendulum"})");
        CHECK_THROWS_AS(load_config(path), ConfigError);
        spit(path, R"({"ell": 3, "horizon": 3})");
        CHECK_THROWS_AS(load_config(path), ConfigError);  // needs ell < horizon
        spit(path, R"({"beta": 1.5})");
        CHECK_THROWS_AS(load_config(path), ConfigError);
        spit(path, R"({"beta": 0})");
        CHECK_THROWS_AS(load_config(path), ConfigError);
        spit(path, R"({"hold": 0})");
        CHECK_THROWS_AS(load_config(path), ConfigError);
        spit(path, R"({"horizon": 0})");
        CHECK_THROWS_AS(load_config(path), ConfigError);
        spit(path, "{ not json");
        CHECK_THROWS_AS(load_config(path), ConfigError);
        CHECK_THROWS_AS(load_config(tmp.file("missing.json")), ConfigError);
        spit(path, R"({"lipschitz": {"m_x": 1.0}})");
        CHECK_THROWS_AS(load_config(path), ConfigError);  // l_x, l_u, n required
    }
}

TEST_CASE("environment variables override everything") {
    PipelineConfig cfg;
    cfg.seed = 7;
    cfg.out = "from_config";

    setenv("SALCA_SEED", "99", 1);
    setenv("SALCA_OUT", "from_env", 1);
    apply_env_overrides(cfg);
    CHECK(cfg.seed == 99);
    CHECK(cfg.out == "from_env");

    setenv("SALCA_SEED", "horse", 1);
    CHECK_THROWS_AS(apply_env_overrides(cfg), ConfigError);
    setenv("SALCA_SEED", "99", 1);
    setenv("SALCA_OUT", "", 1);
    CHECK_THROWS_AS(apply_env_overrides(cfg), ConfigError);

    unsetenv("SALCA_SEED");
    unsetenv("SALCA_OUT");
    cfg.seed = 7;
    cfg.out = "from_config";
    apply_env_overrides(cfg);
    CHECK(cfg.seed == 7);
    CHECK(cfg.out == "from_config");
}

#ifdef SALCA_GOLDEN_DIR
TEST_CASE("golden window files rebuild the reference graphs") {
    const WindowsDoc d0 = load_windows(std::string(SALCA_GOLDEN_DIR) + "/example1_ell0_h4.windows.txt");
    CHECK(d0.system == "example1");
    const Salca a0 = build_salca(d0.w);
    CHECK(a0.num_states() == 2);
    CHECK(a0.num_transitions() == 5);

    const WindowsDoc d1 = load_windows(std::string(SALCA_GOLDEN_DIR) + "/example1_ell1_h4.windows.txt");
    const Salca a1 = build_salca(d1.w);
    CHECK(a1.num_states() == 6);
    CHECK(a1.num_transitions() == 13);
}
#endif

#ifdef SALCA_BIN_PATH
TEST_CASE("the binary walks the whole pipeline and enforces provenance") {
    TmpDir tmp;
    const std::string out = tmp.file("out");
    const std::string cfg_path = tmp.file("cfg.json");
    spit(cfg_path, std::string(R"({
        "system": "linear", "n": 300, "horizon": 3, "ell": 1,
        "beta": 0.01, "seed": 11, "goal": ["c11"], "trials": 20,
        "out": ")") + out + R"(",
        "lipschitz": {"m_x": 0.512, "l_x": 0.512, "l_u": 1.0, "n": 2,
                      "u_sup": 0.3, "psi": 4.243, "r": 1.0}
    })");

    const std::string dataset = out + "/dataset.txt";
    const std::string windows = out + "/windows.txt";
    const std::string cert = out + "/certificate.json";
    const std::string ctrl = out + "/controller.txt";

    REQUIRE(run_cli("sample --config " + cfg_path) == 0);
    REQUIRE(fs::exists(dataset));
    REQUIRE(run_cli("build --config " + cfg_path + " --dataset " + dataset) == 0);
    REQUIRE(fs::exists(windows));
    REQUIRE(run_cli("certify --config " + cfg_path + " --dataset " + dataset +
                    " --windows " + windows) == 0);
    REQUIRE(fs::exists(cert));
    CHECK(run_cli("extend --config " + cfg_path + " --certificate " + cert + " --mode nu --t 1") == 0);
    CHECK(fs::exists(out + "/certificate_nu.json"));
    CHECK(run_cli("extend --config " + cfg_path + " --certificate " + cert +
                  " --mode contracting") == 0);
    CHECK(fs::exists(out + "/certificate_contracting.json"));
    REQUIRE(run_cli("synthesize --config " + cfg_path + " --windows " + windows +
                    " --certificate " + cert) == 0);
    REQUIRE(fs::exists(ctrl));
    REQUIRE(run_cli("run --config " + cfg_path + " --windows " + windows +
                    " --controller " + ctrl) == 0);

    const std::string runs = slurp(out + "/runs.csv");
    CHECK(runs.rfind("# salca.runs.v1\n", 0) == 0);
    CHECK(runs.find("trial,outcome,macro_steps,concrete_steps,") != std::string::npos);
    // 20 trials -> 20 data rows after the two header lines
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 22);

    SUBCASE("rebuilding produces identical bytes") {
        const std::string first = slurp(windows);
        REQUIRE(run_cli("build --config " + cfg_path + " --dataset " + dataset) == 0);
        CHECK(slurp(windows) == first);
    }

    SUBCASE("a tampered dataset is refused at certification") {
        std::string text = slurp(dataset);
        const auto pos = text.find("0x1.");  // first hexfloat mantissa digit
        REQUIRE(pos != std::string::npos);
        text[pos + 4] = text[pos + 4] == '9' ? '8' : '9';
        spit(dataset, text);
        CHECK(run_cli("certify --config " + cfg_path + " --dataset " + dataset +
                      " --windows " + windows) == 3);
    }

    SUBCASE("a foreign windows file is refused at synthesis") {
        std::string text = slurp(windows);
        text += "\n";
        spit(windows, text);
        CHECK(run_cli("synthesize --config " + cfg_path + " --windows " + windows +
                      " --certificate " + cert) == 3);
    }
}

TEST_CASE("the binary reports usage errors with exit 2") {
    TmpDir tmp;
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("sample --help") == 0);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("") == 2);  // a subcommand is required
    CHECK(run_cli("build --config /nonexistent.json --dataset x") == 2);
    const std::string bad = tmp.file("bad.json");
    spit(bad, R"({"system": "linear", "n": 0})");
    CHECK(run_cli("sample --config " + bad) == 2);  // nothing to sample
    CHECK(run_cli("extend --config " + bad + " --certificate nope.json --mode nu") == 2);
}

TEST_CASE("the param study emits its schema and monotone transitions") {
    TmpDir tmp;
    const std::string out = tmp.file("study");
    const std::string cfg_path = tmp.file("cfg.json");
    spit(cfg_path, std::string(R"({
        "system": "linear", "horizon": 3, "beta": 0.01, "seed": 5,
        "n_list": [200, 400], "ell_list": [0, 1], "out": ")") + out + R"("})");
    REQUIRE(run_cli("param-study --config " + cfg_path) == 0);
    const std::string csv = slurp(out + "/param_study.csv");
    CHECK(csv.rfind("# salca.param_study.v1\n", 0) == 0);
    CHECK(csv.find("system,ell,n,windows,states,transitions,s_star,eps,eps_bar") !=
          std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header x2 + 4 rows
}
#endif
