#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "salca/abstraction.hpp"
#include "salca/io.hpp"
#include "salca/sampler.hpp"
#include "salca/systems.hpp"
#include "salca/transition_system.hpp"

using namespace salca;

namespace {

FiniteTS example1() {
    Alphabet ins{{"ua", "ub"}};
    Alphabet outs{{"y1", "y2"}};
    FiniteTS ts = FiniteTS::make(ins, outs, {0, 1, 1, 1}, {0});
    ts.add_transition(0, 0, 1);
    ts.add_transition(0, 1, 2);
    ts.add_transition(1, 0, 1);
    ts.add_transition(1, 1, 3);
    ts.add_transition(2, 1, 2);
    ts.add_transition(2, 0, 0);
    ts.add_transition(3, 1, 3);
    ts.add_transition(3, 0, 1);
    return ts;
}

// every behavior of ts from every initial state under every length-H word
std::vector<ExternalBehavior> all_behaviors(const FiniteTS& ts, int H) {
    std::vector<ExternalBehavior> out;
    const int ni = ts.inputs.size();
    std::vector<Symbol> word(static_cast<std::size_t>(H));
    const auto words = static_cast<long long>(std::pow(ni, H) + 0.5);
    for (long long w = 0; w < words; ++w) {
        long long v = w;
        for (int i = 0; i < H; ++i) {
            word[static_cast<std::size_t>(i)] = static_cast<Symbol>(v % ni);
            v /= ni;
        }
        for (int x0 : ts.initial)
            for (auto& g : ts_behaviors(ts, x0, word)) out.push_back(std::move(g));
    }
    return out;
}

// display-form edge list, sorted, for comparing graphs against the figure
std::vector<std::string> edge_list(const Salca& a) {
    std::vector<std::string> edges;
    for (std::uint32_t s = 0; s < a.num_states(); ++s)
        for (Symbol u = 0; u < a.input_labels.size(); ++u)
            for (std::uint32_t t : a.successors(s, u))
                edges.push_back(a.states[s].display(a.output_labels, a.input_labels) + " -" +
                                a.input_labels.name(u) + "-> " +
                                a.states[t].display(a.output_labels, a.input_labels));
    std::sort(edges.begin(), edges.end());
    return edges;
}

std::string state_name(const Salca& a, std::uint32_t s) {
    return a.states[s].display(a.output_labels, a.input_labels);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExternalBehavior beh(std::vector<Symbol> outs, std::vector<Symbol> ins) {
    return ExternalBehavior{std::move(outs), std::move(ins)};
}

}  // namespace

TEST_CASE("window collection over one record is the dedup of its windows") {
    // distinct outputs y0..y4: every position contributes a fresh window
    Alphabet ins{{"u"}};
    Alphabet outs{{"a", "b", "c", "d", "e"}};
    const ExternalBehavior g{{0, 1, 2, 3, 4}, {0, 0, 0, 0}};
    const WindowSet w = collect_windows_stream(1, [&](std::size_t) { return g; }, 1, 4, ins, outs);
    CHECK(w.m == 2);
    CHECK(w.size() == 5);
    CHECK(w.record_count() == 1);
    CHECK(w.record_members(0).size() == 5);
    for (int k = 0; k <= 4; ++k) CHECK(w.contains(window_at(g, 2, k)));

    const Salca a = build_salca(w);
    CHECK(a.num_states() == 5);        // chain of order-1 windows
    CHECK(a.num_transitions() == 4);   // |windows| minus the fully padded member
    CHECK(a.initial.size() == 1);
    CHECK(state_name(a, a.initial[0]) == "# # a");
}

TEST_CASE("the exact order-zero abstraction of the running example") {
    const Salca a = exact_salca(example1(), 0, 4);
    REQUIRE(a.num_states() == 2);
    CHECK(a.windows.size() == 6);
    CHECK(a.num_transitions() == 5);
    CHECK(a.initial.size() == 1);
    CHECK(state_name(a, a.initial[0]) == "y1");
    const std::vector<std::string> want{
        "y1 -ua-> y2", "y1 -ub-> y2", "y2 -ua-> y1", "y2 -ua-> y2", "y2 -ub-> y2",
    };
    CHECK(edge_list(a) == want);
}

TEST_CASE("the exact order-one abstraction of the running example") {
    const Salca a = exact_salca(example1(), 1, 4);
    REQUIRE(a.num_states() == 6);
    CHECK(a.windows.size() == 14);
    CHECK(a.num_transitions() == 13);
    REQUIRE(a.initial.size() == 1);
    CHECK(state_name(a, a.initial[0]) == "# # y1");
    const std::vector<std::string> want{
        "# # y1 -ua-> y1 ua y2",
        "# # y1 -ub-> y1 ub y2",
        "y1 ua y2 -ua-> y2 ua y2",
        "y1 ua y2 -ub-> y2 ub y2",
        "y1 ub y2 -ua-> y2 ua y1",
        "y1 ub y2 -ub-> y2 ub y2",
        "y2 ua y1 -ua-> y1 ua y2",
        "y2 ua y1 -ub-> y1 ub y2",
        "y2 ua y2 -ua-> y2 ua y2",
        "y2 ua y2 -ub-> y2 ub y2",
        "y2 ub y2 -ua-> y2 ua y1",
        "y2 ub y2 -ua-> y2 ua y2",
        "y2 ub y2 -ub-> y2 ub y2",
    };
    CHECK(edge_list(a) == want);
}

TEST_CASE("the exact construction matches the frozen reference documents") {
    const FiniteTS ts = example1();
    const auto tmp = std::filesystem::temp_directory_path() / "salca_golden_check";
    std::filesystem::create_directories(tmp);
    for (int ell : {0, 1}) {
        const Salca a = exact_salca(ts, ell, 4);
        const std::string fresh = (tmp / ("e" + std::to_string(ell) + ".txt")).string();
        save_windows(a.windows, "example1", "-", fresh);
        const std::string golden = std::string(SALCA_GOLDEN_DIR) + "/example1_ell" +
                                   std::to_string(ell) + "_h4.windows.txt";
        CHECK(slurp(fresh) == slurp(golden));
    }
    std::filesystem::remove_all(tmp);
}

TEST_CASE("collecting every behavior reproduces the exact abstraction") {
    const FiniteTS ts = example1();
    for (int ell : {0, 1, 2}) {
        const auto behaviors = all_behaviors(ts, 4);
        const WindowSet data = collect_windows_stream(
            behaviors.size(), [&](std::size_t i) { return behaviors[i]; }, ell, 4, ts.inputs,
            ts.outputs);
        const Salca exact = exact_salca(ts, ell, 4);
        CHECK(data.members == exact.windows.members);
    }
}

TEST_CASE("membership of a behavior is path existence") {
    const Salca a0 = exact_salca(example1(), 0, 4);
    const Salca a1 = exact_salca(example1(), 1, 4);
    const Salca a2 = exact_salca(example1(), 2, 4);

    // a genuine trajectory is contained at every order
    const ExternalBehavior real = beh({0, 1, 1, 1}, {0, 1, 0});  // y1 ua y2 ub y2 ua y2
    CHECK(contains_behavior(a0, real));
    CHECK(contains_behavior(a1, real));
    CHECK(contains_behavior(a2, real));

    // y1 ua y2 ua y1 is spurious; one unit of memory removes it
    const ExternalBehavior sp1 = beh({0, 1, 0}, {0, 0});
    CHECK(contains_behavior(a0, sp1));
    CHECK_FALSE(contains_behavior(a1, sp1));

    // y1 ua y2 ub y2 ua y1 survives order one and dies at order two
    const ExternalBehavior sp2 = beh({0, 1, 1, 0}, {0, 1, 0});
    CHECK(contains_behavior(a1, sp2));
    CHECK_FALSE(contains_behavior(a2, sp2));

    // horizon shorter than the order is rejected
    const ExternalBehavior tiny = beh({0, 1}, {0});
    CHECK_THROWS_AS((void)contains_behavior(a2, tiny), std::invalid_argument);
}

TEST_CASE("trackers follow members and stick on violations") {
    const Salca a = exact_salca(example1(), 1, 4);

    AbstractTracker t = tracker_init(a, 0);  // y1
    CHECK_FALSE(t.violated);
    CHECK(t.window == LSequence::padded_initial(1, 0));
    tracker_step(t, 0, 1);  // ua -> y2
    CHECK_FALSE(t.violated);
    CHECK(a.state_id(t.window) != kNoId);
    tracker_step(t, 0, 0);  // ua -> y1: the spurious continuation
    CHECK(t.violated);
    tracker_step(t, 1, 1);  // violations never clear
    CHECK(t.violated);

    AbstractTracker bad = tracker_init(a, 1);  // y2 is not an initial output
    CHECK(bad.violated);
}

TEST_CASE("transitions grow with data and with memory") {
    SampleConfig sc;
    sc.seed = 21;
    sc.count = 4000;
    sc.horizon = 4;
    sc.workers = 2;
    const Dataset d = sample_dataset(zero_order_hold(make_mountain_car(), 25), sc);

    std::size_t prev_n = 0;
    for (std::size_t n : {500u, 2000u, 4000u}) {
        const WindowSet w = collect_windows_stream(
            n, [&](std::size_t i) { return d.behavior(i); }, 2, 4, d.input_labels, d.output_labels);
        const Salca a = build_salca(w);
        CHECK(a.num_transitions() >= prev_n);
        prev_n = a.num_transitions();
    }

    std::size_t prev_ell = 0;
    for (int ell : {0, 1, 2, 3}) {
        const Salca a = build_salca(collect_windows(d, ell));
        CHECK(a.num_transitions() >= prev_ell);
        prev_ell = a.num_transitions();
        // every sampled record stays a behavior of its own abstraction
        for (std::size_t i = 0; i < 50; ++i) CHECK(contains_behavior(a, d.behavior(i)));
    }
}

TEST_CASE("provenance lists every contributing record") {
    SampleConfig sc;
    sc.seed = 4;
    sc.count = 200;
    sc.horizon = 3;
    sc.workers = 1;
    const Dataset d = sample_dataset(make_linear_benchmark(), sc);
    const WindowSet w = collect_windows(d, 1);
    REQUIRE(w.record_count() == 200);

    // forward index: window ids of record i == dedup of its split windows
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::set<std::uint32_t> want;
        for (const LSequence& z : split_windows(d.behavior(i), w.m)) {
            const std::uint32_t id = w.id_of(z);
            REQUIRE(id != kNoId);
            want.insert(id);
        }
        const auto got = w.record_members(i);
        REQUIRE(got.size() == want.size());
        CHECK(std::equal(got.begin(), got.end(), want.begin()));
    }

    // inverse index covers every member
    const auto inv = w.contributors();
    REQUIRE(inv.size() == w.size());
    for (std::uint32_t id = 0; id < w.size(); ++id) {
        REQUIRE_FALSE(inv[id].empty());
        for (std::uint32_t rec : inv[id]) {
            const auto mem = w.record_members(rec);
            CHECK(std::binary_search(mem.begin(), mem.end(), id));
        }
    }
}

TEST_CASE("saturated construction equals a long-horizon one") {
    const FiniteTS ts = example1();
    for (int ell : {0, 1, 2}) {
        const Salca sat = exact_salca_saturated(ts, ell);
        const Salca deep = exact_salca(ts, ell, 12);
        CHECK(sat.windows.members == deep.windows.members);
        CHECK(sat.num_states() == deep.num_states());
        CHECK(sat.num_transitions() == deep.num_transitions());
    }
}

TEST_CASE("reachable window pairs agree with the abstraction states") {
    const FiniteTS ts = example1();
    const auto pairs = reachable_window_pairs(ts, 1, -1);
    const Salca a = exact_salca_saturated(ts, 1);

    // every pair's window is a state whose output matches the TS state
    for (const auto& [x, win] : pairs) {
        const std::uint32_t s = a.state_id(win);
        REQUIRE(s != kNoId);
        CHECK(a.state_output[s] == ts.output_of[static_cast<std::size_t>(x)]);
    }
    // every state appears in some pair
    std::set<LSequence> seen;
    for (const auto& [x, win] : pairs) seen.insert(win);
    CHECK(seen.size() == a.num_states());

    // depth zero: exactly the initial states under fully padded windows
    const auto zero = reachable_window_pairs(ts, 1, 0);
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].first == 0);
    CHECK(zero[0].second == LSequence::padded_initial(1, 0));
}

TEST_CASE("to_finite_ts preserves the graph") {
    const Salca a = exact_salca(example1(), 1, 4);
    const FiniteTS ts = a.to_finite_ts();
    CHECK(ts.num_states() == static_cast<int>(a.num_states()));
    CHECK(ts.num_transitions() == a.num_transitions());
    CHECK(ts.initial.size() == a.initial.size());
    CHECK(ts.nonblocking());
    for (std::uint32_t s = 0; s < a.num_states(); ++s) {
        CHECK(ts.output_of[s] == a.state_output[s]);
        for (Symbol u = 0; u < a.input_labels.size(); ++u) {
            const auto want = a.successors(s, u);
            const auto& got = ts.successors(static_cast<int>(s), u);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK(got[i] == static_cast<int>(want[i]));
        }
    }
}

TEST_CASE("collect_windows validates its arguments") {
    SampleConfig sc;
    sc.seed = 1;
    sc.count = 10;
    sc.horizon = 2;
    const Dataset d = sample_dataset(make_linear_benchmark(), sc);
    CHECK_THROWS_AS((void)collect_windows(d, 2), std::invalid_argument);   // needs ell < horizon
    CHECK_THROWS_AS((void)collect_windows(d, -1), std::invalid_argument);
    CHECK_NOTHROW((void)collect_windows(d, 1));
}
