#include "salca/io.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace salca {
namespace {

using nlohmann::json;

constexpr const char* kDatasetSchema = "#%salca.dataset.v1";
constexpr const char* kWindowsSchema = "#%salca.windows.v1";
constexpr const char* kControllerSchema = "#%salca.controller.v1";
constexpr const char* kCertificateSchema = "salca.certificate.v1";

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw ConfigError("cannot create directory " + p.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

std::string hash_string(const void* data, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, fnv1a64(data, n));
    return buf;
}

// pops the next line (without trailing newline) from a string_view cursor
bool next_line(std::string_view& rest, std::string_view& line) {
    if (rest.empty()) return false;
    const auto nl = rest.find('\n');
    if (nl == std::string_view::npos) {
        line = rest;
        rest = {};
    } else {
        line = rest.substr(0, nl);
        rest.remove_prefix(nl + 1);
    }
    return true;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

long long parse_int(std::string_view tok, const char* what) {
    long long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ConfigError(std::string("bad integer for ") + what);
    return v;
}

double parse_hexfloat(std::string_view tok) {
    const std::string s(tok);  // strtod needs a terminator
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw ConfigError("bad float literal: " + s);
    return v;
}

std::string expect_keyword_line(std::string_view& rest, const std::string& key) {
    std::string_view line;
    if (!next_line(rest, line)) throw ConfigError("unexpected end of file, wanted '" + key + "'");
    if (line.substr(0, key.size()) != key || (line.size() > key.size() && line[key.size()] != ' '))
        throw ConfigError("expected '" + key + "' line, got '" + std::string(line) + "'");
    return std::string(line.size() > key.size() ? line.substr(key.size() + 1) : std::string_view{});
}

Alphabet parse_alphabet(const std::string& payload) {
    std::vector<std::string> labels;
    for (auto tok : split_ws(payload)) labels.emplace_back(tok);
    return Alphabet(std::move(labels));
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

void render_window(std::string& out, const LSequence& w) {  // interleaved y u y ... y
    char buf[16];
    const int m = w.ell();
    for (int i = 0; i <= m; ++i) {
        if (i) {
            std::snprintf(buf, sizeof buf, " %d ", static_cast<int>(w.in(i - 1)));
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "%d", static_cast<int>(w.out(i)));
        out += buf;
    }
}

LSequence parse_window(const std::vector<std::string_view>& toks, std::size_t from, const char* what) {
    const std::size_t n = toks.size() - from;
    if (n % 2 != 1) throw ConfigError(std::string(what) + ": window needs an odd symbol count");
    std::vector<Symbol> outs, ins;
    for (std::size_t i = from; i < toks.size(); ++i) {
        const auto v = static_cast<Symbol>(parse_int(toks[i], what));
        if ((i - from) % 2 == 0)
            outs.push_back(v);
        else
            ins.push_back(v);
    }
    return {outs, ins};
}

json cert_to_json(const CertificateDoc& doc) {
    json j;
    j["schema"] = kCertificateSchema;
    j["system"] = doc.system;
    j["n"] = doc.cert.n;
    j["beta"] = doc.cert.beta;
    j["ell"] = doc.cert.ell;
    j["horizon"] = doc.cert.horizon;
    j["u_card"] = doc.cert.u_card;
    j["s_star"] = doc.cert.s_star;
    j["eps"] = doc.cert.eps;
    j["eps_bar"] = doc.cert.eps_bar;
    j["solver"] = {{"rel_tol", doc.solver_rel_tol}};
    j["provenance"] = {{"dataset", doc.dataset_hash}, {"abstraction", doc.abstraction_hash}};
    if (doc.extension) {
        const ExtensionNote& e = *doc.extension;
        json je;
        je["method"] = e.method;
        je["extended_horizon"] = e.extended_horizon;
        if (e.method == "nu") {
            je["extra"] = e.extra;
            je["lambda"] = e.lambda;
            je["nu"] = e.nu;
            je["eps_bar_extended"] = e.eps_bar_extended;
        } else {
            je["k_bar"] = e.k_bar;
            je["rho"] = e.rho;
            je["resample_needed"] = e.resample_needed;
        }
        j["extension"] = je;
    }
    return j;
}

}  // namespace

std::string file_hash(const std::string& path) {
    const std::string blob = read_file(path);
    return hash_string(blob.data(), blob.size());
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void save_dataset(const Dataset& d, const std::string& path) {
    std::string records;
    records.reserve(d.size() * 72);
    char buf[64];
    const auto dim = static_cast<std::size_t>(d.state_dim);
    const auto h = static_cast<std::size_t>(d.horizon);
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu", i);
        records += buf;
        for (std::size_t k = 0; k < dim; ++k) {
            std::snprintf(buf, sizeof buf, " %a", d.x0[i * dim + k]);
            records += buf;
        }
        records += " |";
        for (std::size_t k = 0; k < h; ++k) {
            std::snprintf(buf, sizeof buf, " %d", static_cast<int>(d.ins[i * h + k]));
            records += buf;
        }
        records += " |";
        for (std::size_t k = 0; k <= h; ++k) {
            std::snprintf(buf, sizeof buf, " %d", static_cast<int>(d.outs[i * (h + 1) + k]));
            records += buf;
        }
        records.push_back('\n');
    }

    json meta;
    meta["system"] = d.system;
    meta["seed"] = d.seed;
    meta["count"] = d.size();
    meta["horizon"] = d.horizon;
    meta["state_dim"] = d.state_dim;
    meta["input_labels"] = d.input_labels.labels;
    meta["input_values"] = d.input_values;
    meta["output_labels"] = d.output_labels.labels;
    meta["records_hash"] = hash_string(records.data(), records.size());

    std::string out = kDatasetSchema;
    out.push_back('\n');
    out += meta.dump();
    out.push_back('\n');
    out += records;
    write_file(path, out);
}

Dataset load_dataset(const std::string& path) {
    const std::string blob = read_file(path);
    std::string_view rest(blob);
    std::string_view line;
    if (!next_line(rest, line) || line != kDatasetSchema)
        throw ConfigError("not a dataset file: " + path);
    if (!next_line(rest, line)) throw ConfigError("dataset missing metadata: " + path);
    json meta;
    try {
        meta = json::parse(line);
    } catch (const json::exception& e) {
        throw ConfigError("dataset metadata unreadable: " + std::string(e.what()));
    }

    Dataset d;
    try {
        d.system = meta.at("system").get<std::string>();
        d.seed = meta.at("seed").get<std::uint64_t>();
        d.horizon = meta.at("horizon").get<int>();
        d.state_dim = meta.at("state_dim").get<int>();
        d.input_labels = Alphabet(meta.at("input_labels").get<std::vector<std::string>>());
        d.input_values = meta.at("input_values").get<std::vector<std::vector<double>>>();
        d.output_labels = Alphabet(meta.at("output_labels").get<std::vector<std::string>>());
    } catch (const json::exception& e) {
        throw ConfigError("dataset metadata field: " + std::string(e.what()));
    }
    const auto count = meta.at("count").get<std::size_t>();
    const auto recorded = meta.at("records_hash").get<std::string>();
    if (hash_string(rest.data(), rest.size()) != recorded)
        throw ProvenanceError("dataset records do not match their recorded hash: " + path);

    if (d.horizon < 1 || d.state_dim < 1) throw ConfigError("dataset metadata out of range");
    const auto dim = static_cast<std::size_t>(d.state_dim);
    const auto h = static_cast<std::size_t>(d.horizon);
    d.x0.reserve(count * dim);
    d.ins.reserve(count * h);
    d.outs.reserve(count * (h + 1));
    for (std::size_t i = 0; i < count; ++i) {
        if (!next_line(rest, line)) throw ConfigError("dataset truncated: " + path);
        const auto toks = split_ws(line);
        if (toks.size() != 1 + dim + 1 + h + 1 + (h + 1))  // id, x0, |, ins, |, outs
            throw ConfigError("dataset record has wrong field count");
        std::size_t t = 0;
        if (static_cast<std::size_t>(parse_int(toks[t++], "record id")) != i)
            throw ConfigError("dataset record ids out of order");
        for (std::size_t k = 0; k < dim; ++k) d.x0.push_back(parse_hexfloat(toks[t++]));
        if (toks[t++] != "|") throw ConfigError("dataset record missing '|'");
        for (std::size_t k = 0; k < h; ++k)
            d.ins.push_back(static_cast<Symbol>(parse_int(toks[t++], "input index")));
        if (toks[t++] != "|") throw ConfigError("dataset record missing '|'");
        for (std::size_t k = 0; k <= h; ++k)
            d.outs.push_back(static_cast<Symbol>(parse_int(toks[t++], "output index")));
    }
    return d;
}

void save_windows(const WindowSet& w, const std::string& system, const std::string& dataset_hash,
                  const std::string& path) {
    std::string out = kWindowsSchema;
    out.push_back('\n');
    out += "system " + system + "\n";
    out += "dataset " + (dataset_hash.empty() ? "-" : dataset_hash) + "\n";
    out += "m " + std::to_string(w.m) + "\n";
    out += "horizon " + std::to_string(w.horizon) + "\n";
    out += "inputs " + join(w.input_labels.labels, ' ') + "\n";
    out += "outputs " + join(w.output_labels.labels, ' ') + "\n";
    out += "members " + std::to_string(w.size()) + "\n";
    for (const LSequence& mem : w.members) {
        render_window(out, mem);
        out.push_back('\n');
    }
    out += "records " + std::to_string(w.record_count()) + "\n";
    char buf[16];
    for (std::size_t r = 0; r < w.record_count(); ++r) {
        bool first = true;
        for (std::uint32_t id : w.record_members(r)) {
            std::snprintf(buf, sizeof buf, first ? "%u" : " %u", id);
            out += buf;
            first = false;
        }
        out.push_back('\n');
    }
    write_file(path, out);
}

WindowsDoc load_windows(const std::string& path) {
    const std::string blob = read_file(path);
    std::string_view rest(blob);
    std::string_view line;
    if (!next_line(rest, line) || line != kWindowsSchema)
        throw ConfigError("not a window-set file: " + path);

    WindowsDoc doc;
    doc.system = expect_keyword_line(rest, "system");
    doc.dataset_hash = expect_keyword_line(rest, "dataset");
    if (doc.dataset_hash == "-") doc.dataset_hash.clear();
    WindowSet& w = doc.w;
    w.m = static_cast<int>(parse_int(expect_keyword_line(rest, "m"), "m"));
    w.horizon = static_cast<int>(parse_int(expect_keyword_line(rest, "horizon"), "horizon"));
    w.input_labels = parse_alphabet(expect_keyword_line(rest, "inputs"));
    w.output_labels = parse_alphabet(expect_keyword_line(rest, "outputs"));
    if (w.m < 1) throw ConfigError("window order out of range");

    const auto members = parse_int(expect_keyword_line(rest, "members"), "member count");
    w.members.reserve(static_cast<std::size_t>(members));
    for (long long i = 0; i < members; ++i) {
        if (!next_line(rest, line)) throw ConfigError("window-set file truncated: " + path);
        const auto toks = split_ws(line);
        LSequence mem = parse_window(toks, 0, "member");
        if (mem.ell() != w.m || !mem.valid())
            throw ConfigError("member window malformed in " + path);
        if (!w.members.empty() && !(w.members.back() < mem))
            throw ConfigError("member windows out of canonical order in " + path);
        w.members.push_back(std::move(mem));
    }
    w.index.rebuild(w.members);

    const auto records = parse_int(expect_keyword_line(rest, "records"), "record count");
    if (records > 0) {
        w.rec_offsets.reserve(static_cast<std::size_t>(records) + 1);
        w.rec_offsets.push_back(0);
        for (long long r = 0; r < records; ++r) {
            if (!next_line(rest, line)) throw ConfigError("window-set provenance truncated");
            std::uint32_t prev = 0;
            bool first = true;
            for (auto tok : split_ws(line)) {
                const auto id = static_cast<std::uint32_t>(parse_int(tok, "member id"));
                if (id >= w.members.size()) throw ConfigError("provenance member id out of range");
                if (!first && id <= prev) throw ConfigError("provenance ids not strictly increasing");
                w.rec_members.push_back(id);
                prev = id;
                first = false;
            }
            w.rec_offsets.push_back(w.rec_members.size());
        }
    }
    return doc;
}

void save_certificate(const CertificateDoc& doc, const std::string& path) {
    write_file(path, cert_to_json(doc).dump(2) + "\n");
}

CertificateDoc load_certificate(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("certificate unreadable: " + std::string(e.what()));
    }
    CertificateDoc doc;
    try {
        if (j.at("schema").get<std::string>() != kCertificateSchema)
            throw ConfigError("not a certificate: " + path);
        doc.system = j.at("system").get<std::string>();
        doc.cert.n = j.at("n").get<std::size_t>();
        doc.cert.beta = j.at("beta").get<double>();
        doc.cert.ell = j.at("ell").get<int>();
        doc.cert.horizon = j.at("horizon").get<int>();
        doc.cert.u_card = j.at("u_card").get<std::uint64_t>();
        doc.cert.s_star = j.at("s_star").get<int>();
        doc.cert.eps = j.at("eps").get<double>();
        doc.cert.eps_bar = j.at("eps_bar").get<double>();
        doc.solver_rel_tol = j.at("solver").at("rel_tol").get<double>();
        doc.dataset_hash = j.at("provenance").at("dataset").get<std::string>();
        doc.abstraction_hash = j.at("provenance").at("abstraction").get<std::string>();
        if (j.contains("extension")) {
            const json& je = j.at("extension");
            ExtensionNote e;
            e.method = je.at("method").get<std::string>();
            e.extended_horizon = je.at("extended_horizon").get<int>();
            if (e.method == "nu") {
                e.extra = je.at("extra").get<int>();
                e.lambda = je.at("lambda").get<double>();
                e.nu = je.at("nu").get<double>();
                e.eps_bar_extended = je.at("eps_bar_extended").get<double>();
            } else {
                e.k_bar = je.at("k_bar").get<int>();
                e.rho = je.at("rho").get<double>();
                e.resample_needed = je.at("resample_needed").get<bool>();
            }
            doc.extension = std::move(e);
        }
    } catch (const json::exception& e) {
        throw ConfigError("certificate field: " + std::string(e.what()));
    }
    return doc;
}

void save_controller(const AbstractController& c, const Salca& a,
                     const std::string& abstraction_hash, const std::string& path) {
    std::string out = kControllerSchema;
    out.push_back('\n');
    out += "abstraction " + (abstraction_hash.empty() ? "-" : abstraction_hash) + "\n";
    out += "goal";
    for (const auto& g : c.goal) out += " " + g;
    out.push_back('\n');
    out += "avoid";
    for (const auto& v : c.avoid) out += " " + v;
    out.push_back('\n');
    out += "states " + std::to_string(c.num_winning()) + "\n";
    char buf[16];
    for (std::uint32_t s = 0; s < a.num_states(); ++s) {
        if (c.rank[s] < 0) continue;
        std::snprintf(buf, sizeof buf, "%d |", c.rank[s]);
        out += buf;
        for (Symbol u : c.allowed[s]) {
            std::snprintf(buf, sizeof buf, " %d", static_cast<int>(u));
            out += buf;
        }
        out += " | ";
        render_window(out, a.states[s]);
        out.push_back('\n');
    }
    write_file(path, out);
}

ControllerDoc load_controller_doc(const std::string& path) {
    const std::string blob = read_file(path);
    std::string_view rest(blob);
    std::string_view line;
    if (!next_line(rest, line) || line != kControllerSchema)
        throw ConfigError("not a controller file: " + path);
    ControllerDoc doc;
    doc.abstraction_hash = expect_keyword_line(rest, "abstraction");
    if (doc.abstraction_hash == "-") doc.abstraction_hash.clear();
    const std::string goal_line = expect_keyword_line(rest, "goal");
    for (auto tok : split_ws(goal_line)) doc.goal.emplace_back(tok);
    const std::string avoid_line = expect_keyword_line(rest, "avoid");
    for (auto tok : split_ws(avoid_line)) doc.avoid.emplace_back(tok);
    const auto count = parse_int(expect_keyword_line(rest, "states"), "state count");
    for (long long i = 0; i < count; ++i) {
        if (!next_line(rest, line)) throw ConfigError("controller file truncated: " + path);
        const auto toks = split_ws(line);
        std::size_t t = 0;
        const int rank = static_cast<int>(parse_int(toks[t++], "rank"));
        if (t >= toks.size() || toks[t++] != "|") throw ConfigError("controller line missing '|'");
        std::vector<Symbol> allowed;
        while (t < toks.size() && toks[t] != "|")
            allowed.push_back(static_cast<Symbol>(parse_int(toks[t++], "allowed input")));
        if (t >= toks.size() || toks[t++] != "|") throw ConfigError("controller line missing '|'");
        doc.ranks.push_back(rank);
        doc.allowed.push_back(std::move(allowed));
        doc.windows.push_back(parse_window(toks, t, "controller state"));
    }
    return doc;
}

AbstractController attach_controller(const ControllerDoc& doc, const Salca& a) {
    AbstractController c;
    c.goal = doc.goal;
    c.avoid = doc.avoid;
    for (const auto& g : doc.goal) c.goal_syms.push_back(a.output_labels.index_of(g));
    for (const auto& v : doc.avoid) c.avoid_syms.push_back(a.output_labels.index_of(v));
    std::sort(c.goal_syms.begin(), c.goal_syms.end());
    std::sort(c.avoid_syms.begin(), c.avoid_syms.end());
    c.rank.assign(a.num_states(), -1);
    c.allowed.assign(a.num_states(), {});
    for (std::size_t i = 0; i < doc.windows.size(); ++i) {
        const std::uint32_t s = a.state_id(doc.windows[i]);
        if (s == kNoId)
            throw ProvenanceError("controller state is not a state of this abstraction");
        if (doc.ranks[i] < 0) throw ConfigError("controller rank negative");
        c.rank[s] = doc.ranks[i];
        c.allowed[s] = doc.allowed[i];
        c.max_rank = std::max(c.max_rank, doc.ranks[i]);
    }
    for (std::uint32_t s : a.initial)
        if (c.rank[s] >= 0) c.winning_initial.push_back(s);
    return c;
}

void save_qtable(const QTable& q, const std::string& path) {
    std::string out = "#%salca.qtable.v1\n";
    char buf[64];
    out += "cells " + std::to_string(q.cells_x) + " " + std::to_string(q.cells_v) + "\n";
    out += "actions " + std::to_string(q.actions) + "\n";
    out += "grid";
    for (int d = 0; d < 2; ++d) {
        std::snprintf(buf, sizeof buf, " %a %a", q.grid.lo[static_cast<std::size_t>(d)],
                      q.grid.hi[static_cast<std::size_t>(d)]);
        out += buf;
    }
    out.push_back('\n');
    std::snprintf(buf, sizeof buf, "goal %a\n", q.goal_position);
    out += buf;
    out += "values\n";
    for (int cell = 0; cell < q.cells_x * q.cells_v; ++cell) {
        for (int a = 0; a < q.actions; ++a) {
            std::snprintf(buf, sizeof buf, a ? " %a" : "%a", q.value(cell, a));
            out += buf;
        }
        out.push_back('\n');
    }
    write_file(path, out);
}

QTable load_qtable(const std::string& path) {
    const std::string blob = read_file(path);
    std::string_view rest(blob);
    std::string_view line;
    if (!next_line(rest, line) || line != "#%salca.qtable.v1")
        throw ConfigError("not a q-table file: " + path);
    QTable q;
    {
        const std::string cells_line = expect_keyword_line(rest, "cells");
        const auto toks = split_ws(cells_line);
        if (toks.size() != 2) throw ConfigError("q-table cells line malformed");
        q.cells_x = static_cast<int>(parse_int(toks[0], "cells"));
        q.cells_v = static_cast<int>(parse_int(toks[1], "cells"));
    }
    q.actions = static_cast<int>(parse_int(expect_keyword_line(rest, "actions"), "actions"));
    {
        const std::string grid_line = expect_keyword_line(rest, "grid");
        const auto toks = split_ws(grid_line);
        if (toks.size() != 4) throw ConfigError("q-table grid line malformed");
        q.grid.lo = {parse_hexfloat(toks[0]), parse_hexfloat(toks[2])};
        q.grid.hi = {parse_hexfloat(toks[1]), parse_hexfloat(toks[3])};
    }
    q.goal_position = parse_hexfloat(expect_keyword_line(rest, "goal"));
    if (q.cells_x < 1 || q.cells_v < 1 || q.actions < 1)
        throw ConfigError("q-table dimensions out of range");
    expect_keyword_line(rest, "values");
    q.q.reserve(static_cast<std::size_t>(q.cells_x) * q.cells_v * q.actions);
    for (int cell = 0; cell < q.cells_x * q.cells_v; ++cell) {
        if (!next_line(rest, line)) throw ConfigError("q-table truncated: " + path);
        const auto toks = split_ws(line);
        if (toks.size() != static_cast<std::size_t>(q.actions))
            throw ConfigError("q-table row has wrong action count");
        for (const auto& tok : toks) q.q.push_back(parse_hexfloat(tok));
    }
    return q;
}

void save_csv(const std::string& schema, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows, const std::string& path) {
    std::string out = "# " + schema + "\n" + join(header, ',') + "\n";
    for (const auto& row : rows) {
        out += join(row, ',');
        out.push_back('\n');
    }
    write_file(path, out);
}

}  // namespace salca
