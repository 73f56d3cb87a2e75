#include "nsv/io/io.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nsv::io {

using nlohmann::json;

namespace {

// --- minimal TOML reader: sections, key = value, strings, numbers, bools,
// arrays (nestable). Enough for run configs; anything else is rejected with
// the offending line.

struct TomlParser {
    const std::string& text;
    const std::string& file;
    std::size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    void skip_ws_inline() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
    }

    void skip_to_eol() {
        while (!eof() && peek() != '\n') ++pos;
    }

    void expect_line_end() {
        skip_ws_inline();
        if (eof()) return;
        if (peek() == '#') skip_to_eol();
        if (!eof() && peek() != '\n') fail("trailing characters after value");
    }

    std::string bare_key() {
        std::string k;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                          peek() == '-' || peek() == '.'))
            k += take();
        if (k.empty()) fail("expected a key");
        return k;
    }

    json value() {
        skip_ws_inline();
        if (eof()) fail("expected a value");
        const char c = peek();
        if (c == '"') return string_value();
        if (c == '[') return array_value();
        if (c == 't' || c == 'f') return bool_value();
        return number_value();
    }

    json string_value() {
        take();  // opening quote
        std::string s;
        while (true) {
            if (eof()) fail("unterminated string");
            char c = take();
            if (c == '"') break;
            if (c == '\n') fail("newline inside string");
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                char e = take();
                if (e == '"' || e == '\\') s += e;
                else fail("unsupported escape sequence");
            } else {
                s += c;
            }
        }
        return json(s);
    }

    json bool_value() {
        if (text.compare(pos, 4, "true") == 0) {
            pos += 4;
            return json(true);
        }
        if (text.compare(pos, 5, "false") == 0) {
            pos += 5;
            return json(false);
        }
        fail("expected true or false");
    }

    json number_value() {
        std::size_t start = pos;
        bool is_float = false;
        if (!eof() && (peek() == '+' || peek() == '-')) ++pos;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                          peek() == 'e' || peek() == 'E' || peek() == '+' || peek() == '-')) {
            if (peek() == '.' || peek() == 'e' || peek() == 'E') is_float = true;
            ++pos;
        }
        const std::string tok = text.substr(start, pos - start);
        if (tok.empty()) fail("expected a number");
        try {
            if (is_float) return json(std::stod(tok));
            if (tok[0] == '-') return json(std::stoll(tok));
            return json(std::stoull(tok));
        } catch (const std::exception&) {
            fail("malformed number '" + tok + "'");
        }
    }

    json array_value() {
        take();  // '['
        json arr = json::array();
        while (true) {
            skip_ws_inline();
            while (!eof() && (peek() == '\n' || peek() == '#')) {
                if (peek() == '#') skip_to_eol();
                else take();
                skip_ws_inline();
            }
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                take();
                break;
            }
            arr.push_back(value());
            skip_ws_inline();
            while (!eof() && (peek() == '\n' || peek() == '#')) {
                if (peek() == '#') skip_to_eol();
                else take();
                skip_ws_inline();
            }
            if (!eof() && peek() == ',') {
                take();
                continue;
            }
            if (!eof() && peek() == ']') {
                take();
                break;
            }
            fail("expected ',' or ']' in array");
        }
        return arr;
    }

    json parse() {
        json root = json::object();
        json* table = &root;
        while (!eof()) {
            skip_ws_inline();
            if (eof()) break;
            const char c = peek();
            if (c == '\n') {
                take();
                continue;
            }
            if (c == '#') {
                skip_to_eol();
                continue;
            }
            if (c == '[') {
                take();
                skip_ws_inline();
                const std::string name = bare_key();
                skip_ws_inline();
                if (eof() || take() != ']') fail("expected ']' after table name");
                expect_line_end();
                table = &root;
                std::istringstream parts(name);
                std::string seg;
                while (std::getline(parts, seg, '.')) {
                    if (seg.empty()) fail("empty table name segment");
                    table = &(*table)[seg];
                    if (!table->is_object() && !table->is_null())
                        fail("table '" + name + "' collides with a value");
                    if (table->is_null()) *table = json::object();
                }
                continue;
            }
            const std::string key = bare_key();
            skip_ws_inline();
            if (eof() || take() != '=') fail("expected '=' after key '" + key + "'");
            json v = value();
            expect_line_end();
            if (table->contains(key)) fail("duplicate key '" + key + "'");
            (*table)[key] = std::move(v);
        }
        return root;
    }
};

double want_number(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    throw ConfigError(path + ": expected a number");
}

bool want_bool(const json& j, const std::string& path) {
    if (j.is_boolean()) return j.get<bool>();
    throw ConfigError(path + ": expected true or false");
}

std::string want_string(const json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    throw ConfigError(path + ": expected a string");
}

std::vector<patch::PatchSpec::Harmonic> want_modes(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array of [k, cos, sin]");
    std::vector<patch::PatchSpec::Harmonic> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& m = j[i];
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!m.is_array() || m.size() != 3) throw ConfigError(p + ": expected [k, cos, sin]");
        patch::PatchSpec::Harmonic h;
        h.k = static_cast<int>(want_number(m[0], p));
        if (h.k < 0 || std::fabs(want_number(m[0], p) - h.k) > 0)
            throw ConfigError(p + ": mode index must be a nonnegative integer");
        h.cos_amp = want_number(m[1], p);
        h.sin_amp = want_number(m[2], p);
        out.push_back(h);
    }
    return out;
}

std::vector<double> want_number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(want_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

// strict section reader: every key must be consumed
struct Section {
    const json& j;
    std::string name;
    std::vector<std::string> known;

    const json* get(const std::string& key) {
        known.push_back(key);
        auto it = j.find(key);
        return it == j.end() ? nullptr : &*it;
    }

    void finish() const {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool ok = false;
            for (const auto& k : known)
                if (k == it.key()) {
                    ok = true;
                    break;
                }
            if (!ok) throw ConfigError(name + ": unknown key '" + it.key() + "'");
        }
    }
};

void apply_config(RunConfig& cfg, const json& root) {
    Section top{root, "config", {}};

    if (const json* s = top.get("grid")) {
        Section sec{*s, "grid", {}};
        if (const json* v = sec.get("n")) cfg.n = static_cast<int>(want_number(*v, "grid.n"));
        if (const json* v = sec.get("L")) cfg.L = want_number(*v, "grid.L");
        sec.finish();
    }
    if (const json* s = top.get("law")) {
        Section sec{*s, "law", {}};
        if (const json* v = sec.get("a")) cfg.a = want_number(*v, "law.a");
        if (const json* v = sec.get("gamma")) cfg.gamma = want_number(*v, "law.gamma");
        if (const json* v = sec.get("rho_tilde"))
            cfg.rho_tilde = want_number(*v, "law.rho_tilde");
        if (const json* v = sec.get("rho_max")) cfg.rho_max = want_number(*v, "law.rho_max");
        sec.finish();
    }
    if (const json* s = top.get("flow")) {
        Section sec{*s, "flow", {}};
        if (const json* v = sec.get("mu")) cfg.mu = want_number(*v, "flow.mu");
        if (const json* v = sec.get("lambda")) cfg.lambda = want_number(*v, "flow.lambda");
        if (const json* v = sec.get("cfl_advective"))
            cfg.cfl_advective = want_number(*v, "flow.cfl_advective");
        if (const json* v = sec.get("cfl_acoustic"))
            cfg.cfl_acoustic = want_number(*v, "flow.cfl_acoustic");
        if (const json* v = sec.get("dt_override"))
            cfg.dt_override = want_number(*v, "flow.dt_override");
        if (const json* v = sec.get("dealias")) cfg.dealias = want_bool(*v, "flow.dealias");
        sec.finish();
    }
    if (const json* s = top.get("time")) {
        Section sec{*s, "time", {}};
        if (const json* v = sec.get("t_end")) cfg.t_end = want_number(*v, "time.t_end");
        if (const json* v = sec.get("sample_dt"))
            cfg.sample_dt = want_number(*v, "time.sample_dt");
        sec.finish();
    }
    if (const json* s = top.get("initial")) {
        Section sec{*s, "initial", {}};
        if (const json* v = sec.get("type")) cfg.initial_type = want_string(*v, "initial.type");
        if (const json* v = sec.get("rho_amp")) cfg.rho_amp = want_number(*v, "initial.rho_amp");
        if (const json* v = sec.get("u_amp")) cfg.u_amp = want_number(*v, "initial.u_amp");
        if (const json* v = sec.get("patch")) {
            Section ps{*v, "initial.patch", {}};
            if (const json* w = ps.get("alpha"))
                cfg.patch.alpha = want_number(*w, "initial.patch.alpha");
            if (const json* w = ps.get("rho_tilde"))
                cfg.patch.rho_tilde = want_number(*w, "initial.patch.rho_tilde");
            if (const json* w = ps.get("cx")) cfg.patch.cx = want_number(*w, "initial.patch.cx");
            if (const json* w = ps.get("cy")) cfg.patch.cy = want_number(*w, "initial.patch.cy");
            if (const json* w = ps.get("edge_width"))
                cfg.patch.edge_width = want_number(*w, "initial.patch.edge_width");
            if (const json* w = ps.get("chi_radius"))
                cfg.patch.chi_radius = want_number(*w, "initial.patch.chi_radius");
            if (const json* w = ps.get("x_modes"))
                cfg.patch.x_modes = want_modes(*w, "initial.patch.x_modes");
            if (const json* w = ps.get("y_modes"))
                cfg.patch.y_modes = want_modes(*w, "initial.patch.y_modes");
            ps.finish();
        }
        sec.finish();
    }
    if (const json* s = top.get("tracking")) {
        Section sec{*s, "tracking", {}};
        if (const json* v = sec.get("family")) cfg.family = want_bool(*v, "tracking.family");
        if (const json* v = sec.get("markers"))
            cfg.markers = static_cast<int>(want_number(*v, "tracking.markers"));
        if (const json* v = sec.get("p")) cfg.p = want_number(*v, "tracking.p");
        if (const json* v = sec.get("track_decomposition"))
            cfg.track_decomposition = want_bool(*v, "tracking.track_decomposition");
        sec.finish();
    }
    if (const json* s = top.get("output")) {
        Section sec{*s, "output", {}};
        if (const json* v = sec.get("dir")) cfg.out_dir = want_string(*v, "output.dir");
        if (const json* v = sec.get("prefix")) cfg.prefix = want_string(*v, "output.prefix");
        if (const json* v = sec.get("snapshot_dt"))
            cfg.snapshot_dt = want_number(*v, "output.snapshot_dt");
        sec.finish();
    }
    if (const json* s = top.get("sweep")) {
        Section sec{*s, "sweep", {}};
        if (const json* v = sec.get("nus")) cfg.sweep_nus = want_number_list(*v, "sweep.nus");
        if (const json* v = sec.get("with_reference"))
            cfg.sweep_with_reference = want_bool(*v, "sweep.with_reference");
        sec.finish();
    }
    if (const json* s = top.get("seed")) {
        if (!s->is_number_integer() && !s->is_number_unsigned())
            throw ConfigError("seed: expected an integer");
        cfg.seed = s->get<std::uint64_t>();
    }
    top.finish();
}

void validate(const RunConfig& cfg) {
    auto bad = [](const std::string& msg) { throw ConfigError(msg); };
    if (cfg.n < 16 || (cfg.n & (cfg.n - 1)) != 0) bad("grid.n: must be a power of two, at least 16");
    if (cfg.n > 4096) bad("grid.n: larger than 4096 is not supported");
    if (!(cfg.L > 0.0)) bad("grid.L: must be positive");
    if (!(cfg.a > 0.0)) bad("law.a: must be positive");
    if (!(cfg.gamma >= 1.0)) bad("law.gamma: must be at least 1");
    if (!(cfg.rho_tilde > 0.0)) bad("law.rho_tilde: must be positive");
    if (!(cfg.rho_max > cfg.rho_tilde)) bad("law.rho_max: must exceed rho_tilde");
    if (!(cfg.mu > 0.0)) bad("flow.mu: must be positive");
    if (!(2.0 * cfg.mu + cfg.lambda > 0.0)) bad("flow.lambda: 2*mu + lambda must be positive");
    if (!(cfg.mu + cfg.lambda >= 0.0)) bad("flow.lambda: mu + lambda must be nonnegative");
    if (cfg.t_end < 0.0) bad("time.t_end: must be nonnegative");
    if (!(cfg.sample_dt > 0.0)) bad("time.sample_dt: must be positive");
    if (cfg.initial_type != "equilibrium" && cfg.initial_type != "smooth" &&
        cfg.initial_type != "taylor-green" && cfg.initial_type != "patch")
        bad("initial.type: unknown type '" + cfg.initial_type + "'");
    if (cfg.initial_type == "patch") {
        if (cfg.patch.rho_tilde != cfg.rho_tilde)
            bad("initial.patch.rho_tilde: must equal law.rho_tilde");
        if (cfg.patch.alpha < 0.0) bad("initial.patch.alpha: must be nonnegative");
        if (!(cfg.rho_max > cfg.patch.alpha))
            bad("law.rho_max: must exceed the patch density alpha");
        if (cfg.patch.x_modes.empty() || cfg.patch.y_modes.empty())
            bad("initial.patch: x_modes and y_modes must be nonempty");
    }
    if ((cfg.family || cfg.markers > 0) && cfg.initial_type != "patch")
        bad("tracking: family and markers require initial.type = \"patch\"");
    if (cfg.markers < 0) bad("tracking.markers: must be nonnegative");
    if (!(cfg.p > 2.0)) bad("tracking.p: exponent must exceed the dimension 2");
    if (cfg.snapshot_dt < 0.0) bad("output.snapshot_dt: must be nonnegative");
    for (std::size_t i = 0; i < cfg.sweep_nus.size(); ++i) {
        if (!(cfg.sweep_nus[i] > 0.0)) bad("sweep.nus: entries must be positive");
        if (i > 0 && !(cfg.sweep_nus[i] > cfg.sweep_nus[i - 1]))
            bad("sweep.nus: entries must be strictly increasing");
    }
}

json modes_json(const std::vector<patch::PatchSpec::Harmonic>& modes) {
    json arr = json::array();
    for (const auto& m : modes) arr.push_back(json::array({m.k, m.cos_amp, m.sin_amp}));
    return arr;
}

} // namespace

std::string RunConfig::canonical_json() const {
    json j;
    j["grid"] = {{"n", n}, {"L", L}};
    j["law"] = {{"a", a}, {"gamma", gamma}, {"rho_tilde", rho_tilde}, {"rho_max", rho_max}};
    j["flow"] = {{"mu", mu},
                 {"lambda", lambda},
                 {"cfl_advective", cfl_advective},
                 {"cfl_acoustic", cfl_acoustic},
                 {"dt_override", dt_override},
                 {"dealias", dealias}};
    j["time"] = {{"t_end", t_end}, {"sample_dt", sample_dt}};
    j["initial"] = {{"type", initial_type},
                    {"rho_amp", rho_amp},
                    {"u_amp", u_amp},
                    {"patch",
                     {{"alpha", patch.alpha},
                      {"rho_tilde", patch.rho_tilde},
                      {"cx", patch.cx},
                      {"cy", patch.cy},
                      {"edge_width", patch.edge_width},
                      {"chi_radius", patch.chi_radius},
                      {"x_modes", modes_json(patch.x_modes)},
                      {"y_modes", modes_json(patch.y_modes)}}}};
    j["tracking"] = {{"family", family},
                     {"markers", markers},
                     {"p", p},
                     {"track_decomposition", track_decomposition}};
    j["output"] = {{"dir", out_dir}, {"prefix", prefix}, {"snapshot_dt", snapshot_dt}};
    j["sweep"] = {{"nus", sweep_nus}, {"with_reference", sweep_with_reference}};
    j["seed"] = seed;
    return j.dump();
}

std::string RunConfig::config_hash() const { return sha256_hex(canonical_json()); }

RunConfig parse_config(const std::string& text, const std::string& filename) {
    json root;
    const bool looks_json = filename.size() >= 5 &&
                            filename.compare(filename.size() - 5, 5, ".json") == 0;
    bool is_json = looks_json;
    if (!is_json && !(filename.size() >= 5 &&
                      filename.compare(filename.size() - 5, 5, ".toml") == 0)) {
        for (char c : text) {
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
            is_json = (c == '{');
            break;
        }
    }
    if (is_json) {
        try {
            root = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(filename + ": " + e.what());
        }
        if (!root.is_object()) throw ConfigError(filename + ": top level must be an object");
    } else {
        TomlParser p{text, filename};
        root = p.parse();
    }
    RunConfig cfg;
    apply_config(cfg, root);
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

} // namespace nsv::io
