#include "delam/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace delam {

namespace {

enum class Kind { Number, String, Bool, Array };

struct Value {
    Kind kind = Kind::Number;
    double number = 0.0;
    std::string text;  // raw number text or string contents
    bool flag = false;
    std::vector<Value> items;
    int line = 0;
};

[[noreturn]] void fail(int line, const std::string& msg)
{
    if (line > 0)
        throw ConfigError("line " + std::to_string(line) + ": " + msg);
    throw ConfigError(msg);
}

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

class ValueParser {
public:
    ValueParser(const std::string& src, int line) : s_(src), line_(line) {}

    Value parse()
    {
        Value v = value();
        skip_ws();
        if (pos_ != s_.size())
            fail(line_, "unexpected trailing characters '" + s_.substr(pos_) + "'");
        return v;
    }

private:
    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    Value value()
    {
        skip_ws();
        if (pos_ >= s_.size())
            fail(line_, "missing value");
        Value v;
        v.line = line_;
        const char c = s_[pos_];
        if (c == '"') {
            const std::size_t end = s_.find('"', pos_ + 1);
            if (end == std::string::npos)
                fail(line_, "unterminated string");
            v.kind = Kind::String;
            v.text = s_.substr(pos_ + 1, end - pos_ - 1);
            pos_ = end + 1;
            return v;
        }
        if (c == '[') {
            ++pos_;
            v.kind = Kind::Array;
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ']') {
                ++pos_;
                return v;
            }
            for (;;) {
                v.items.push_back(value());
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (pos_ < s_.size() && s_[pos_] == ']') {
                    ++pos_;
                    return v;
                }
                fail(line_, "expected ',' or ']' in array");
            }
        }
        std::size_t end = pos_;
        while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && !std::isspace(static_cast<unsigned char>(s_[end])))
            ++end;
        const std::string word = s_.substr(pos_, end - pos_);
        pos_ = end;
        if (word == "true" || word == "false") {
            v.kind = Kind::Bool;
            v.flag = word == "true";
            return v;
        }
        double x = 0.0;
        const char* first = word.data();
        const char* last = word.data() + word.size();
        if (!word.empty() && *first == '+')
            ++first;
        const auto res = std::from_chars(first, last, x);
        if (word.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(x))
            fail(line_, "invalid value '" + word + "'");
        v.kind = Kind::Number;
        v.number = x;
        v.text = word;
        return v;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_;
};

const char* kind_name(Kind k)
{
    switch (k) {
    case Kind::Number: return "a number";
    case Kind::String: return "a string";
    case Kind::Bool: return "a boolean";
    case Kind::Array: return "an array";
    }
    return "?";
}

void expect(const Value& v, Kind k, const std::string& key)
{
    if (v.kind != k)
        fail(v.line, key + " must be " + kind_name(k));
}

double as_number(const Value& v, const std::string& key)
{
    expect(v, Kind::Number, key);
    return v.number;
}

int as_int(const Value& v, const std::string& key)
{
    const double x = as_number(v, key);
    if (x != std::floor(x) || std::abs(x) > 1e9)
        fail(v.line, key + " must be an integer");
    return static_cast<int>(x);
}

std::string as_string(const Value& v, const std::string& key)
{
    expect(v, Kind::String, key);
    return v.text;
}

bool as_bool(const Value& v, const std::string& key)
{
    expect(v, Kind::Bool, key);
    return v.flag;
}

std::set<EdgeTag> as_edges(const Value& v, const std::string& key)
{
    expect(v, Kind::Array, key);
    std::set<EdgeTag> out;
    for (const Value& item : v.items) {
        const std::string name = as_string(item, key);
        try {
            out.insert(edge_tag_from_string(name));
        } catch (const std::exception&) {
            fail(v.line, key + ": unknown edge tag '" + name + "'");
        }
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const Value&, const std::string&)>;

struct KeySpec {
    Setter set;
    std::function<std::string(const RunConfig&)> dump;
};

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string quoted(const std::string& s)
{
    return "\"" + s + "\"";
}

std::string edges_text(const std::set<EdgeTag>& edges)
{
    std::string out = "[";
    bool first = true;
    for (EdgeTag e : edges) {
        out += (first ? "" : ", ") + quoted(to_string(e));
        first = false;
    }
    return out + "]";
}

// Ordered registry: section -> key -> spec.
const std::vector<std::pair<std::string, std::vector<std::pair<std::string, KeySpec>>>>& registry()
{
    using S = std::vector<std::pair<std::string, KeySpec>>;
    auto number = [](double RunConfig::*field) {
        return KeySpec{[field](RunConfig& c, const Value& v, const std::string& k) { c.*field = as_number(v, k); },
                       [field](const RunConfig& c) { return num(c.*field); }};
    };
    auto integer = [](int RunConfig::*field) {
        return KeySpec{[field](RunConfig& c, const Value& v, const std::string& k) { c.*field = as_int(v, k); },
                       [field](const RunConfig& c) { return std::to_string(c.*field); }};
    };
    auto boolean = [](bool RunConfig::*field) {
        return KeySpec{[field](RunConfig& c, const Value& v, const std::string& k) { c.*field = as_bool(v, k); },
                       [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
    };
    static const std::vector<std::pair<std::string, S>> reg = {
        {"mesh",
         S{{"width", {[](RunConfig& c, const Value& v, const std::string& k) { c.mesh.width = as_number(v, k); },
                      [](const RunConfig& c) { return num(c.mesh.width); }}},
           {"height", {[](RunConfig& c, const Value& v, const std::string& k) { c.mesh.height = as_number(v, k); },
                       [](const RunConfig& c) { return num(c.mesh.height); }}},
           {"nx", {[](RunConfig& c, const Value& v, const std::string& k) { c.mesh.nx = as_int(v, k); },
                   [](const RunConfig& c) { return std::to_string(c.mesh.nx); }}},
           {"ny", {[](RunConfig& c, const Value& v, const std::string& k) { c.mesh.ny = as_int(v, k); },
                   [](const RunConfig& c) { return std::to_string(c.mesh.ny); }}},
           {"dirichlet", {[](RunConfig& c, const Value& v, const std::string& k) { c.mesh.dirichlet = as_edges(v, k); },
                          [](const RunConfig& c) { return edges_text(c.mesh.dirichlet); }}},
           {"neumann", {[](RunConfig& c, const Value& v, const std::string& k) { c.mesh.neumann = as_edges(v, k); },
                        [](const RunConfig& c) { return edges_text(c.mesh.neumann); }}}}},
        {"material",
         S{{"rho", number(&RunConfig::rho)},
           {"lambda", number(&RunConfig::lambda)},
           {"mu", number(&RunConfig::mu)},
           {"visc_lambda", number(&RunConfig::visc_lambda)},
           {"visc_mu", number(&RunConfig::visc_mu)}}},
        {"interface",
         S{{"a0", number(&RunConfig::a0)},
           {"a1", number(&RunConfig::a1)},
           {"b", number(&RunConfig::b)},
           {"k", number(&RunConfig::k)},
           {"k_values",
            {[](RunConfig& c, const Value& v, const std::string& k) {
                 expect(v, Kind::Array, k);
                 c.k_values.clear();
                 for (const Value& item : v.items)
                     c.k_values.push_back(as_number(item, k));
             },
             [](const RunConfig& c) {
                 std::string out = "[";
                 for (std::size_t i = 0; i < c.k_values.size(); ++i)
                     out += (i ? ", " : "") + num(c.k_values[i]);
                 return out + "]";
             }}},
           {"scaling",
            {[](RunConfig& c, const Value& v, const std::string& k) {
                 const std::string name = as_string(v, k);
                 try {
                     c.scaling = scaling_from_string(name);
                 } catch (const std::exception&) {
                     fail(v.line, k + " must be \"constant\" or \"one_over_k\"");
                 }
             },
             [](const RunConfig& c) { return quoted(to_string(c.scaling)); }}}}},
        {"time", S{{"tau", number(&RunConfig::tau)}, {"T", number(&RunConfig::horizon)}}},
        {"run",
         S{{"scenario", {[](RunConfig& c, const Value& v, const std::string& k) { c.scenario = as_string(v, k); },
                         [](const RunConfig& c) { return quoted(c.scenario); }}},
           {"load_scale", number(&RunConfig::load_scale)},
           {"load_omega", number(&RunConfig::load_omega)},
           {"initial_z",
            {[](RunConfig& c, const Value& v, const std::string& k) {
                 const std::string s = as_string(v, k);
                 if (s != "bonded" && s != "debonded")
                     fail(v.line, k + " must be \"bonded\" or \"debonded\"");
                 c.initial_bonded = s == "bonded";
             },
             [](const RunConfig& c) { return quoted(c.initial_bonded ? "bonded" : "debonded"); }}},
           {"strict_init", boolean(&RunConfig::strict_init)},
           {"step_order",
            {[](RunConfig& c, const Value& v, const std::string& k) {
                 const std::string s = as_string(v, k);
                 try {
                     c.order = step_order_from_string(s);
                 } catch (const std::exception&) {
                     fail(v.line, k + " must be \"u_then_z\" or \"z_then_u\"");
                 }
             },
             [](const RunConfig& c) { return quoted(to_string(c.order)); }}},
           {"streaming", boolean(&RunConfig::streaming)},
           {"output_dir", {[](RunConfig& c, const Value& v, const std::string& k) { c.output_dir = as_string(v, k); },
                           [](const RunConfig& c) { return quoted(c.output_dir); }}},
           {"seed",
            {[](RunConfig& c, const Value& v, const std::string& k) {
                 const double x = as_number(v, k);
                 if (x < 0 || x != std::floor(x) || x > 9007199254740992.0)
                     fail(v.line, k + " must be a non-negative integer");
                 c.seed = static_cast<std::uint64_t>(x);
             },
             [](const RunConfig& c) { return std::to_string(c.seed); }}},
           {"samples", integer(&RunConfig::samples)},
           {"exclusion_steps", integer(&RunConfig::exclusion_steps)},
           {"threads", integer(&RunConfig::threads)}}},
    };
    return reg;
}

const KeySpec* find_key(const std::string& section, const std::string& key)
{
    for (const auto& [name, keys] : registry()) {
        if (name != section)
            continue;
        for (const auto& [k, spec] : keys) {
            if (k == key)
                return &spec;
        }
    }
    return nullptr;
}

bool known_section(const std::string& section)
{
    for (const auto& entry : registry()) {
        if (entry.first == section)
            return true;
    }
    return false;
}

// Finds the first occurrence of '#' outside a string literal.
std::size_t comment_start(const std::string& line)
{
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"')
            in_string = !in_string;
        else if (line[i] == '#' && !in_string)
            return i;
    }
    return std::string::npos;
}

}  // namespace

const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> names = {"zero", "peel", "pull", "vibrate"};
    return names;
}

RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const std::size_t hash = comment_start(raw);
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty())
            continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                fail(line, "malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            if (!known_section(section))
                fail(line, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            fail(line, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        if (key.empty())
            fail(line, "missing key");
        if (section.empty())
            fail(line, "key '" + key + "' appears before any section header");
        const std::string full = section + "." + key;
        const KeySpec* spec = find_key(section, key);
        if (!spec)
            fail(line, "unknown key '" + full + "'");
        if (auto it = seen.find(full); it != seen.end())
            fail(line, "duplicate key '" + full + "' (first set on line " + std::to_string(it->second) + ")");
        seen[full] = line;
        const Value v = ValueParser(body.substr(eq + 1), line).parse();
        spec->set(cfg, v, full);
    }

    try {
        validate_config(cfg);
    } catch (const ConfigError& e) {
        // Attach the line of the key named at the start of the message.
        const std::string msg = e.what();
        std::string key = msg.substr(0, msg.find(' '));
        if (!key.empty() && key.back() == ':')
            key.pop_back();
        const auto it = seen.find(key);
        fail(it == seen.end() ? 0 : it->second, msg);
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

void validate_config(const RunConfig& c)
{
    auto positive = [](double x, const char* key) {
        if (!(x > 0.0))
            throw ConfigError(std::string(key) + " must be positive");
    };
    positive(c.mesh.width, "mesh.width");
    positive(c.mesh.height, "mesh.height");
    if (c.mesh.nx < 1)
        throw ConfigError("mesh.nx must be at least 1");
    if (c.mesh.ny < 1)
        throw ConfigError("mesh.ny must be at least 1");
    positive(c.rho, "material.rho");
    positive(c.mu, "material.mu");
    if (!(c.lambda + c.mu > 0.0))
        throw ConfigError("material.lambda must satisfy lambda + mu > 0");
    positive(c.visc_mu, "material.visc_mu");
    if (!(c.visc_lambda + c.visc_mu > 0.0))
        throw ConfigError("material.visc_lambda must satisfy visc_lambda + visc_mu > 0");
    if (!(c.a0 >= 0.0))
        throw ConfigError("interface.a0 must be non-negative");
    if (!(c.a1 >= 0.0))
        throw ConfigError("interface.a1 must be non-negative");
    if (!(c.b >= 0.0))
        throw ConfigError("interface.b must be non-negative");
    if (!(c.k >= 1.0))
        throw ConfigError("interface.k must be at least 1");
    if (c.k_values.empty())
        throw ConfigError("interface.k_values must not be empty");
    for (std::size_t i = 0; i < c.k_values.size(); ++i) {
        if (!(c.k_values[i] >= 1.0))
            throw ConfigError("interface.k_values entries must be at least 1");
        if (i > 0 && !(c.k_values[i] > c.k_values[i - 1]))
            throw ConfigError("interface.k_values must be strictly ascending");
    }
    positive(c.tau, "time.tau");
    if (!(c.horizon >= c.tau))
        throw ConfigError("time.T must be at least time.tau");
    bool known = false;
    for (const auto& s : scenario_names())
        known = known || s == c.scenario;
    if (!known)
        throw ConfigError("run.scenario must be one of zero, peel, pull, vibrate");
    if (!(c.load_omega >= 0.0))
        throw ConfigError("run.load_omega must be non-negative");
    if (c.output_dir.empty())
        throw ConfigError("run.output_dir must not be empty");
    if (c.samples < 1)
        throw ConfigError("run.samples must be at least 1");
    if (c.exclusion_steps < 0)
        throw ConfigError("run.exclusion_steps must be non-negative");
    if (c.threads < 0)
        throw ConfigError("run.threads must be non-negative");
    try {
        build_two_block_mesh(mesh_spec(c));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("mesh.dirichlet: ") + e.what());
    }
}

std::string dump_config(const RunConfig& c)
{
    std::string out;
    for (const auto& [section, keys] : registry()) {
        if (!out.empty())
            out += "\n";
        out += "[" + section + "]\n";
        for (const auto& [key, spec] : keys)
            out += key + " = " + spec.dump(c) + "\n";
    }
    return out;
}

bool operator==(const RunConfig& a, const RunConfig& b)
{
    return dump_config(a) == dump_config(b);
}

namespace {

std::vector<LoadTerm> scenario_loads(const RunConfig& c)
{
    const double s = c.load_scale;
    if (c.scenario == "peel") {
        return {LoadTerm{TractionTarget{EdgeTag::LeftPlus}, Vec2(0.0, 1.0), TimeProfile::ramp(s)},
                LoadTerm{TractionTarget{EdgeTag::LeftMinus}, Vec2(0.0, -1.0), TimeProfile::ramp(s)}};
    }
    if (c.scenario == "pull") {
        return {LoadTerm{BodyTarget{Block::Plus}, Vec2(0.0, 1.0), TimeProfile::ramp(s)},
                LoadTerm{BodyTarget{Block::Minus}, Vec2(0.0, -1.0), TimeProfile::ramp(s)}};
    }
    if (c.scenario == "vibrate")
        return {LoadTerm{TractionTarget{EdgeTag::RightPlus}, Vec2(0.0, 1.0), TimeProfile::sine(s, c.load_omega)}};
    return {};
}

}  // namespace

MeshSpec mesh_spec(const RunConfig& c)
{
    MeshSpec m = c.mesh;
    for (const LoadTerm& t : scenario_loads(c)) {
        if (const auto* tr = std::get_if<TractionTarget>(&t.target))
            m.neumann.insert(tr->edge);
    }
    return m;
}

ModelParams model_params(const RunConfig& c, double k)
{
    ModelParams p;
    p.rho = c.rho;
    p.elastic = isotropic_tensor(c.lambda, c.mu);
    p.viscous = isotropic_tensor(c.visc_lambda, c.visc_mu);
    p.a0 = c.a0;
    p.a1 = c.a1;
    p.b = c.b;
    p.k = k;
    p.scaling = c.scaling;
    p.load = LoadSchedule(scenario_loads(c));
    return p;
}

EvolutionOptions evolution_options(const RunConfig& c)
{
    EvolutionOptions o;
    o.tau = c.tau;
    o.horizon = c.horizon;
    o.order = c.order;
    o.init_mode = c.strict_init ? InitMode::Strict : InitMode::Repair;
    o.keep_history = !c.streaming;
    return o;
}

SweepSetup sweep_setup(const RunConfig& c)
{
    SweepSetup s;
    s.mesh = mesh_spec(c);
    s.params = model_params(c, c.k_values.back());
    s.evolution = evolution_options(c);
    if (!c.initial_bonded)
        s.z0.assign(static_cast<std::size_t>(c.mesh.nx), 0);
    return s;
}

SweepOptions sweep_options(const RunConfig& c)
{
    SweepOptions o;
    o.samples = c.samples;
    o.exclusion_steps = c.exclusion_steps;
    o.threads = c.threads;
    return o;
}

}  // namespace delam
