#include "qmhd/config.hpp"

#include "qmhd/spectral.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace qmhd {

ConfigError::ConfigError(std::size_t line, const std::string &what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

ModeBranch parse_branch(std::string_view text)
{
    if (text == "alfven") return ModeBranch::Alfven;
    if (text == "fast") return ModeBranch::Fast;
    if (text == "slow") return ModeBranch::Slow;
    throw std::invalid_argument("branch must be alfven, fast or slow");
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

Real to_real(std::string_view text)
{
    const std::string copy(text);
    std::size_t used = 0;
    const Real value = std::stod(copy, &used);
    if (used != copy.size()) {
        throw std::invalid_argument("trailing characters in number");
    }
    return value;
}

template <class Int>
Int to_int(std::string_view text)
{
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("expected an integer");
    }
    return value;
}

std::string real_text(Real value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

struct Entry {
    const char *name;
    std::function<void(RunConfig &, std::string_view)> set;
    std::function<std::string(const RunConfig &)> get;
};

#define REAL_ENTRY(key, member)                                                                                \
    Entry{key, [](RunConfig &c, std::string_view v) { c.member = to_real(v); },                                \
          [](const RunConfig &c) { return real_text(c.member); }}
#define INT_ENTRY(key, member, type)                                                                           \
    Entry{key, [](RunConfig &c, std::string_view v) { c.member = to_int<type>(v); },                           \
          [](const RunConfig &c) { return std::to_string(c.member); }}

const std::vector<Entry> &entries()
{
    static const std::vector<Entry> table = {
        Entry{"out", [](RunConfig &c, std::string_view v) { c.out = std::string(v); },
              [](const RunConfig &c) { return c.out; }},
        INT_ENTRY("seed", seed, std::uint64_t),
        REAL_ENTRY("background.rho0", background.rho0),
        REAL_ENTRY("background.p0", background.p0),
        REAL_ENTRY("background.H0x", background.H0.x()),
        REAL_ENTRY("background.H0y", background.H0.y()),
        REAL_ENTRY("background.H0z", background.H0.z()),
        REAL_ENTRY("background.u0", background.u0),
        REAL_ENTRY("background.mass", background.mass),
        REAL_ENTRY("background.hbar", background.hbar),
        INT_ENTRY("grid.n_points", grid.n_points, std::size_t),
        REAL_ENTRY("grid.length", grid.length),
        REAL_ENTRY("dissipation.eta", dissipation.eta),
        REAL_ENTRY("dissipation.xi", dissipation.xi),
        REAL_ENTRY("soliton.b", soliton.b),
        REAL_ENTRY("soliton.mass", soliton.mass),
        REAL_ENTRY("soliton.hbar", soliton.hbar),
        INT_ENTRY("soliton.k_index", soliton.k_index, int),
        REAL_ENTRY("soliton.d", soliton.d),
        INT_ENTRY("soliton.n_points", soliton.n_points, std::size_t),
        REAL_ENTRY("soliton.length", soliton.length),
        REAL_ENTRY("soliton.transits", soliton.transits),
        REAL_ENTRY("soliton.dt", soliton.dt),
        REAL_ENTRY("scan.k_min", scan.k_min),
        REAL_ENTRY("scan.k_max", scan.k_max),
        INT_ENTRY("scan.k_count", scan.k_count, std::size_t),
        Entry{"scan.branch", [](RunConfig &c, std::string_view v) { c.scan.branch = parse_branch(v); },
              [](const RunConfig &c) { return std::string(to_string(c.scan.branch)); }},
        INT_ENTRY("scan.k_index", scan.k_index, int),
        REAL_ENTRY("scan.periods", scan.periods),
        REAL_ENTRY("scan.samples_per_period", scan.samples_per_period),
        REAL_ENTRY("scan.amplitude", scan.amplitude),
    };
    return table;
}

#undef REAL_ENTRY
#undef INT_ENTRY

const Entry *find_entry(std::string_view qualified)
{
    for (const auto &e : entries()) {
        if (qualified == e.name) {
            return &e;
        }
    }
    return nullptr;
}

void set_value(RunConfig &config, std::string_view qualified, std::string_view value, std::size_t line)
{
    const Entry *entry = find_entry(qualified);
    if (entry == nullptr) {
        throw ConfigError(line, "unknown key '" + std::string(qualified) + "'");
    }
    try {
        entry->set(config, value);
    } catch (const std::exception &e) {
        throw ConfigError(line, "bad value '" + std::string(value) + "' for '" + std::string(qualified) + "': " + e.what());
    }
}

} // namespace

RunConfig parse_config(std::string_view text)
{
    RunConfig config;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(line_no, "unterminated section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static constexpr std::string_view known[] = {"background", "grid", "dissipation", "soliton", "scan"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
                throw ConfigError(line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(line_no, "empty key");
        }
        const std::string qualified = section.empty() ? std::string(key) : section + "." + std::string(key);
        set_value(config, qualified, value, line_no);
    }
    return config;
}

RunConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(0, "cannot open config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig &config)
{
    std::string out;
    std::string current;
    for (const auto &e : entries()) {
        const std::string_view name = e.name;
        const auto dot = name.find('.');
        const std::string section = dot == std::string_view::npos ? "" : std::string(name.substr(0, dot));
        const std::string key = dot == std::string_view::npos ? std::string(name) : std::string(name.substr(dot + 1));
        if (section != current) {
            out += "\n[" + section + "]\n";
            current = section;
        }
        out += key + " = " + e.get(config) + "\n";
    }
    return out;
}

void apply_override(RunConfig &config, std::string_view qualified_key, std::string_view value)
{
    set_value(config, qualified_key, trim(value), 0);
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto &e : entries()) {
        keys.emplace_back(e.name);
    }
    return keys;
}

void validate_config(const RunConfig &config)
{
    auto fail = [](const std::string &what) { throw ConfigError(0, "invalid configuration: " + what); };
    try {
        validate_background(config.background);
        validate_dissipation(config.dissipation);
        validate_grid(PeriodicGrid{config.grid.n_points, config.grid.length, 0.0}, 16);
        validate_grid(PeriodicGrid{config.soliton.n_points, config.soliton.length, 0.0}, 8);
    } catch (const Error &e) {
        fail(e.what());
    }
    const auto &s = config.soliton;
    if (!(s.b > 0.0) || !(s.mass > 0.0) || !(s.hbar > 0.0)) {
        fail("soliton b, mass and hbar must be positive");
    }
    if (!(s.transits > 0.0) || !(s.dt >= 0.0) || !std::isfinite(s.d)) {
        fail("soliton transits must be positive, dt non-negative and d finite");
    }
    if (s.k_index == 0 || std::abs(s.k_index) >= static_cast<int>(s.n_points / 2)) {
        fail("soliton.k_index must be nonzero and below n_points/2 in magnitude");
    }
    const auto &sc = config.scan;
    if (!(sc.k_min > 0.0) || !(sc.k_max >= sc.k_min) || sc.k_count == 0) {
        fail("scan needs 0 < k_min <= k_max and k_count >= 1");
    }
    if (sc.k_index < 1 || sc.k_index >= static_cast<int>(config.grid.n_points / 2)) {
        fail("scan.k_index must lie in [1, n_points/2)");
    }
    if (!(sc.periods > 0.0) || !(sc.samples_per_period > 0.0) || !std::isfinite(sc.amplitude)) {
        fail("scan periods and samples_per_period must be positive, amplitude finite");
    }
}

} // namespace qmhd
