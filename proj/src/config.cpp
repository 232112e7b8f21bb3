#include "mcb/config.hpp"

#include "mcb/path_record.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mcb {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

[[noreturn]] void field_error(const ConfigEntry& e, const std::string& what) {
    throw ConfigError("line " + std::to_string(e.line) + ": [" + e.section + "]." + e.key + ": " + what + ", got '" +
                      e.value + "'");
}

double to_double(const std::string& s, bool& ok) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    ok = res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(v);
    return v;
}

double number(const ConfigEntry& e) {
    bool ok = false;
    const double v = to_double(e.value, ok);
    if (!ok) field_error(e, "expected a number");
    return v;
}

double positive(const ConfigEntry& e) {
    const double v = number(e);
    if (!(v > 0.0)) field_error(e, "expected a positive number");
    return v;
}

double nonnegative(const ConfigEntry& e) {
    const double v = number(e);
    if (!(v >= 0.0)) field_error(e, "expected a nonnegative number");
    return v;
}

std::uint64_t unsigned_int(const ConfigEntry& e) {
    std::uint64_t v = 0;
    const auto& s = e.value;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) field_error(e, "expected a nonnegative integer");
    return v;
}

bool boolean(const ConfigEntry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    field_error(e, "expected true or false");
}

template <class T>
T choice(const ConfigEntry& e, const std::vector<std::pair<std::string, T>>& options) {
    std::string names;
    for (const auto& [name, v] : options) {
        if (e.value == name) return v;
        names += (names.empty() ? "" : " | ") + name;
    }
    field_error(e, "expected one of " + names);
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

const char* to_string(Process p) {
    switch (p) {
        case Process::McbInfinity: return "mcb_infinity";
        case Process::McbGamma: return "mcb_gamma";
        case Process::LimitDiffusion: return "limit_diffusion";
        case Process::YTheta: return "y_theta";
    }
    return "?";
}

const char* to_string(SuiteKind s) {
    switch (s) {
        case SuiteKind::None: return "none";
        case SuiteKind::Theorem0: return "theorem0";
        case SuiteKind::Theorem1: return "theorem1";
        case SuiteKind::Theorem2: return "theorem2";
        case SuiteKind::SupMoment: return "sup_moment";
    }
    return "?";
}

namespace {

const char* to_string(InitialKind k) {
    switch (k) {
        case InitialKind::HalfHalf: return "half_half";
        case InitialKind::List: return "list";
        case InitialKind::Stationary: return "stationary";
    }
    return "?";
}

}  // namespace

BoundaryPoint parse_boundary_point(const std::string& text) {
    const std::string t = trim(text);
    if (t == "O" || t == "0") return BoundaryPoint::origin();
    if (t.size() > 3 && (t.rfind("T1:", 0) == 0 || t.rfind("T2:", 0) == 0)) {
        bool ok = false;
        const double m = to_double(t.substr(3), ok);
        if (ok && m >= 0.0) return t[1] == '1' ? BoundaryPoint::type1(m) : BoundaryPoint::type2(m);
    }
    throw ConfigError("bad boundary point '" + text + "' (expected T1:<m>, T2:<m> or O)");
}

std::string format_boundary_point(const BoundaryPoint& p) {
    if (p.is_origin()) return "O";
    return (p.type() == 1 ? "T1:" : "T2:") + fmt(p.magnitude());
}

std::vector<ConfigEntry> parse_config_text(const std::string& text) {
    std::vector<ConfigEntry> out;
    std::set<std::pair<std::string, std::string>> seen;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                throw ConfigError("line " + std::to_string(line) + ": malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value, got '" + s + "'");
        if (section.empty())
            throw ConfigError("line " + std::to_string(line) + ": key outside of any [section]");
        ConfigEntry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
        if (e.key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
        if (!seen.insert({e.section, e.key}).second)
            throw ConfigError("line " + std::to_string(line) + ": [" + e.section + "]." + e.key + " given twice");
        out.push_back(std::move(e));
    }
    return out;
}

ExperimentConfig config_from_entries(const std::vector<ConfigEntry>& entries) {
    ExperimentConfig c;
    const ConfigEntry* gamma_entry = nullptr;
    const ConfigEntry* delta_entry = nullptr;
    for (const auto& e : entries) {
        const std::string path = e.section + "." + e.key;
        if (path == "run.process") {
            c.process = choice<Process>(e, {{"mcb_infinity", Process::McbInfinity},
                                            {"mcb_gamma", Process::McbGamma},
                                            {"limit_diffusion", Process::LimitDiffusion},
                                            {"y_theta", Process::YTheta}});
        } else if (path == "run.n") {
            c.n = unsigned_int(e);
            if (c.n == 0) field_error(e, "expected at least one site");
        } else if (path == "run.gamma") {
            c.gamma = positive(e);
            gamma_entry = &e;
        } else if (path == "run.scheme") {
            c.scheme = choice<std::string>(e, {{"harmonic_split", "harmonic_split"},
                                               {"tau_leap", "tau_leap"},
                                               {"split_exit", "split_exit"},
                                               {"euler_clamp", "euler_clamp"}});
        } else if (path == "run.h") {
            c.h = positive(e);
        } else if (path == "run.delta") {
            c.delta = positive(e);
            if (*c.delta >= 1.0) field_error(e, "expected a window in (0, 1)");
            delta_entry = &e;
        } else if (path == "run.horizon") {
            c.horizon = nonnegative(e);
        } else if (path == "run.horizon_units") {
            c.horizon_rescaled = choice<bool>(e, {{"model", false}, {"rescaled", true}});
        } else if (path == "run.replicas") {
            c.replicas = unsigned_int(e);
            if (c.replicas == 0) field_error(e, "expected at least one replica");
        } else if (path == "run.seed") {
            c.seed = unsigned_int(e);
        } else if (path == "run.record_every") {
            c.record_every = unsigned_int(e);
            if (c.record_every == 0) field_error(e, "expected a positive integer");
        } else if (path == "initial.kind") {
            c.initial = choice<InitialKind>(e, {{"half_half", InitialKind::HalfHalf},
                                                {"list", InitialKind::List},
                                                {"stationary", InitialKind::Stationary}});
        } else if (path == "initial.m1") {
            c.m1 = nonnegative(e);
        } else if (path == "initial.m2") {
            c.m2 = nonnegative(e);
        } else if (path == "initial.sites") {
            c.sites.clear();
            try {
                for (const auto& s : split_list(e.value)) c.sites.push_back(parse_boundary_point(s));
            } catch (const ConfigError& err) {
                field_error(e, err.what());
            }
            if (c.sites.empty()) field_error(e, "expected at least one site");
        } else if (path == "initial.theta") {
            const auto parts = split_list(e.value);
            bool ok1 = false, ok2 = false;
            if (parts.size() == 2) c.theta = {to_double(parts[0], ok1), to_double(parts[1], ok2)};
            if (!ok1 || !ok2 || c.theta.x1 < 0.0 || c.theta.x2 < 0.0)
                field_error(e, "expected two nonnegative numbers");
        } else if (path == "suite.name") {
            c.suite = choice<SuiteKind>(e, {{"none", SuiteKind::None},
                                            {"theorem0", SuiteKind::Theorem0},
                                            {"theorem1", SuiteKind::Theorem1},
                                            {"theorem2", SuiteKind::Theorem2},
                                            {"sup_moment", SuiteKind::SupMoment}});
        } else if (path == "suite.n_grid") {
            c.n_grid.clear();
            for (const auto& s : split_list(e.value)) {
                ConfigEntry one = e;
                one.value = s;
                c.n_grid.push_back(unsigned_int(one));
            }
            if (c.n_grid.empty()) field_error(e, "expected a list of N values");
        } else if (path == "suite.gamma_grid") {
            c.gamma_grid.clear();
            for (const auto& s : split_list(e.value)) {
                ConfigEntry one = e;
                one.value = s;
                c.gamma_grid.push_back(positive(one));
            }
            if (c.gamma_grid.empty()) field_error(e, "expected a list of rates");
        } else if (path == "duality.t") {
            c.duality_t = nonnegative(e);
        } else if (path == "duality.s") {
            c.duality_s = nonnegative(e);
        } else if (path == "duality.marks") {
            // site@point, e.g. 0@T1:1 9@T2:0.25
            c.marks.clear();
            for (const auto& s : split_list(e.value)) {
                const auto at = s.find('@');
                ConfigEntry one = e;
                one.value = s.substr(0, at == std::string::npos ? 0 : at);
                if (at == std::string::npos) field_error(e, "expected site@point entries");
                try {
                    c.marks.push_back({unsigned_int(one), parse_boundary_point(s.substr(at + 1))});
                } catch (const ConfigError& err) {
                    field_error(e, err.what());
                }
            }
        } else if (path == "output.dir") {
            if (e.value.empty()) field_error(e, "expected a directory");
            c.out_dir = e.value;
        } else if (path == "output.plots") {
            c.plots = boolean(e);
        } else {
            throw ConfigError("line " + std::to_string(e.line) + ": unknown field [" + e.section + "]." + e.key);
        }
    }
    try {
        validate(c);
    } catch (const ConfigError& err) {
        // Point at the offending line where there is one.
        const std::string what = err.what();
        if (gamma_entry && what.find("gamma") != std::string::npos)
            throw ConfigError("line " + std::to_string(gamma_entry->line) + ": " + what);
        if (delta_entry && what.find("delta") != std::string::npos)
            throw ConfigError("line " + std::to_string(delta_entry->line) + ": " + what);
        throw;
    }
    return c;
}

void validate(const ExperimentConfig& c) {
    const bool gamma_process = c.process == Process::McbGamma;
    if (gamma_process && !c.gamma) throw ConfigError("[run].gamma: required when [run].process = mcb_gamma");
    if (!gamma_process && c.gamma) throw ConfigError("[run].gamma: only allowed when [run].process = mcb_gamma");
    const bool tau = c.scheme == "tau_leap";
    if (tau && !c.delta) throw ConfigError("[run].delta: required when [run].scheme = tau_leap");
    if (!tau && c.delta) throw ConfigError("[run].delta: only allowed when [run].scheme = tau_leap");
    const bool infinity_scheme = c.scheme == "harmonic_split" || c.scheme == "tau_leap";
    if (c.process == Process::McbInfinity && !infinity_scheme)
        throw ConfigError("[run].scheme: mcb_infinity needs harmonic_split or tau_leap");
    if (c.process == Process::McbGamma && infinity_scheme)
        throw ConfigError("[run].scheme: mcb_gamma needs split_exit or euler_clamp");
    if (c.initial == InitialKind::List) {
        if (c.sites.empty()) throw ConfigError("[initial].sites: required when [initial].kind = list");
        if (c.sites.size() != c.n)
            throw ConfigError("[initial].sites: " + std::to_string(c.sites.size()) + " sites but [run].n = " +
                              std::to_string(c.n));
    }
    if (c.horizon_rescaled && c.n < 3) throw ConfigError("[run].horizon_units: rescaled time needs N >= 3");
    for (std::size_t i = 1; i < c.n_grid.size(); ++i)
        if (c.n_grid[i] <= c.n_grid[i - 1]) throw ConfigError("[suite].n_grid: must be increasing");
    for (std::size_t i = 1; i < c.gamma_grid.size(); ++i)
        if (c.gamma_grid[i] <= c.gamma_grid[i - 1]) throw ConfigError("[suite].gamma_grid: must be increasing");
    for (std::size_t n : c.n_grid)
        if (n < 4) throw ConfigError("[suite].n_grid: every N must be at least 4");
    for (const auto& [site, y] : c.marks)
        if (site >= c.n) throw ConfigError("[duality].marks: site " + std::to_string(site) + " out of range");
}

ExperimentConfig parse_experiment_config(const std::string& text) { return config_from_entries(parse_config_text(text)); }

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string canonical_text(const ExperimentConfig& c) {
    std::ostringstream os;
    auto list = [](const auto& xs, auto f) {
        std::string s;
        for (const auto& x : xs) s += (s.empty() ? "" : " ") + f(x);
        return s;
    };
    os << "[duality]\n";
    os << "marks = "
       << list(c.marks, [](const auto& m) { return std::to_string(m.first) + "@" + format_boundary_point(m.second); })
       << "\n";
    os << "s = " << fmt(c.duality_s) << "\n";
    os << "t = " << fmt(c.duality_t) << "\n";
    os << "[initial]\n";
    os << "kind = " << to_string(c.initial) << "\n";
    os << "m1 = " << fmt(c.m1) << "\n";
    os << "m2 = " << fmt(c.m2) << "\n";
    os << "sites = " << list(c.sites, format_boundary_point) << "\n";
    os << "theta = " << fmt(c.theta.x1) << " " << fmt(c.theta.x2) << "\n";
    os << "[run]\n";
    os << "delta = " << (c.delta ? fmt(*c.delta) : "") << "\n";
    os << "gamma = " << (c.gamma ? fmt(*c.gamma) : "") << "\n";
    os << "h = " << fmt(c.h) << "\n";
    os << "horizon = " << fmt(c.horizon) << "\n";
    os << "horizon_units = " << (c.horizon_rescaled ? "rescaled" : "model") << "\n";
    os << "n = " << c.n << "\n";
    os << "process = " << to_string(c.process) << "\n";
    os << "record_every = " << c.record_every << "\n";
    os << "replicas = " << c.replicas << "\n";
    os << "scheme = " << c.scheme << "\n";
    os << "[suite]\n";
    os << "gamma_grid = " << list(c.gamma_grid, fmt) << "\n";
    os << "n_grid = " << list(c.n_grid, [](std::size_t n) { return std::to_string(n); }) << "\n";
    os << "name = " << to_string(c.suite) << "\n";
    return os.str();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(canonical_text(c)); }

}  // namespace mcb
