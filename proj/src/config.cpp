#include "soliton/config.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace soliton {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct NumericKey {
    double lo, hi;
    bool lo_open = false, hi_open = false;
    std::function<void(RunConfig&, double)> set;
};

struct KeyTable {
    std::map<std::string, NumericKey> numeric;
    std::map<std::string, std::function<void(RunConfig&, const std::string&)>> text;
};

KeyTable table_for(const std::string& command) {
    KeyTable t;
    auto num = [&](const std::string& key, double lo, double hi, auto setter, bool lo_open = false,
                   bool hi_open = false) {
        t.numeric[key] = NumericKey{lo, hi, lo_open, hi_open, setter};
    };
    num("seed", 0, 1.8e19, [](RunConfig& c, double v) { c.seed = static_cast<std::uint64_t>(v); });
    if (command == "cigar") {
        num("r_max", 0, 1e4, [](RunConfig& c, double v) { c.r_max = v; }, true);
        num("step", 0, 0.1, [](RunConfig& c, double v) { c.step = v; }, true);
    } else if (command == "bryant") {
        num("n", 3, 8, [](RunConfig& c, double v) { c.dim = static_cast<int>(v); });
        num("r_max", 0, 5000, [](RunConfig& c, double v) { c.r_max = v; }, true);
        num("step", 0, 0.01, [](RunConfig& c, double v) { c.step = v; }, true);
        num("bracket_lo", -10, 0, [](RunConfig& c, double v) { c.bracket_lo = v; }, false, true);
        num("bracket_hi", -10, 0, [](RunConfig& c, double v) { c.bracket_hi = v; }, false, true);
    } else if (command == "surface-flow") {
        num("i", 0, 64, [](RunConfig& c, double v) { c.i = v; }, true);
        num("nodes", 64, 8192, [](RunConfig& c, double v) { c.nodes = static_cast<int>(v); });
        num("stop_roundness", 1, 2, [](RunConfig& c, double v) { c.stop_roundness = v; }, true);
        num("area_floor", 0, 0.5, [](RunConfig& c, double v) { c.area_floor = v; }, true);
        num("cap_fraction", 0.05, 0.85, [](RunConfig& c, double v) { c.cap_fraction = v; });
    } else if (command == "cone-angle") {
        num("s_max", 1, 1e6, [](RunConfig& c, double v) { c.s_max = v; });
        num("samples", 4, 4096, [](RunConfig& c, double v) { c.samples = static_cast<int>(v); });
        t.text["model"] = [](RunConfig& c, const std::string& v) {
            if (v != "rxcigar" && v != "bryant" && v != "cigar2d")
                throw std::invalid_argument("model must be rxcigar, bryant or cigar2d");
            c.model = v;
        };
    } else if (command == "verify") {
        num("s_max", 1, 1e6, [](RunConfig& c, double v) { c.s_max = v; });
        num("stations", 8, 10000, [](RunConfig& c, double v) { c.stations = static_cast<int>(v); });
        t.text["model"] = [](RunConfig& c, const std::string& v) {
            if (v != "rxcigar" && v != "bryant" && v != "flat")
                throw std::invalid_argument("model must be rxcigar, bryant or flat");
            c.model = v;
        };
    } else if (command == "wing") {
        num("alpha0", 0, kPi, [](RunConfig& c, double v) { c.alpha0 = v; }, true, true);
        num("nu", 65, 1025, [](RunConfig& c, double v) { c.wing_nu = static_cast<int>(v); });
        num("nv", 33, 513, [](RunConfig& c, double v) { c.wing_nv = static_cast<int>(v); });
        num("spacing", 0.01, 1.0, [](RunConfig& c, double v) { c.wing_spacing = v; });
        num("newton_tol", 1e-14, 1e-2, [](RunConfig& c, double v) { c.newton_tol = v; });
        num("max_newton", 1, 200, [](RunConfig& c, double v) { c.max_newton = static_cast<int>(v); });
    } else {
        throw std::invalid_argument("unknown command '" + command + "'");
    }
    return t;
}

RunConfig defaults_for(const std::string& command) {
    RunConfig c;
    c.command = command;
    if (command == "cigar") {
        c.r_max = 50.0;
        c.step = 1e-3;
    } else if (command == "bryant") {
        c.r_max = 100.0;
        c.step = 1e-4;
    } else if (command == "verify") {
        c.model = "rxcigar";
        c.s_max = 30.0;
    }
    return c;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& command) {
    RunConfig cfg = defaults_for(command);
    const KeyTable table = table_for(command);

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": expected key = value");

        if (auto it = table.text.find(key); it != table.text.end()) {
            try {
                it->second(cfg, value);
            } catch (const std::exception& e) {
                throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
            }
            continue;
        }
        const auto it = table.numeric.find(key);
        if (it == table.numeric.end())
            throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key '" +
                                        key + "'");
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": malformed number for '" + key + "'");
        const NumericKey& nk = it->second;
        const bool lo_ok = nk.lo_open ? v > nk.lo : v >= nk.lo;
        const bool hi_ok = nk.hi_open ? v < nk.hi : v <= nk.hi;
        if (!lo_ok || !hi_ok)
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": value out of range for '" + key + "'");
        nk.set(cfg, v);
    }
    return cfg;
}

} // namespace soliton
