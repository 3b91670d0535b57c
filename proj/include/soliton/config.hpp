#pragma once

#include <cstdint>
#include <string>

namespace soliton {

// Plain key = value configuration, one pair per line, '#' comments. Unknown
// keys, malformed lines and out-of-range values are rejected with the line
// number. Defaults depend on the command.
struct RunConfig {
    std::string command;       // cigar | bryant | surface-flow | cone-angle | verify | wing
    std::string out_dir = "out";
    std::uint64_t seed = 0;

    // cigar
    double r_max = 50.0;
    double step = 1e-3;

    // bryant
    int dim = 3;
    double bracket_lo = -0.06;
    double bracket_hi = -0.005;

    // surface-flow
    double i = 2.0;
    int nodes = 256;
    double stop_roundness = 1.05;
    double area_floor = 1e-3;
    double cap_fraction = 0.5;

    // cone-angle / verify
    std::string model = "rxcigar"; // rxcigar | bryant | cigar2d | flat
    double s_max = 1000.0;
    int samples = 24;
    int stations = 100;

    // wing
    double alpha0 = 2.5;
    int wing_nu = 257;
    int wing_nv = 129;
    double wing_spacing = 0.14;
    double newton_tol = 1e-8;
    int max_newton = 20;
};

// Applies per-command defaults, then overrides from the text. Throws
// std::invalid_argument with a "line N:" prefix on bad input.
RunConfig parse_config(const std::string& text, const std::string& command);

} // namespace soliton
