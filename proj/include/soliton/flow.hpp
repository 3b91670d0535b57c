#pragma once

#include <cstddef>
#include <vector>

namespace soliton {

// Rotationally symmetric metric on a topological 2-sphere at one flow time:
// ds^2 + b(s)^2 dtheta^2 with s arclength along the meridian. b vanishes at
// both poles; for a smooth closed surface |b'| = 1 there.
struct FlowState {
    double t = 0.0;
    std::vector<double> s; // increasing arclength positions, s.front() == 0
    std::vector<double> b; // warp, 0 at both ends, > 0 between

    // Analytic Gauss curvature samples when the state comes from a
    // closed-form constructor; cleared by flow steps.
    std::vector<double> K_analytic;

    double pole_slope_left = 1.0;
    double pole_slope_right = -1.0;

    std::size_t size() const { return s.size(); }
    double length() const { return s.back(); }
};

// Gauss curvature at every node: K_analytic if present, otherwise centered
// differences with odd extension of b across the poles (pole values from an
// odd cubic fit).
std::vector<double> flow_curvature(const FlowState& state);

double flow_area(const FlowState& state); // 2 pi * trapezoid of b ds

double roundness(const FlowState& state); // K_max / K_min, >= 1

struct StepResult {
    bool accepted = false;
    double suggested_dt = 0.0; // on rejection, a dt expected to be stable
    FlowState next;
};

// One explicit step of 2d Ricci flow: each node shrinks by the factor
// (1 - 2 K dt) in the metric sense (exact for a round sphere), arclength
// positions are updated accordingly, and the grid is resampled onto a
// uniform arclength lattice when it drifts too far from uniform.
// Rejects the step when the factor loses positivity.
StepResult ricci_flow_step(const FlowState& state, double dt);

struct FlowTrajectory {
    std::vector<double> t, K_min, K_max, area, roundness, r_norm;
    double extinction_estimate = 0.0; // T_i from the linear area law
    double area_rate_min = 0.0;       // min over all steps of -dA/dt
    double area_rate_max = 0.0;       // max over all steps of -dA/dt
    std::size_t steps_taken = 0;
    bool reached_roundness = false;
};

struct FlowControl {
    double stop_roundness = 1.05;
    double area_floor_frac = 1e-3;
    double dt_safety = 0.2; // dt = dt_safety * min(ds)^2 / max(K_max, 1)
    std::size_t max_steps = 50'000'000;
    std::size_t max_records = 4000;
};

// Integrates until the roundness target or the area floor is reached,
// recording a decimated trajectory. Requires K > 0 and regular poles.
// Throws on non-convergence within the step budget.
FlowTrajectory run_flow(const FlowState& initial, const FlowControl& control);

// Normalization factor r_i(t) at the recorded samples: the pointwise minimum
// of sqrt(K_min(t)/K_min(0)) and sqrt(area(0)/area(t)); r_i(0) = 1 and the
// volume branch is active near extinction. Throws if K_min <= 0 anywhere.
std::vector<double> normalization_factor(const FlowTrajectory& traj);

} // namespace soliton
