#pragma once

#include <cstdint>
#include <vector>

#include "soliton/warped_metric.hpp"

namespace soliton {

// Truncated-domain approximation of a Z2 x O(2)-symmetric 3d steady soliton.
// The chart is the conformal image of the half plane onto a sector of opening
// angle alpha0 with a mollified corner; the far boundary carries Dirichlet
// data from the cigar-product asymptotic model bent to that angle, and the
// interior solves the gauge-fixed steady-soliton system by Newton iteration.
struct WingProblem {
    double alpha0 = 2.5;       // opening angle; (0, pi), with pi = straight product
    std::size_t nu = 257;      // full-grid columns, odd
    std::size_t nv = 129;      // rows
    double spacing = 0.14;     // lattice step of the conformal chart
    double mollify = 1.0;      // corner mollification scale
    double newton_tol = 1e-8;  // max-norm residual target
    int max_newton = 20;
    std::uint64_t seed = 0;    // used by callers for randomized spot checks

    void validate() const; // alpha0 range, odd nu, cigar-scale resolution
};

struct WingSolution {
    WarpedHalfPlaneMetric metric; // full mirrored grid
    std::vector<double> residual_history;
    bool converged = false;
    int newton_steps = 0;
    double gauge_max = 0.0; // max |W| over the interior at the solution
};

// Dirichlet/initial data: the bent cigar product evaluated on the full grid.
WarpedHalfPlaneMetric wing_initial_data(const WingProblem& problem);

// Residual of the gauge-fixed system on the full grid, packed node-major with
// 5 entries per node in the order (g_uu, g_uv, g_vv, phi, f). Boundary rows
// encode the Dirichlet data, axis rows the regularity conditions.
std::vector<double> wing_residual(const WingProblem& problem, const WarpedHalfPlaneMetric& state);

// Exact directional derivative of wing_residual (forward-mode duals).
std::vector<double> wing_jacobian_action(const WingProblem& problem,
                                         const WarpedHalfPlaneMetric& state,
                                         const std::vector<double>& delta);

// Newton iteration on the Z2-even half grid with a direct sparse solve.
// Throws on stagnation or positivity loss that step halving cannot fix.
WingSolution newton_solve(const WingProblem& problem);

struct WingReport {
    double alpha0 = 0.0;
    double R_center = 0.0;        // R(p)
    double R_edge = 0.0;          // R(Gamma(s_edge))
    double s_edge = 0.0;
    double alpha_est = 0.0;       // comparison angles from in-domain distances
    double ratio_deviation = 0.0; // | R_edge/R_center - sin^2(alpha_est/2) |
    std::vector<double> axis_s, axis_R;
    std::vector<double> probe_s, probe_dev; // dimension-reduction stations
    double min_h1h2_over_s = 0.0;
    double soliton_residual_interior = 0.0; // ungauged residual, FD route
    double gauge_max = 0.0;
};

WingReport wing_report(const WingProblem& problem, const WingSolution& solution);

// Grid geodesic distances on the base metric (16-neighbour Dijkstra).
std::vector<double> grid_distance_from(const WarpedHalfPlaneMetric& m, std::size_t j0,
                                       std::size_t k0);
std::vector<double> grid_distance_from_axis(const WarpedHalfPlaneMetric& m);

// C0 deviation of the rescaled transverse warp profile at the axis station
// nearest edge-arclength s from the unit-cigar reference.
double dimension_reduction_probe_grid(const WarpedHalfPlaneMetric& m, double station_arc,
                                      double eps);

} // namespace soliton
