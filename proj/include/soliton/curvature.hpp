#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "soliton/radial_profile.hpp"
#include "soliton/warped_metric.hpp"

namespace soliton {

struct CurvatureExtreme {
    double value = 0.0;
    std::size_t node = 0;    // grid index of the extreme
    std::string family;      // which 2-plane family attains it
};

// Pointwise curvature data of a symmetric metric. ricci_eigs holds n
// ascending eigenvalues per node (node-major); scalar equals their sum.
// Per-family sectional curvatures are kept for diagnostics; families that do
// not exist for the input (e.g. fiber-fiber when the fiber is a circle) are
// left empty.
struct CurvatureReport {
    int n = 0;
    std::size_t nodes = 0;
    std::vector<double> scalar;
    std::vector<double> ricci_eigs; // nodes * n, ascending within a node
    CurvatureExtreme sec_min, sec_max;

    std::vector<double> sec_radial;     // profile: planes containing d/dr
    std::vector<double> sec_spherical;  // profile: planes tangent to the sphere
    std::vector<double> sec_base;       // warped: Gauss curvature of g_N
    std::vector<double> sec_mixed_lo;   // warped: min mixed curvature -hess(phi)/phi
    std::vector<double> sec_mixed_hi;   // warped: max mixed curvature
    std::vector<double> sec_fiber;      // warped: fiber-fiber, fiber_dim >= 2 only

    double ricci(std::size_t node, int which) const {
        return ricci_eigs[node * static_cast<std::size_t>(n) + static_cast<std::size_t>(which)];
    }
};

// Curvature of a radial profile from its stored derivatives. At r = 0 the
// 0/0 limits are filled by even extrapolation from the first interior nodes.
CurvatureReport radial_curvature(const RadialProfile& p);

// Curvature of a warped half-plane metric with an S^{fiber_dim} fiber
// (fiber_dim = n - 2 >= 1). Base derivatives by centered differences;
// off-axis values are computed directly and the axis row is filled by even
// extrapolation in v.
CurvatureReport warped_curvature(const WarpedHalfPlaneMetric& m, int fiber_dim);

// Worst violation of hess(phi) <= 0.
struct ConcavityReport {
    double max_positive = 0.0; // largest positive Hessian eigenvalue found, 0 if concave
    std::size_t node = 0;
    bool concave(double tol = 0.0) const { return max_positive <= tol; }
};

ConcavityReport concavity_check(const RadialProfile& p);
ConcavityReport concavity_check(const WarpedHalfPlaneMetric& m);

// Pointwise |grad f| via the inverse metric. The profile overload uses the
// stored f'; the grid overload differences f and may be given any scalar
// field sampled on the metric's lattice.
std::vector<double> gradient_norm(const RadialProfile& p);
std::vector<double> gradient_norm(const WarpedHalfPlaneMetric& m, const std::vector<double>& field);

} // namespace soliton
