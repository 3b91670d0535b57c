#pragma once

#include <cstddef>
#include <vector>

namespace soliton {

// Z2 x O(n-1)-symmetric metric away from the axis, reduced to the quotient
// half-plane:  g = g_N + phi^2 g_{S^{n-2}}  with g_N a 2d metric in the chart
// (u, v), u in [-U, U] along the axis direction and v in [0, V] transverse.
// The row v = 0 is the axis (phi = 0 there); all fields are even under
// u -> -u except g_uv which is odd, and across the axis phi and g_uv extend
// oddly while the remaining fields extend evenly.
struct WarpedHalfPlaneMetric {
    std::size_t nu = 0, nv = 0; // lattice extents
    double u0 = 0.0;            // u of column 0
    double hu = 0.0, hv = 0.0;  // spacings

    std::vector<double> g_uu, g_uv, g_vv; // base metric g_N
    std::vector<double> phi;              // warp, 0 exactly on the axis row
    std::vector<double> f;                // potential

    std::size_t idx(std::size_t j, std::size_t k) const { return k * nu + j; }
    double u(std::size_t j) const { return u0 + hu * static_cast<double>(j); }
    double v(std::size_t k) const { return hv * static_cast<double>(k); }
    std::size_t size() const { return nu * nv; }

    // axis_mask: nodes on the geodesic Gamma.
    bool on_axis(std::size_t k) const { return k == 0; }

    // Throws std::invalid_argument on: indefinite base metric, phi <= 0 off
    // the axis, nonzero phi on the axis row.
    void validate() const;
};

} // namespace soliton
