#pragma once

#include <cstddef>
#include <vector>

namespace soliton {

// Rotationally symmetric metric  dr^2 + phi(r)^2 g_{S^{n-1}}  sampled on an
// increasing arclength grid, together with the soliton potential f.
//
// Axis-regular profiles have r[0] == 0, phi(0) == 0 and phi'(0) == 1; a grid
// that starts away from r = 0 describes an annular piece and skips the axis
// checks. Closed-form constructors fill the derivative arrays analytically;
// differentiate() fills them by second-order centered differences instead.
struct RadialProfile {
    int n = 3;                   // manifold dimension, >= 2
    std::vector<double> r;       // strictly increasing
    std::vector<double> phi;     // warp, > 0 for r > 0
    std::vector<double> phi_d1;  // phi'
    std::vector<double> phi_d2;  // phi''
    std::vector<double> f;       // potential
    std::vector<double> f_d1;    // f'

    std::size_t size() const { return r.size(); }
    bool touches_axis() const { return !r.empty() && r.front() == 0.0; }

    // Throws std::invalid_argument on: non-monotone grid, phi <= 0 off the
    // axis, missing axis regularity (phi(0) != 0 or phi'(0) != 1 beyond tol).
    void validate(double axis_tol = 1e-6) const;
};

// Copy of `p` whose derivative arrays are recomputed from the phi/f samples
// by centered differences (parity ghosts across r = 0 for axis-regular
// profiles: phi odd, f even). The independent check path used by the
// verification module.
RadialProfile differentiate(const RadialProfile& p);

} // namespace soliton
