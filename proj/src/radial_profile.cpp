#include "soliton/radial_profile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace soliton {

void RadialProfile::validate(double axis_tol) const {
    const std::size_t m = size();
    if (m < 3) throw std::invalid_argument("profile needs at least 3 samples");
    if (phi.size() != m || f.size() != m)
        throw std::invalid_argument("profile field sizes disagree with grid");
    if (n < 2) throw std::invalid_argument("profile dimension must be >= 2");
    for (std::size_t k = 1; k < m; ++k) {
        if (!(r[k] > r[k - 1]))
            throw std::invalid_argument("profile grid not strictly increasing at index " +
                                        std::to_string(k));
    }
    const std::size_t first_off_axis = touches_axis() ? 1 : 0;
    for (std::size_t k = first_off_axis; k < m; ++k) {
        if (!(phi[k] > 0.0))
            throw std::invalid_argument("warp must be positive off the axis (index " +
                                        std::to_string(k) + ")");
    }
    if (touches_axis()) {
        if (std::abs(phi[0]) > axis_tol)
            throw std::invalid_argument("axis singularity: phi(0) != 0");
        // Slope from the first interval if no stored derivative.
        const double slope = phi_d1.size() == m ? phi_d1[0] : (phi[1] - phi[0]) / (r[1] - r[0]);
        if (std::abs(slope - 1.0) > std::max(axis_tol, 10.0 * (r[1] - r[0]) * (r[1] - r[0])))
            throw std::invalid_argument("axis singularity: phi'(0) != 1");
    }
}

namespace {

// Second-order first/second derivative of samples y on a uniform grid.
// parity: +1/-1 extends y evenly/oddly across the left endpoint when the
// profile touches the axis; otherwise one-sided stencils are used there.
void diff_uniform(const std::vector<double>& y, double h, bool axis, int parity,
                  std::vector<double>& d1, std::vector<double>& d2) {
    const std::size_t m = y.size();
    d1.assign(m, 0.0);
    d2.assign(m, 0.0);
    auto at = [&](std::ptrdiff_t k) -> double {
        if (k < 0) return axis ? parity * y[static_cast<std::size_t>(-k)] : 0.0;
        return y[static_cast<std::size_t>(k)];
    };
    for (std::size_t k = 0; k < m; ++k) {
        const bool left_edge = (k == 0 && !axis);
        const bool right_edge = (k + 1 == m);
        if (left_edge) {
            d1[k] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
            d2[k] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (h * h);
        } else if (right_edge) {
            d1[k] = (3.0 * y[m - 1] - 4.0 * y[m - 2] + y[m - 3]) / (2.0 * h);
            d2[k] = (2.0 * y[m - 1] - 5.0 * y[m - 2] + 4.0 * y[m - 3] - y[m - 4]) / (h * h);
        } else {
            const auto kk = static_cast<std::ptrdiff_t>(k);
            d1[k] = (at(kk + 1) - at(kk - 1)) / (2.0 * h);
            d2[k] = (at(kk + 1) - 2.0 * y[k] + at(kk - 1)) / (h * h);
        }
    }
}

} // namespace

RadialProfile differentiate(const RadialProfile& p) {
    const std::size_t m = p.size();
    if (m < 4) throw std::invalid_argument("differentiate: too few samples");
    const double h = p.r[1] - p.r[0];
    for (std::size_t k = 1; k < m; ++k) {
        if (std::abs((p.r[k] - p.r[k - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("differentiate: grid must be uniform");
    }
    RadialProfile out = p;
    const bool axis = p.touches_axis();
    std::vector<double> f_d2_unused;
    diff_uniform(p.phi, h, axis, -1, out.phi_d1, out.phi_d2);
    diff_uniform(p.f, h, axis, +1, out.f_d1, f_d2_unused);
    return out;
}

} // namespace soliton
