#include "soliton/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soliton/parallel.hpp"

namespace soliton {

namespace {

// Even extrapolation to r = 0 of an even function of r, from three nodes
// (Lagrange in r^2).
double even_extrapolate(double x1, double q1, double x2, double q2, double x3, double q3) {
    const double a = x1 * x1, b = x2 * x2, c = x3 * x3;
    const double l1 = b * c / ((a - b) * (a - c));
    const double l2 = a * c / ((b - a) * (b - c));
    const double l3 = a * b / ((c - a) * (c - b));
    return l1 * q1 + l2 * q2 + l3 * q3;
}

void track_extreme(CurvatureReport& rep, double value, std::size_t node, const char* family) {
    if (rep.sec_min.family.empty() || value < rep.sec_min.value)
        rep.sec_min = {value, node, family};
    if (rep.sec_max.family.empty() || value > rep.sec_max.value)
        rep.sec_max = {value, node, family};
}

} // namespace

CurvatureReport radial_curvature(const RadialProfile& p) {
    p.validate();
    if (p.phi_d1.size() != p.size() || p.phi_d2.size() != p.size())
        throw std::invalid_argument("radial_curvature: derivatives not populated");

    const std::size_t m = p.size();
    const int n = p.n;
    const double dn = static_cast<double>(n);

    CurvatureReport rep;
    rep.n = n;
    rep.nodes = m;
    rep.scalar.assign(m, 0.0);
    rep.ricci_eigs.assign(m * static_cast<std::size_t>(n), 0.0);
    rep.sec_radial.assign(m, 0.0);
    if (n >= 3) rep.sec_spherical.assign(m, 0.0);

    const std::size_t k0 = p.touches_axis() ? 1 : 0;
    parallel_for(static_cast<std::ptrdiff_t>(m - k0), [&](std::ptrdiff_t i) {
        const std::size_t k = k0 + static_cast<std::size_t>(i);
        const double phi = p.phi[k], d1 = p.phi_d1[k], d2 = p.phi_d2[k];
        rep.sec_radial[k] = -d2 / phi;
        if (n >= 3) rep.sec_spherical[k] = (1.0 - d1 * d1) / (phi * phi);
    });
    if (p.touches_axis()) {
        // Regular limit: both families tend to -phi'''(0).
        rep.sec_radial[0] = even_extrapolate(p.r[1], rep.sec_radial[1], p.r[2], rep.sec_radial[2],
                                             p.r[3], rep.sec_radial[3]);
        if (n >= 3)
            rep.sec_spherical[0] =
                even_extrapolate(p.r[1], rep.sec_spherical[1], p.r[2], rep.sec_spherical[2],
                                 p.r[3], rep.sec_spherical[3]);
    }

    parallel_for(static_cast<std::ptrdiff_t>(m), [&](std::ptrdiff_t i) {
        const auto k = static_cast<std::size_t>(i);
        const double krad = rep.sec_radial[k];
        double lam_rad, lam_sph;
        if (n == 2) {
            lam_rad = lam_sph = krad; // Ric = K g in 2d
            rep.scalar[k] = 2.0 * krad;
        } else {
            const double ksph = rep.sec_spherical[k];
            lam_rad = (dn - 1.0) * krad;
            lam_sph = krad + (dn - 2.0) * ksph;
            rep.scalar[k] = 2.0 * (dn - 1.0) * krad + (dn - 1.0) * (dn - 2.0) * ksph;
        }
        double* eig = &rep.ricci_eigs[k * static_cast<std::size_t>(n)];
        eig[0] = lam_rad;
        for (int q = 1; q < n; ++q) eig[q] = lam_sph;
        std::sort(eig, eig + n);
    });

    for (std::size_t k = 0; k < m; ++k) {
        track_extreme(rep, rep.sec_radial[k], k, "radial");
        if (n >= 3) track_extreme(rep, rep.sec_spherical[k], k, "spherical");
    }
    return rep;
}

ConcavityReport concavity_check(const RadialProfile& p) {
    const RadialProfile* q = &p;
    RadialProfile filled;
    if (p.phi_d2.size() != p.size()) {
        filled = differentiate(p);
        q = &filled;
    }
    ConcavityReport rep;
    for (std::size_t k = 0; k < q->size(); ++k) {
        if (q->phi_d2[k] > rep.max_positive) {
            rep.max_positive = q->phi_d2[k];
            rep.node = k;
        }
    }
    return rep;
}

std::vector<double> gradient_norm(const RadialProfile& p) {
    if (p.f_d1.size() != p.size())
        throw std::invalid_argument("gradient_norm: f' not populated");
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = std::abs(p.f_d1[k]);
    return out;
}

} // namespace soliton
