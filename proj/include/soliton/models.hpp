#pragma once

#include <cstddef>

#include "soliton/flow.hpp"
#include "soliton/radial_profile.hpp"
#include "soliton/warped_metric.hpp"

namespace soliton {

// Closed-form cigar soliton quantities, normalized so the scalar curvature at
// the tip equals kappa:
//   phi(rho) = (2/sqrt(kappa)) tanh(sqrt(kappa) rho / 2)
//   f(rho)   = 2 ln cosh(sqrt(kappa) rho / 2)
// so that Ric = hess f holds exactly and R + |grad f|^2 = kappa.
namespace cigar {
double phi(double rho, double kappa = 1.0);
double phi_d1(double rho, double kappa = 1.0);
double phi_d2(double rho, double kappa = 1.0);
double f(double rho, double kappa = 1.0);
double f_d1(double rho, double kappa = 1.0);
double gauss(double rho, double kappa = 1.0);  // sectional curvature K
double scalar(double rho, double kappa = 1.0); // R = 2K
} // namespace cigar

// Sampled cigar profile (n = 2) on [0, r_max] with analytic derivatives.
RadialProfile cigar_profile(double r_max, double step, double kappa = 1.0);

// Bryant soliton shooting. The ODE system in (phi, phi', f') is integrated
// from a series start at the axis; the shooting parameter is the cubic warp
// coefficient c3 in phi = r + c3 r^3 + ..., bracketed so the tip scalar
// curvature discrepancy R(0) - 1 changes sign.
struct ShootingConfig {
    int n = 3;                 // dimension >= 3
    double r_max = 100.0;      // domain length
    double step = 1e-4;        // fixed RK4 step
    std::size_t store_every = 10;
    double bracket_lo = -0.06; // bracket for c3
    double bracket_hi = -0.005;
    double tol = 1e-14;        // bisection tolerance on the discrepancy
    double series_start = 1e-2;
};

RadialProfile bryant_shoot(const ShootingConfig& config);

// Product of a 2d profile with a line: base = flat (u, rho) strip,
// phi(u, rho) = phi_profile(rho), f(u, rho) = f_profile(rho).
WarpedHalfPlaneMetric product_with_line(const RadialProfile& profile2d, double half_length,
                                        std::size_t nu);

// A rotationally symmetric profile (n = 3) rewritten over the quotient
// half-plane in Cartesian-like coordinates u = r cos(beta), v = r sin(beta):
// base g_N from dr^2 + phi^2 dbeta^2, warp = phi(r) sin(beta) toward the
// fiber. Used to exercise the warped-grid operations on shooting output.
WarpedHalfPlaneMetric profile_to_half_plane(const RadialProfile& profile3d, double half_length,
                                            double height, double spacing);

// Surface of revolution (sin(r)/i, r), r in [0, pi]: exact arclength
// sampling of the warp b and its analytic Gauss curvature
// K = (1 + cos^2(r)/i^2)^{-2}. The poles of this surface are conical
// (|b'| = 1/sqrt(1+i^2) there); the state records the slopes and is meant
// for curvature measurements, not as flow initial data.
FlowState revolution_surface(double i, std::size_t nodes);

// Flow-ready variant: the pole cones are replaced by monotone slope blends
// over an arclength cap (|b'| = 1 at the poles, curvature positive
// throughout) and the metric is rescaled so min K = 1.
FlowState smoothed_revolution_surface(double i, std::size_t nodes, double cap_fraction = 0.35);

} // namespace soliton
