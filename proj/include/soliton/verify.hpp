#pragma once

#include <string>
#include <vector>

#include "soliton/curvature.hpp"
#include "soliton/radial_profile.hpp"
#include "soliton/warped_metric.hpp"

namespace soliton {

struct IdentityReport {
    std::string name;
    double max_deviation = 0.0;
    double location = 0.0; // grid coordinate of the worst node
    double tolerance = 0.0;
    bool pass = false;
};

IdentityReport make_identity_report(std::string name, double dev, double loc, double tol);

// Max operator norm of Ric - hess f over interior nodes. All derivatives are
// recomputed from the raw phi/f samples by centered differences, so the check
// is independent of any stored analytic derivatives.
IdentityReport soliton_residual(const RadialProfile& p, double tol);
IdentityReport soliton_residual(const WarpedHalfPlaneMetric& m, int fiber_dim, double tol);

// Spread (max - min) of R + |grad f|^2 over the grid; the constant is
// estimated as the axis value. rediff recomputes derivatives from samples.
IdentityReport hamilton_identity(const RadialProfile& p, bool rediff, double tol);
IdentityReport hamilton_identity(const WarpedHalfPlaneMetric& m, int fiber_dim, double tol);

// Killing-field identity Ric(T,T)/|T|^2 = <grad f, grad phi>/phi along the
// Sigma geodesic. Closed-form route on the cigar product at `stations`
// equally spaced arclength values in (0, s_max]; grid route at the v-rows
// nearest the requested stations on the u = const column through the center.
IdentityReport killing_identity_product(double kappa, int stations, double s_max, double tol);
IdentityReport killing_identity(const WarpedHalfPlaneMetric& m, const std::vector<double>& stations,
                                double tol);

// | R(Gamma(s_max)) - R(p) sin^2(alpha/2) | plus the trend of R(Gamma(s)).
struct EdgeLimitReport {
    IdentityReport report;
    bool monotone_decreasing = false;
    double final_over_center = 0.0; // R(Gamma(s_max)) / R(p)
};
EdgeLimitReport edge_limit_check(const std::vector<double>& s, const std::vector<double>& R_gamma,
                                 double R_center, double alpha, double tol);
double edge_limit_target_ratio(double alpha); // sin^2(alpha/2)

// h1(s) = d(gamma(s), Gamma), h2(s) = phi(gamma(s)) along the Sigma geodesic,
// with fitted growth exponents and the products the edge estimates bound.
struct EdgeDiagnostics {
    std::vector<double> s, h1, h2, R_gamma, R_Gamma;
    double h1_exponent = 0.0, h2_exponent = 0.0; // log-log slopes, last half
    double max_h1sq_R = 0.0;
    double dyadic_ratio_h1sq_R = 0.0; // value at s_max over value at s_max/2
    double min_h1h2_over_s = 0.0;
};
EdgeDiagnostics h_diagnostics_rx_cigar(double kappa, const std::vector<double>& s);
EdgeDiagnostics h_diagnostics_profile(const RadialProfile& p, const std::vector<double>& s);

// integral(s) = \int_{B(p,s)} R dvol and the Stokes cross-check, the flux of
// grad f through the distance sphere.
struct GrowthReport {
    std::vector<double> s, integral, flux;
    double slope_lower = 0.0; // min of integral/s over the last half
};
GrowthReport integral_R_growth_rx_cigar(double kappa, const std::vector<double>& s);
GrowthReport integral_R_growth_profile(const RadialProfile& p, const std::vector<double>& s);
GrowthReport integral_R_growth_flat(const std::vector<double>& s);

// vol(B(p,r)) / (omega_n r^n).
struct AvrReport {
    std::vector<double> r, ratio;
    double vol_unit_ball = 0.0;
    bool collapsed = false; // ratio tends to zero over the sampled range
};
AvrReport avr_rx_cigar(double kappa, double r_max, int samples);
AvrReport avr_profile(const RadialProfile& p, double r_max, int samples);
AvrReport avr_flat(double r_max, int samples);

// C0 deviation, after rescaling by K = R(Gamma(s)) and aligning axis and
// fiber coordinates, between the transverse warp profile at Gamma(s) and the
// reference model, sampled out to min(1/eps, available domain).
enum class ProbeReference { RxCigar, RoundFiber };
double dimension_reduction_probe_rx(double kappa, double s, ProbeReference ref, double eps);
double dimension_reduction_probe_profile(const RadialProfile& p, double s, ProbeReference ref,
                                         double eps);

} // namespace soliton
