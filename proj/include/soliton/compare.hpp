#pragma once

#include <functional>
#include <vector>

#include "soliton/radial_profile.hpp"

namespace soliton {

// Euclidean comparison angle at o from the three pairwise distances, clamped
// to [0, pi]. Throws when the triangle inequality fails beyond tol (relative
// to the largest side).
double comparison_angle(double d_op, double d_oq, double d_pq, double tol = 1e-9);

// Rotationally symmetric 2d metric dr^2 + w(r)^2 dpsi^2 given by callables.
struct ProfileCurve {
    std::function<double(double)> w;  // warp
    std::function<double(double)> wp; // warp derivative
    double r_max = 0.0;
};

ProfileCurve cigar_curve(double kappa, double r_max);
// Hermite interpolation of a sampled profile (uses stored derivatives).
ProfileCurve curve_from_profile(const RadialProfile& p);

struct DistanceBound {
    double value = 0.0;
    double lower = 0.0; // certified by quadrature refinement
    double upper = 0.0;
};

// Geodesic distance between (r1, psi1) and (r2, psi2) on the profile metric.
// Minimizes over the Clairaut families: paths monotone in r, paths with one
// turning point, and the path through the tip.
DistanceBound profile_pair_distance(const ProfileCurve& c, double r1, double psi1, double r2,
                                    double psi2);

// Distance from (r, beta) to the axis rays psi in {0, pi}. The minimizing
// geodesic meets the axis at its turning point.
DistanceBound profile_point_to_axis(const ProfileCurve& c, double r, double beta);

// Distances feeding the comparison angles along Gamma.
struct GammaProbe {
    std::function<double(double)> radial; // d(p, Gamma(s))
    std::function<double(double)> chord;  // d(Gamma(s), Gamma(-s))
};

GammaProbe rx_cigar_probe();
GammaProbe profile_probe(const RadialProfile& p); // rotationally symmetric body, n >= 3
GammaProbe cigar2d_probe(double kappa, double r_max);

struct ConeAngleEstimate {
    std::vector<double> s;     // increasing scales
    std::vector<double> theta; // comparison angles at those scales
    double alpha = 0.0;        // extrapolated asymptotic angle
    bool monotone = false;     // theta nonincreasing in s
};

// theta_k at `samples` linearly spaced scales up to s_max; alpha from a
// least-squares fit of theta against 1/s over the last half of the samples.
// Throws when samples < 4.
ConeAngleEstimate estimate_cone_angle(const GammaProbe& probe, double s_max, int samples);

// Closed-form model distances for the enumerated comparison spaces.
struct ModelPoint {
    double a = 0.0, b = 0.0, c = 0.0;
};
struct ModelSpace {
    enum class Kind { Flat3, UnitSphere, Cigar, RxCigar } kind = Kind::Flat3;
    double kappa = 1.0;  // cigar normalization
    double r_max = 60.0; // geodesic search domain for cigar pairs
};
// Point conventions: Flat3 cartesian (a,b,c); UnitSphere unit vector (a,b,c);
// Cigar polar (rho = a, theta = b); RxCigar (u = a, rho = b, theta = c).
DistanceBound model_distance(const ModelSpace& space, const ModelPoint& p, const ModelPoint& q);

} // namespace soliton
