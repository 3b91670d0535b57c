#include "soliton/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "soliton/models.hpp"

namespace soliton {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double comparison_angle(double d_op, double d_oq, double d_pq, double tol) {
    if (!(d_op > 0.0) || !(d_oq > 0.0) || !(d_pq >= 0.0))
        throw std::invalid_argument("comparison_angle: distances must be positive");
    const double scale = std::max({d_op, d_oq, d_pq});
    if (d_pq > d_op + d_oq + tol * scale || d_op > d_oq + d_pq + tol * scale ||
        d_oq > d_op + d_pq + tol * scale)
        throw std::invalid_argument("comparison_angle: triangle inequality violated");
    double c = (d_op * d_op + d_oq * d_oq - d_pq * d_pq) / (2.0 * d_op * d_oq);
    c = std::min(1.0, std::max(-1.0, c));
    return std::acos(c);
}

ProfileCurve cigar_curve(double kappa, double r_max) {
    ProfileCurve c;
    c.w = [kappa](double r) { return cigar::phi(r, kappa); };
    c.wp = [kappa](double r) { return cigar::phi_d1(r, kappa); };
    c.r_max = r_max;
    return c;
}

namespace {

double hermite_eval(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& dy, double xv) {
    const double h = x[1] - x[0];
    auto k = static_cast<std::ptrdiff_t>(std::floor((xv - x[0]) / h));
    k = std::max<std::ptrdiff_t>(
        0, std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(x.size()) - 2));
    const double t = (xv - x[static_cast<std::size_t>(k)]) / h;
    const double y0 = y[static_cast<std::size_t>(k)], y1 = y[static_cast<std::size_t>(k) + 1];
    const double m0 = dy[static_cast<std::size_t>(k)] * h, m1 = dy[static_cast<std::size_t>(k) + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
}

} // namespace

ProfileCurve curve_from_profile(const RadialProfile& p) {
    p.validate();
    if (p.phi_d1.size() != p.size() || p.phi_d2.size() != p.size())
        throw std::invalid_argument("curve_from_profile: derivatives not populated");
    ProfileCurve c;
    // Copies keep the curve valid independently of the profile's lifetime.
    auto r = p.r;
    auto phi = p.phi;
    auto d1 = p.phi_d1;
    auto d2 = p.phi_d2;
    c.w = [r, phi, d1](double rv) { return hermite_eval(r, phi, d1, rv); };
    c.wp = [r, d1, d2](double rv) { return hermite_eval(r, d1, d2, rv); };
    c.r_max = r.back();
    return c;
}

namespace {

// Integrals of the Clairaut family from the turning radius r*(J) out to s,
// regularized by r = r* + tau^2.
struct HalfIntegrals {
    double sweep = 0.0, length = 0.0;
};

double turning_radius(const ProfileCurve& c, double J, double s) {
    double lo = 0.0, hi = s;
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        (c.w(mid) < J ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

HalfIntegrals half_integrals(const ProfileCurve& c, double J, double rstar, double s, int n) {
    const double tmax = std::sqrt(std::max(s - rstar, 0.0));
    HalfIntegrals out;
    if (tmax == 0.0) return out;
    const double wps = c.wp(rstar);
    auto eval = [&](double tau, double& fs, double& fl) {
        if (tau == 0.0) {
            fs = 2.0 / std::sqrt(2.0 * J * std::max(wps, 1e-300));
            fl = std::sqrt(2.0 * J / std::max(wps, 1e-300));
            return;
        }
        const double r = rstar + tau * tau;
        const double W = c.w(r);
        double D = W * W - J * J;
        if (D <= 0.0) D = 2.0 * J * std::max(wps, 1e-300) * tau * tau;
        const double root = std::sqrt(D);
        fs = 2.0 * tau * J / (W * root);
        fl = 2.0 * tau * W / root;
    };
    const double h = tmax / static_cast<double>(n);
    double acc_s = 0.0, acc_l = 0.0;
    double fs, fl;
    for (int q = 0; q <= n; ++q) {
        eval(h * q, fs, fl);
        const double wgt = (q == 0 || q == n) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
        acc_s += wgt * fs;
        acc_l += wgt * fl;
    }
    out.sweep = acc_s * h / 3.0;
    out.length = acc_l * h / 3.0;
    return out;
}

struct RootScan {
    std::vector<double> roots;
};

// Roots of theta(J) = target on (0, j_top), scanning a uniform grid plus a
// geometric refinement toward j_top where shallow geodesics accumulate.
template <class Theta>
RootScan scan_roots(Theta&& theta, double j_top, double target) {
    std::vector<double> grid;
    const int uniform = 96;
    for (int q = 1; q < uniform; ++q)
        grid.push_back(j_top * static_cast<double>(q) / static_cast<double>(uniform));
    for (int k = 2; k <= 11; ++k) grid.push_back(j_top * (1.0 - std::pow(10.0, -k)));
    std::sort(grid.begin(), grid.end());

    RootScan out;
    double prev_j = grid.front();
    double prev_v = theta(prev_j) - target;
    for (std::size_t q = 1; q < grid.size(); ++q) {
        const double j = grid[q];
        const double v = theta(j) - target;
        if (prev_v == 0.0) out.roots.push_back(prev_j);
        if (prev_v * v < 0.0) {
            double lo = prev_j, hi = j, vlo = prev_v;
            for (int it = 0; it < 70; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double vm = theta(mid) - target;
                if (vlo * vm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    vlo = vm;
                }
            }
            out.roots.push_back(0.5 * (lo + hi));
        }
        prev_j = j;
        prev_v = v;
    }
    return out;
}

double wrap_angle(double a) {
    a = std::fmod(std::abs(a), 2.0 * kPi);
    return a > kPi ? 2.0 * kPi - a : a;
}

} // namespace

DistanceBound profile_pair_distance(const ProfileCurve& c, double r1, double psi1, double r2,
                                    double psi2) {
    if (r1 > c.r_max || r2 > c.r_max)
        throw std::invalid_argument("profile_pair_distance: point outside the curve domain");
    const double dpsi = wrap_angle(psi1 - psi2);
    DistanceBound out;
    if (dpsi == 0.0) {
        out.value = std::abs(r1 - r2);
        out.lower = out.upper = out.value;
        return out;
    }
    const double rlo = std::min(r1, r2), rhi = std::max(r1, r2);
    double best = r1 + r2; // through the tip
    double best_refined = best;

    const int n_scan = 192, n_fine = 768;

    // Turning-point family: r* below both endpoints.
    auto theta_turn = [&](int n) {
        return [&, n](double J) {
            const double rs = turning_radius(c, J, rlo);
            return half_integrals(c, J, rs, r1, n).sweep + half_integrals(c, J, rs, r2, n).sweep;
        };
    };
    for (double J : scan_roots(theta_turn(n_scan), c.w(rlo) * (1.0 - 1e-13), dpsi).roots) {
        const double rs = turning_radius(c, J, rlo);
        const double len = half_integrals(c, J, rs, r1, n_scan).length +
                           half_integrals(c, J, rs, r2, n_scan).length;
        if (len < best) {
            best = len;
            best_refined = half_integrals(c, J, rs, r1, n_fine).length +
                           half_integrals(c, J, rs, r2, n_fine).length;
        }
    }

    // Monotone-in-r family (distinct radii only).
    if (rhi > rlo + 1e-14) {
        auto theta_mono = [&](int n) {
            return [&, n](double J) {
                const double rs = turning_radius(c, J, rlo);
                return half_integrals(c, J, rs, rhi, n).sweep -
                       half_integrals(c, J, rs, rlo, n).sweep;
            };
        };
        for (double J : scan_roots(theta_mono(n_scan), c.w(rlo) * (1.0 - 1e-13), dpsi).roots) {
            const double rs = turning_radius(c, J, rlo);
            const double len = half_integrals(c, J, rs, rhi, n_scan).length -
                               half_integrals(c, J, rs, rlo, n_scan).length;
            if (len < best) {
                best = len;
                best_refined = half_integrals(c, J, rs, rhi, n_fine).length -
                               half_integrals(c, J, rs, rlo, n_fine).length;
            }
        }
    }

    const double quad_err = std::abs(best_refined - best) / 15.0 + 1e-12 * best;
    out.value = best_refined;
    out.lower = std::max(best_refined - quad_err, std::abs(r1 - r2));
    out.upper = std::min(best_refined + quad_err, r1 + r2);
    return out;
}

DistanceBound profile_point_to_axis(const ProfileCurve& c, double r, double beta) {
    if (r > c.r_max) throw std::invalid_argument("profile_point_to_axis: point outside domain");
    beta = wrap_angle(beta);
    DistanceBound out;
    double best = r; // radial path to the tip, which lies on the axis
    double best_refined = best;
    const int n_scan = 192, n_fine = 768;
    for (double target : {beta, kPi - beta}) {
        if (target <= 0.0) continue;
        auto theta = [&](double J) {
            const double rs = turning_radius(c, J, r);
            return half_integrals(c, J, rs, r, n_scan).sweep;
        };
        for (double J : scan_roots(theta, c.w(r) * (1.0 - 1e-13), target).roots) {
            const double rs = turning_radius(c, J, r);
            const double len = half_integrals(c, J, rs, r, n_scan).length;
            if (len < best) {
                best = len;
                best_refined = half_integrals(c, J, rs, r, n_fine).length;
            }
        }
    }
    const double quad_err = std::abs(best_refined - best) / 15.0 + 1e-12 * best;
    out.value = best_refined;
    out.lower = best_refined - quad_err;
    out.upper = std::min(best_refined + quad_err, r);
    return out;
}

GammaProbe rx_cigar_probe() {
    GammaProbe g;
    g.radial = [](double s) { return s; };
    g.chord = [](double s) { return 2.0 * s; };
    return g;
}

GammaProbe profile_probe(const RadialProfile& p) {
    auto curve = std::make_shared<ProfileCurve>(curve_from_profile(p));
    GammaProbe g;
    g.radial = [](double s) { return s; };
    g.chord = [curve](double s) { return profile_pair_distance(*curve, s, 0.0, s, kPi).value; };
    return g;
}

GammaProbe cigar2d_probe(double kappa, double r_max) {
    auto curve = std::make_shared<ProfileCurve>(cigar_curve(kappa, r_max));
    GammaProbe g;
    g.radial = [](double s) { return s; };
    g.chord = [curve](double s) { return profile_pair_distance(*curve, s, 0.0, s, kPi).value; };
    return g;
}

ConeAngleEstimate estimate_cone_angle(const GammaProbe& probe, double s_max, int samples) {
    if (samples < 4) throw std::invalid_argument("estimate_cone_angle: need at least 4 samples");
    if (!(s_max > 0.0)) throw std::invalid_argument("estimate_cone_angle: s_max must be positive");
    ConeAngleEstimate est;
    est.s.resize(static_cast<std::size_t>(samples));
    est.theta.resize(static_cast<std::size_t>(samples));
    for (int k = 1; k <= samples; ++k) {
        const double s = s_max * static_cast<double>(k) / static_cast<double>(samples);
        const double d1 = probe.radial(s);
        const double d2 = probe.radial(s); // Gamma(-s) by the Z2 symmetry
        const double ch = probe.chord(s);
        est.s[static_cast<std::size_t>(k - 1)] = s;
        est.theta[static_cast<std::size_t>(k - 1)] = comparison_angle(d1, d2, ch, 1e-6);
    }
    est.monotone = true;
    for (std::size_t q = 1; q < est.theta.size(); ++q)
        if (est.theta[q] > est.theta[q - 1] + 1e-10) est.monotone = false;

    // Linear fit of theta against 1/s over the last half of the samples.
    const std::size_t half = est.s.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double m = 0;
    for (std::size_t q = half; q < est.s.size(); ++q) {
        const double x = 1.0 / est.s[q];
        const double y = est.theta[q];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1.0;
    }
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
        const double slope = (m * sxy - sx * sy) / denom;
        est.alpha = (sy - slope * sx) / m;
    } else {
        est.alpha = est.theta.back();
    }
    est.alpha = std::min(std::max(est.alpha, 0.0), kPi);
    return est;
}

DistanceBound model_distance(const ModelSpace& space, const ModelPoint& p, const ModelPoint& q) {
    DistanceBound out;
    switch (space.kind) {
        case ModelSpace::Kind::Flat3: {
            out.value = std::sqrt((p.a - q.a) * (p.a - q.a) + (p.b - q.b) * (p.b - q.b) +
                                  (p.c - q.c) * (p.c - q.c));
            out.lower = out.upper = out.value;
            return out;
        }
        case ModelSpace::Kind::UnitSphere: {
            const double np = std::sqrt(p.a * p.a + p.b * p.b + p.c * p.c);
            const double nq = std::sqrt(q.a * q.a + q.b * q.b + q.c * q.c);
            if (np == 0.0 || nq == 0.0)
                throw std::invalid_argument("model_distance: zero vector on the sphere");
            double dot = (p.a * q.a + p.b * q.b + p.c * q.c) / (np * nq);
            dot = std::min(1.0, std::max(-1.0, dot));
            out.value = std::acos(dot);
            out.lower = out.upper = out.value;
            return out;
        }
        case ModelSpace::Kind::Cigar: {
            const ProfileCurve c = cigar_curve(space.kappa, space.r_max);
            if (p.a == 0.0 || q.a == 0.0) { // tip-to-point: arclength coordinate
                out.value = p.a + q.a;
                out.lower = out.upper = out.value;
                return out;
            }
            return profile_pair_distance(c, p.a, p.b, q.a, q.b);
        }
        case ModelSpace::Kind::RxCigar: {
            ModelPoint pc{p.b, p.c, 0.0}, qc{q.b, q.c, 0.0};
            ModelSpace cig{ModelSpace::Kind::Cigar, space.kappa, space.r_max};
            const DistanceBound fiber = model_distance(cig, pc, qc);
            const double du = p.a - q.a;
            out.value = std::hypot(du, fiber.value);
            out.lower = std::hypot(du, fiber.lower);
            out.upper = std::hypot(du, fiber.upper);
            return out;
        }
    }
    throw std::invalid_argument("model_distance: unsupported model");
}

} // namespace soliton
