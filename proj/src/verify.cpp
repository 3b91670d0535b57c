#include "soliton/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soliton/compare.hpp"
#include "soliton/models.hpp"
#include "soliton/parallel.hpp"
#include "warped_geometry.hpp"

namespace soliton {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

IdentityReport make_identity_report(std::string name, double dev, double loc, double tol) {
    IdentityReport rep;
    rep.name = std::move(name);
    rep.max_deviation = dev;
    rep.location = loc;
    rep.tolerance = tol;
    rep.pass = dev <= tol;
    return rep;
}

IdentityReport soliton_residual(const RadialProfile& p, double tol) {
    p.validate();
    const std::size_t m = p.size();
    if (m < 7) throw std::invalid_argument("soliton_residual: too few samples");
    const double n = static_cast<double>(p.n);
    const double h = p.r[1] - p.r[0];
    const bool axis = p.touches_axis();

    // Fourth-order parity stencils: the second-order first-derivative error
    // is amplified by 1/phi^2 in the spherical component and would leave an
    // O(1) spurious residual at the first off-axis node.
    auto phi_at = [&](std::ptrdiff_t k) {
        if (k < 0) return axis ? -p.phi[static_cast<std::size_t>(-k)] : 0.0;
        return p.phi[static_cast<std::size_t>(k)];
    };
    auto f_at = [&](std::ptrdiff_t k) {
        if (k < 0) return axis ? p.f[static_cast<std::size_t>(-k)] : 0.0;
        return p.f[static_cast<std::size_t>(k)];
    };
    const std::size_t k_begin = axis ? 1 : 2;
    double worst = 0.0, where = 0.0;
    for (std::size_t k = k_begin; k + 2 < m; ++k) {
        const auto q = static_cast<std::ptrdiff_t>(k);
        const double phi = p.phi[k];
        const double w =
            (-phi_at(q + 2) + 8.0 * phi_at(q + 1) - 8.0 * phi_at(q - 1) + phi_at(q - 2)) /
            (12.0 * h);
        const double phipp = (-phi_at(q + 2) + 16.0 * phi_at(q + 1) - 30.0 * phi +
                              16.0 * phi_at(q - 1) - phi_at(q - 2)) /
                             (12.0 * h * h);
        const double fp =
            (-f_at(q + 2) + 8.0 * f_at(q + 1) - 8.0 * f_at(q - 1) + f_at(q - 2)) / (12.0 * h);
        const double fpp = (-f_at(q + 2) + 16.0 * f_at(q + 1) - 30.0 * p.f[k] +
                            16.0 * f_at(q - 1) - f_at(q - 2)) /
                           (12.0 * h * h);
        double e_rad, e_sph;
        if (p.n == 2) {
            e_rad = -phipp / phi - fpp;
            e_sph = -phipp / phi - w * fp / phi;
        } else {
            e_rad = -(n - 1.0) * phipp / phi - fpp;
            e_sph = -phipp / phi + (n - 2.0) * (1.0 - w * w) / (phi * phi) - w * fp / phi;
        }
        const double dev = std::max(std::abs(e_rad), std::abs(e_sph));
        if (dev > worst) {
            worst = dev;
            where = p.r[k];
        }
    }
    return make_identity_report("soliton_residual", worst, where, tol);
}

IdentityReport hamilton_identity(const RadialProfile& p, bool rediff, double tol) {
    const RadialProfile& q = rediff ? differentiate(p) : p;
    const CurvatureReport cur = radial_curvature(q);
    const auto grad = gradient_norm(q);
    double lo = cur.scalar[0] + grad[0] * grad[0];
    double hi = lo, where = q.r[0];
    for (std::size_t k = 1; k < q.size(); ++k) {
        const double v = cur.scalar[k] + grad[k] * grad[k];
        if (v < lo) lo = v;
        if (v > hi) {
            hi = v;
            where = q.r[k];
        }
    }
    return make_identity_report(rediff ? "hamilton_identity_rediff" : "hamilton_identity",
                                hi - lo, where, tol);
}

namespace {

using detail::FieldView;

struct GridViews {
    FieldView<double> E, F, G, phi, f;
    explicit GridViews(const WarpedHalfPlaneMetric& m)
        : E{m.g_uu.data(), m.nu, +1, +1, false},
          F{m.g_uv.data(), m.nu, -1, -1, false},
          G{m.g_vv.data(), m.nu, +1, +1, false},
          phi{m.phi.data(), m.nu, -1, +1, false},
          f{m.f.data(), m.nu, +1, +1, false} {}
};

} // namespace

IdentityReport soliton_residual(const WarpedHalfPlaneMetric& m, int fiber_dim, double tol) {
    m.validate();
    const double dm = static_cast<double>(fiber_dim);
    const GridViews vw(m);
    const auto nu = static_cast<std::ptrdiff_t>(m.nu);
    const auto nv = static_cast<std::ptrdiff_t>(m.nv);
    std::vector<double> dev((nu - 2) * (nv - 2), 0.0);
    parallel_for((nu - 2) * (nv - 2), [&](std::ptrdiff_t wk) {
        const std::ptrdiff_t j = 1 + wk % (nu - 2);
        const std::ptrdiff_t k = 1 + wk / (nu - 2);
        const auto base = detail::base_geometry(vw.E, vw.F, vw.G, j, k, m.hu, m.hv);
        const auto dphi = detail::derivatives(vw.phi, j, k, m.hu, m.hv);
        const auto df = detail::derivatives(vw.f, j, k, m.hu, m.hv);
        const auto hphi = detail::hessian(base, dphi);
        const auto hf = detail::hessian(base, df);
        const double phi = dphi.w;

        // Base block: K g_N - m hess(phi)/phi - hess(f), eigenvalues rel. g_N.
        const double euu = base.K * base.E.w - dm * hphi.uu / phi - hf.uu;
        const double euv = base.K * base.F.w - dm * hphi.uv / phi - hf.uv;
        const double evv = base.K * base.G.w - dm * hphi.vv / phi - hf.vv;
        double lo, hi;
        detail::rel_eigenvalues(base.det, base.iE, base.iF, base.iG, euu, euv, evv, lo, hi);
        double worst = std::max(std::abs(lo), std::abs(hi));

        // Fiber block.
        const double grad2 = detail::grad_inner(base, dphi, dphi);
        const double kfib = (1.0 - grad2) / (phi * phi);
        const double ric_fiber = -hphi.lap / phi + (dm - 1.0) * kfib;
        const double hess_fiber = detail::grad_inner(base, df, dphi) / phi;
        worst = std::max(worst, std::abs(ric_fiber - hess_fiber));
        dev[static_cast<std::size_t>(wk)] = worst;
    });
    double worst = 0.0;
    std::size_t at = 0;
    for (std::size_t q = 0; q < dev.size(); ++q)
        if (dev[q] > worst) {
            worst = dev[q];
            at = q;
        }
    const double where = static_cast<double>(at);
    return make_identity_report("soliton_residual", worst, where, tol);
}

IdentityReport hamilton_identity(const WarpedHalfPlaneMetric& m, int fiber_dim, double tol) {
    const CurvatureReport cur = warped_curvature(m, fiber_dim);
    const auto grad = gradient_norm(m, m.f);
    // Interior nodes only; extrapolated boundary rows are reporting artifacts.
    double lo = 0.0, hi = 0.0, where = 0.0;
    bool first = true;
    for (std::size_t k = 1; k + 1 < m.nv; ++k) {
        for (std::size_t j = 1; j + 1 < m.nu; ++j) {
            const std::size_t id = m.idx(j, k);
            const double v = cur.scalar[id] + grad[id] * grad[id];
            if (first || v < lo) lo = v;
            if (first || v > hi) {
                hi = v;
                where = static_cast<double>(id);
            }
            first = false;
        }
    }
    return make_identity_report("hamilton_identity", hi - lo, where, tol);
}

IdentityReport killing_identity_product(double kappa, int stations, double s_max, double tol) {
    if (stations < 1) throw std::invalid_argument("killing_identity_product: no stations");
    double worst = 0.0, where = 0.0;
    for (int q = 1; q <= stations; ++q) {
        const double s = s_max * static_cast<double>(q) / static_cast<double>(stations);
        // LHS: Ric(T,T)/|T|^2 of the product = Gauss curvature of the cigar.
        const double lhs = cigar::gauss(s, kappa);
        // RHS: |grad f| h2 h2' / phi^2 = f' phi' / phi.
        const double rhs = cigar::f_d1(s, kappa) * cigar::phi_d1(s, kappa) / cigar::phi(s, kappa);
        const double dev = std::abs(lhs - rhs);
        if (dev > worst) {
            worst = dev;
            where = s;
        }
    }
    return make_identity_report("killing_identity", worst, where, tol);
}

IdentityReport killing_identity(const WarpedHalfPlaneMetric& m, const std::vector<double>& stations,
                                double tol) {
    m.validate();
    const GridViews vw(m);
    // Column through u = 0.
    const auto jc = static_cast<std::ptrdiff_t>(std::llround(-m.u0 / m.hu));
    double worst = 0.0, where = 0.0;
    for (double s : stations) {
        const auto k = static_cast<std::ptrdiff_t>(std::llround(s / m.hv));
        if (k < 1) throw std::invalid_argument("killing_identity: station touches the axis");
        if (k + 1 >= static_cast<std::ptrdiff_t>(m.nv))
            throw std::invalid_argument("killing_identity: station outside the grid");
        const auto base = detail::base_geometry(vw.E, vw.F, vw.G, jc, k, m.hu, m.hv);
        const auto dphi = detail::derivatives(vw.phi, jc, k, m.hu, m.hv);
        const auto df = detail::derivatives(vw.f, jc, k, m.hu, m.hv);
        const auto hphi = detail::hessian(base, dphi);
        const double phi = dphi.w;
        const double lhs = -hphi.lap / phi;
        const double rhs = detail::grad_inner(base, df, dphi) / phi;
        const double dev = std::abs(lhs - rhs);
        if (dev > worst) {
            worst = dev;
            where = m.v(static_cast<std::size_t>(k));
        }
    }
    return make_identity_report("killing_identity", worst, where, tol);
}

double edge_limit_target_ratio(double alpha) {
    const double s = std::sin(0.5 * alpha);
    return s * s;
}

EdgeLimitReport edge_limit_check(const std::vector<double>& s, const std::vector<double>& R_gamma,
                                 double R_center, double alpha, double tol) {
    if (s.size() != R_gamma.size() || s.size() < 2)
        throw std::invalid_argument("edge_limit_check: bad sample arrays");
    EdgeLimitReport out;
    out.monotone_decreasing = true;
    for (std::size_t q = 1; q < R_gamma.size(); ++q)
        if (R_gamma[q] > R_gamma[q - 1] + 1e-12) out.monotone_decreasing = false;
    const double target = R_center * edge_limit_target_ratio(alpha);
    const double dev = std::abs(R_gamma.back() - target);
    out.final_over_center = R_gamma.back() / R_center;
    out.report = make_identity_report("edge_limit", dev, s.back(), tol);
    return out;
}

namespace {

double loglog_slope_tail(const std::vector<double>& s, const std::vector<double>& y) {
    const std::size_t half = s.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t q = half; q < s.size(); ++q) {
        const double x = std::log(s[q]);
        const double v = std::log(y[q]);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
        m += 1.0;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double interp_at(const std::vector<double>& s, const std::vector<double>& y, double sv) {
    std::size_t k = 0;
    while (k + 2 < s.size() && s[k + 1] < sv) ++k;
    const double t = (sv - s[k]) / (s[k + 1] - s[k]);
    return y[k] + t * (y[k + 1] - y[k]);
}

EdgeDiagnostics finish_diagnostics(EdgeDiagnostics d) {
    if (d.s.size() < 8) throw std::invalid_argument("h_diagnostics: need at least 8 samples");
    d.h1_exponent = loglog_slope_tail(d.s, d.h1);
    d.h2_exponent = loglog_slope_tail(d.s, d.h2);
    std::vector<double> prod(d.s.size());
    d.max_h1sq_R = 0.0;
    d.min_h1h2_over_s = d.h1[0] * d.h2[0] / d.s[0];
    for (std::size_t q = 0; q < d.s.size(); ++q) {
        prod[q] = d.h1[q] * d.h1[q] * d.R_gamma[q];
        d.max_h1sq_R = std::max(d.max_h1sq_R, prod[q]);
        d.min_h1h2_over_s = std::min(d.min_h1h2_over_s, d.h1[q] * d.h2[q] / d.s[q]);
    }
    const double tail = interp_at(d.s, prod, d.s.back());
    const double mid = interp_at(d.s, prod, 0.5 * d.s.back());
    d.dyadic_ratio_h1sq_R = tail / mid;
    return d;
}

} // namespace

EdgeDiagnostics h_diagnostics_rx_cigar(double kappa, const std::vector<double>& s) {
    EdgeDiagnostics d;
    d.s = s;
    for (double sv : s) {
        d.h1.push_back(sv); // d((0, rho = s), Gamma) = s in the product
        d.h2.push_back(cigar::phi(sv, kappa));
        d.R_gamma.push_back(cigar::scalar(sv, kappa));
        d.R_Gamma.push_back(kappa);
    }
    return finish_diagnostics(std::move(d));
}

EdgeDiagnostics h_diagnostics_profile(const RadialProfile& p, const std::vector<double>& s) {
    const ProfileCurve curve = curve_from_profile(p);
    const CurvatureReport cur = radial_curvature(p);
    EdgeDiagnostics d;
    d.s = s;
    const double h = p.r[1] - p.r[0];
    for (double sv : s) {
        const auto k = static_cast<std::size_t>(std::llround(sv / h));
        d.h1.push_back(profile_point_to_axis(curve, sv, 0.5 * kPi).value);
        d.h2.push_back(p.phi[k]);
        d.R_gamma.push_back(cur.scalar[k]); // rotational symmetry: R depends on r only
        d.R_Gamma.push_back(cur.scalar[k]);
    }
    return finish_diagnostics(std::move(d));
}

namespace {

// Composite Simpson with an even subinterval count.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / static_cast<double>(n);
    double acc = 0.0;
    for (int q = 0; q <= n; ++q) {
        const double w = (q == 0 || q == n) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
        acc += w * f(a + h * static_cast<double>(q));
    }
    return acc * h / 3.0;
}

} // namespace

GrowthReport integral_R_growth_rx_cigar(double kappa, const std::vector<double>& s) {
    GrowthReport g;
    g.s = s;
    for (double sv : s) {
        // Ball slices: u-width 2 sqrt(s^2 - rho^2) at cigar radius rho.
        const double integral = 2.0 * kPi * simpson(
            [&](double tau) {
                const double rho = sv * std::sin(tau);
                return 2.0 * sv * sv * std::cos(tau) * std::cos(tau) *
                       cigar::scalar(rho, kappa) * cigar::phi(rho, kappa);
            },
            0.0, 0.5 * kPi, 512);
        // Stokes route: flux of grad f through the distance sphere.
        const double flux = 2.0 * 2.0 * kPi * simpson(
            [&](double tau) {
                const double rho = sv * std::sin(tau);
                return cigar::f_d1(rho, kappa) * std::sin(tau) * cigar::phi(rho, kappa) * sv;
            },
            0.0, 0.5 * kPi, 512);
        g.integral.push_back(integral);
        g.flux.push_back(flux);
    }
    g.slope_lower = g.integral[0] / g.s[0];
    for (std::size_t q = g.s.size() / 2; q < g.s.size(); ++q)
        g.slope_lower = std::min(g.slope_lower, g.integral[q] / g.s[q]);
    return g;
}

GrowthReport integral_R_growth_profile(const RadialProfile& p, const std::vector<double>& s) {
    const CurvatureReport cur = radial_curvature(p);
    const double sphere_area = 4.0 * kPi; // unit S^2; profile must have n = 3
    if (p.n != 3)
        throw std::invalid_argument("integral_R_growth_profile: implemented for n = 3 profiles");
    GrowthReport g;
    g.s = s;
    // Cumulative trapezoid of R phi^2 dr on the profile grid.
    std::vector<double> cum(p.size(), 0.0);
    for (std::size_t k = 1; k < p.size(); ++k) {
        const double a = cur.scalar[k - 1] * p.phi[k - 1] * p.phi[k - 1];
        const double b = cur.scalar[k] * p.phi[k] * p.phi[k];
        cum[k] = cum[k - 1] + 0.5 * (a + b) * (p.r[k] - p.r[k - 1]);
    }
    const double h = p.r[1] - p.r[0];
    for (double sv : s) {
        const auto k = static_cast<std::size_t>(std::llround(sv / h));
        g.integral.push_back(sphere_area * cum[k]);
        g.flux.push_back(std::abs(p.f_d1[k]) * sphere_area * p.phi[k] * p.phi[k]);
    }
    g.slope_lower = g.integral[0] / g.s[0];
    for (std::size_t q = g.s.size() / 2; q < g.s.size(); ++q)
        g.slope_lower = std::min(g.slope_lower, g.integral[q] / g.s[q]);
    return g;
}

GrowthReport integral_R_growth_flat(const std::vector<double>& s) {
    GrowthReport g;
    g.s = s;
    g.integral.assign(s.size(), 0.0);
    g.flux.assign(s.size(), 0.0);
    g.slope_lower = 0.0;
    return g;
}

AvrReport avr_rx_cigar(double kappa, double r_max, int samples) {
    AvrReport a;
    const double omega3 = 4.0 * kPi / 3.0;
    auto ball_volume = [&](double r) {
        return 4.0 * kPi * r * r * simpson(
            [&](double tau) {
                return std::cos(tau) * std::cos(tau) * cigar::phi(r * std::sin(tau), kappa);
            },
            0.0, 0.5 * kPi, 512);
    };
    for (int q = 1; q <= samples; ++q) {
        const double r = r_max * static_cast<double>(q) / static_cast<double>(samples);
        a.r.push_back(r);
        a.ratio.push_back(ball_volume(r) / (omega3 * r * r * r));
    }
    a.vol_unit_ball = ball_volume(1.0);
    a.collapsed = a.ratio.back() < 0.25 * a.ratio.front();
    return a;
}

AvrReport avr_profile(const RadialProfile& p, double r_max, int samples) {
    if (p.n != 3) throw std::invalid_argument("avr_profile: implemented for n = 3 profiles");
    if (p.r.back() < r_max) throw std::invalid_argument("avr_profile: profile domain too short");
    AvrReport a;
    const double omega3 = 4.0 * kPi / 3.0;
    std::vector<double> cum(p.size(), 0.0);
    for (std::size_t k = 1; k < p.size(); ++k)
        cum[k] = cum[k - 1] +
                 0.5 * (p.phi[k - 1] * p.phi[k - 1] + p.phi[k] * p.phi[k]) * (p.r[k] - p.r[k - 1]);
    const double h = p.r[1] - p.r[0];
    for (int q = 1; q <= samples; ++q) {
        const double r = r_max * static_cast<double>(q) / static_cast<double>(samples);
        const auto k = static_cast<std::size_t>(std::llround(r / h));
        a.r.push_back(r);
        a.ratio.push_back(4.0 * kPi * cum[k] / (omega3 * r * r * r));
    }
    const auto k1 = static_cast<std::size_t>(std::llround(1.0 / h));
    a.vol_unit_ball = 4.0 * kPi * cum[std::min(k1, p.size() - 1)];
    a.collapsed = a.ratio.back() < 0.25 * a.ratio.front();
    return a;
}

AvrReport avr_flat(double r_max, int samples) {
    AvrReport a;
    for (int q = 1; q <= samples; ++q) {
        a.r.push_back(r_max * static_cast<double>(q) / static_cast<double>(samples));
        a.ratio.push_back(1.0);
    }
    a.vol_unit_ball = 4.0 * kPi / 3.0;
    a.collapsed = false;
    return a;
}

namespace {

double reference_warp(ProbeReference ref, double rho, double fiber_radius) {
    if (ref == ProbeReference::RxCigar) return cigar::phi(rho, 1.0);
    return fiber_radius * std::sin(rho / fiber_radius); // round fiber of the given radius
}

} // namespace

double dimension_reduction_probe_rx(double kappa, double /*s*/, ProbeReference ref, double eps) {
    // The rescaled transverse profile of the product is the unit cigar at
    // every station; evaluate the comparison numerically all the same.
    const double rootK = std::sqrt(kappa);
    const double rho_max = 1.0 / eps;
    double worst = 0.0;
    const int n = 400;
    for (int q = 0; q <= n; ++q) {
        const double rho = rho_max * static_cast<double>(q) / static_cast<double>(n);
        const double rescaled = rootK * cigar::phi(rho / rootK, kappa);
        worst = std::max(worst, std::abs(rescaled - reference_warp(ref, rho, std::sqrt(2.0))));
    }
    return worst;
}

double dimension_reduction_probe_profile(const RadialProfile& p, double s, ProbeReference ref,
                                         double eps) {
    const ProfileCurve c = curve_from_profile(p);
    const CurvatureReport cur = radial_curvature(p);
    const double h = p.r[1] - p.r[0];
    const auto ks = static_cast<std::size_t>(std::llround(s / h));
    const double K = cur.scalar[ks];
    const double rootK = std::sqrt(K);

    // Transverse geodesic in the meridian slice d r^2 + w^2 d beta^2 from
    // (s, 0) with purely angular initial direction; fiber radius w(r) sin(beta).
    double r = s, beta = 0.0, rp = 0.0, betap = 1.0 / c.w(s);
    const double dt = 1e-3 / rootK;
    const double rho_cap = std::min(1.0 / eps, rootK * (p.r.back() - s) * 0.9);
    double worst = 0.0;
    double tau = 0.0;
    while (rootK * tau < rho_cap && beta < kPi && r < p.r.back() - 2.0 * h) {
        auto acc = [&](double rr, double rps, double bps, double& rpp, double& bpp) {
            const double W = c.w(rr), Wp = c.wp(rr);
            rpp = W * Wp * bps * bps;
            bpp = -2.0 * (Wp / W) * rps * bps;
        };
        // RK2 midpoint for the geodesic system.
        double a1, b1;
        acc(r, rp, betap, a1, b1);
        const double rm = r + 0.5 * dt * rp, rpm = rp + 0.5 * dt * a1;
        const double bpm = betap + 0.5 * dt * b1;
        double a2, b2;
        acc(rm, rpm, bpm, a2, b2);
        r += dt * rpm;
        rp += dt * a2;
        beta += dt * bpm;
        betap += dt * b2;
        tau += dt;

        const double fiber = c.w(r) * std::sin(beta);
        const double rescaled = rootK * fiber;
        const double rho = rootK * tau;
        worst = std::max(worst, std::abs(rescaled - reference_warp(ref, rho, rootK * c.w(s))));
    }
    return worst;
}

} // namespace soliton
