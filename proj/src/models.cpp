#include "soliton/models.hpp"

#include <cmath>
#include <stdexcept>

namespace soliton {

namespace cigar {

double phi(double rho, double kappa) {
    const double s = std::sqrt(kappa);
    return 2.0 / s * std::tanh(0.5 * s * rho);
}
double phi_d1(double rho, double kappa) {
    const double c = std::cosh(0.5 * std::sqrt(kappa) * rho);
    return 1.0 / (c * c);
}
double phi_d2(double rho, double kappa) {
    const double s = std::sqrt(kappa);
    const double x = 0.5 * s * rho;
    const double sech2 = 1.0 / (std::cosh(x) * std::cosh(x));
    return -s * sech2 * std::tanh(x);
}
double f(double rho, double kappa) { return 2.0 * std::log(std::cosh(0.5 * std::sqrt(kappa) * rho)); }
double f_d1(double rho, double kappa) {
    const double s = std::sqrt(kappa);
    return s * std::tanh(0.5 * s * rho);
}
double gauss(double rho, double kappa) {
    const double c = std::cosh(0.5 * std::sqrt(kappa) * rho);
    return 0.5 * kappa / (c * c);
}
double scalar(double rho, double kappa) { return 2.0 * gauss(rho, kappa); }

} // namespace cigar

RadialProfile cigar_profile(double r_max, double step, double kappa) {
    if (!(r_max > 0.0) || !(step > 0.0)) throw std::invalid_argument("cigar_profile: bad domain");
    const auto m = static_cast<std::size_t>(std::llround(r_max / step)) + 1;
    RadialProfile p;
    p.n = 2;
    p.r.resize(m);
    p.phi.resize(m);
    p.phi_d1.resize(m);
    p.phi_d2.resize(m);
    p.f.resize(m);
    p.f_d1.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double rho = step * static_cast<double>(k);
        p.r[k] = rho;
        p.phi[k] = cigar::phi(rho, kappa);
        p.phi_d1[k] = cigar::phi_d1(rho, kappa);
        p.phi_d2[k] = cigar::phi_d2(rho, kappa);
        p.f[k] = cigar::f(rho, kappa);
        p.f_d1[k] = cigar::f_d1(rho, kappa);
    }
    p.phi[0] = 0.0;
    return p;
}

WarpedHalfPlaneMetric product_with_line(const RadialProfile& profile2d, double half_length,
                                        std::size_t nu) {
    profile2d.validate();
    if (profile2d.n != 2) throw std::invalid_argument("product_with_line: profile must be 2d");
    if (!profile2d.touches_axis())
        throw std::invalid_argument("product_with_line: profile must be axis-regular");
    if (nu < 5 || nu % 2 == 0)
        throw std::invalid_argument("product_with_line: nu must be odd and >= 5");

    WarpedHalfPlaneMetric m;
    m.nu = nu;
    m.nv = profile2d.size();
    m.u0 = -half_length;
    m.hu = 2.0 * half_length / static_cast<double>(nu - 1);
    m.hv = profile2d.r[1] - profile2d.r[0];
    m.g_uu.assign(m.size(), 1.0);
    m.g_uv.assign(m.size(), 0.0);
    m.g_vv.assign(m.size(), 1.0);
    m.phi.resize(m.size());
    m.f.resize(m.size());
    for (std::size_t k = 0; k < m.nv; ++k) {
        for (std::size_t j = 0; j < m.nu; ++j) {
            m.phi[m.idx(j, k)] = profile2d.phi[k];
            m.f[m.idx(j, k)] = profile2d.f[k];
        }
    }
    return m;
}

namespace {

// Cubic Hermite evaluation of a sampled function with known derivative.
double hermite(const std::vector<double>& x, const std::vector<double>& y,
               const std::vector<double>& dy, double xv) {
    const double h = x[1] - x[0];
    auto k = static_cast<std::ptrdiff_t>(std::floor((xv - x[0]) / h));
    k = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(x.size()) - 2));
    const double t = (xv - x[static_cast<std::size_t>(k)]) / h;
    const double y0 = y[static_cast<std::size_t>(k)], y1 = y[static_cast<std::size_t>(k) + 1];
    const double m0 = dy[static_cast<std::size_t>(k)] * h, m1 = dy[static_cast<std::size_t>(k) + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
}

} // namespace

WarpedHalfPlaneMetric profile_to_half_plane(const RadialProfile& p, double half_length,
                                            double height, double spacing) {
    p.validate();
    if (p.n < 3) throw std::invalid_argument("profile_to_half_plane: profile must have n >= 3");
    const double r_need = std::sqrt(half_length * half_length + height * height);
    if (p.r.back() < r_need)
        throw std::invalid_argument("profile_to_half_plane: profile domain too short");

    const auto half_cols = static_cast<std::size_t>(std::llround(half_length / spacing));
    const auto rows = static_cast<std::size_t>(std::llround(height / spacing)) + 1;

    WarpedHalfPlaneMetric m;
    m.nu = 2 * half_cols + 1;
    m.nv = rows;
    m.hu = spacing;
    m.hv = spacing;
    m.u0 = -spacing * static_cast<double>(half_cols);
    m.g_uu.assign(m.size(), 1.0);
    m.g_uv.assign(m.size(), 0.0);
    m.g_vv.assign(m.size(), 1.0);
    m.phi.assign(m.size(), 0.0);
    m.f.assign(m.size(), 0.0);

    for (std::size_t k = 0; k < m.nv; ++k) {
        for (std::size_t j = 0; j < m.nu; ++j) {
            const double u = m.u(j), v = m.v(k);
            const double r = std::hypot(u, v);
            const std::size_t id = m.idx(j, k);
            if (r < 1e-12) {
                m.f[id] = p.f[0];
                continue; // identity base, phi = 0 at the fixed point
            }
            const double w = hermite(p.r, p.phi, p.phi_d1, r);
            const double r2 = r * r, r4 = r2 * r2;
            m.g_uu[id] = u * u / r2 + w * w * v * v / r4;
            m.g_uv[id] = u * v / r2 - w * w * u * v / r4;
            m.g_vv[id] = v * v / r2 + w * w * u * u / r4;
            m.phi[id] = (k == 0) ? 0.0 : w * v / r;
            m.f[id] = hermite(p.r, p.f, p.f_d1, r);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Surfaces of revolution (sin(r)/i, r)

namespace {

struct MeridianTable {
    double i = 1.0;
    std::vector<double> r, s, dsdr; // fine grid, s = arclength(r)
    double length() const { return s.back(); }

    double speed(double rr) const { // ds/dr
        const double c = std::cos(rr) / i;
        return std::sqrt(1.0 + c * c);
    }

    // r(s) by Newton on the Hermite interpolant of s(r).
    double invert(double sv) const {
        const std::size_t m = r.size();
        std::size_t lo = 0, hi = m - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (s[mid] <= sv ? lo : hi) = mid;
        }
        double rr = r[lo] + (r[hi] - r[lo]) * (sv - s[lo]) / (s[hi] - s[lo]);
        for (int it = 0; it < 40; ++it) {
            const double err = hermite(r, s, dsdr, rr) - sv;
            rr -= err / speed(rr);
            if (std::abs(err) < 1e-14 * std::max(1.0, sv)) break;
        }
        return std::min(std::max(rr, 0.0), M_PI);
    }
};

MeridianTable build_meridian(double i, std::size_t fine = 16384) {
    MeridianTable t;
    t.i = i;
    t.r.resize(fine + 1);
    t.s.resize(fine + 1);
    t.dsdr.resize(fine + 1);
    const double h = M_PI / static_cast<double>(fine);
    for (std::size_t k = 0; k <= fine; ++k) {
        t.r[k] = h * static_cast<double>(k);
        t.dsdr[k] = t.speed(t.r[k]);
    }
    // Composite Simpson on pairs of intervals.
    t.s[0] = 0.0;
    for (std::size_t k = 2; k <= fine; k += 2) {
        t.s[k] = t.s[k - 2] + h / 3.0 * (t.dsdr[k - 2] + 4.0 * t.dsdr[k - 1] + t.dsdr[k]);
    }
    for (std::size_t k = 1; k <= fine; k += 2) {
        // Simpson over [k-1, k+1] halved is 4th order; use 3-point closed rule.
        const double a = t.dsdr[k - 1], b = t.dsdr[k];
        if (k == fine) {
            t.s[k] = t.s[k - 1] + h * 0.5 * (a + b);
        } else {
            t.s[k] = t.s[k - 1] + h / 12.0 * (5.0 * a + 8.0 * b - t.dsdr[k + 1]);
        }
    }
    return t;
}

double revolution_K(double r, double i) {
    const double c = std::cos(r) / i;
    const double q = 1.0 + c * c;
    return 1.0 / (q * q);
}

} // namespace

FlowState revolution_surface(double i, std::size_t nodes) {
    if (!(i > 0.0)) throw std::invalid_argument("revolution_surface: i must be positive");
    if (nodes < 9) throw std::invalid_argument("revolution_surface: too few nodes");
    const MeridianTable t = build_meridian(i);
    const double L = t.length();

    FlowState st;
    st.s.resize(nodes);
    st.b.resize(nodes);
    st.K_analytic.resize(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double sv = L * static_cast<double>(j) / static_cast<double>(nodes - 1);
        const double r = t.invert(sv);
        st.s[j] = sv;
        st.b[j] = std::sin(r) / i;
        st.K_analytic[j] = revolution_K(r, i);
    }
    st.b.front() = 0.0;
    st.b.back() = 0.0;
    const double cone = 1.0 / std::sqrt(1.0 + i * i);
    st.pole_slope_left = cone;
    st.pole_slope_right = -cone;
    return st;
}

FlowState smoothed_revolution_surface(double i, std::size_t nodes, double cap_fraction) {
    if (!(cap_fraction > 0.0) || !(cap_fraction < 0.9))
        throw std::invalid_argument("smoothed_revolution_surface: cap_fraction out of range");
    const MeridianTable t = build_meridian(i);
    const double L = t.length();
    const double s1 = cap_fraction * 0.5 * L;
    const double c = 1.0 / std::sqrt(1.0 + i * i); // cone slope of the exact profile
    const double Ke0 = revolution_K(0.0, i);
    const double beta = std::min(s1 * s1 * Ke0, 19.0); // pole-curvature matching, keeps q' >= 0
    const double c3 = 10.0 - 0.5 * beta, c4 = beta - 15.0, c5 = 6.0 - 0.5 * beta;
    auto q = [&](double x) { return x * x * x * (c3 + x * (c4 + x * c5)); };
    auto qp = [&](double x) { return x * x * (3.0 * c3 + x * (4.0 * c4 + x * 5.0 * c5)); };
    auto Q = [&](double x) {
        const double x4 = x * x * x * x;
        return x4 * (c3 / 4.0 + x * (c4 / 5.0 + x * c5 / 6.0));
    };
    const double Q1 = Q(1.0);

    auto exact = [&](double sv, double& b, double& bp, double& bpp) {
        const double r = t.invert(sv);
        b = std::sin(r) / i;
        bp = (std::cos(r) / i) / t.speed(r);
        bpp = -revolution_K(r, i) * b;
    };

    FlowState st;
    st.s.resize(nodes);
    st.b.resize(nodes);
    st.K_analytic.resize(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double sv = L * static_cast<double>(j) / static_cast<double>(nodes - 1);
        double be, bep, bepp;
        exact(sv, be, bep, bepp);
        double b, bpp;
        if (sv <= s1) {
            const double x = (s1 - sv) / s1;
            b = be + (1.0 - c) * s1 * (Q1 - Q(x));
            bpp = bepp - (1.0 - c) * qp(x) / s1;
        } else if (sv >= L - s1) {
            const double x = (sv - (L - s1)) / s1;
            b = be + (1.0 - c) * s1 * (Q1 - Q(x));
            bpp = bepp - (1.0 - c) * qp(x) / s1;
        } else {
            b = be + (1.0 - c) * s1 * Q1;
            bpp = bepp;
        }
        st.s[j] = sv;
        st.b[j] = b;
        if (j == 0 || j + 1 == nodes) {
            // K at a regular pole: -b'''/b' with b'(pole) = 1.
            st.K_analytic[j] = c * Ke0 + (1.0 - c) * beta / (s1 * s1);
        } else {
            st.K_analytic[j] = -bpp / b;
        }
    }
    st.b.front() = 0.0;
    st.b.back() = 0.0;
    st.pole_slope_left = 1.0;
    st.pole_slope_right = -1.0;

    // Rescale so min K = 1 (g -> K_min g).
    double kmin = st.K_analytic[0];
    for (double kv : st.K_analytic) kmin = std::min(kmin, kv);
    const double root = std::sqrt(kmin);
    for (std::size_t j = 0; j < nodes; ++j) {
        st.s[j] *= root;
        st.b[j] *= root;
        st.K_analytic[j] /= kmin;
    }
    return st;
}

} // namespace soliton
