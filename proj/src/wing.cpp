#include "soliton/wing.hpp"

#include <Eigen/Sparse>
#include <limits>
#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "soliton/curvature.hpp"
#include "soliton/compare.hpp"
#include "soliton/dual.hpp"
#include "soliton/models.hpp"
#include "soliton/parallel.hpp"
#include "soliton/verify.hpp"
#include "warped_geometry.hpp"

namespace soliton {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int NF = 5; // field order: g_uu, g_uv, g_vv, phi, f

// ---------------------------------------------------------------------------
// Bent-sector chart data: conformal factor of the half-plane-to-sector map
// with a mollified corner, the cigar warp at the chart distance to the axis,
// and the asymptotic potential.
struct Chart {
    double q;      // alpha0 / pi
    double kappa;  // tip curvature of the edge cigar, sin^2(alpha0/2)
    double calpha; // cos(alpha0/2)
    double eps_l;  // corner mollification scale
    double alpha0;

    explicit Chart(const WingProblem& p) {
        alpha0 = p.alpha0;
        q = p.alpha0 / kPi;
        const double half = 0.5 * p.alpha0;
        kappa = std::sin(half) * std::sin(half);
        calpha = std::cos(half);
        eps_l = p.mollify;
    }

    double lambda(double u, double v) const {
        const double r2 = u * u + v * v;
        return q * std::pow(r2 + eps_l * eps_l, 0.5 * (q - 1.0));
    }
    // Angular part of the potential: Re(e^{-i alpha0/2} (z + i eps)^q), the
    // harmonic linear-growth function of the sector with the branch point
    // pushed below the axis. At alpha0 = pi it reduces to v + const.
    double potential_linear(double u, double v) const {
        const double vv = v + eps_l;
        const double rr = std::hypot(u, vv);
        const double th = std::atan2(vv, u);
        return std::pow(rr, q) * std::cos(q * th - 0.5 * alpha0);
    }
    void fill(double u, double v, double& E, double& F, double& G, double& phi,
              double& f) const {
        const double lam = lambda(u, v);
        E = G = lam * lam;
        F = 0.0;
        // Chart distance to the axis: rho = lambda v has |grad rho| = 1
        // exactly on the whole axis, so the warp data is axis-regular.
        const double rho = lam * v;
        phi = cigar::phi(rho, kappa);
        f = cigar::f(rho, kappa) - std::sqrt(kappa) * rho + potential_linear(u, v);
    }
};

struct Lattice {
    std::size_t nu = 0, nv = 0;
    double h = 0.0;
    double u0 = 0.0;
    bool mirror = false; // Z2 half grid: column 0 is Sigma with reflection ghosts

    std::size_t nodes() const { return nu * nv; }
    std::size_t unknowns() const { return nodes() * NF; }
    std::size_t node(std::size_t j, std::size_t k) const { return k * nu + j; }
    std::size_t id(std::size_t j, std::size_t k, int f) const {
        return node(j, k) * NF + static_cast<std::size_t>(f);
    }
};

template <class T>
struct FieldSet {
    std::vector<T> E, F, G, phi, f;
    void resize(std::size_t n) {
        E.resize(n);
        F.resize(n);
        G.resize(n);
        phi.resize(n);
        f.resize(n);
    }
};

// Background quantities for the DeTurck vector: Christoffel symbols of the
// data metric and the fiber term phi_bar * gbar^{kl} d_l phi_bar, computed
// with the same stencils as the state quantities so the gauge vanishes
// identically on the data itself.
struct Background {
    std::vector<double> G6;         // 6 Christoffel components per node
    std::vector<double> tu, tv;     // fiber term, contravariant
    std::vector<double> data;       // Dirichlet values, NF per node
};

template <class T>
struct EvalScratch {
    std::vector<detail::BaseGeom<T>> geom;
    std::vector<detail::Deriv2<T>> dphi, df;
    std::vector<T> wcov_u, wcov_v, wcon_u, wcon_v;
    std::vector<char> have;
    void resize(std::size_t n) {
        geom.resize(n);
        dphi.resize(n);
        df.resize(n);
        wcov_u.assign(n, T(0.0));
        wcov_v.assign(n, T(0.0));
        wcon_u.assign(n, T(0.0));
        wcon_v.assign(n, T(0.0));
        have.assign(n, 0);
    }
};

template <class T>
struct Views {
    detail::FieldView<T> E, F, G, phi, f;
};

template <class T>
Views<T> make_views(const Lattice& lat, const FieldSet<T>& x) {
    Views<T> v;
    v.E = {x.E.data(), lat.nu, +1, +1, lat.mirror};
    v.F = {x.F.data(), lat.nu, -1, -1, lat.mirror};
    v.G = {x.G.data(), lat.nu, +1, +1, lat.mirror};
    v.phi = {x.phi.data(), lat.nu, -1, +1, lat.mirror};
    v.f = {x.f.data(), lat.nu, +1, +1, lat.mirror};
    return v;
}

// Gauge-fixed steady-soliton residual. Interior rows are the base, fiber and
// trace equations with the DeTurck term; the axis rows impose phi = 0,
// g_uv = 0, the slope tie g_vv = (d_v phi)^2 and Neumann conditions; the far
// boundary rows are Dirichlet against the chart data.
template <class T>
void eval_residual(const Lattice& lat, const Background& bg, const FieldSet<T>& x,
                   EvalScratch<T>& sc, std::vector<T>& res) {
    const auto nu = static_cast<std::ptrdiff_t>(lat.nu);
    const auto nv = static_cast<std::ptrdiff_t>(lat.nv);
    const double h = lat.h;
    const Views<T> vw = make_views(lat, x);
    sc.resize(lat.nodes());
    res.assign(lat.unknowns(), T(0.0));

    const std::ptrdiff_t j_begin = lat.mirror ? 0 : 1;

    // Pass 0/1: geometry and the DeTurck field W on rows 1..nv-2.
    parallel_for((nv - 2) * (nu - 1 - j_begin), [&](std::ptrdiff_t w) {
        const std::ptrdiff_t span = nu - 1 - j_begin;
        const std::ptrdiff_t j = j_begin + w % span;
        const std::ptrdiff_t k = 1 + w / span;
        const std::size_t nd = lat.node(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
        auto& g = sc.geom[nd];
        g = detail::base_geometry(vw.E, vw.F, vw.G, j, k, h, h);
        sc.dphi[nd] = detail::derivatives(vw.phi, j, k, h, h);
        sc.df[nd] = detail::derivatives(vw.f, j, k, h, h);
        sc.have[nd] = 1;

        const T cu = g.iE * g.Guu_u + T(2.0) * g.iF * g.Guv_u + g.iG * g.Gvv_u;
        const T cv = g.iE * g.Guu_v + T(2.0) * g.iF * g.Guv_v + g.iG * g.Gvv_v;
        const double* B = &bg.G6[6 * nd];
        const T cbu = g.iE * T(B[0]) + T(2.0) * g.iF * T(B[2]) + g.iG * T(B[4]);
        const T cbv = g.iE * T(B[1]) + T(2.0) * g.iF * T(B[3]) + g.iG * T(B[5]);
        const T gu = g.iE * sc.dphi[nd].du + g.iF * sc.dphi[nd].dv;
        const T gv = g.iF * sc.dphi[nd].du + g.iG * sc.dphi[nd].dv;
        const T phi = sc.dphi[nd].w;
        const T phi2 = phi * phi;
        const T wu = cu - cbu - gu / phi + T(bg.tu[nd]) / phi2;
        const T wvv = cv - cbv - gv / phi + T(bg.tv[nd]) / phi2;
        sc.wcon_u[nd] = wu;
        sc.wcon_v[nd] = wvv;
        sc.wcov_u[nd] = x.E[nd] * wu + x.F[nd] * wvv;
        sc.wcov_v[nd] = x.F[nd] * wu + x.G[nd] * wvv;
    });

    // Axis row of W by parity (W^v odd, W^u even), then edge clamps.
    for (std::ptrdiff_t j = j_begin; j < nu - 1; ++j) {
        const std::size_t n0 = lat.node(static_cast<std::size_t>(j), 0);
        const std::size_t n1 = lat.node(static_cast<std::size_t>(j), 1);
        const std::size_t n2 = lat.node(static_cast<std::size_t>(j), 2);
        sc.wcov_u[n0] = (T(4.0) * sc.wcov_u[n1] - sc.wcov_u[n2]) / T(3.0);
        sc.wcon_u[n0] = (T(4.0) * sc.wcon_u[n1] - sc.wcon_u[n2]) / T(3.0);
        sc.wcov_v[n0] = T(0.0);
        sc.wcon_v[n0] = T(0.0);
    }
    // Linear extrapolation of W onto the Dirichlet edges. Anything weaker
    // (e.g. copying the neighbour) halves the gauge term's normal derivative
    // in the adjacent row and leaves a boundary-layer near-null mode.
    auto extend = [&](std::size_t dst, std::size_t s1, std::size_t s2) {
        sc.wcov_u[dst] = T(2.0) * sc.wcov_u[s1] - sc.wcov_u[s2];
        sc.wcov_v[dst] = T(2.0) * sc.wcov_v[s1] - sc.wcov_v[s2];
        sc.wcon_u[dst] = T(2.0) * sc.wcon_u[s1] - sc.wcon_u[s2];
        sc.wcon_v[dst] = T(2.0) * sc.wcon_v[s1] - sc.wcon_v[s2];
    };
    for (std::ptrdiff_t k = 0; k < nv - 1; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        extend(lat.node(lat.nu - 1, kk), lat.node(lat.nu - 2, kk), lat.node(lat.nu - 3, kk));
        if (!lat.mirror) extend(lat.node(0, kk), lat.node(1, kk), lat.node(2, kk));
    }
    for (std::ptrdiff_t j = 0; j < nu; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        extend(lat.node(jj, lat.nv - 1), lat.node(jj, lat.nv - 2), lat.node(jj, lat.nv - 3));
    }

    detail::FieldView<T> wu_view{sc.wcov_u.data(), lat.nu, +1, -1, lat.mirror};
    detail::FieldView<T> wv_view{sc.wcov_v.data(), lat.nu, -1, +1, lat.mirror};

    // Pass 2: rows.
    parallel_for(nv * nu, [&](std::ptrdiff_t w) {
        const std::ptrdiff_t j = w % nu;
        const std::ptrdiff_t k = w / nu;
        const std::size_t nd = lat.node(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
        T* out = &res[nd * NF];

        const bool dirichlet =
            (k == nv - 1) || (j == nu - 1) || (!lat.mirror && j == 0);
        if (dirichlet) {
            const double* d = &bg.data[nd * NF];
            out[0] = x.E[nd] - T(d[0]);
            out[1] = x.F[nd] - T(d[1]);
            out[2] = x.G[nd] - T(d[2]);
            out[3] = x.phi[nd] - T(d[3]);
            out[4] = x.f[nd] - T(d[4]);
            return;
        }
        if (k == 0) {
            // Axis: phi = 0, g_uv = 0, slope tie, Neumann for g_uu and f.
            const std::size_t n1 = lat.node(static_cast<std::size_t>(j), 1);
            const std::size_t n2 = lat.node(static_cast<std::size_t>(j), 2);
            const T dE = (T(-3.0) * x.E[nd] + T(4.0) * x.E[n1] - x.E[n2]) / T(2.0 * h);
            const T dphi = (T(-3.0) * x.phi[nd] + T(4.0) * x.phi[n1] - x.phi[n2]) / T(2.0 * h);
            const T df = (T(-3.0) * x.f[nd] + T(4.0) * x.f[n1] - x.f[n2]) / T(2.0 * h);
            out[0] = dE;
            out[1] = x.F[nd];
            out[2] = dphi * dphi - x.G[nd];
            out[3] = x.phi[nd];
            out[4] = df;
            return;
        }

        // Interior PDE rows (j = 0 with the mirror is ordinary interior; its
        // g_uv row is replaced by the odd-symmetry condition).
        const auto& g = sc.geom[nd];
        const auto& dphi = sc.dphi[nd];
        const auto& df = sc.df[nd];
        const auto hphi = detail::hessian(g, dphi);
        const auto hf = detail::hessian(g, df);
        const T phi = dphi.w;

        const T wu = wu_view.at(j, k);
        const T wv = wv_view.at(j, k);
        const T du_wu = (wu_view.at(j + 1, k) - wu_view.at(j - 1, k)) / T(2.0 * h);
        const T dv_wu = (wu_view.at(j, k + 1) - wu_view.at(j, k - 1)) / T(2.0 * h);
        const T du_wv = (wv_view.at(j + 1, k) - wv_view.at(j - 1, k)) / T(2.0 * h);
        const T dv_wv = (wv_view.at(j, k + 1) - wv_view.at(j, k - 1)) / T(2.0 * h);

        const T gw_uu = du_wu - g.Guu_u * wu - g.Guu_v * wv;
        const T gw_uv = T(0.5) * (du_wv + dv_wu) - g.Guv_u * wu - g.Guv_v * wv;
        const T gw_vv = dv_wv - g.Gvv_u * wu - g.Gvv_v * wv;
        const T gauge_theta = sc.wcon_u[nd] * dphi.du + sc.wcon_v[nd] * dphi.dv;

        out[0] = g.K * x.E[nd] - hphi.uu / phi - hf.uu - gw_uu;
        out[1] = (lat.mirror && j == 0) ? x.F[nd]
                                        : g.K * x.F[nd] - hphi.uv / phi - hf.uv - gw_uv;
        out[2] = g.K * x.G[nd] - hphi.vv / phi - hf.vv - gw_vv;
        out[3] = -hphi.lap - detail::grad_inner(g, df, dphi) - gauge_theta;
        // Trace row augmented with the Hamilton identity R + |grad f|^2 = 1.
        // The trace alone is scale-invariant at a solution, which leaves the
        // soliton scaling family as a soft mode; the Hamilton part pins the
        // normalization R(p) = 1 throughout the bulk. The row is kept
        // unweighted: multiplying by phi degenerates the f-equation at the
        // axis and the Jacobian with it.
        const T R_M = T(2.0) * g.K - T(2.0) * hphi.lap / phi;
        const T grad_f2 = detail::grad_inner(g, df, df);
        out[4] = phi * hf.lap + detail::grad_inner(g, dphi, df) - T(2.0) * phi * g.K +
                 T(2.0) * hphi.lap + (R_M + grad_f2 - T(1.0));
    });
}

Background make_background(const Lattice& lat, const Chart& chart) {
    Background bg;
    FieldSet<double> data;
    data.resize(lat.nodes());
    for (std::size_t k = 0; k < lat.nv; ++k) {
        for (std::size_t j = 0; j < lat.nu; ++j) {
            const std::size_t nd = lat.node(j, k);
            const double u = lat.u0 + lat.h * static_cast<double>(j);
            const double v = lat.h * static_cast<double>(k);
            chart.fill(u, v, data.E[nd], data.F[nd], data.G[nd], data.phi[nd], data.f[nd]);
        }
    }
    data.phi[lat.node(0, 0)] = 0.0;

    bg.data.resize(lat.unknowns());
    for (std::size_t nd = 0; nd < lat.nodes(); ++nd) {
        bg.data[nd * NF + 0] = data.E[nd];
        bg.data[nd * NF + 1] = data.F[nd];
        bg.data[nd * NF + 2] = data.G[nd];
        bg.data[nd * NF + 3] = data.phi[nd];
        bg.data[nd * NF + 4] = data.f[nd];
    }

    bg.G6.assign(6 * lat.nodes(), 0.0);
    bg.tu.assign(lat.nodes(), 0.0);
    bg.tv.assign(lat.nodes(), 0.0);
    const Views<double> vw = make_views(lat, data);
    const auto nu = static_cast<std::ptrdiff_t>(lat.nu);
    const auto nv = static_cast<std::ptrdiff_t>(lat.nv);
    const std::ptrdiff_t j_begin = lat.mirror ? 0 : 1;
    for (std::ptrdiff_t k = 1; k < nv - 1; ++k) {
        for (std::ptrdiff_t j = j_begin; j < nu - 1; ++j) {
            const std::size_t nd = lat.node(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
            const auto g = detail::base_geometry(vw.E, vw.F, vw.G, j, k, lat.h, lat.h);
            double* B = &bg.G6[6 * nd];
            B[0] = g.Guu_u;
            B[1] = g.Guu_v;
            B[2] = g.Guv_u;
            B[3] = g.Guv_v;
            B[4] = g.Gvv_u;
            B[5] = g.Gvv_v;
            const auto dphi = detail::derivatives(vw.phi, j, k, lat.h, lat.h);
            bg.tu[nd] = dphi.w * (g.iE * dphi.du + g.iF * dphi.dv);
            bg.tv[nd] = dphi.w * (g.iF * dphi.du + g.iG * dphi.dv);
        }
    }
    return bg;
}

Lattice full_lattice(const WingProblem& p) {
    Lattice lat;
    lat.nu = p.nu;
    lat.nv = p.nv;
    lat.h = p.spacing;
    lat.u0 = -p.spacing * 0.5 * static_cast<double>(p.nu - 1);
    lat.mirror = false;
    return lat;
}

Lattice half_lattice(const WingProblem& p) {
    Lattice lat;
    lat.nu = (p.nu + 1) / 2;
    lat.nv = p.nv;
    lat.h = p.spacing;
    lat.u0 = 0.0;
    lat.mirror = true;
    return lat;
}

FieldSet<double> fields_from_metric(const Lattice& lat, const WarpedHalfPlaneMetric& m,
                                    std::size_t j_offset) {
    FieldSet<double> x;
    x.resize(lat.nodes());
    for (std::size_t k = 0; k < lat.nv; ++k) {
        for (std::size_t j = 0; j < lat.nu; ++j) {
            const std::size_t src = m.idx(j + j_offset, k);
            const std::size_t nd = lat.node(j, k);
            x.E[nd] = m.g_uu[src];
            x.F[nd] = m.g_uv[src];
            x.G[nd] = m.g_vv[src];
            x.phi[nd] = m.phi[src];
            x.f[nd] = m.f[src];
        }
    }
    return x;
}

} // namespace

void WingProblem::validate() const {
    if (!(alpha0 > 0.0) || !(alpha0 <= kPi))
        throw std::invalid_argument("wing: alpha0 must lie in (0, pi]");
    if (nu < 65 || nu % 2 == 0) throw std::invalid_argument("wing: nu must be odd and >= 65");
    if (nv < 33) throw std::invalid_argument("wing: nv too small");
    if (!(spacing > 0.0)) throw std::invalid_argument("wing: spacing must be positive");
    // Physical lattice spacing must resolve the cigar scale at R(p) = 1:
    // at least 8 nodes per unit length everywhere.
    const Chart chart(*this);
    const double lam_max = chart.lambda(0.0, 0.0); // conformal factor peaks at the corner
    if (lam_max * spacing > 0.125 + 1e-12)
        throw std::invalid_argument("wing: grid does not resolve the cigar scale");
}

WarpedHalfPlaneMetric wing_initial_data(const WingProblem& p) {
    p.validate();
    const Chart chart(p);
    WarpedHalfPlaneMetric m;
    m.nu = p.nu;
    m.nv = p.nv;
    m.hu = m.hv = p.spacing;
    m.u0 = -p.spacing * 0.5 * static_cast<double>(p.nu - 1);
    m.g_uu.resize(m.size());
    m.g_uv.resize(m.size());
    m.g_vv.resize(m.size());
    m.phi.resize(m.size());
    m.f.resize(m.size());
    for (std::size_t k = 0; k < m.nv; ++k) {
        for (std::size_t j = 0; j < m.nu; ++j) {
            const std::size_t nd = m.idx(j, k);
            chart.fill(m.u(j), m.v(k), m.g_uu[nd], m.g_uv[nd], m.g_vv[nd], m.phi[nd], m.f[nd]);
            if (k == 0) m.phi[nd] = 0.0;
        }
    }
    return m;
}

std::vector<double> wing_residual(const WingProblem& p, const WarpedHalfPlaneMetric& state) {
    p.validate();
    if (state.nu != p.nu || state.nv != p.nv)
        throw std::invalid_argument("wing_residual: state does not match the problem grid");
    const Lattice lat = full_lattice(p);
    const Chart chart(p);
    const Background bg = make_background(lat, chart);
    const FieldSet<double> x = fields_from_metric(lat, state, 0);
    EvalScratch<double> sc;
    std::vector<double> res;
    eval_residual(lat, bg, x, sc, res);
    return res;
}

std::vector<double> wing_jacobian_action(const WingProblem& p, const WarpedHalfPlaneMetric& state,
                                         const std::vector<double>& delta) {
    p.validate();
    const Lattice lat = full_lattice(p);
    if (delta.size() != lat.unknowns())
        throw std::invalid_argument("wing_jacobian_action: delta size mismatch");
    const Chart chart(p);
    const Background bg = make_background(lat, chart);
    const FieldSet<double> xr = fields_from_metric(lat, state, 0);
    FieldSet<Dual> x;
    x.resize(lat.nodes());
    for (std::size_t nd = 0; nd < lat.nodes(); ++nd) {
        x.E[nd] = {xr.E[nd], delta[nd * NF + 0]};
        x.F[nd] = {xr.F[nd], delta[nd * NF + 1]};
        x.G[nd] = {xr.G[nd], delta[nd * NF + 2]};
        x.phi[nd] = {xr.phi[nd], delta[nd * NF + 3]};
        x.f[nd] = {xr.f[nd], delta[nd * NF + 4]};
    }
    EvalScratch<Dual> sc;
    std::vector<Dual> res;
    eval_residual(lat, bg, x, sc, res);
    std::vector<double> out(res.size());
    for (std::size_t q = 0; q < res.size(); ++q) out[q] = res[q].d;
    return out;
}

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool state_positive(const Lattice& lat, const FieldSet<double>& x) {
    for (std::size_t k = 0; k < lat.nv; ++k) {
        for (std::size_t j = 0; j < lat.nu; ++j) {
            const std::size_t nd = lat.node(j, k);
            const double det = x.E[nd] * x.G[nd] - x.F[nd] * x.F[nd];
            if (!(x.E[nd] > 0.0) || !(det > 0.0)) return false;
            if (k > 0 && !(x.phi[nd] > 0.0)) return false;
            if (!std::isfinite(x.f[nd])) return false;
        }
    }
    return true;
}

// Exact sparse Jacobian by dual-number sweeps over a distance-5 colouring
// (the residual stencil reaches two nodes through the gauge field).
Eigen::SparseMatrix<double> assemble_jacobian(const Lattice& lat, const Background& bg,
                                              const FieldSet<double>& xr) {
    const auto n = static_cast<Eigen::Index>(lat.unknowns());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(lat.unknowns() * 60);

    FieldSet<Dual> x;
    x.resize(lat.nodes());
    for (std::size_t nd = 0; nd < lat.nodes(); ++nd) {
        x.E[nd] = xr.E[nd];
        x.F[nd] = xr.F[nd];
        x.G[nd] = xr.G[nd];
        x.phi[nd] = xr.phi[nd];
        x.f[nd] = xr.f[nd];
    }
    EvalScratch<Dual> sc;
    std::vector<Dual> res;

    auto field_ref = [&](std::size_t nd, int f) -> Dual& {
        switch (f) {
            case 0: return x.E[nd];
            case 1: return x.F[nd];
            case 2: return x.G[nd];
            case 3: return x.phi[nd];
            default: return x.f[nd];
        }
    };

    const auto nu = static_cast<std::ptrdiff_t>(lat.nu);
    const auto nv = static_cast<std::ptrdiff_t>(lat.nv);

    for (int cu = 0; cu < 5; ++cu) {
        for (int cv = 0; cv < 5; ++cv) {
            for (int cf = 0; cf < NF; ++cf) {
                // Seed this colour class.
                for (std::ptrdiff_t k = cv; k < nv; k += 5)
                    for (std::ptrdiff_t j = cu; j < nu; j += 5)
                        field_ref(lat.node(static_cast<std::size_t>(j),
                                           static_cast<std::size_t>(k)), cf).d = 1.0;

                eval_residual(lat, bg, x, sc, res);

                for (std::ptrdiff_t k = 0; k < nv; ++k) {
                    for (std::ptrdiff_t j = 0; j < nu; ++j) {
                        const std::size_t nd =
                            lat.node(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
                        // Locate the unique column of this colour inside the
                        // 5x5 stencil window (folded copies hit the same column).
                        std::ptrdiff_t col_node = -1;
                        for (std::ptrdiff_t a = -2; a <= 2 && col_node < 0; ++a) {
                            std::ptrdiff_t jj = j + a;
                            if (jj < 0) {
                                if (!lat.mirror) continue;
                                jj = -jj;
                            }
                            if (jj >= nu) continue;
                            if (jj % 5 != cu) continue;
                            for (std::ptrdiff_t b = -2; b <= 2; ++b) {
                                std::ptrdiff_t kk = k + b;
                                if (kk < 0) kk = -kk;
                                if (kk >= nv) continue;
                                if (kk % 5 != cv) continue;
                                col_node = static_cast<std::ptrdiff_t>(
                                    lat.node(static_cast<std::size_t>(jj),
                                             static_cast<std::size_t>(kk)));
                                break;
                            }
                        }
                        if (col_node < 0) continue;
                        const std::size_t col =
                            static_cast<std::size_t>(col_node) * NF + static_cast<std::size_t>(cf);
                        for (int fr = 0; fr < NF; ++fr) {
                            const double d = res[nd * NF + static_cast<std::size_t>(fr)].d;
                            if (d != 0.0)
                                trips.emplace_back(static_cast<Eigen::Index>(nd * NF + fr),
                                                   static_cast<Eigen::Index>(col), d);
                        }
                    }
                }

                for (std::ptrdiff_t k = cv; k < nv; k += 5)
                    for (std::ptrdiff_t j = cu; j < nu; j += 5)
                        field_ref(lat.node(static_cast<std::size_t>(j),
                                           static_cast<std::size_t>(k)), cf).d = 0.0;
            }
        }
    }

    Eigen::SparseMatrix<double> J(n, n);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

} // namespace

namespace {

struct IterateOutcome {
    bool converged = false;
    int steps = 0;
    std::vector<double> history;
};

FieldSet<double> data_fields(const Lattice& lat, const Background& bg) {
    FieldSet<double> x;
    x.resize(lat.nodes());
    for (std::size_t nd = 0; nd < lat.nodes(); ++nd) {
        x.E[nd] = bg.data[nd * NF + 0];
        x.F[nd] = bg.data[nd * NF + 1];
        x.G[nd] = bg.data[nd * NF + 2];
        x.phi[nd] = bg.data[nd * NF + 3];
        x.f[nd] = bg.data[nd * NF + 4];
    }
    return x;
}

IterateOutcome newton_iterate(const Lattice& lat, const Background& bg, FieldSet<double>& x,
                              double tol, int max_steps) {
    EvalScratch<double> sc;
    std::vector<double> res;
    eval_residual(lat, bg, x, sc, res);
    double rn = max_abs(res);

    IterateOutcome out;
    out.history.push_back(rn);
    const auto n = static_cast<Eigen::Index>(lat.unknowns());
    double mu = 0.0; // Levenberg damping; zero while plain Newton works

    auto apply = [&](FieldSet<double>& trial, const Eigen::VectorXd& dx, double alpha) {
        for (std::size_t nd = 0; nd < lat.nodes(); ++nd) {
            trial.E[nd] = x.E[nd] + alpha * dx[static_cast<Eigen::Index>(nd * NF + 0)];
            trial.F[nd] = x.F[nd] + alpha * dx[static_cast<Eigen::Index>(nd * NF + 1)];
            trial.G[nd] = x.G[nd] + alpha * dx[static_cast<Eigen::Index>(nd * NF + 2)];
            trial.phi[nd] = x.phi[nd] + alpha * dx[static_cast<Eigen::Index>(nd * NF + 3)];
            trial.f[nd] = x.f[nd] + alpha * dx[static_cast<Eigen::Index>(nd * NF + 4)];
        }
    };

    for (int step = 0; step < max_steps && rn > tol; ++step) {
        const Eigen::SparseMatrix<double> J = assemble_jacobian(lat, bg, x);
        Eigen::VectorXd rhs(n);
        for (Eigen::Index q = 0; q < n; ++q) rhs[q] = -res[static_cast<std::size_t>(q)];

        FieldSet<double> trial;
        trial.resize(lat.nodes());
        std::vector<double> trial_res;
        bool accepted = false;

        if (mu == 0.0) {
            // Plain Newton with a backtracking line search.
            Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
            lu.analyzePattern(J);
            lu.factorize(J);
            if (lu.info() == Eigen::Success) {
                const Eigen::VectorXd dx = lu.solve(rhs);
                double alpha = 1.0;
                for (int halving = 0; halving < 8; ++halving) {
                    apply(trial, dx, alpha);
                    if (state_positive(lat, trial)) {
                        eval_residual(lat, bg, trial, sc, trial_res);
                        const double trial_rn = max_abs(trial_res);
                        if (trial_rn < rn * (1.0 - 1e-4 * alpha)) {
                            x = std::move(trial);
                            res = std::move(trial_res);
                            rn = trial_rn;
                            accepted = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
            }
            if (!accepted) mu = std::max(mu, 1e-6); // switch to damped iterations
        }

        if (!accepted) {
            // Pseudo-transient fallback: (mu I + J) dx = -r with the damping
            // relaxed after every success. Tames the strong nonlinearity of
            // the axis-adjacent rows when the undamped step overshoots.
            const double r2 = rhs.squaredNorm();
            for (int tries = 0; tries < 24 && !accepted; ++tries) {
                Eigen::SparseMatrix<double> A = J;
                for (Eigen::Index q = 0; q < n; ++q) A.coeffRef(q, q) += mu;
                Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> dlu;
                dlu.analyzePattern(A);
                dlu.factorize(A);
                if (dlu.info() == Eigen::Success) {
                    const Eigen::VectorXd dx = dlu.solve(rhs);
                    apply(trial, dx, 1.0);
                    if (state_positive(lat, trial)) {
                        eval_residual(lat, bg, trial, sc, trial_res);
                        double trial_r2 = 0.0;
                        for (double v : trial_res) trial_r2 += v * v;
                        if (trial_r2 < r2 * (1.0 - 1e-8)) {
                            x = std::move(trial);
                            res = std::move(trial_res);
                            rn = max_abs(res);
                            accepted = true;
                            mu = mu * 0.2;
                            break;
                        }
                    }
                }
                mu = (mu == 0.0) ? 1e-4 : mu * 6.0;
            }
            if (accepted && mu < 1e-10) mu = 0.0; // try plain Newton again
        }

        if (!accepted)
            throw std::runtime_error("wing newton: stagnation, last residual " +
                                     std::to_string(rn));
        out.steps = step + 1;
        out.history.push_back(rn);
    }
    out.converged = rn <= tol;
    return out;
}

// Bilinear prolongation of a half-grid field correction onto the doubled grid.
std::vector<double> prolong(const Lattice& coarse, const Lattice& fine,
                            const std::vector<double>& v) {
    std::vector<double> out(fine.nodes(), 0.0);
    for (std::size_t k = 0; k < fine.nv; ++k) {
        for (std::size_t j = 0; j < fine.nu; ++j) {
            const double xc = 0.5 * static_cast<double>(j);
            const double yc = 0.5 * static_cast<double>(k);
            const std::size_t j0 = std::min(static_cast<std::size_t>(xc), coarse.nu - 2);
            const std::size_t k0 = std::min(static_cast<std::size_t>(yc), coarse.nv - 2);
            const double tx = xc - static_cast<double>(j0);
            const double ty = yc - static_cast<double>(k0);
            out[fine.node(j, k)] =
                (1.0 - tx) * (1.0 - ty) * v[coarse.node(j0, k0)] +
                tx * (1.0 - ty) * v[coarse.node(j0 + 1, k0)] +
                (1.0 - tx) * ty * v[coarse.node(j0, k0 + 1)] +
                tx * ty * v[coarse.node(j0 + 1, k0 + 1)];
        }
    }
    return out;
}

} // namespace

WingSolution newton_solve(const WingProblem& p) {
    p.validate();
    const Lattice fine = half_lattice(p);
    const Chart chart(p);
    const Background bg = make_background(fine, chart);

    FieldSet<double> x = data_fields(fine, bg);

    // The bent-product data lies inside the Newton basin only for mild bends.
    // For stronger bends, walk alpha0 down on a coarsened grid with warm
    // starts, then prolong the correction; the reported iteration is the one
    // on the target grid.
    const bool can_coarsen = (p.nu - 1) % 2 == 0 && (p.nv - 1) % 2 == 0 &&
                             ((p.nu + 1) / 2) % 2 == 1 && p.nu >= 129 && p.nv >= 65;
    if (p.alpha0 < 2.95) {
        Lattice coarse = fine;
        WingProblem pc = p;
        if (can_coarsen) {
            pc.nu = (p.nu + 1) / 2;
            pc.nv = (p.nv + 1) / 2;
            pc.spacing = 2.0 * p.spacing;
            coarse = half_lattice(pc);
        }
        const int leg_count = static_cast<int>(std::ceil((3.05 - p.alpha0) / 0.1));
        FieldSet<double> xc;
        std::vector<double> prev_data;
        for (int leg = 0; leg <= leg_count; ++leg) {
            WingProblem pl = pc;
            pl.alpha0 = 3.05 + (p.alpha0 - 3.05) * static_cast<double>(leg) /
                                   static_cast<double>(leg_count);
            const Chart cl(pl);
            const Background bl = make_background(coarse, cl);
            if (leg == 0) {
                xc = data_fields(coarse, bl);
            } else {
                for (std::size_t nd = 0; nd < coarse.nodes(); ++nd) {
                    xc.E[nd] += bl.data[nd * NF + 0] - prev_data[nd * NF + 0];
                    xc.F[nd] += bl.data[nd * NF + 1] - prev_data[nd * NF + 1];
                    xc.G[nd] += bl.data[nd * NF + 2] - prev_data[nd * NF + 2];
                    xc.phi[nd] += bl.data[nd * NF + 3] - prev_data[nd * NF + 3];
                    xc.f[nd] += bl.data[nd * NF + 4] - prev_data[nd * NF + 4];
                }
            }
            const IterateOutcome legout = newton_iterate(coarse, bl, xc, 1e-9, 30);
            if (!legout.converged)
                throw std::runtime_error("wing newton: continuation leg failed at alpha0 = " +
                                         std::to_string(pl.alpha0));
            prev_data = bl.data;
        }
        if (can_coarsen) {
            // x := fine data + prolonged coarse correction.
            const Background bgc = make_background(coarse, chart);
            std::vector<double> corr[NF];
            for (int fq = 0; fq < NF; ++fq) corr[fq].resize(coarse.nodes());
            for (std::size_t nd = 0; nd < coarse.nodes(); ++nd) {
                corr[0][nd] = xc.E[nd] - bgc.data[nd * NF + 0];
                corr[1][nd] = xc.F[nd] - bgc.data[nd * NF + 1];
                corr[2][nd] = xc.G[nd] - bgc.data[nd * NF + 2];
                corr[3][nd] = xc.phi[nd] - bgc.data[nd * NF + 3];
                corr[4][nd] = xc.f[nd] - bgc.data[nd * NF + 4];
            }
            std::vector<double> fine_corr[NF];
            for (int fq = 0; fq < NF; ++fq) fine_corr[fq] = prolong(coarse, fine, corr[fq]);
            for (std::size_t nd = 0; nd < fine.nodes(); ++nd) {
                x.E[nd] += fine_corr[0][nd];
                x.F[nd] += fine_corr[1][nd];
                x.G[nd] += fine_corr[2][nd];
                x.phi[nd] += fine_corr[3][nd];
                x.f[nd] += fine_corr[4][nd];
            }
            for (std::size_t j = 0; j < fine.nu; ++j) x.phi[fine.node(j, 0)] = 0.0;
        } else {
            x = xc;
        }
    }

    const IterateOutcome fineout = newton_iterate(fine, bg, x, p.newton_tol, p.max_newton);
    WingSolution sol;
    sol.residual_history = fineout.history;
    sol.newton_steps = fineout.steps;
    sol.converged = fineout.converged;

    // Gauge magnitude at the solution (diagnostic for the boundary-data error).
    {
        FieldSet<Dual> xd;
        xd.resize(fine.nodes());
        for (std::size_t nd = 0; nd < fine.nodes(); ++nd) {
            xd.E[nd] = x.E[nd];
            xd.F[nd] = x.F[nd];
            xd.G[nd] = x.G[nd];
            xd.phi[nd] = x.phi[nd];
            xd.f[nd] = x.f[nd];
        }
        EvalScratch<Dual> scd;
        std::vector<Dual> resd;
        eval_residual(fine, bg, xd, scd, resd);
        double wmax = 0.0;
        for (std::size_t k = 1; k + 1 < fine.nv; ++k)
            for (std::size_t j = 0; j + 1 < fine.nu; ++j) {
                const std::size_t nd = fine.node(j, k);
                wmax = std::max(wmax, std::hypot(scd.wcon_u[nd].a, scd.wcon_v[nd].a));
            }
        sol.gauge_max = wmax;
    }

    // Mirror the half grid to the full metric.
    WarpedHalfPlaneMetric m;
    m.nu = p.nu;
    m.nv = p.nv;
    m.hu = m.hv = p.spacing;
    m.u0 = -p.spacing * 0.5 * static_cast<double>(p.nu - 1);
    m.g_uu.resize(m.size());
    m.g_uv.resize(m.size());
    m.g_vv.resize(m.size());
    m.phi.resize(m.size());
    m.f.resize(m.size());
    const std::size_t c = (p.nu - 1) / 2;
    for (std::size_t k = 0; k < p.nv; ++k) {
        for (std::size_t jh = 0; jh < fine.nu; ++jh) {
            const std::size_t nd = fine.node(jh, k);
            const std::size_t right = m.idx(c + jh, k);
            const std::size_t left = m.idx(c - jh, k);
            m.g_uu[right] = m.g_uu[left] = x.E[nd];
            m.g_uv[right] = x.F[nd];
            m.g_uv[left] = -x.F[nd];
            m.g_vv[right] = m.g_vv[left] = x.G[nd];
            m.phi[right] = m.phi[left] = (k == 0 ? 0.0 : x.phi[nd]);
            m.f[right] = m.f[left] = x.f[nd];
        }
    }
    sol.metric = std::move(m);
    return sol;
}

// ---------------------------------------------------------------------------
// Grid distances and the wing report.

namespace {

struct Hop {
    int dj, dk;
};
constexpr Hop kHops[16] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1}, {1, 1},  {1, -1}, {-1, 1}, {-1, -1},
                           {2, 1},  {2, -1}, {-2, 1}, {-2, -1}, {1, 2},  {1, -2}, {-1, 2}, {-1, -2}};

std::vector<double> dijkstra(const WarpedHalfPlaneMetric& m, const std::vector<std::size_t>& seeds) {
    const std::size_t n = m.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t s : seeds) {
        dist[s] = 0.0;
        heap.emplace(0.0, s);
    }
    auto edge = [&](std::size_t a, std::size_t b, double du, double dv) {
        const double E = 0.5 * (m.g_uu[a] + m.g_uu[b]);
        const double F = 0.5 * (m.g_uv[a] + m.g_uv[b]);
        const double G = 0.5 * (m.g_vv[a] + m.g_vv[b]);
        return std::sqrt(std::max(E * du * du + 2.0 * F * du * dv + G * dv * dv, 0.0));
    };
    while (!heap.empty()) {
        const auto [d, at] = heap.top();
        heap.pop();
        if (d > dist[at]) continue;
        const auto j = static_cast<std::ptrdiff_t>(at % m.nu);
        const auto k = static_cast<std::ptrdiff_t>(at / m.nu);
        for (const Hop& hop : kHops) {
            const std::ptrdiff_t jj = j + hop.dj, kk = k + hop.dk;
            if (jj < 0 || kk < 0 || jj >= static_cast<std::ptrdiff_t>(m.nu) ||
                kk >= static_cast<std::ptrdiff_t>(m.nv))
                continue;
            const std::size_t to = m.idx(static_cast<std::size_t>(jj), static_cast<std::size_t>(kk));
            const double w =
                edge(at, to, m.hu * static_cast<double>(hop.dj), m.hv * static_cast<double>(hop.dk));
            if (dist[at] + w < dist[to]) {
                dist[to] = dist[at] + w;
                heap.emplace(dist[to], to);
            }
        }
    }
    return dist;
}

// Arclength along the axis row from the center column.
std::vector<double> axis_arclength(const WarpedHalfPlaneMetric& m) {
    std::vector<double> arc(m.nu, 0.0);
    const std::size_t c = (m.nu - 1) / 2;
    for (std::size_t j = c; j + 1 < m.nu; ++j) {
        const double e = 0.5 * (m.g_uu[m.idx(j, 0)] + m.g_uu[m.idx(j + 1, 0)]);
        arc[j + 1] = arc[j] + std::sqrt(e) * m.hu;
    }
    for (std::size_t j = c; j > 0; --j) {
        const double e = 0.5 * (m.g_uu[m.idx(j, 0)] + m.g_uu[m.idx(j - 1, 0)]);
        arc[j - 1] = arc[j] + std::sqrt(e) * m.hu;
    }
    return arc;
}

std::size_t axis_station(const std::vector<double>& arc, std::size_t center, double s) {
    std::size_t best = center;
    double err = std::abs(arc[center] - s);
    for (std::size_t j = center; j < arc.size(); ++j) {
        if (std::abs(arc[j] - s) < err) {
            err = std::abs(arc[j] - s);
            best = j;
        }
    }
    return best;
}

} // namespace

std::vector<double> grid_distance_from(const WarpedHalfPlaneMetric& m, std::size_t j0,
                                       std::size_t k0) {
    return dijkstra(m, {m.idx(j0, k0)});
}

std::vector<double> grid_distance_from_axis(const WarpedHalfPlaneMetric& m) {
    std::vector<std::size_t> seeds(m.nu);
    for (std::size_t j = 0; j < m.nu; ++j) seeds[j] = m.idx(j, 0);
    return dijkstra(m, seeds);
}

double dimension_reduction_probe_grid(const WarpedHalfPlaneMetric& m, double station_arc,
                                      double eps) {
    const auto arc = axis_arclength(m);
    const std::size_t c = (m.nu - 1) / 2;
    const std::size_t j = axis_station(arc, c, station_arc);
    const CurvatureReport cur = warped_curvature(m, 1);
    const double K = cur.scalar[m.idx(j, 0)];
    const double rootK = std::sqrt(std::max(K, 1e-14));

    double tau = 0.0, worst = 0.0;
    const double cap = 1.0 / eps;
    for (std::size_t k = 1; k + 1 < m.nv; ++k) {
        const double g = 0.5 * (m.g_vv[m.idx(j, k - 1)] + m.g_vv[m.idx(j, k)]);
        tau += std::sqrt(g) * m.hv;
        const double rho = rootK * tau;
        if (rho > cap) break;
        const double dev = std::abs(rootK * m.phi[m.idx(j, k)] - cigar::phi(rho, 1.0));
        worst = std::max(worst, dev);
    }
    return worst;
}

WingReport wing_report(const WingProblem& p, const WingSolution& sol) {
    const WarpedHalfPlaneMetric& m = sol.metric;
    WingReport rep;
    rep.alpha0 = p.alpha0;
    rep.gauge_max = sol.gauge_max;

    const CurvatureReport cur = warped_curvature(m, 1);
    const auto arc = axis_arclength(m);
    const std::size_t c = (m.nu - 1) / 2;
    rep.R_center = cur.scalar[m.idx(c, 0)];
    for (std::size_t j = c; j + 1 < m.nu; ++j) {
        rep.axis_s.push_back(arc[j]);
        rep.axis_R.push_back(cur.scalar[m.idx(j, 0)]);
    }

    const double s_max_axis = arc[m.nu - 2];
    rep.s_edge = 0.75 * s_max_axis;
    const std::size_t j_edge = axis_station(arc, c, rep.s_edge);
    rep.R_edge = cur.scalar[m.idx(j_edge, 0)];

    // Comparison angles from in-domain distances.
    {
        const auto from_center = grid_distance_from(m, c, 0);
        GammaProbe probe;
        probe.radial = [&](double s) {
            const std::size_t j = axis_station(arc, c, s);
            return from_center[m.idx(j, 0)];
        };
        probe.chord = [&](double s) {
            const std::size_t j = axis_station(arc, c, s);
            const auto d = grid_distance_from(m, j, 0);
            const std::size_t mirror_j = 2 * c - j;
            return d[m.idx(mirror_j, 0)];
        };
        const ConeAngleEstimate est = estimate_cone_angle(probe, 0.8 * s_max_axis, 6);
        rep.alpha_est = est.alpha;
    }
    const double target = std::sin(0.5 * rep.alpha_est) * std::sin(0.5 * rep.alpha_est);
    rep.ratio_deviation = std::abs(rep.R_edge / rep.R_center - target);

    for (double frac : {0.45, 0.6, 0.75}) {
        rep.probe_s.push_back(frac * s_max_axis);
        rep.probe_dev.push_back(dimension_reduction_probe_grid(m, frac * s_max_axis, 0.15));
    }

    // h1 h2 / s along the Sigma trace (center column).
    {
        const auto from_axis = grid_distance_from_axis(m);
        double s = 0.0;
        rep.min_h1h2_over_s = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k + 3 < m.nv; ++k) {
            const double g = 0.5 * (m.g_vv[m.idx(c, k - 1)] + m.g_vv[m.idx(c, k)]);
            s += std::sqrt(g) * m.hv;
            if (k < m.nv / 3) continue; // fit region away from the center ball
            const double h1 = from_axis[m.idx(c, k)];
            const double h2 = m.phi[m.idx(c, k)];
            rep.min_h1h2_over_s = std::min(rep.min_h1h2_over_s, h1 * h2 / s);
        }
    }

    rep.soliton_residual_interior = soliton_residual(m, 1, 1.0).max_deviation;
    return rep;
}

} // namespace soliton
