#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soliton/curvature.hpp"
#include "soliton/parallel.hpp"
#include "warped_geometry.hpp"

namespace soliton {

void WarpedHalfPlaneMetric::validate() const {
    const std::size_t m = size();
    if (nu < 5 || nv < 5) throw std::invalid_argument("warped metric lattice too small");
    if (g_uu.size() != m || g_uv.size() != m || g_vv.size() != m || phi.size() != m ||
        f.size() != m)
        throw std::invalid_argument("warped metric field sizes disagree with lattice");
    if (!(hu > 0.0) || !(hv > 0.0)) throw std::invalid_argument("warped metric spacings invalid");
    for (std::size_t k = 0; k < nv; ++k) {
        for (std::size_t j = 0; j < nu; ++j) {
            const std::size_t id = idx(j, k);
            const double det = g_uu[id] * g_vv[id] - g_uv[id] * g_uv[id];
            if (!(g_uu[id] > 0.0) || !(det > 0.0))
                throw std::invalid_argument("base metric not positive definite");
            if (k == 0) {
                if (std::abs(phi[id]) > 1e-12)
                    throw std::invalid_argument("warp must vanish on the axis row");
            } else if (!(phi[id] > 0.0)) {
                throw std::invalid_argument("warp must be positive off the axis");
            }
        }
    }
}

namespace {

using detail::FieldView;

struct Views {
    FieldView<double> E, F, G, phi, f;
};

Views make_views(const WarpedHalfPlaneMetric& m) {
    Views v;
    v.E = {m.g_uu.data(), m.nu, +1, +1, false};
    v.F = {m.g_uv.data(), m.nu, -1, -1, false};
    v.G = {m.g_vv.data(), m.nu, +1, +1, false};
    v.phi = {m.phi.data(), m.nu, -1, +1, false};
    v.f = {m.f.data(), m.nu, +1, +1, false};
    return v;
}

// Fill column j of every per-node array in the report by linear extrapolation
// from columns j1, j2 (same k).
void extrapolate_nodes(CurvatureReport& rep, std::size_t dst, std::size_t a, std::size_t b) {
    auto ex = [&](std::vector<double>& arr) {
        if (!arr.empty()) arr[dst] = 2.0 * arr[a] - arr[b];
    };
    ex(rep.scalar);
    ex(rep.sec_base);
    ex(rep.sec_mixed_lo);
    ex(rep.sec_mixed_hi);
    ex(rep.sec_fiber);
    const auto n = static_cast<std::size_t>(rep.n);
    for (std::size_t q = 0; q < n; ++q)
        rep.ricci_eigs[dst * n + q] = 2.0 * rep.ricci_eigs[a * n + q] - rep.ricci_eigs[b * n + q];
}

// Axis value of an even-in-v quantity from rows 1 and 2.
void axis_extrapolate_nodes(CurvatureReport& rep, std::size_t dst, std::size_t a, std::size_t b) {
    auto ex = [&](std::vector<double>& arr) {
        if (!arr.empty()) arr[dst] = (4.0 * arr[a] - arr[b]) / 3.0;
    };
    ex(rep.scalar);
    ex(rep.sec_base);
    ex(rep.sec_mixed_lo);
    ex(rep.sec_mixed_hi);
    ex(rep.sec_fiber);
    const auto n = static_cast<std::size_t>(rep.n);
    for (std::size_t q = 0; q < n; ++q)
        rep.ricci_eigs[dst * n + q] =
            (4.0 * rep.ricci_eigs[a * n + q] - rep.ricci_eigs[b * n + q]) / 3.0;
}

} // namespace

CurvatureReport warped_curvature(const WarpedHalfPlaneMetric& m, int fiber_dim) {
    m.validate();
    if (fiber_dim < 1) throw std::invalid_argument("fiber_dim must be >= 1");
    const int n = 2 + fiber_dim;
    const double dm = static_cast<double>(fiber_dim);

    CurvatureReport rep;
    rep.n = n;
    rep.nodes = m.size();
    rep.scalar.assign(m.size(), 0.0);
    rep.ricci_eigs.assign(m.size() * static_cast<std::size_t>(n), 0.0);
    rep.sec_base.assign(m.size(), 0.0);
    rep.sec_mixed_lo.assign(m.size(), 0.0);
    rep.sec_mixed_hi.assign(m.size(), 0.0);
    if (fiber_dim >= 2) rep.sec_fiber.assign(m.size(), 0.0);

    const Views vw = make_views(m);
    const auto nu = static_cast<std::ptrdiff_t>(m.nu);
    const auto nv = static_cast<std::ptrdiff_t>(m.nv);

    parallel_for((nu - 2) * (nv - 2), [&](std::ptrdiff_t w) {
        const std::ptrdiff_t j = 1 + w % (nu - 2);
        const std::ptrdiff_t k = 1 + w / (nu - 2);
        const std::size_t id = m.idx(static_cast<std::size_t>(j), static_cast<std::size_t>(k));

        const auto base = detail::base_geometry(vw.E, vw.F, vw.G, j, k, m.hu, m.hv);
        const auto dphi = detail::derivatives(vw.phi, j, k, m.hu, m.hv);
        const auto hphi = detail::hessian(base, dphi);
        const double phi = dphi.w;
        const double grad2 = detail::grad_inner(base, dphi, dphi);

        double a_lo, a_hi; // eigenvalues of hess(phi) relative to g_N
        detail::rel_eigenvalues(base.det, base.iE, base.iF, base.iG, hphi.uu, hphi.uv, hphi.vv,
                                a_lo, a_hi);

        rep.sec_base[id] = base.K;
        rep.sec_mixed_lo[id] = -a_hi / phi;
        rep.sec_mixed_hi[id] = -a_lo / phi;
        const double kfib = (1.0 - grad2) / (phi * phi);
        if (fiber_dim >= 2) rep.sec_fiber[id] = kfib;

        const double lam_fiber = -hphi.lap / phi + (dm - 1.0) * kfib;
        double* eig = &rep.ricci_eigs[id * static_cast<std::size_t>(n)];
        eig[0] = base.K - dm * a_lo / phi;
        eig[1] = base.K - dm * a_hi / phi;
        for (int q = 0; q < fiber_dim; ++q) eig[2 + q] = lam_fiber;
        std::sort(eig, eig + n);

        rep.scalar[id] =
            2.0 * base.K - 2.0 * dm * hphi.lap / phi + dm * (dm - 1.0) * kfib;
    });

    // Axis row (even in v), then boundary columns and the top row.
    for (std::ptrdiff_t j = 1; j < nu - 1; ++j) {
        axis_extrapolate_nodes(rep, m.idx(static_cast<std::size_t>(j), 0),
                               m.idx(static_cast<std::size_t>(j), 1),
                               m.idx(static_cast<std::size_t>(j), 2));
        extrapolate_nodes(rep, m.idx(static_cast<std::size_t>(j), m.nv - 1),
                          m.idx(static_cast<std::size_t>(j), m.nv - 2),
                          m.idx(static_cast<std::size_t>(j), m.nv - 3));
    }
    for (std::ptrdiff_t k = 0; k < nv; ++k) {
        extrapolate_nodes(rep, m.idx(0, static_cast<std::size_t>(k)),
                          m.idx(1, static_cast<std::size_t>(k)),
                          m.idx(2, static_cast<std::size_t>(k)));
        extrapolate_nodes(rep, m.idx(m.nu - 1, static_cast<std::size_t>(k)),
                          m.idx(m.nu - 2, static_cast<std::size_t>(k)),
                          m.idx(m.nu - 3, static_cast<std::size_t>(k)));
    }

    for (std::size_t id = 0; id < m.size(); ++id) {
        auto track = [&](const std::vector<double>& arr, const char* family) {
            if (arr.empty()) return;
            if (rep.sec_min.family.empty() || arr[id] < rep.sec_min.value)
                rep.sec_min = {arr[id], id, family};
            if (rep.sec_max.family.empty() || arr[id] > rep.sec_max.value)
                rep.sec_max = {arr[id], id, family};
        };
        track(rep.sec_base, "base");
        track(rep.sec_mixed_lo, "mixed");
        track(rep.sec_mixed_hi, "mixed");
        track(rep.sec_fiber, "fiber");
    }
    return rep;
}

ConcavityReport concavity_check(const WarpedHalfPlaneMetric& m) {
    m.validate();
    const Views vw = make_views(m);
    const auto nu = static_cast<std::ptrdiff_t>(m.nu);
    const auto nv = static_cast<std::ptrdiff_t>(m.nv);
    ConcavityReport rep;
    for (std::ptrdiff_t k = 1; k < nv - 1; ++k) {
        for (std::ptrdiff_t j = 1; j < nu - 1; ++j) {
            const auto base = detail::base_geometry(vw.E, vw.F, vw.G, j, k, m.hu, m.hv);
            const auto dphi = detail::derivatives(vw.phi, j, k, m.hu, m.hv);
            const auto h = detail::hessian(base, dphi);
            double lo, hi;
            detail::rel_eigenvalues(base.det, base.iE, base.iF, base.iG, h.uu, h.uv, h.vv, lo, hi);
            if (hi > rep.max_positive) {
                rep.max_positive = hi;
                rep.node = m.idx(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
            }
        }
    }
    return rep;
}

std::vector<double> gradient_norm(const WarpedHalfPlaneMetric& m, const std::vector<double>& field) {
    m.validate();
    if (field.size() != m.size())
        throw std::invalid_argument("gradient_norm: field size disagrees with lattice");
    FieldView<double> fv{field.data(), m.nu, +1, +1, false};
    const auto nu = static_cast<std::ptrdiff_t>(m.nu);
    const auto nv = static_cast<std::ptrdiff_t>(m.nv);
    std::vector<double> out(m.size(), 0.0);
    parallel_for(nu * nv, [&](std::ptrdiff_t w) {
        const std::ptrdiff_t j = w % nu;
        const std::ptrdiff_t k = w / nu;
        const std::size_t id = m.idx(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
        // Clamp stencils one node in from the u and top-v edges.
        const std::ptrdiff_t jj = std::min<std::ptrdiff_t>(std::max<std::ptrdiff_t>(j, 1), nu - 2);
        const std::ptrdiff_t kk = std::min<std::ptrdiff_t>(k, nv - 2);
        const double fu = (fv.at(jj + 1, kk) - fv.at(jj - 1, kk)) / (2.0 * m.hu);
        const double fvv = (fv.at(jj, kk + 1) - fv.at(jj, kk - 1)) / (2.0 * m.hv);
        const double E = m.g_uu[m.idx(static_cast<std::size_t>(jj), static_cast<std::size_t>(kk))];
        const double F = m.g_uv[m.idx(static_cast<std::size_t>(jj), static_cast<std::size_t>(kk))];
        const double G = m.g_vv[m.idx(static_cast<std::size_t>(jj), static_cast<std::size_t>(kk))];
        const double det = E * G - F * F;
        const double g2 = (G * fu * fu - 2.0 * F * fu * fvv + E * fvv * fvv) / det;
        out[id] = std::sqrt(std::max(g2, 0.0));
    });
    return out;
}

} // namespace soliton
