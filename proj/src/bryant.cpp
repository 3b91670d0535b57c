#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "soliton/models.hpp"

namespace soliton {

namespace {

// First-order reduction of Ric = hess f for dr^2 + phi^2 g_{S^{n-1}}:
// state y = (phi, w = phi', v = f', f). The Hamilton combination
// R + v^2 is a first integral and is used downstream as an integration
// quality monitor, never substituted into the right-hand side.
struct BryantRhs {
    double n;
    std::array<double, 4> operator()(const std::array<double, 4>& y) const {
        const double phi = y[0], w = y[1], v = y[2];
        const double one_minus_w2 = 1.0 - w * w;
        const double phipp = (n - 2.0) * one_minus_w2 / phi - w * v;
        return {w, phipp, -(n - 1.0) * phipp / phi, v};
    }
};

std::array<double, 4> rk4_step(const BryantRhs& rhs, const std::array<double, 4>& y, double h) {
    auto add = [](const std::array<double, 4>& a, const std::array<double, 4>& b, double c) {
        std::array<double, 4> out;
        for (int i = 0; i < 4; ++i) out[i] = a[i] + c * b[i];
        return out;
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs(add(y, k1, 0.5 * h));
    const auto k3 = rhs(add(y, k2, 0.5 * h));
    const auto k4 = rhs(add(y, k3, h));
    std::array<double, 4> out;
    for (int i = 0; i < 4; ++i)
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Series start at the axis with cubic warp coefficient a:
//   phi = r + a r^3 + b r^5,   b = a^2 (39n - 30) / (10n + 20)
//   f'  = p r + q r^3,         p = -6(n-1)a,  q = -(n-1)(20b - 6a^2)/3
struct Series {
    double a, b, p, q;
    Series(double a_, double n) : a(a_) {
        b = a * a * (39.0 * n - 30.0) / (10.0 * n + 20.0);
        p = -6.0 * (n - 1.0) * a;
        q = -(n - 1.0) * (20.0 * b - 6.0 * a * a) / 3.0;
    }
    std::array<double, 4> eval(double r) const {
        const double r2 = r * r;
        return {r * (1.0 + r2 * (a + r2 * b)), 1.0 + r2 * (3.0 * a + 5.0 * b * r2),
                r * (p + q * r2), r2 * (0.5 * p + 0.25 * q * r2)};
    }
    // Tip scalar curvature R(0) = n f''(0) = n p.
    double tip_scalar(double n) const { return n * p; }
};

} // namespace

RadialProfile bryant_shoot(const ShootingConfig& cfg) {
    if (cfg.n < 3) throw std::invalid_argument("bryant_shoot: n must be >= 3");
    if (!(cfg.step > 0.0) || !(cfg.r_max > 0.0) || cfg.store_every == 0)
        throw std::invalid_argument("bryant_shoot: bad integration parameters");
    const double n = static_cast<double>(cfg.n);

    // Shooting discrepancy: tip scalar curvature minus the normalization
    // R(0) = 1. Regular-at-the-axis solutions form a scaling family, so the
    // discrepancy is monotone in the cubic coefficient and bisection lands on
    // the normalized member of the family.
    auto discrepancy = [&](double a) { return Series(a, n).tip_scalar(n) - 1.0; };
    double lo = cfg.bracket_lo, hi = cfg.bracket_hi;
    double dlo = discrepancy(lo), dhi = discrepancy(hi);
    if (dlo * dhi > 0.0)
        throw std::runtime_error("bryant_shoot: bracket does not straddle (discrepancies " +
                                 std::to_string(dlo) + ", " + std::to_string(dhi) + ")");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dmid = discrepancy(mid);
        if (std::abs(dmid) < cfg.tol || 0.5 * (hi - lo) < 1e-17) break;
        if (dlo * dmid <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            dlo = dmid;
        }
    }
    const Series series(0.5 * (lo + hi), n);

    const double store_step = cfg.step * static_cast<double>(cfg.store_every);
    const auto stored = static_cast<std::size_t>(std::llround(cfg.r_max / store_step)) + 1;
    const auto total_steps = (stored - 2) * cfg.store_every;

    RadialProfile p;
    p.n = cfg.n;
    p.r.reserve(stored);
    p.phi.reserve(stored);
    p.phi_d1.reserve(stored);
    p.phi_d2.reserve(stored);
    p.f.reserve(stored);
    p.f_d1.reserve(stored);

    auto push = [&](double r, const std::array<double, 4>& y) {
        const double phi = y[0], w = y[1], v = y[2];
        p.r.push_back(r);
        p.phi.push_back(phi);
        p.phi_d1.push_back(w);
        p.phi_d2.push_back(r == 0.0 ? 0.0 : (n - 2.0) * (1.0 - w * w) / phi - w * v);
        p.f.push_back(y[3]);
        p.f_d1.push_back(v);
    };

    // Nodes inside the series radius come from the expansion itself; the ODE
    // is singular at phi = 0 and integrating from too close to the axis
    // leaves an O(h^4 / r0^4) dent in the R + |grad f|^2 integral.
    push(0.0, {0.0, 1.0, 0.0, 0.0});
    const auto series_nodes =
        static_cast<std::size_t>(std::floor(cfg.series_start / store_step + 1e-9));
    for (std::size_t k = 1; k <= series_nodes; ++k) {
        const double r = store_step * static_cast<double>(k);
        push(r, series.eval(r));
    }
    const double r0 = store_step * static_cast<double>(series_nodes);
    std::array<double, 4> y = series.eval(r0);

    const BryantRhs rhs{n};
    double r = r0;
    const std::size_t rk_steps = total_steps - (series_nodes - 1) * cfg.store_every;
    for (std::size_t step = 1; step <= rk_steps; ++step) {
        y = rk4_step(rhs, y, cfg.step);
        r = r0 + cfg.step * static_cast<double>(step);
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || !std::isfinite(y[2]) ||
            y[0] <= 0.0 || y[1] <= 0.0) {
            throw std::runtime_error("bryant_shoot: step failure, last good r = " +
                                     std::to_string(p.r.back()));
        }
        if (step % cfg.store_every == 0) push(r, y);
    }
    return p;
}

} // namespace soliton
