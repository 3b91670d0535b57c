#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "soliton/curvature.hpp"
#include "soliton/flow.hpp"
#include "soliton/models.hpp"
#include "soliton/verify.hpp"

using namespace soliton;

namespace {
constexpr double kPi = 3.14159265358979323846;

RadialProfile flat3(double r_max, double step) {
    RadialProfile p;
    p.n = 3;
    const auto m = static_cast<std::size_t>(std::llround(r_max / step)) + 1;
    for (std::size_t k = 0; k < m; ++k) {
        const double r = step * static_cast<double>(k);
        p.r.push_back(r);
        p.phi.push_back(r);
        p.phi_d1.push_back(1.0);
        p.phi_d2.push_back(0.0);
        p.f.push_back(0.0);
        p.f_d1.push_back(0.0);
    }
    return p;
}
} // namespace

TEST_CASE("soliton residual") {
    SUBCASE("flat metric with zero potential") {
        CHECK(soliton_residual(flat3(10.0, 0.01), 1e-12).max_deviation < 1e-12);
    }
    SUBCASE("unit round 2-sphere with zero potential has residual 1") {
        RadialProfile p;
        p.n = 2;
        for (int k = 0; k <= 3000; ++k) {
            const double r = 1e-3 * k;
            p.r.push_back(r);
            p.phi.push_back(std::sin(r));
            p.phi_d1.push_back(std::cos(r));
            p.phi_d2.push_back(-std::sin(r));
            p.f.push_back(0.0);
            p.f_d1.push_back(0.0);
        }
        CHECK(soliton_residual(p, 2.0).max_deviation == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("cigar residual is at discretization level and second order") {
        // Oracle: refinement study; the closed form is an exact soliton.
        const double r1 = soliton_residual(cigar_profile(16.0, 0.02), 1.0).max_deviation;
        const double r2 = soliton_residual(cigar_profile(16.0, 0.01), 1.0).max_deviation;
        CHECK(r1 < 1e-5);
        CHECK(r1 / r2 > 3.0); // vanishes under refinement
    }
    SUBCASE("warped product residual is small and drops under refinement") {
        const double r1 =
            soliton_residual(product_with_line(cigar_profile(10.0, 0.04), 1.0, 21), 1, 1.0)
                .max_deviation;
        const double r2 =
            soliton_residual(product_with_line(cigar_profile(10.0, 0.02), 1.0, 21), 1, 1.0)
                .max_deviation;
        CHECK(r1 < 2e-3);
        CHECK(r1 / r2 > 3.0);
    }
}

TEST_CASE("hamilton identity") {
    SUBCASE("cigar closed form: spread below 1e-10") {
        const IdentityReport rep = hamilton_identity(cigar_profile(50.0, 1e-3), false, 1e-10);
        CHECK(rep.pass);
    }
    SUBCASE("cigar re-differenced: spread below 1e-6") {
        const IdentityReport rep = hamilton_identity(cigar_profile(50.0, 1e-3), true, 1e-6);
        CHECK(rep.pass);
    }
    SUBCASE("revolution surface with zero potential: spread is the R range") {
        // R = 2K with K in [1/4, 1] at i = 1, so the spread is 3/2. The
        // analytic K samples stand in for the curvature route.
        const FlowState st = revolution_surface(1.0, 2048);
        double lo = st.K_analytic[0], hi = lo;
        for (double k : st.K_analytic) {
            lo = std::min(lo, k);
            hi = std::max(hi, k);
        }
        CHECK(2.0 * (hi - lo) == doctest::Approx(1.5).epsilon(1e-9));
    }
    SUBCASE("shot soliton passes at 1e-6") {
        ShootingConfig cfg;
        const RadialProfile p = bryant_shoot(cfg);
        CHECK(hamilton_identity(p, false, 1e-6).pass);
    }
}

TEST_CASE("killing identity") {
    SUBCASE("closed-form product at 100 stations") {
        const IdentityReport rep = killing_identity_product(1.0, 100, 30.0, 1e-8);
        CHECK(rep.pass);
        CHECK(rep.max_deviation < 1e-10);
    }
    SUBCASE("both sides vanish at large s") {
        // LHS = K(s) and RHS = f' phi' / phi both decay like sech^2.
        CHECK(cigar::gauss(40.0) < 1e-15);
        CHECK(cigar::f_d1(40.0) * cigar::phi_d1(40.0) / cigar::phi(40.0) < 1e-15);
    }
    SUBCASE("flat metric with zero potential: both sides zero") {
        WarpedHalfPlaneMetric m;
        m.nu = 41;
        m.nv = 41;
        m.u0 = -2.0;
        m.hu = m.hv = 0.1;
        m.g_uu.assign(m.size(), 1.0);
        m.g_uv.assign(m.size(), 0.0);
        m.g_vv.assign(m.size(), 1.0);
        m.phi.resize(m.size());
        m.f.assign(m.size(), 0.0);
        for (std::size_t k = 0; k < m.nv; ++k)
            for (std::size_t j = 0; j < m.nu; ++j) m.phi[m.idx(j, k)] = m.v(k);
        const IdentityReport rep = killing_identity(m, {1.0, 2.0, 3.0}, 1e-10);
        CHECK(rep.pass);
    }
    SUBCASE("grid route on shot-soliton data converges at second order") {
        ShootingConfig cfg;
        cfg.r_max = 12.0;
        const RadialProfile p = bryant_shoot(cfg);
        const std::vector<double> stations{2.0, 3.0, 4.0};
        const double d1 =
            killing_identity(profile_to_half_plane(p, 4.0, 6.0, 0.08), stations, 1.0)
                .max_deviation;
        const double d2 =
            killing_identity(profile_to_half_plane(p, 4.0, 6.0, 0.04), stations, 1.0)
                .max_deviation;
        CHECK(d1 / d2 > 2.5);
        CHECK(d2 < 1e-3);
    }
    SUBCASE("stations on the axis are rejected") {
        const WarpedHalfPlaneMetric m = product_with_line(cigar_profile(5.0, 0.1), 1.0, 11);
        CHECK_THROWS_AS(killing_identity(m, {0.0}, 1.0), std::invalid_argument);
    }
}

TEST_CASE("edge limit relation") {
    SUBCASE("target ratio formula") {
        CHECK(edge_limit_target_ratio(0.5 * kPi) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(edge_limit_target_ratio(kPi) == doctest::Approx(1.0));
    }
    SUBCASE("product: R constant along Gamma, deviation exactly zero") {
        std::vector<double> s, R;
        for (int q = 1; q <= 16; ++q) {
            s.push_back(2.0 * q);
            R.push_back(1.0);
        }
        const EdgeLimitReport rep = edge_limit_check(s, R, 1.0, kPi, 1e-12);
        CHECK(rep.report.max_deviation == 0.0);
        CHECK(rep.report.pass);
    }
    SUBCASE("shot soliton: ray angle, R decays monotonically") {
        ShootingConfig cfg;
        const RadialProfile p = bryant_shoot(cfg);
        const CurvatureReport cur = radial_curvature(p);
        std::vector<double> s, R;
        for (int q = 1; q <= 32; ++q) {
            const auto k = static_cast<std::size_t>(q * (p.size() - 1) / 32);
            s.push_back(p.r[k]);
            R.push_back(cur.scalar[k]);
        }
        const EdgeLimitReport rep = edge_limit_check(s, R, cur.scalar[0], 0.0, 0.05);
        CHECK(rep.report.pass);
        CHECK(rep.monotone_decreasing);
        CHECK(rep.final_over_center < 0.05);
    }
}

TEST_CASE("h diagnostics") {
    std::vector<double> s;
    for (int q = 1; q <= 24; ++q) s.push_back(30.0 * q / 24.0);
    SUBCASE("product: h1 linear, h2 bounded, products controlled") {
        const EdgeDiagnostics d = h_diagnostics_rx_cigar(1.0, s);
        CHECK(d.h1_exponent == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(d.h2.back() == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(d.dyadic_ratio_h1sq_R < 1.2);
        CHECK(d.min_h1h2_over_s > 1.0);
    }
    SUBCASE("shot soliton: both exponents near one half") {
        ShootingConfig cfg;
        cfg.r_max = 60.0;
        const RadialProfile p = bryant_shoot(cfg);
        std::vector<double> sb;
        for (int q = 1; q <= 16; ++q) sb.push_back(50.0 * q / 16.0);
        const EdgeDiagnostics d = h_diagnostics_profile(p, sb);
        CHECK(std::abs(d.h1_exponent - 0.5) < 0.05);
        CHECK(std::abs(d.h2_exponent - 0.5) < 0.05);
        CHECK(d.dyadic_ratio_h1sq_R < 1.2);
        CHECK(d.min_h1h2_over_s > 0.5);
    }
    SUBCASE("too few samples are rejected") {
        CHECK_THROWS_AS(h_diagnostics_rx_cigar(1.0, {1, 2, 3}), std::invalid_argument);
    }
}

TEST_CASE("integral of R over balls") {
    std::vector<double> s;
    for (int q = 1; q <= 16; ++q) s.push_back(2.0 + 28.0 * q / 16.0);
    SUBCASE("product grows linearly, Stokes flux agrees") {
        const GrowthReport g = integral_R_growth_rx_cigar(1.0, s);
        CHECK(g.slope_lower > 1.0);
        for (std::size_t q = 4; q < g.s.size(); ++q)
            CHECK(g.flux[q] == doctest::Approx(g.integral[q]).epsilon(0.02));
    }
    SUBCASE("flat space integrates to zero") {
        const GrowthReport g = integral_R_growth_flat(s);
        CHECK(g.integral.back() == 0.0);
        CHECK(g.slope_lower == 0.0);
    }
    SUBCASE("shot soliton keeps a positive slope on [10, 100]") {
        ShootingConfig cfg;
        const RadialProfile p = bryant_shoot(cfg);
        std::vector<double> sb;
        for (int q = 0; q < 10; ++q) sb.push_back(10.0 + 10.0 * q);
        const GrowthReport g = integral_R_growth_profile(p, sb);
        CHECK(g.slope_lower > 1.0);
        for (std::size_t q = 0; q < sb.size(); ++q)
            CHECK(g.flux[q] == doctest::Approx(g.integral[q]).epsilon(0.15));
    }
}

TEST_CASE("asymptotic volume ratio") {
    SUBCASE("flat space has ratio one") {
        const AvrReport a = avr_flat(50.0, 16);
        for (double r : a.ratio) CHECK(r == 1.0);
        CHECK_FALSE(a.collapsed);
    }
    SUBCASE("product collapses") {
        const AvrReport a = avr_rx_cigar(1.0, 60.0, 24);
        CHECK(a.collapsed);
        CHECK(a.ratio.back() < 0.15);
    }
    SUBCASE("shot soliton collapses but keeps a fat unit ball") {
        ShootingConfig cfg;
        const RadialProfile p = bryant_shoot(cfg);
        const AvrReport a = avr_profile(p, 100.0, 24);
        CHECK(a.collapsed);
        CHECK(a.vol_unit_ball > 0.1 * 4.0 * kPi / 3.0);
    }
}

TEST_CASE("dimension reduction probe") {
    SUBCASE("product against itself is exact") {
        CHECK(dimension_reduction_probe_rx(1.0, 12.0, ProbeReference::RxCigar, 0.2) < 1e-12);
    }
    SUBCASE("shot soliton stays far from the cigar reference") {
        // Oracle: the rescaled fibers are round circles of bounded length,
        // while the cigar fiber keeps opening.
        ShootingConfig cfg;
        const RadialProfile p = bryant_shoot(cfg);
        const double dev =
            dimension_reduction_probe_profile(p, 50.0, ProbeReference::RxCigar, 0.2);
        CHECK(dev >= 0.1);
    }
    SUBCASE("shot soliton is close to the round-fiber reference") {
        ShootingConfig cfg;
        const RadialProfile p = bryant_shoot(cfg);
        const double dev =
            dimension_reduction_probe_profile(p, 50.0, ProbeReference::RoundFiber, 0.2);
        CHECK(dev < 0.1);
    }
}
