#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "soliton/curvature.hpp"
#include "soliton/models.hpp"
#include "soliton/radial_profile.hpp"

using namespace soliton;

namespace {

RadialProfile analytic_profile(int n, double r_max, double step, double (*w)(double),
                               double (*w1)(double), double (*w2)(double)) {
    RadialProfile p;
    p.n = n;
    const auto m = static_cast<std::size_t>(std::llround(r_max / step)) + 1;
    for (std::size_t k = 0; k < m; ++k) {
        const double r = step * static_cast<double>(k);
        p.r.push_back(r);
        p.phi.push_back(w(r));
        p.phi_d1.push_back(w1(r));
        p.phi_d2.push_back(w2(r));
        p.f.push_back(0.0);
        p.f_d1.push_back(0.0);
    }
    return p;
}

double ident(double r) { return r; }
double one(double) { return 1.0; }
double zero(double) { return 0.0; }

} // namespace

TEST_CASE("flat R^3 profile has zero curvature") {
    const RadialProfile p = analytic_profile(3, 10.0, 0.01, ident, one, zero);
    const CurvatureReport rep = radial_curvature(p);
    for (std::size_t k = 0; k < p.size(); ++k) {
        CHECK(rep.scalar[k] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rep.sec_radial[k] == doctest::Approx(0.0));
        CHECK(rep.sec_spherical[k] == doctest::Approx(0.0));
    }
}

TEST_CASE("unit round sphere profile has K = 1 in both families") {
    const RadialProfile p = analytic_profile(
        3, 3.0, 0.01, [](double r) { return std::sin(r); },
        [](double r) { return std::cos(r); }, [](double r) { return -std::sin(r); });
    const CurvatureReport rep = radial_curvature(p);
    for (std::size_t k = 0; k < p.size(); ++k) {
        CHECK(rep.sec_radial[k] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(rep.sec_spherical[k] == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(rep.scalar[k] == doctest::Approx(6.0).epsilon(1e-7));
    }
}

TEST_CASE("cigar curvature: K = sech^2(rho/2)/2 with K(0) = 1/2") {
    const RadialProfile p = cigar_profile(20.0, 0.01);
    const CurvatureReport rep = radial_curvature(p);
    CHECK(rep.sec_radial[0] == doctest::Approx(0.5).epsilon(1e-9));
    for (std::size_t k = 1; k < p.size(); k += 37) {
        const double c = std::cosh(0.5 * p.r[k]);
        CHECK(rep.sec_radial[k] == doctest::Approx(0.5 / (c * c)).epsilon(1e-12));
    }
}

TEST_CASE("trace consistency: R equals the sum of Ricci eigenvalues") {
    const RadialProfile cig = cigar_profile(20.0, 0.01);
    const CurvatureReport rep = radial_curvature(cig);
    for (std::size_t k = 0; k < cig.size(); k += 11) {
        double sum = 0.0;
        for (int q = 0; q < rep.n; ++q) sum += rep.ricci(k, q);
        CHECK(std::abs(rep.scalar[k] - sum) < 1e-12);
    }

    const WarpedHalfPlaneMetric m = product_with_line(cigar_profile(12.0, 0.05), 2.0, 41);
    const CurvatureReport wrep = warped_curvature(m, 1);
    for (std::size_t id = 0; id < m.size(); id += 97) {
        double sum = 0.0;
        for (int q = 0; q < wrep.n; ++q)
            sum += wrep.ricci_eigs[id * 3 + static_cast<std::size_t>(q)];
        CHECK(std::abs(wrep.scalar[id] - sum) < 1e-11);
    }
}

TEST_CASE("second-order convergence of the differenced cigar curvature") {
    // Halving the spacing must shrink the max K error by a factor near 4.
    auto max_error = [](double step) {
        RadialProfile p = differentiate(cigar_profile(16.0, step));
        const CurvatureReport rep = radial_curvature(p);
        double worst = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double c = std::cosh(0.5 * p.r[k]);
            worst = std::max(worst, std::abs(rep.sec_radial[k] - 0.5 / (c * c)));
        }
        return worst;
    };
    const double ratio = max_error(0.02) / max_error(0.01);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("flat half-plane with phi = v is flat R^3 in cylindrical form") {
    WarpedHalfPlaneMetric m;
    m.nu = 41;
    m.nv = 33;
    m.u0 = -2.0;
    m.hu = 0.1;
    m.hv = 0.1;
    m.g_uu.assign(m.size(), 1.0);
    m.g_uv.assign(m.size(), 0.0);
    m.g_vv.assign(m.size(), 1.0);
    m.phi.resize(m.size());
    m.f.assign(m.size(), 0.0);
    for (std::size_t k = 0; k < m.nv; ++k)
        for (std::size_t j = 0; j < m.nu; ++j) m.phi[m.idx(j, k)] = m.v(k);
    const CurvatureReport rep = warped_curvature(m, 1);
    for (std::size_t id = 0; id < m.size(); ++id) {
        CHECK(std::abs(rep.scalar[id]) < 1e-10);
        CHECK(std::abs(rep.sec_base[id]) < 1e-10);
        CHECK(std::abs(rep.sec_mixed_lo[id]) < 1e-10);
    }
    CHECK(rep.sec_fiber.empty()); // no fiber-fiber family for circle fibers
}

TEST_CASE("product line x cigar: R = sech^2(v/2), R = 1 on the axis") {
    const WarpedHalfPlaneMetric m = product_with_line(cigar_profile(12.0, 0.02), 2.0, 41);
    const CurvatureReport rep = warped_curvature(m, 1);
    // Oracle: the product scalar curvature is the cigar scalar curvature.
    for (std::size_t k = 1; k + 1 < m.nv; k += 50) {
        for (std::size_t j = 1; j + 1 < m.nu; j += 13) {
            const double c = std::cosh(0.5 * m.v(k));
            CHECK(rep.scalar[m.idx(j, k)] == doctest::Approx(1.0 / (c * c)).epsilon(5e-4));
        }
    }
    CHECK(rep.scalar[m.idx(20, 0)] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("constant warp with a 2-sphere fiber: fiber curvature 1/4, mixed 0") {
    WarpedHalfPlaneMetric m;
    m.nu = 33;
    m.nv = 33;
    m.u0 = -1.6;
    m.hu = 0.1;
    m.hv = 0.1;
    m.g_uu.assign(m.size(), 1.0);
    m.g_uv.assign(m.size(), 0.0);
    m.g_vv.assign(m.size(), 1.0);
    m.phi.assign(m.size(), 2.0);
    m.f.assign(m.size(), 0.0);
    for (std::size_t j = 0; j < m.nu; ++j) m.phi[m.idx(j, 0)] = 0.0; // axis row
    const CurvatureReport rep = warped_curvature(m, 2);
    // Interior nodes away from the axis row see the constant warp.
    for (std::size_t k = 4; k + 1 < m.nv; k += 7) {
        for (std::size_t j = 1; j + 1 < m.nu; j += 9) {
            CHECK(rep.sec_fiber[m.idx(j, k)] == doctest::Approx(0.25).epsilon(1e-12));
            CHECK(std::abs(rep.sec_mixed_hi[m.idx(j, k)]) < 1e-12);
        }
    }
}

TEST_CASE("reflection symmetry: curvature of a Z2-symmetric metric is even in u") {
    ShootingConfig cfg;
    cfg.r_max = 12.0;
    const RadialProfile bryant = bryant_shoot(cfg);
    const WarpedHalfPlaneMetric m = profile_to_half_plane(bryant, 4.0, 4.0, 0.08);
    const CurvatureReport rep = warped_curvature(m, 1);
    for (std::size_t k = 1; k + 1 < m.nv; k += 5) {
        for (std::size_t j = 1; j < m.nu / 2; j += 7) {
            const std::size_t jm = m.nu - 1 - j;
            CHECK(rep.scalar[m.idx(j, k)] ==
                  doctest::Approx(rep.scalar[m.idx(jm, k)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("radial and warped curvature agree on an embedded profile") {
    ShootingConfig cfg;
    cfg.r_max = 12.0;
    const RadialProfile bryant = bryant_shoot(cfg);
    const CurvatureReport rad = radial_curvature(bryant);
    const WarpedHalfPlaneMetric m = profile_to_half_plane(bryant, 4.0, 4.0, 0.05);
    const CurvatureReport wrp = warped_curvature(m, 1);
    const double h = bryant.r[1] - bryant.r[0];
    for (std::size_t k = 8; k + 1 < m.nv; k += 11) {
        for (std::size_t j = 8; j + 1 < m.nu; j += 17) {
            const double r = std::hypot(m.u(j), m.v(k));
            const auto kr = static_cast<std::size_t>(std::llround(r / h));
            CHECK(wrp.scalar[m.idx(j, k)] == doctest::Approx(rad.scalar[kr]).epsilon(5e-3));
        }
    }
}

TEST_CASE("concavity check") {
    SUBCASE("cigar warp is concave") {
        CHECK(concavity_check(cigar_profile(30.0, 0.01)).max_positive == 0.0);
    }
    SUBCASE("linear warp is the boundary case") {
        const RadialProfile p = analytic_profile(3, 5.0, 0.01, ident, one, zero);
        CHECK(concavity_check(p).max_positive == 0.0);
    }
    SUBCASE("phi = r^2 on [1,2] violates with magnitude 2") {
        RadialProfile p;
        p.n = 3;
        for (int k = 0; k <= 100; ++k) {
            const double r = 1.0 + 0.01 * k;
            p.r.push_back(r);
            p.phi.push_back(r * r);
            p.phi_d1.push_back(2.0 * r);
            p.phi_d2.push_back(2.0);
            p.f.push_back(0.0);
            p.f_d1.push_back(0.0);
        }
        CHECK(concavity_check(p).max_positive == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("gradient norm") {
    SUBCASE("constant potential on a profile") {
        RadialProfile p = cigar_profile(10.0, 0.01);
        std::fill(p.f.begin(), p.f.end(), 3.0);
        std::fill(p.f_d1.begin(), p.f_d1.end(), 0.0);
        for (double v : gradient_norm(p)) CHECK(v == 0.0);
    }
    SUBCASE("cigar potential gives |grad f| = tanh(rho/2)") {
        const RadialProfile p = cigar_profile(10.0, 0.01);
        const auto g = gradient_norm(p);
        for (std::size_t k = 0; k < p.size(); k += 101)
            CHECK(g[k] == doctest::Approx(std::tanh(0.5 * p.r[k])).epsilon(1e-12));
    }
    SUBCASE("flat metric with f = u") {
        WarpedHalfPlaneMetric m;
        m.nu = 21;
        m.nv = 17;
        m.u0 = -1.0;
        m.hu = 0.1;
        m.hv = 0.1;
        m.g_uu.assign(m.size(), 1.0);
        m.g_uv.assign(m.size(), 0.0);
        m.g_vv.assign(m.size(), 1.0);
        m.phi.resize(m.size());
        m.f.resize(m.size());
        for (std::size_t k = 0; k < m.nv; ++k)
            for (std::size_t j = 0; j < m.nu; ++j) {
                m.phi[m.idx(j, k)] = m.v(k);
                m.f[m.idx(j, k)] = m.u(j);
            }
        for (double v : gradient_norm(m, m.f)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("validation errors") {
    RadialProfile p = cigar_profile(5.0, 0.01);
    SUBCASE("non-monotone grid") {
        p.r[10] = p.r[12];
        CHECK_THROWS_AS(radial_curvature(p), std::invalid_argument);
    }
    SUBCASE("nonpositive warp off the axis") {
        p.phi[20] = -1e-3;
        CHECK_THROWS_AS(radial_curvature(p), std::invalid_argument);
    }
    SUBCASE("axis slope far from 1") {
        for (std::size_t k = 0; k < p.size(); ++k) {
            p.phi[k] *= 0.5;
            p.phi_d1[k] *= 0.5;
            p.phi_d2[k] *= 0.5;
        }
        CHECK_THROWS_AS(radial_curvature(p), std::invalid_argument);
    }
    SUBCASE("gradient norm grid mismatch") {
        const WarpedHalfPlaneMetric m = product_with_line(cigar_profile(5.0, 0.1), 1.0, 11);
        std::vector<double> bad(m.size() - 1, 0.0);
        CHECK_THROWS_AS(gradient_norm(m, bad), std::invalid_argument);
    }
}
