#include <doctest.h>

#include <stdexcept>
#include <algorithm>

#include <cmath>
#include <random>

#include "soliton/compare.hpp"
#include "soliton/models.hpp"

using namespace soliton;

namespace {
constexpr double kPi = 3.14159265358979323846;

ProfileCurve flat_plane(double r_max) {
    ProfileCurve c;
    c.w = [](double r) { return r; };
    c.wp = [](double) { return 1.0; };
    c.r_max = r_max;
    return c;
}
} // namespace

TEST_CASE("comparison angle on simple triples") {
    CHECK(comparison_angle(1.0, 1.0, 1.0) == doctest::Approx(kPi / 3.0).epsilon(1e-15));
    CHECK(comparison_angle(3.0, 4.0, 5.0) == doctest::Approx(kPi / 2.0).epsilon(1e-15));
    CHECK(comparison_angle(1.0, 1.0, 2.0) == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("comparison angle is exact on Euclidean triples") {
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double ox = coord(rng), oy = coord(rng);
        const double px = coord(rng), py = coord(rng);
        const double qx = coord(rng), qy = coord(rng);
        const double dop = std::hypot(px - ox, py - oy);
        const double doq = std::hypot(qx - ox, qy - oy);
        const double dpq = std::hypot(qx - px, qy - py);
        if (dop < 1e-3 || doq < 1e-3) continue;
        const double expected =
            std::acos(std::clamp(((px - ox) * (qx - ox) + (py - oy) * (qy - oy)) / (dop * doq),
                                 -1.0, 1.0));
        CHECK(comparison_angle(dop, doq, dpq) == doctest::Approx(expected).epsilon(1e-11));
    }
}

TEST_CASE("comparison angle is scale invariant") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> side(0.1, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        double a = side(rng), b = side(rng);
        std::uniform_real_distribution<double> third(std::abs(a - b) + 1e-6, a + b - 1e-6);
        const double c = third(rng);
        const double base = comparison_angle(a, b, c);
        for (double scale : {1e-3, 7.0, 1e4}) {
            CHECK(comparison_angle(scale * a, scale * b, scale * c) ==
                  doctest::Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("triangle inequality violations are rejected") {
    CHECK_THROWS_AS(comparison_angle(1.0, 1.0, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(comparison_angle(5.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("profile geodesics on the flat plane (closed-form oracle)") {
    // Flat plane in polar coordinates: chords and point-to-axis distances
    // have elementary closed forms.
    const ProfileCurve flat = flat_plane(100.0);
    SUBCASE("antipodal chord runs through the tip") {
        const DistanceBound d = profile_pair_distance(flat, 5.0, 0.0, 5.0, kPi);
        CHECK(d.value == doctest::Approx(10.0).epsilon(1e-8));
    }
    SUBCASE("right-angle chord") {
        const DistanceBound d = profile_pair_distance(flat, 3.0, 0.0, 3.0, 0.5 * kPi);
        CHECK(d.value == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-8));
        CHECK(d.lower <= d.value);
        CHECK(d.upper >= d.value - 1e-12);
    }
    SUBCASE("unequal radii") {
        // law of cosines oracle
        const double r1 = 2.0, r2 = 5.0, dpsi = 1.1;
        const double expected = std::sqrt(r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(dpsi));
        const DistanceBound d = profile_pair_distance(flat, r1, 0.0, r2, dpsi);
        CHECK(d.value == doctest::Approx(expected).epsilon(1e-7));
    }
    SUBCASE("point to axis is the perpendicular foot") {
        const DistanceBound d = profile_point_to_axis(flat, 4.0, 0.7);
        CHECK(d.value == doctest::Approx(4.0 * std::sin(0.7)).epsilon(1e-8));
    }
    SUBCASE("same-ray points") {
        const DistanceBound d = profile_pair_distance(flat, 2.0, 0.4, 7.0, 0.4);
        CHECK(d.value == doctest::Approx(5.0));
    }
}

TEST_CASE("model distances") {
    SUBCASE("flat space") {
        const ModelSpace flat{ModelSpace::Kind::Flat3, 1.0, 0.0};
        CHECK(model_distance(flat, {0, 0, 0}, {3, 4, 12}).value == doctest::Approx(13.0));
    }
    SUBCASE("unit sphere antipodes") {
        const ModelSpace sph{ModelSpace::Kind::UnitSphere, 1.0, 0.0};
        CHECK(model_distance(sph, {0, 0, 1}, {0, 0, -1}).value == doctest::Approx(kPi));
    }
    SUBCASE("cigar tip distance is the arclength coordinate") {
        const ModelSpace cig{ModelSpace::Kind::Cigar, 1.0, 50.0};
        CHECK(model_distance(cig, {0, 0, 0}, {7.5, 1.0, 0}).value == doctest::Approx(7.5));
    }
    SUBCASE("product line coordinates on Gamma") {
        const ModelSpace rx{ModelSpace::Kind::RxCigar, 1.0, 50.0};
        CHECK(model_distance(rx, {-2.0, 0, 0}, {5.0, 0, 0}).value == doctest::Approx(7.0));
    }
    SUBCASE("product combines line and fiber distances") {
        const ModelSpace rx{ModelSpace::Kind::RxCigar, 1.0, 50.0};
        // Sigma points share theta: cigar radial distance |rho1 - rho2|.
        const DistanceBound d = model_distance(rx, {0.0, 1.0, 0}, {3.0, 5.0, 0});
        CHECK(d.value == doctest::Approx(std::hypot(3.0, 4.0)).epsilon(1e-12));
    }
}

TEST_CASE("cone angle of the cigar product is pi") {
    const ConeAngleEstimate est = estimate_cone_angle(rx_cigar_probe(), 500.0, 16);
    CHECK(est.alpha == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(est.monotone);
}

TEST_CASE("cone angle of the 2d cigar tends to zero") {
    // Chords stay below the asymptotic half-circumference 2 pi while the
    // legs grow linearly, so the comparison angles collapse.
    const ConeAngleEstimate est = estimate_cone_angle(cigar2d_probe(1.0, 260.0), 250.0, 12);
    CHECK(est.monotone);
    CHECK(est.alpha < 0.2);
    CHECK(est.theta.back() < est.theta.front());
    // chord bound: last chord below the cylinder half-circumference
    const double chord = 2.0 * 250.0 * std::sin(0.5 * est.theta.back());
    CHECK(chord < 2.0 * kPi + 0.1);
}

TEST_CASE("cone angle of the shot soliton shrinks with scale") {
    ShootingConfig cfg;
    cfg.r_max = 130.0;
    cfg.store_every = 20;
    const RadialProfile p = bryant_shoot(cfg);
    const ConeAngleEstimate est = estimate_cone_angle(profile_probe(p), 120.0, 10);
    CHECK(est.monotone);
    CHECK(est.alpha < 0.45);
    // theta ~ pi sqrt(2/s) for phi ~ sqrt(2 r): check the last sample against
    // the closed-form asymptotic with a loose band.
    const double predicted = kPi * std::sqrt(2.0 / 120.0);
    CHECK(est.theta.back() == doctest::Approx(predicted).epsilon(0.2));
}

TEST_CASE("insufficient samples are rejected") {
    CHECK_THROWS_AS(estimate_cone_angle(rx_cigar_probe(), 10.0, 3), std::invalid_argument);
}
