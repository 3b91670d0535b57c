#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "soliton/flow.hpp"
#include "soliton/models.hpp"

using namespace soliton;

namespace {

constexpr double kPi = 3.14159265358979323846;

FlowState round_sphere(double radius, std::size_t nodes) {
    FlowState st;
    st.s.resize(nodes);
    st.b.resize(nodes);
    st.K_analytic.assign(nodes, 1.0 / (radius * radius));
    const double L = kPi * radius;
    for (std::size_t j = 0; j < nodes; ++j) {
        st.s[j] = L * static_cast<double>(j) / static_cast<double>(nodes - 1);
        st.b[j] = radius * std::sin(st.s[j] / radius);
    }
    st.b.front() = 0.0;
    st.b.back() = 0.0;
    return st;
}

// Drives the flow with the stability step rule; returns the state at time
// >= t_end (first step crossing it is shortened to land exactly).
FlowState flow_to(FlowState st, double t_end) {
    while (st.t < t_end) {
        const auto K = flow_curvature(st);
        const double kmax = *std::max_element(K.begin(), K.end());
        double dmin = st.s[1] - st.s[0];
        for (std::size_t j = 1; j + 1 < st.size(); ++j)
            dmin = std::min(dmin, st.s[j + 1] - st.s[j]);
        double dt = std::min(0.2 * dmin * dmin / std::max(kmax, 1.0), t_end - st.t);
        StepResult res = ricci_flow_step(st, dt);
        while (!res.accepted) res = ricci_flow_step(st, res.suggested_dt);
        st = std::move(res.next);
    }
    return st;
}

} // namespace

TEST_CASE("round sphere radius law rho^2(t) = rho0^2 - 2t") {
    // Oracle: the scalar ODE d(rho^2)/dt = -2 for round metrics.
    FlowState st = round_sphere(1.0, 1024);
    const double area0 = flow_area(st);
    st = flow_to(std::move(st), 0.2);
    const double measured = flow_area(st) / area0; // = rho^2(t)/rho0^2
    CHECK(std::abs(measured - (1.0 - 2.0 * 0.2)) < 1e-6);
}

TEST_CASE("area decays at 8 pi on every step (Gauss-Bonnet oracle)") {
    FlowState st = smoothed_revolution_surface(2.0, 192, 0.5);
    double area = flow_area(st);
    for (int step = 0; step < 400; ++step) {
        const auto K = flow_curvature(st);
        const double kmax = *std::max_element(K.begin(), K.end());
        const double dmin = st.s[1] - st.s[0];
        const double dt = 0.2 * dmin * dmin / std::max(kmax, 1.0);
        const StepResult res = ricci_flow_step(st, dt);
        REQUIRE(res.accepted);
        const double rate = (area - flow_area(res.next)) / dt;
        CHECK(std::abs(rate - 8.0 * kPi) < 0.01 * 8.0 * kPi);
        st = res.next;
        area = flow_area(st);
    }
}

TEST_CASE("round sphere stays round") {
    FlowState st = round_sphere(1.0, 512);
    st = flow_to(std::move(st), 0.1);
    CHECK(roundness(st) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("oversized steps are rejected with a stable suggestion") {
    const FlowState st = smoothed_revolution_surface(2.0, 128, 0.5);
    const StepResult res = ricci_flow_step(st, 10.0);
    CHECK_FALSE(res.accepted);
    CHECK(res.suggested_dt > 0.0);
    CHECK(res.suggested_dt < 10.0);
    const StepResult retry = ricci_flow_step(st, res.suggested_dt);
    CHECK(retry.accepted);
}

TEST_CASE("K_min never decreases along the i = 2 flow (refined-grid oracle)") {
    auto kmin_curve = [](std::size_t nodes) {
        FlowState st = smoothed_revolution_surface(2.0, nodes, 0.5);
        std::vector<double> out;
        for (int q = 0; q < 20; ++q) {
            st = flow_to(std::move(st), st.t + 0.005);
            const auto K = flow_curvature(st);
            out.push_back(*std::min_element(K.begin(), K.end()));
        }
        return out;
    };
    const auto coarse = kmin_curve(128);
    for (std::size_t q = 1; q < coarse.size(); ++q) CHECK(coarse[q] >= coarse[q - 1] - 1e-9);
    // Refined run reproduces the coarse K_min history.
    const auto fine = kmin_curve(256);
    for (std::size_t q = 0; q < coarse.size(); ++q)
        CHECK(fine[q] == doctest::Approx(coarse[q]).epsilon(2e-3));
}

TEST_CASE("mirror symmetry of the profile is preserved") {
    FlowState st = smoothed_revolution_surface(2.0, 256, 0.5);
    st = flow_to(std::move(st), 0.02);
    const std::size_t n = st.size();
    for (std::size_t j = 0; j < n / 2; j += 5)
        CHECK(st.b[j] == doctest::Approx(st.b[n - 1 - j]).epsilon(1e-9));
}

TEST_CASE("run_flow trajectory contracts to a round point") {
    FlowControl ctl;
    ctl.stop_roundness = 1.05;
    const FlowState initial = smoothed_revolution_surface(2.0, 160, 0.5);
    const FlowTrajectory traj = run_flow(initial, ctl);

    CHECK(traj.reached_roundness);
    CHECK(traj.area_rate_min > 8.0 * kPi * 0.99);
    CHECK(traj.area_rate_max < 8.0 * kPi * 1.01);

    SUBCASE("recorded series are monotone where they must be") {
        for (std::size_t q = 1; q < traj.t.size(); ++q) {
            CHECK(traj.t[q] > traj.t[q - 1]);
            CHECK(traj.area[q] < traj.area[q - 1]);
            CHECK(traj.K_min[q] > 0.0);
        }
    }
    SUBCASE("extinction estimate matches the linear area law") {
        // Oracle: A(t) = A(0) - 8 pi t exactly, so T = A(0) / 8 pi.
        CHECK(traj.extinction_estimate ==
              doctest::Approx(traj.area.front() / (8.0 * kPi)).epsilon(0.02));
    }
    SUBCASE("normalization factor") {
        const auto r = traj.r_norm;
        CHECK(r.front() == 1.0);
        for (std::size_t q = 0; q < r.size(); ++q) {
            const double kb = std::sqrt(traj.K_min[q] / traj.K_min.front());
            const double vb = std::sqrt(traj.area.front() / traj.area[q]);
            CHECK(r[q] <= std::min(kb, vb) + 1e-12);
        }
        // Volume branch on the final tenth of the samples.
        for (std::size_t q = r.size() - r.size() / 10; q < r.size(); ++q) {
            const double prod = r[q] * std::sqrt(traj.area[q] / traj.area.front());
            CHECK(std::abs(prod - 1.0) < 1e-8);
        }
    }
    SUBCASE("normalized family keeps K above 1 - 0.05") {
        for (std::size_t q = 0; q < traj.t.size(); ++q)
            CHECK(traj.K_min[q] / (traj.r_norm[q] * traj.r_norm[q]) > 0.95);
    }
}

TEST_CASE("K_min at a fixed time is grid-converged") {
    auto kmin_at = [](std::size_t nodes) {
        FlowState st = flow_to(smoothed_revolution_surface(2.0, nodes, 0.5), 0.03);
        const auto K = flow_curvature(st);
        return *std::min_element(K.begin(), K.end());
    };
    CHECK(std::abs(kmin_at(192) - kmin_at(384)) < 1e-3);
}

TEST_CASE("run_flow rejects irregular initial data") {
    const FlowState cone = revolution_surface(2.0, 256); // conical poles
    CHECK_THROWS_AS(run_flow(cone, FlowControl{}), std::invalid_argument);
}
