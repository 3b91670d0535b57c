#include "soliton/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "soliton/parallel.hpp"

namespace soliton {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Odd cubic fit through the two nodes nearest a pole; returns -b'''/b',
// the regular curvature limit.
double pole_curvature(double s1, double b1, double s2, double b2) {
    const double det = s1 * s2 * (s2 * s2 - s1 * s1);
    const double a1 = (b1 * s2 * s2 * s2 - b2 * s1 * s1 * s1) / det;
    const double a3 = (s1 * b2 - s2 * b1) / det;
    return -6.0 * a3 / a1;
}

} // namespace

std::vector<double> flow_curvature(const FlowState& st) {
    const std::size_t m = st.size();
    if (m < 5) throw std::invalid_argument("flow state too small");
    if (st.K_analytic.size() == m) return st.K_analytic;

    std::vector<double> K(m, 0.0);
    parallel_for(static_cast<std::ptrdiff_t>(m) - 2, [&](std::ptrdiff_t w) {
        const std::size_t j = static_cast<std::size_t>(w) + 1;
        const double h1 = st.s[j] - st.s[j - 1];
        const double h2 = st.s[j + 1] - st.s[j];
        const double bpp = 2.0 * (st.b[j - 1] / (h1 * (h1 + h2)) - st.b[j] / (h1 * h2) +
                                  st.b[j + 1] / (h2 * (h1 + h2)));
        K[j] = -bpp / st.b[j];
    });
    const double L = st.length();
    K[0] = pole_curvature(st.s[1], st.b[1], st.s[2], st.b[2]);
    K[m - 1] = pole_curvature(L - st.s[m - 2], st.b[m - 2], L - st.s[m - 3], st.b[m - 3]);
    return K;
}

double flow_area(const FlowState& st) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < st.size(); ++j)
        acc += 0.5 * (st.b[j] + st.b[j + 1]) * (st.s[j + 1] - st.s[j]);
    return 2.0 * kPi * acc;
}

double roundness(const FlowState& st) {
    const auto K = flow_curvature(st);
    const auto [lo, hi] = std::minmax_element(K.begin(), K.end());
    return *hi / *lo;
}

namespace {

// Uniform resampling with 6-point Lagrange interpolation; b extends oddly
// across both poles. The result is rescaled to preserve the discrete area
// exactly, so re-gridding never shows up in the per-step area bookkeeping.
void resample_uniform(FlowState& st) {
    const std::size_t m = st.size();
    const double L = st.length();
    const auto mi = static_cast<std::ptrdiff_t>(m);

    auto node = [&](std::ptrdiff_t e, double& x, double& y) {
        if (e < 0) {
            x = -st.s[static_cast<std::size_t>(-e)];
            y = -st.b[static_cast<std::size_t>(-e)];
        } else if (e >= mi) {
            const std::ptrdiff_t r = 2 * (mi - 1) - e;
            x = 2.0 * L - st.s[static_cast<std::size_t>(r)];
            y = -st.b[static_cast<std::size_t>(r)];
        } else {
            x = st.s[static_cast<std::size_t>(e)];
            y = st.b[static_cast<std::size_t>(e)];
        }
    };

    std::vector<double> ns(m), nb(m);
    std::ptrdiff_t cursor = 0;
    for (std::size_t q = 0; q < m; ++q) {
        const double x = L * static_cast<double>(q) / static_cast<double>(m - 1);
        ns[q] = x;
        if (q == 0 || q + 1 == m) {
            nb[q] = 0.0;
            continue;
        }
        while (cursor + 1 < mi && st.s[static_cast<std::size_t>(cursor) + 1] < x) ++cursor;
        const std::ptrdiff_t j0 = cursor - 2;
        double acc = 0.0;
        for (std::ptrdiff_t a = j0; a < j0 + 6; ++a) {
            double xa, ya;
            node(a, xa, ya);
            double w = ya;
            for (std::ptrdiff_t c = j0; c < j0 + 6; ++c) {
                if (c == a) continue;
                double xc, yc;
                node(c, xc, yc);
                w *= (x - xc) / (xa - xc);
            }
            acc += w;
        }
        nb[q] = acc;
    }
    double before = 0.0, after = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        before += 0.5 * (st.b[j] + st.b[j + 1]) * (st.s[j + 1] - st.s[j]);
        after += 0.5 * (nb[j] + nb[j + 1]) * (ns[j + 1] - ns[j]);
    }
    const double scale = before / after;
    for (double& v : nb) v *= scale;
    st.s = std::move(ns);
    st.b = std::move(nb);
}

struct StepScratch {
    std::vector<double> K, factor;
};

// Core update shared by ricci_flow_step and run_flow. Returns false when the
// shrink factor loses positivity.
bool apply_step(const FlowState& st, const std::vector<double>& K, double dt, FlowState& out,
                std::vector<double>& factor) {
    const std::size_t m = st.size();
    factor.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        factor[j] = 1.0 - 2.0 * K[j] * dt;
        if (!(factor[j] > 1e-10)) return false;
    }
    out.t = st.t + dt;
    out.pole_slope_left = st.pole_slope_left;
    out.pole_slope_right = st.pole_slope_right;
    out.K_analytic.clear();
    out.b.resize(m);
    out.s.resize(m);
    for (std::size_t j = 0; j < m; ++j) out.b[j] = st.b[j] * std::sqrt(factor[j]);
    out.s[0] = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double mid = 0.5 * (factor[j] + factor[j + 1]);
        out.s[j + 1] = out.s[j] + (st.s[j + 1] - st.s[j]) * std::sqrt(mid);
    }
    out.b.front() = 0.0;
    out.b.back() = 0.0;

    double dmin = out.s[1], dmax = out.s[1];
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double d = out.s[j + 1] - out.s[j];
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmax / dmin > 1.10) resample_uniform(out);
    return true;
}

double stability_dt(const FlowState& st, const std::vector<double>& K, double safety) {
    double dmin = st.s[1] - st.s[0];
    for (std::size_t j = 1; j + 1 < st.size(); ++j)
        dmin = std::min(dmin, st.s[j + 1] - st.s[j]);
    const double kmax = *std::max_element(K.begin(), K.end());
    return safety * dmin * dmin / std::max(kmax, 1.0);
}

} // namespace

StepResult ricci_flow_step(const FlowState& st, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("ricci_flow_step: dt must be positive");
    StepResult res;
    const auto K = flow_curvature(st);
    std::vector<double> factor;
    if (!apply_step(st, K, dt, res.next, factor)) {
        res.accepted = false;
        res.next = st;
        res.suggested_dt = std::min(stability_dt(st, K, 0.2),
                                    0.25 / *std::max_element(K.begin(), K.end()));
        return res;
    }
    // Pole regularity loss also rejects: the first interior slope must stay
    // near the recorded pole slope.
    const double slope = res.next.b[1] / res.next.s[1];
    if (!(slope > 0.0) || std::abs(slope - st.pole_slope_left) > 0.5) {
        res.accepted = false;
        res.next = st;
        res.suggested_dt = 0.5 * dt;
        return res;
    }
    res.accepted = true;
    res.suggested_dt = dt;
    return res;
}

FlowTrajectory run_flow(const FlowState& initial, const FlowControl& ctl) {
    if (std::abs(initial.pole_slope_left - 1.0) > 0.05 ||
        std::abs(initial.pole_slope_right + 1.0) > 0.05)
        throw std::invalid_argument("run_flow: initial state has irregular poles");
    {
        const auto K0 = flow_curvature(initial);
        for (double k : K0)
            if (!(k > 0.0)) throw std::invalid_argument("run_flow: initial curvature not positive");
    }

    FlowTrajectory traj;
    FlowState cur = initial;
    FlowState next;
    std::vector<double> factor;
    const double area0 = flow_area(cur);
    double area = area0;
    std::size_t record_stride = 1;

    auto record = [&](const std::vector<double>& K, double rnd) {
        const auto [lo, hi] = std::minmax_element(K.begin(), K.end());
        traj.t.push_back(cur.t);
        traj.K_min.push_back(*lo);
        traj.K_max.push_back(*hi);
        traj.area.push_back(area);
        traj.roundness.push_back(rnd);
        if (traj.t.size() > ctl.max_records) {
            // Thin by dropping every other record and doubling the stride.
            auto thin = [](std::vector<double>& a) {
                std::size_t w = 0;
                for (std::size_t q = 0; q < a.size(); q += 2) a[w++] = a[q];
                a.resize(w);
            };
            thin(traj.t);
            thin(traj.K_min);
            thin(traj.K_max);
            thin(traj.area);
            thin(traj.roundness);
            record_stride *= 2;
        }
    };

    bool first_rate = true;
    for (std::size_t step = 0; step < ctl.max_steps; ++step) {
        const auto K = flow_curvature(cur);
        const auto [lo, hi] = std::minmax_element(K.begin(), K.end());
        const double rnd = *hi / *lo;
        if (step % record_stride == 0) record(K, rnd);

        if (rnd <= ctl.stop_roundness) {
            traj.reached_roundness = true;
            break;
        }
        if (area <= ctl.area_floor_frac * area0) break;

        double dt = stability_dt(cur, K, ctl.dt_safety);
        while (!apply_step(cur, K, dt, next, factor)) dt *= 0.5;
        const double new_area = flow_area(next);
        const double rate = (area - new_area) / dt;
        if (first_rate) {
            traj.area_rate_min = traj.area_rate_max = rate;
            first_rate = false;
        } else {
            traj.area_rate_min = std::min(traj.area_rate_min, rate);
            traj.area_rate_max = std::max(traj.area_rate_max, rate);
        }
        std::swap(cur, next);
        area = new_area;
        traj.steps_taken = step + 1;
        if (step + 1 == ctl.max_steps)
            throw std::runtime_error("run_flow: step budget exhausted before stopping rule");
    }

    traj.extinction_estimate = cur.t + area / (8.0 * kPi);
    traj.r_norm = normalization_factor(traj);
    return traj;
}

std::vector<double> normalization_factor(const FlowTrajectory& traj) {
    if (traj.t.empty()) throw std::invalid_argument("normalization_factor: empty trajectory");
    const double k0 = traj.K_min.front();
    const double a0 = traj.area.front();
    std::vector<double> r(traj.t.size());
    for (std::size_t q = 0; q < traj.t.size(); ++q) {
        if (!(traj.K_min[q] > 0.0))
            throw std::invalid_argument("normalization_factor: K_min not positive");
        r[q] = std::min(std::sqrt(traj.K_min[q] / k0), std::sqrt(a0 / traj.area[q]));
    }
    return r;
}

} // namespace soliton
