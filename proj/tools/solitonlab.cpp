// Command-line laboratory for rotationally symmetric soliton models, 2d Ricci
// flow runs, comparison-angle estimates and the wing solver.
//
// Exit codes: 0 pass, 1 identity-gate failure, 2 usage error, 3 numerical
// failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "soliton/compare.hpp"
#include "soliton/config.hpp"
#include "soliton/curvature.hpp"
#include "soliton/flow.hpp"
#include "soliton/models.hpp"
#include "soliton/report.hpp"
#include "soliton/verify.hpp"
#include "soliton/wing.hpp"

namespace {

using namespace soliton;

constexpr double kPi = 3.14159265358979323846;

std::string usage() {
    return "usage: solitonlab <cigar|bryant|surface-flow|cone-angle|verify|wing>"
           " [--config <path>] [--out <dir>] [--seed <u64>]\n";
}

std::string identity_csv(const std::vector<IdentityReport>& reports) {
    std::string out = "identity,max_deviation,location,tolerance,pass\n";
    for (const auto& r : reports) {
        out += r.name + ',' + format_double(r.max_deviation) + ',' + format_double(r.location) +
               ',' + format_double(r.tolerance) + ',' + (r.pass ? "1" : "0") + '\n';
    }
    return out;
}

bool all_pass(const std::vector<IdentityReport>& reports) {
    for (const auto& r : reports)
        if (!r.pass) return false;
    return true;
}

std::string profile_csv(const RadialProfile& p) {
    std::vector<std::vector<double>> rows;
    rows.reserve(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) rows.push_back({p.r[k], p.phi[k], p.f[k]});
    return csv_table({"r", "phi", "f"}, rows);
}

std::string grid_csv(const WarpedHalfPlaneMetric& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(m.size());
    for (std::size_t k = 0; k < m.nv; ++k)
        for (std::size_t j = 0; j < m.nu; ++j) {
            const std::size_t id = m.idx(j, k);
            rows.push_back({m.u(j), m.v(k), m.g_uu[id], m.g_uv[id], m.g_vv[id], m.phi[id],
                            m.f[id]});
        }
    return csv_table({"u", "v", "g_uu", "g_uv", "g_vv", "phi", "f"}, rows);
}

double quadrature_K(const RadialProfile& p) {
    // Simpson over the sampled Gauss curvature -phi''/phi of a 2d profile.
    const std::size_t m = p.size();
    const double h = p.r[1] - p.r[0];
    std::vector<double> K(m);
    for (std::size_t k = 1; k < m; ++k) K[k] = -p.phi_d2[k] / p.phi[k];
    K[0] = (K[1] * p.r[2] * p.r[2] - K[2] * p.r[1] * p.r[1]) / (p.r[2] * p.r[2] - p.r[1] * p.r[1]);
    double acc = 0.0;
    const std::size_t last = (m % 2 == 1) ? m - 1 : m - 2;
    for (std::size_t k = 0; k + 2 <= last; k += 2) acc += h / 3.0 * (K[k] + 4.0 * K[k + 1] + K[k + 2]);
    if (last != m - 1) acc += 0.5 * h * (K[m - 2] + K[m - 1]);
    return acc;
}

double phi_growth_exponent(const RadialProfile& p) {
    const double r_hi = p.r.back(), r_lo = 0.25 * r_hi;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p.r[k] < r_lo) continue;
        const double x = std::log(p.r[k]), y = std::log(p.phi[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1.0;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int run_cigar(const RunConfig& cfg, Report& rep) {
    const RadialProfile p = cigar_profile(cfg.r_max, cfg.step);
    rep.add("profile.csv", profile_csv(p));

    std::vector<IdentityReport> ids;
    ids.push_back(make_identity_report("cigar_quadrature", std::abs(quadrature_K(p) - 1.0), 0.0,
                                       1e-10));
    ids.push_back(hamilton_identity(p, false, 1e-10));
    ids.push_back(hamilton_identity(p, true, 1e-6));
    ids.push_back(soliton_residual(p, 1e-5));
    ids.push_back(make_identity_report("concavity", concavity_check(p).max_positive, 0.0, 1e-12));
    rep.add("identity_report.csv", identity_csv(ids));
    return all_pass(ids) ? 0 : 1;
}

int run_bryant(const RunConfig& cfg, Report& rep) {
    ShootingConfig sc;
    sc.n = cfg.dim;
    sc.r_max = cfg.r_max;
    sc.step = cfg.step;
    sc.bracket_lo = cfg.bracket_lo;
    sc.bracket_hi = cfg.bracket_hi;
    const RadialProfile p = bryant_shoot(sc);
    rep.add("profile.csv", profile_csv(p));

    std::vector<IdentityReport> ids;
    ids.push_back(soliton_residual(p, 1e-6));
    ids.push_back(hamilton_identity(p, false, 1e-6));
    ids.push_back(make_identity_report("phi_growth_exponent",
                                       std::abs(phi_growth_exponent(p) - 0.5), 0.0, 0.05));
    ids.push_back(make_identity_report("concavity", concavity_check(p).max_positive, 0.0, 1e-12));
    const CurvatureReport cur = radial_curvature(p);
    bool monotone = true;
    for (std::size_t k = 1; k < p.size(); ++k)
        if (cur.scalar[k] > cur.scalar[k - 1] + 1e-12) monotone = false;
    ids.push_back(make_identity_report("R_monotone_decreasing", monotone ? 0.0 : 1.0, 0.0, 0.5));
    rep.add("identity_report.csv", identity_csv(ids));

    std::vector<double> s;
    for (int q = 1; q <= 64; ++q) s.push_back(p.r.back() * q / 64.0);
    const EdgeDiagnostics d = h_diagnostics_profile(p, s);
    std::vector<std::vector<double>> rows;
    for (std::size_t q = 0; q < d.s.size(); ++q)
        rows.push_back({d.s[q], d.h1[q], d.h2[q], d.R_gamma[q], d.R_Gamma[q]});
    rep.add("edge_diagnostics.csv", csv_table({"s", "h1", "h2", "R_gamma", "R_Gamma"}, rows));
    return all_pass(ids) ? 0 : 1;
}

int run_surface_flow(const RunConfig& cfg, Report& rep) {
    const FlowState initial =
        smoothed_revolution_surface(cfg.i, static_cast<std::size_t>(cfg.nodes), cfg.cap_fraction);
    FlowControl ctl;
    ctl.stop_roundness = cfg.stop_roundness;
    ctl.area_floor_frac = cfg.area_floor;
    const FlowTrajectory traj = run_flow(initial, ctl);

    std::vector<std::vector<double>> rows;
    for (std::size_t q = 0; q < traj.t.size(); ++q)
        rows.push_back({traj.t[q], traj.K_min[q], traj.K_max[q], traj.area[q], traj.roundness[q],
                        traj.r_norm[q]});
    rep.add("trajectory.csv", csv_table({"t", "K_min", "K_max", "area", "roundness", "r_i"}, rows));
    rep.add("area.svg", svg_line_plot("area(t)", traj.t, traj.area));

    std::vector<IdentityReport> ids;
    const double rate_dev =
        std::max(std::abs(traj.area_rate_min - 8.0 * kPi), std::abs(traj.area_rate_max - 8.0 * kPi));
    ids.push_back(make_identity_report("area_rate_8pi", rate_dev, 0.0, 0.01 * 8.0 * kPi));
    ids.push_back(make_identity_report("reached_roundness", traj.reached_roundness ? 0.0 : 1.0,
                                       0.0, 0.5));
    ids.push_back(make_identity_report("r_norm_initial", std::abs(traj.r_norm.front() - 1.0), 0.0,
                                       1e-12));
    rep.add("identity_report.csv", identity_csv(ids));
    return all_pass(ids) ? 0 : 1;
}

int run_cone_angle(const RunConfig& cfg, Report& rep) {
    GammaProbe probe;
    double expected_alpha = -1.0;
    if (cfg.model == "rxcigar") {
        probe = rx_cigar_probe();
        expected_alpha = kPi;
    } else if (cfg.model == "bryant") {
        ShootingConfig sc;
        sc.r_max = cfg.s_max * 1.05 + 16.0;
        sc.store_every = 20;
        const RadialProfile p = bryant_shoot(sc);
        probe = profile_probe(p);
    } else {
        probe = cigar2d_probe(1.0, cfg.s_max * 1.05 + 16.0);
    }
    const ConeAngleEstimate est = estimate_cone_angle(probe, cfg.s_max, cfg.samples);

    std::vector<std::vector<double>> rows;
    std::vector<double> inv_s;
    for (std::size_t q = 0; q < est.s.size(); ++q) {
        rows.push_back({est.s[q], est.theta[q]});
        inv_s.push_back(1.0 / est.s[q]);
    }
    rep.add("cone_angle.csv",
            csv_table({"s", "theta"}, rows, "# alpha = " + format_double(est.alpha)));
    rep.add("theta_vs_inv_s.svg", svg_line_plot("theta vs 1/s", inv_s, est.theta));

    std::vector<IdentityReport> ids;
    ids.push_back(make_identity_report("theta_monotone", est.monotone ? 0.0 : 1.0, 0.0, 0.5));
    if (expected_alpha >= 0.0)
        ids.push_back(
            make_identity_report("alpha_vs_expected", std::abs(est.alpha - expected_alpha),
                                 est.s.back(), 1e-6));
    rep.add("identity_report.csv", identity_csv(ids));
    return all_pass(ids) ? 0 : 1;
}

int run_verify(const RunConfig& cfg, Report& rep) {
    std::vector<IdentityReport> ids;
    std::vector<double> s_grid;
    for (int q = 1; q <= 32; ++q) s_grid.push_back(cfg.s_max * q / 32.0);

    if (cfg.model == "rxcigar") {
        const RadialProfile cig = cigar_profile(cfg.s_max + 10.0, 0.01);
        const WarpedHalfPlaneMetric m = product_with_line(cig, 8.0, 161);
        ids.push_back(soliton_residual(m, 1, 2e-4));
        ids.push_back(hamilton_identity(m, 1, 1e-4));
        ids.push_back(killing_identity_product(1.0, cfg.stations, cfg.s_max, 1e-8));
        std::vector<double> R_gamma(s_grid.size(), 1.0); // R constant along Gamma
        const EdgeLimitReport edge = edge_limit_check(s_grid, R_gamma, 1.0, kPi, 1e-12);
        ids.push_back(edge.report);
        const EdgeDiagnostics d = h_diagnostics_rx_cigar(1.0, s_grid);
        ids.push_back(make_identity_report("h1_exponent", std::abs(d.h1_exponent - 1.0), 0.0, 0.02));
        ids.push_back(make_identity_report("h2_bounded", std::abs(d.h2.back() - 2.0), 0.0, 0.01));
        const GrowthReport g = integral_R_growth_rx_cigar(1.0, s_grid);
        ids.push_back(make_identity_report("integral_R_slope_positive",
                                           g.slope_lower > 1.0 ? 0.0 : 1.0, 0.0, 0.5));
        const AvrReport a = avr_rx_cigar(1.0, cfg.s_max, 32);
        ids.push_back(make_identity_report("avr_collapsed", a.collapsed ? 0.0 : 1.0, 0.0, 0.5));
        ids.push_back(make_identity_report(
            "probe_rxcigar", dimension_reduction_probe_rx(1.0, cfg.s_max, ProbeReference::RxCigar, 0.2),
            0.0, 1e-12));
        std::vector<std::vector<double>> rows;
        for (std::size_t q = 0; q < d.s.size(); ++q)
            rows.push_back({d.s[q], d.h1[q], d.h2[q], d.R_gamma[q], d.R_Gamma[q]});
        rep.add("edge_diagnostics.csv", csv_table({"s", "h1", "h2", "R_gamma", "R_Gamma"}, rows));
        rep.add("R_gamma.svg", svg_line_plot("R along Gamma", s_grid, R_gamma));
    } else if (cfg.model == "bryant") {
        ShootingConfig sc;
        sc.r_max = std::max(cfg.s_max * 1.05 + 16.0, 100.0);
        sc.store_every = 10;
        const RadialProfile p = bryant_shoot(sc);
        ids.push_back(soliton_residual(p, 1e-6));
        ids.push_back(hamilton_identity(p, false, 1e-6));
        const CurvatureReport cur = radial_curvature(p);
        const double h = p.r[1] - p.r[0];
        std::vector<double> R_gamma;
        for (double sv : s_grid)
            R_gamma.push_back(cur.scalar[static_cast<std::size_t>(std::llround(sv / h))]);
        const EdgeLimitReport edge = edge_limit_check(s_grid, R_gamma, cur.scalar[0], 0.0, 0.05);
        ids.push_back(edge.report);
        ids.push_back(make_identity_report("edge_monotone", edge.monotone_decreasing ? 0.0 : 1.0,
                                           0.0, 0.5));
        const EdgeDiagnostics d = h_diagnostics_profile(p, s_grid);
        ids.push_back(make_identity_report("h1_exponent", std::abs(d.h1_exponent - 0.5), 0.0, 0.05));
        ids.push_back(make_identity_report("h2_exponent", std::abs(d.h2_exponent - 0.5), 0.0, 0.05));
        const AvrReport a = avr_profile(p, std::min(cfg.s_max, p.r.back()), 32);
        ids.push_back(make_identity_report("avr_collapsed", a.collapsed ? 0.0 : 1.0, 0.0, 0.5));
        ids.push_back(make_identity_report("nondegenerate_unit_ball",
                                           a.vol_unit_ball > 0.1 * 4.0 * kPi / 3.0 ? 0.0 : 1.0,
                                           0.0, 0.5));
        const double probe =
            dimension_reduction_probe_profile(p, 0.5 * p.r.back(), ProbeReference::RxCigar, 0.2);
        ids.push_back(make_identity_report("probe_bryant_far_from_cigar", probe >= 0.1 ? 0.0 : 1.0,
                                           0.0, 0.5));
        std::vector<std::vector<double>> rows;
        for (std::size_t q = 0; q < d.s.size(); ++q)
            rows.push_back({d.s[q], d.h1[q], d.h2[q], d.R_gamma[q], d.R_Gamma[q]});
        rep.add("edge_diagnostics.csv", csv_table({"s", "h1", "h2", "R_gamma", "R_Gamma"}, rows));
        rep.add("R_gamma.svg", svg_line_plot("R along Gamma", s_grid, R_gamma));
    } else { // flat
        RadialProfile p;
        p.n = 3;
        const std::size_t m = 2001;
        for (std::size_t k = 0; k < m; ++k) {
            const double r = cfg.s_max * static_cast<double>(k) / static_cast<double>(m - 1);
            p.r.push_back(r);
            p.phi.push_back(r);
            p.phi_d1.push_back(1.0);
            p.phi_d2.push_back(0.0);
            p.f.push_back(0.0);
            p.f_d1.push_back(0.0);
        }
        ids.push_back(soliton_residual(p, 1e-10));
        ids.push_back(hamilton_identity(p, false, 1e-12));
        const GrowthReport g = integral_R_growth_flat(s_grid);
        ids.push_back(make_identity_report("integral_R_zero", std::abs(g.integral.back()), 0.0,
                                           1e-12));
        const AvrReport a = avr_flat(cfg.s_max, 16);
        ids.push_back(make_identity_report("avr_unit", std::abs(a.ratio.back() - 1.0), 0.0, 1e-12));
    }

    rep.add("identity_report.csv", identity_csv(ids));
    return all_pass(ids) ? 0 : 1;
}

int run_wing(const RunConfig& cfg, Report& rep) {
    WingProblem prob;
    prob.alpha0 = cfg.alpha0;
    prob.nu = static_cast<std::size_t>(cfg.wing_nu);
    prob.nv = static_cast<std::size_t>(cfg.wing_nv);
    prob.spacing = cfg.wing_spacing;
    prob.newton_tol = cfg.newton_tol;
    prob.max_newton = cfg.max_newton;
    prob.seed = cfg.seed;

    const WingSolution sol = newton_solve(prob);
    const WingReport wr = wing_report(prob, sol);
    rep.add("grid.csv", grid_csv(sol.metric));
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t q = 0; q < sol.residual_history.size(); ++q)
            rows.push_back({static_cast<double>(q), sol.residual_history[q]});
        rep.add("residual_history.csv", csv_table({"step", "residual"}, rows));
        std::vector<double> steps(sol.residual_history.size());
        for (std::size_t q = 0; q < steps.size(); ++q) steps[q] = static_cast<double>(q);
        rep.add("residual_history.svg",
                svg_line_plot("newton residual", steps, sol.residual_history));
        rep.add("R_gamma.svg", svg_line_plot("R along Gamma", wr.axis_s, wr.axis_R));
    }

    // Jacobian spot check against central differences on seeded random
    // perturbations of the converged state.
    double jac_err = 0.0;
    {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const std::size_t n = sol.metric.size() * 5;
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<double> delta(n);
            for (double& d : delta) d = gauss(rng);
            const auto jd = wing_jacobian_action(prob, sol.metric, delta);
            const double eps = 1e-6;
            WarpedHalfPlaneMetric plus = sol.metric, minus = sol.metric;
            for (std::size_t nd = 0; nd < sol.metric.size(); ++nd) {
                plus.g_uu[nd] += eps * delta[nd * 5 + 0];
                minus.g_uu[nd] -= eps * delta[nd * 5 + 0];
                plus.g_uv[nd] += eps * delta[nd * 5 + 1];
                minus.g_uv[nd] -= eps * delta[nd * 5 + 1];
                plus.g_vv[nd] += eps * delta[nd * 5 + 2];
                minus.g_vv[nd] -= eps * delta[nd * 5 + 2];
                plus.phi[nd] += eps * delta[nd * 5 + 3];
                minus.phi[nd] -= eps * delta[nd * 5 + 3];
                plus.f[nd] += eps * delta[nd * 5 + 4];
                minus.f[nd] -= eps * delta[nd * 5 + 4];
            }
            const auto rp = wing_residual(prob, plus);
            const auto rm = wing_residual(prob, minus);
            double num = 0.0, den = 0.0;
            for (std::size_t q = 0; q < n; ++q) {
                const double fd = (rp[q] - rm[q]) / (2.0 * eps);
                num += (jd[q] - fd) * (jd[q] - fd);
                den += jd[q] * jd[q];
            }
            jac_err = std::max(jac_err, std::sqrt(num / den));
        }
    }

    const CurvatureReport cur = warped_curvature(sol.metric, 1);
    const IdentityReport ham = hamilton_identity(sol.metric, 1, 1e-3);
    const ConcavityReport conc = concavity_check(sol.metric);

    std::ostringstream sum;
    sum << "alpha0: " << format_double(wr.alpha0) << '\n'
        << "converged: " << (sol.converged ? 1 : 0) << '\n'
        << "newton_steps: " << sol.newton_steps << '\n'
        << "final_residual: " << format_double(sol.residual_history.back()) << '\n'
        << "R_center: " << format_double(wr.R_center) << '\n'
        << "R_edge: " << format_double(wr.R_edge) << '\n'
        << "s_edge: " << format_double(wr.s_edge) << '\n'
        << "alpha_est: " << format_double(wr.alpha_est) << '\n'
        << "ratio_deviation: " << format_double(wr.ratio_deviation) << '\n'
        << "hamilton_spread: " << format_double(ham.max_deviation) << '\n'
        << "concavity_violation: " << format_double(conc.max_positive) << '\n'
        << "sec_min: " << format_double(cur.sec_min.value) << '\n'
        << "gauge_max: " << format_double(wr.gauge_max) << '\n'
        << "soliton_residual_interior: " << format_double(wr.soliton_residual_interior) << '\n'
        << "jacobian_fd_error: " << format_double(jac_err) << '\n'
        << "min_h1h2_over_s: " << format_double(wr.min_h1h2_over_s) << '\n';
    for (std::size_t q = 0; q < wr.probe_s.size(); ++q)
        sum << "probe_s_" << q << ": " << format_double(wr.probe_s[q]) << '\n'
            << "probe_dev_" << q << ": " << format_double(wr.probe_dev[q]) << '\n';
    rep.add("wing_summary.txt", sum.str());

    std::vector<IdentityReport> ids;
    ids.push_back(make_identity_report("newton_converged", sol.converged ? 0.0 : 1.0, 0.0, 0.5));
    ids.push_back(make_identity_report("jacobian_fd", jac_err, 0.0, 1e-6));
    ids.push_back(ham);
    ids.push_back(make_identity_report("phi_concave", conc.max_positive, 0.0, 1e-4));
    ids.push_back(make_identity_report("sec_min", std::max(0.0, -1e-3 - cur.sec_min.value), 0.0,
                                       1e-12));
    ids.push_back(make_identity_report("edge_ratio", wr.ratio_deviation, 0.0, 0.1));
    bool probe_decreasing = true;
    for (std::size_t q = 1; q < wr.probe_dev.size(); ++q)
        if (wr.probe_dev[q] > wr.probe_dev[q - 1]) probe_decreasing = false;
    ids.push_back(make_identity_report("probe_decreasing", probe_decreasing ? 0.0 : 1.0, 0.0, 0.5));
    rep.add("identity_report.csv", identity_csv(ids));
    return all_pass(ids) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    std::string command, config_path, out_dir, seed_str;
    if (argc < 2) {
        std::cerr << usage();
        return 2;
    }
    command = argv[1];
    for (int a = 2; a < argc; ++a) {
        const std::string arg = argv[a];
        auto next = [&]() -> const char* {
            if (a + 1 >= argc) return nullptr;
            return argv[++a];
        };
        if (arg == "--config") {
            const char* v = next();
            if (!v) {
                std::cerr << usage();
                return 2;
            }
            config_path = v;
        } else if (arg == "--out") {
            const char* v = next();
            if (!v) {
                std::cerr << usage();
                return 2;
            }
            out_dir = v;
        } else if (arg == "--seed") {
            const char* v = next();
            if (!v) {
                std::cerr << usage();
                return 2;
            }
            seed_str = v;
        } else {
            std::cerr << "unknown flag " << arg << "\n" << usage();
            return 2;
        }
    }

    std::string config_text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot read config " << config_path << "\n";
            return 2;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        config_text = ss.str();
    }

    RunConfig cfg;
    try {
        cfg = parse_config(config_text, command);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!seed_str.empty()) {
        try {
            cfg.seed = std::stoull(seed_str);
        } catch (...) {
            std::cerr << "bad --seed value\n";
            return 2;
        }
    }

    Report rep;
    {
        std::ostringstream echo;
        echo << "command = " << cfg.command << "\nseed = " << cfg.seed << "\n";
        rep.add("config_echo.txt", echo.str());
    }

    int gate = 0;
    try {
        if (command == "cigar") {
            gate = run_cigar(cfg, rep);
        } else if (command == "bryant") {
            gate = run_bryant(cfg, rep);
        } else if (command == "surface-flow") {
            gate = run_surface_flow(cfg, rep);
        } else if (command == "cone-angle") {
            gate = run_cone_angle(cfg, rep);
        } else if (command == "verify") {
            gate = run_verify(cfg, rep);
        } else if (command == "wing") {
            gate = run_wing(cfg, rep);
        } else {
            std::cerr << usage();
            return 2;
        }
        write_report(rep, cfg.out_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    if (gate != 0) std::cerr << "identity gate failed; see identity_report.csv\n";
    return gate;
}
