#pragma once

// Mode dispatch: turns a RunConfig into a ResultTable (and optionally an
// SVG document). Rows are appended as each sweep element completes, so a
// caller that catches an exception still holds the finished part.

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qdcav/config.hpp"
#include "qdcav/dynamics.hpp"
#include "qdcav/floquet.hpp"
#include "qdcav/observables.hpp"
#include "qdcav/photonics.hpp"
#include "qdcav/results.hpp"
#include "qdcav/svg.hpp"

namespace qdcav {

namespace run_detail {

inline std::vector<double> to_rates(const std::vector<double>& ghz_values) {
    std::vector<double> out;
    out.reserve(ghz_values.size());
    for (double v : ghz_values) out.push_back(ghz(v));
    return out;
}

// lambda_p - lambda_QD in nm for a probe-QD angular offset.
inline double offset_nm(double offset, double lambda0_nm) {
    return -photonics::rate_to_wavelength_offset(units::RadPerSec(offset), units::nanometers(lambda0_nm)).value() *
           1e9;
}

inline std::string key_of(double v) { return cfg::fmt(v); }

inline std::vector<double> scan_grid(const RunConfig& c, const SystemParams& p) {
    if (!c.grids.delta.empty()) return to_rates(c.grids.delta);
    const double hw = c.grids.probe_half_width > 0.0 ? ghz(c.grids.probe_half_width)
                                                     : c.numerics.coverage_factor * required_scan_half_width(p);
    return symmetric_probe_grid(p, ghz(c.grids.probe_step), hw);
}

inline void scan_columns(ResultTable& t, const std::string& lead, bool normalize) {
    t.columns = {lead, "delta_over_2pi_GHz", "probe_offset_from_qd_GHz", "probe_offset_nm", "height_raw"};
    if (normalize) t.columns.push_back("height_normalized");
}

inline void append_scan(ResultTable& t, double lead, const ScanResult& s, double lambda0_nm, bool normalize) {
    const auto norm = s.normalized();
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::vector<double> row{lead, to_ghz(s.probe_detunings[i]), to_ghz(s.probe_offsets_from_qd[i]),
                                offset_nm(s.probe_offsets_from_qd[i], lambda0_nm), s.heights[i]};
        if (normalize) row.push_back(norm[i]);
        t.add_row(std::move(row));
    }
}

inline void observable_meta(ResultTable& t, ObservableKind k) {
    t.meta.push_back(std::string("observable = ") + to_string(k));
    t.meta.push_back(std::string("observable_is_proxy = ") +
                     (k == ObservableKind::mean_photon_number ? "true" : "false"));
}

inline void run_probe_scan(const RunConfig& c, int threads, ResultTable& t) {
    const SystemParams base = c.system.to_params();
    const std::vector<double> j1s = c.grids.J1.empty() ? std::vector<double>{c.system.J1} : c.grids.J1;
    scan_columns(t, "J1_over_2pi_GHz", c.output.normalize);
    observable_meta(t, c.numerics.observable);
    ScanOptions so;
    so.peak = c.peak_options();
    so.threads = threads;
    for (double j1 : j1s) {
        SystemParams p = base;
        p.J1 = ghz(j1);
        const ScanResult s = probe_scan(p, scan_grid(c, p), c.numerics.observable, so);
        append_scan(t, j1, s, c.geometry.lambda0_nm, c.output.normalize);
        const std::string k = "J1_" + key_of(j1);
        t.add_result(k + ".max_height", s.max_height());
        t.add_result(k + ".topology", to_string(classify_topology(s)));
    }
}

inline void run_pump_sweep(const RunConfig& c, int threads, ResultTable& t) {
    const SystemParams base = c.system.to_params();
    const SweepOptions opt = c.sweep_options(threads);
    t.columns = {"J1_over_2pi_GHz", "rabi_over_2pi_GHz", "splitting_over_2pi_GHz"};
    observable_meta(t, c.numerics.observable);
    t.meta.push_back(std::string("splitting_method = ") +
                     (opt.method == SplittingMethod::peaks ? "peaks" : "dips"));
    std::vector<double> rabi, split;
    for (double j1 : c.grids.J1) {
        SystemParams p = base;
        p.J1 = ghz(j1);
        const ScanResult s = probe_scan(p, sweep_grid(p, opt), opt.observable, opt.scan);
        double v = 0.0;
        try {
            v = measure_splitting(s, opt);
        } catch (const TopologyError& e) {
            t.add_result("excluded.J1_" + key_of(j1), e.what());
            continue;
        } catch (const NumericalError& e) {
            t.add_result("excluded.J1_" + key_of(j1), e.what());
            continue;
        }
        rabi.push_back(2.0 * j1);
        split.push_back(to_ghz(v));
        t.add_row({j1, 2.0 * j1, to_ghz(v)});
    }
    if (split.size() < 2) throw TopologyError("pump-sweep: fewer than two pump amplitudes gave a splitting");
    const LinearFit f = linear_least_squares(rabi, split);
    t.add_result("slope_vs_rabi", f.slope);
    t.add_result("slope_vs_rabi_stderr", f.slope_stderr);
    t.add_result("slope_vs_J1", 2.0 * f.slope);
    t.add_result("intercept_GHz", f.intercept);
    t.add_result("intercept_stderr_GHz", f.intercept_stderr);
    t.add_result("r_squared", f.r_squared);
}

inline void run_anticrossing(const RunConfig& c, int threads, ResultTable& t) {
    const SystemParams base = c.system.to_params();
    const SweepOptions opt = c.sweep_options(threads);
    scan_columns(t, "delta_pump_over_2pi_GHz", c.output.normalize);
    observable_meta(t, c.numerics.observable);
    double best_sep = std::numeric_limits<double>::infinity(), best_dp = 0.0;
    for (double dp : c.grids.delta_pump) {
        const AnticrossingPoint pt = anticrossing_point(base, ghz(dp), opt);
        append_scan(t, dp, pt.scan, c.geometry.lambda0_nm, c.output.normalize);
        const std::string k = "delta_pump_" + key_of(dp);
        if (!pt.fit) {
            t.add_result(k + ".failure", pt.failure);
            continue;
        }
        const double sep = to_ghz(pt.separation());
        t.add_result(k + ".center_low_GHz", to_ghz(pt.fit->peaks[0].center));
        t.add_result(k + ".center_high_GHz", to_ghz(pt.fit->peaks[1].center));
        t.add_result(k + ".separation_GHz", sep);
        t.add_result(k + ".asymmetry", pt.asymmetry());
        if (sep < best_sep) {
            best_sep = sep;
            best_dp = dp;
        }
    }
    if (std::isfinite(best_sep)) {
        t.add_result("min_separation_GHz", best_sep);
        t.add_result("min_separation_delta_pump_GHz", best_dp);
    }
}

inline void run_enhancement(const RunConfig& c, ResultTable& t) {
    const photonics::CavityGeometry g = c.geometry.to_geometry();
    const units::RadPerSec lw = photonics::cavity_linewidth(g);
    const units::Watts power = units::nanowatts(c.grids.power_nw.front());
    t.columns = {"detuning_linewidths", "detuning_over_2pi_GHz", "enhancement", "e_cavity_V_per_m",
                 "e_no_cavity_V_per_m"};
    t.add_result("linewidth_over_2pi_GHz", to_ghz(lw.value()));
    t.add_result("power_nW", c.grids.power_nw.front());
    for (double x : c.grids.detuning_linewidths) {
        const units::RadPerSec det(x * lw.value());
        t.add_row({x, to_ghz(det.value()), photonics::enhancement_ratio(g, det),
                   photonics::intracavity_field(power, g, det).e_at_qd.value(),
                   photonics::no_cavity_field(power, g).value()});
    }
}

inline void run_dipole_estimate(const RunConfig& c, ResultTable& t) {
    const photonics::CavityGeometry g = c.geometry.to_geometry();
    const units::RadPerSec det =
        photonics::wavelength_offset_to_rate(units::nanometers(c.geometry.laser_detuning_nm), g.lambda0)
            .angular_offset;
    const double factor = c.numerics.splitting_factor;
    const bool synthetic = c.grids.splitting_ghz.empty();
    std::vector<double> root_p, split;  // sqrt(W), rad/s
    for (std::size_t i = 0; i < c.grids.power_nw.size(); ++i) {
        const double P = c.grids.power_nw[i] * 1e-9;
        double s = 0.0;
        if (synthetic) {
            const auto k = photonics::splitting_slope(photonics::to_si(units::Debye(c.geometry.dipole_debye)), g,
                                                      det, factor);
            s = k.value() * std::sqrt(P);
        } else {
            s = ghz(c.grids.splitting_ghz[i]);
        }
        root_p.push_back(std::sqrt(P));
        split.push_back(s);
    }
    double slope = 0.0;
    if (root_p.size() == 1) {
        slope = split.front() / root_p.front();
    } else {
        // Through the origin: splitting vanishes without drive.
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < root_p.size(); ++i) {
            sxy += root_p[i] * split[i];
            sxx += root_p[i] * root_p[i];
        }
        slope = sxy / sxx;
    }
    const units::CoulombMeters mu =
        photonics::dipole_from_splitting_slope(units::RadPerSecPerRootWatt(slope), g, det, factor);
    t.columns = {"power_nW", "splitting_over_2pi_GHz", "rabi_over_2pi_GHz"};
    for (std::size_t i = 0; i < root_p.size(); ++i) {
        const auto d = photonics::intracavity_field(units::Watts(root_p[i] * root_p[i]), g, det, mu);
        t.add_row({c.grids.power_nw[i], to_ghz(split[i]), to_ghz(d.rabi.value())});
    }
    t.add_result("splitting_source", synthetic ? "synthesized_from_geometry.dipole_debye" : "grids.splitting_ghz");
    t.add_result("laser_detuning_over_2pi_GHz", to_ghz(det.value()));
    t.add_result("slope_GHz_per_sqrtW", to_ghz(slope));
    t.add_result("dipole_debye", photonics::to_debye(mu).value());
    t.add_result("g_max_over_2pi_GHz", to_ghz(photonics::g_max(mu, g).value()));
}

inline void run_oracle_check(const RunConfig& c, ResultTable& t) {
    const SystemParams p = c.system.to_params();
    const HilbertSpace space = make_space(c.numerics.n_max_fock);
    const std::vector<Operator> ops{cavity_number(space), qd_population(space), annihilation(space),
                                    qd_lowering(space)};
    const char* names[] = {"n_cavity", "n_qd", "a", "sigma"};
    const Liouvillians L = build_liouvillians(p, space);
    FloquetOptions fo;
    fo.n_max_harmonics = c.numerics.n_max_harmonics;
    const FloquetHarmonics h = adaptive_harmonics(L, p.delta, fo);

    double settle = c.numerics.oracle_settle_ns * 1e-9;
    if (!(settle > 0.0)) {
        double slow = std::numeric_limits<double>::infinity();
        for (double r : {p.kappa, p.gamma})
            if (r > 0.0) slow = std::min(slow, r);
        if (!std::isfinite(slow)) throw ConfigError("oracle-check: needs kappa > 0 or gamma > 0");
        settle = 40.0 / slow;
    }
    const double dt = c.numerics.dt_ps > 0.0 ? c.numerics.dt_ps * 1e-12 : max_stable_dt(p);
    const auto evolved = period_averaged_expectations(p, space, ops, settle, dt);

    t.columns = {"observable_index", "floquet_re", "floquet_im", "evolution_re", "evolution_im", "abs_difference"};
    double worst = 0.0;
    for (std::size_t k = 0; k < ops.size(); ++k) {
        const cplx f = h.time_averaged(ops[k]);
        const double diff = std::abs(f - evolved[k]);
        worst = std::max(worst, diff);
        t.add_row({static_cast<double>(k), f.real(), f.imag(), evolved[k].real(), evolved[k].imag(), diff});
        t.meta.push_back("observable_index_" + std::to_string(k) + " = " + names[k]);
    }
    t.add_result("harmonics_used", static_cast<double>(h.n_max_harmonics()));
    t.add_result("settle_time_ns", settle * 1e9);
    t.add_result("max_abs_difference", worst);
}

}  // namespace run_detail

// Executes `c` and fills `out`. `threads` is the worker count for scan
// points (0: hardware concurrency); it does not affect the numbers.
inline void run_into(const RunConfig& c, int threads, ResultTable& out) {
    using namespace run_detail;
    const auto t0 = std::chrono::steady_clock::now();
    out = ResultTable{};
    out.config = config_lines(c);
    out.meta.push_back("version = " + version());
    out.meta.push_back("mode = " + to_string(c.mode));
    switch (c.mode) {
        case Mode::probe_scan: run_probe_scan(c, threads, out); break;
        case Mode::pump_sweep: run_pump_sweep(c, threads, out); break;
        case Mode::anticrossing: run_anticrossing(c, threads, out); break;
        case Mode::enhancement: run_enhancement(c, out); break;
        case Mode::dipole_estimate: run_dipole_estimate(c, out); break;
        case Mode::oracle_check: run_oracle_check(c, out); break;
    }
    if (c.output.wall_time) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        out.meta.push_back("wall_time_s = " + cfg::fmt(dt.count()));
    }
}

inline ResultTable run(const RunConfig& c, int threads = 1) {
    ResultTable t;
    run_into(c, threads, t);
    return t;
}

// Plot spec matching the table a mode produces.
inline PlotSpec plot_spec_for(const RunConfig& c) {
    PlotSpec s;
    s.lambda0_nm = c.geometry.lambda0_nm;
    s.y_column = c.output.normalize ? "height_normalized" : "height_raw";
    switch (c.mode) {
        case Mode::probe_scan:
            s.trace_column = "J1_over_2pi_GHz";
            s.trace_label = "J1/2pi (GHz)";
            s.title = "Cavity emission vs probe detuning";
            break;
        case Mode::anticrossing:
            s.trace_column = "delta_pump_over_2pi_GHz";
            s.trace_label = "pump-QD (GHz)";
            s.title = "Cavity emission vs probe detuning, pump detuning sweep";
            break;
        case Mode::pump_sweep:
            s.x_column = "rabi_over_2pi_GHz";
            s.y_column = "splitting_over_2pi_GHz";
            s.x_label = "Rabi frequency 2 J1 (GHz)";
            s.lambda0_nm = 0.0;
            s.title = "Splitting vs pump Rabi frequency";
            s.y_label = "splitting (GHz)";
            break;
        case Mode::enhancement:
            s.x_column = "detuning_over_2pi_GHz";
            s.y_column = "enhancement";
            s.x_label = "laser - cavity detuning (GHz)";
            s.lambda0_nm = 0.0;
            s.title = "Field enhancement";
            s.y_label = "E_cav / E_nocav";
            break;
        case Mode::dipole_estimate:
            s.x_column = "power_nW";
            s.y_column = "splitting_over_2pi_GHz";
            s.x_label = "power (nW)";
            s.lambda0_nm = 0.0;
            s.title = "Splitting vs power";
            s.y_label = "splitting (GHz)";
            break;
        case Mode::oracle_check:
            s.x_column = "observable_index";
            s.y_column = "abs_difference";
            s.x_label = "observable index";
            s.lambda0_nm = 0.0;
            s.title = "Floquet vs time-domain difference";
            s.y_label = "|difference|";
            break;
    }
    return s;
}

}  // namespace qdcav
