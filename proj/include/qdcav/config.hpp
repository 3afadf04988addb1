#pragma once

// Run configuration: a flat `key = value` document with `#` comments and
// comma-separated lists. Keys are namespaced system.*, geometry.*,
// numerics.*, grids.*, output.* plus the top-level `mode`.
//
// Values are kept in file units (GHz for frequencies, nm / um for lengths,
// ns / ps for times); conversion to SI happens in the accessors. That way
// writing a config with 17 significant digits and reading it back gives a
// bit-identical RunConfig.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qdcav/dynamics.hpp"
#include "qdcav/errors.hpp"
#include "qdcav/lindblad.hpp"
#include "qdcav/observables.hpp"
#include "qdcav/photonics.hpp"

namespace qdcav {

enum class Mode { probe_scan, pump_sweep, anticrossing, enhancement, dipole_estimate, oracle_check };

inline const std::vector<std::pair<Mode, std::string>>& mode_names() {
    static const std::vector<std::pair<Mode, std::string>> names = {
        {Mode::probe_scan, "probe-scan"},           {Mode::pump_sweep, "pump-sweep"},
        {Mode::anticrossing, "anticrossing"},       {Mode::enhancement, "enhancement"},
        {Mode::dipole_estimate, "dipole-estimate"}, {Mode::oracle_check, "oracle-check"}};
    return names;
}

inline std::string to_string(Mode m) {
    for (const auto& [k, v] : mode_names())
        if (k == m) return v;
    return "?";
}

inline Mode parse_mode(std::string_view s) {
    for (const auto& [k, v] : mode_names())
        if (v == s) return k;
    std::string all;
    for (const auto& [k, v] : mode_names()) all += (all.empty() ? "" : ", ") + v;
    throw ConfigError("unknown mode '" + std::string(s) + "' (expected one of: " + all + ")");
}

// Frequencies in GHz (value of nu = omega / 2 pi).
struct SystemConfig {
    double kappa = 17.0;
    double gamma = 1.0;
    double gamma_r = 0.5;
    double gamma_d = 3.0;
    std::optional<double> delta_dc;  // unset: 8 kappa
    double delta_pump = 0.0;
    double g = 0.0;
    double n_bar = 1.0;
    double J1 = 0.0;
    double J2 = 1.0;
    double delta = 0.5;  // probe - pump, used by oracle-check

    double resolved_delta_dc() const { return delta_dc ? *delta_dc : 8.0 * kappa; }

    SystemParams to_params() const {
        SystemParams p;
        p.kappa = ghz(kappa);
        p.gamma = ghz(gamma);
        p.gamma_r = ghz(gamma_r);
        p.gamma_d = ghz(gamma_d);
        p.delta_dc = ghz(resolved_delta_dc());
        p.delta_pump = ghz(delta_pump);
        p.g = ghz(g);
        p.n_bar = n_bar;
        p.J1 = ghz(J1);
        p.J2 = ghz(J2);
        p.delta = ghz(delta);
        return p;
    }
    bool operator==(const SystemConfig&) const = default;
};

struct GeometryConfig {
    double quality_factor = 1e4;
    double lambda0_nm = 927.0;
    std::optional<double> mode_volume_um3;  // unset: 0.8 (lambda0 / n)^3
    double coupling_efficiency = 0.01;
    double refractive_index = 3.5;
    double mode_pattern = 1.0;
    double spot_radius_um = 3.0;
    double laser_detuning_nm = 0.4;  // laser - cavity, for the dipole estimate
    double dipole_debye = 22.0;

    double resolved_mode_volume_um3() const {
        if (mode_volume_um3) return *mode_volume_um3;
        const double l = lambda0_nm * 1e-3 / refractive_index;
        return 0.8 * l * l * l;
    }

    photonics::CavityGeometry to_geometry() const {
        photonics::CavityGeometry g;
        g.quality_factor = quality_factor;
        g.lambda0 = units::nanometers(lambda0_nm);
        g.mode_volume = units::CubicMeters(resolved_mode_volume_um3() * 1e-18);
        g.coupling_efficiency = coupling_efficiency;
        g.refractive_index = refractive_index;
        g.mode_pattern = mode_pattern;
        g.spot_radius = units::micrometers(spot_radius_um);
        return g;
    }
    bool operator==(const GeometryConfig&) const = default;
};

struct NumericsConfig {
    int n_max_fock = 2;
    int n_max_harmonics = 8;
    double dt_ps = 0.0;                   // 0: stability bound
    std::optional<double> tau_max_ns;     // unset: see RunConfig::tau_max_seconds
    int n_phase = 8;
    int threads = 1;                      // execution only, not recorded
    PeakHeightMode peak_mode = PeakHeightMode::fixed_frequency;
    ObservableKind observable = ObservableKind::spectrum_height;
    SplittingMethod splitting_method = SplittingMethod::peaks;
    double splitting_factor = 4.0;
    double coverage_factor = 1.0;
    double oracle_settle_ns = 0.0;        // 0: 40 / min(kappa, gamma)

    bool operator==(const NumericsConfig& o) const {
        return n_max_fock == o.n_max_fock && n_max_harmonics == o.n_max_harmonics && dt_ps == o.dt_ps &&
               tau_max_ns == o.tau_max_ns && n_phase == o.n_phase && peak_mode == o.peak_mode &&
               observable == o.observable && splitting_method == o.splitting_method &&
               splitting_factor == o.splitting_factor && coverage_factor == o.coverage_factor &&
               oracle_settle_ns == o.oracle_settle_ns;
    }
};

struct GridsConfig {
    double probe_step = 1.0;        // GHz
    double probe_half_width = 0.0;  // GHz, 0: 4 J1 + 5 (gamma + gamma_d), times coverage_factor
    std::vector<double> delta;      // GHz, explicit probe-pump grid (overrides step)
    std::vector<double> J1;         // GHz
    std::vector<double> delta_pump; // GHz
    std::vector<double> detuning_linewidths{0.0, 4.0};
    std::vector<double> power_nw{190.0};
    std::vector<double> splitting_ghz;  // measured splittings for dipole-estimate; empty: synthesize
    bool operator==(const GridsConfig&) const = default;
};

struct OutputConfig {
    std::string csv;
    std::string svg;
    bool normalize = true;
    bool wall_time = false;
    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    Mode mode = Mode::probe_scan;
    SystemConfig system;
    GeometryConfig geometry;
    NumericsConfig numerics;
    GridsConfig grids;
    OutputConfig output;
    std::vector<std::string> warnings;  // unknown keys in non-strict mode
    bool mode_explicit = false;         // `mode` key present in the document

    bool operator==(const RunConfig& o) const {
        return mode == o.mode && system == o.system && geometry == o.geometry && numerics == o.numerics &&
               grids == o.grids && output == o.output;
    }

    // Unset: 12 / kappa while g = 0 (the cavity correlation then decays with
    // the cavity), otherwise 10 / min(kappa, gamma), since g hands the cavity
    // the QD's slow modes.
    double tau_max_seconds() const {
        if (numerics.tau_max_ns) return *numerics.tau_max_ns * 1e-9;
        if (system.g == 0.0 && system.kappa > 0.0) return 12.0 / ghz(system.kappa);
        double slow = 0.0;
        for (double r : {system.kappa, system.gamma})
            if (r > 0.0) slow = slow > 0.0 ? std::min(slow, r) : r;
        if (!(slow > 0.0)) throw ConfigError("numerics.tau_max_ns: cannot be derived when kappa and gamma are 0");
        return 10.0 / ghz(slow);
    }

    PeakHeightOptions peak_options() const {
        PeakHeightOptions o;
        o.n_max_fock = numerics.n_max_fock;
        o.floquet.n_max_harmonics = numerics.n_max_harmonics;
        o.correlation.tau_max = tau_max_seconds();
        o.correlation.n_phase = numerics.n_phase;
        o.correlation.dt = numerics.dt_ps * 1e-12;
        o.mode = numerics.peak_mode;
        return o;
    }

    SweepOptions sweep_options(int threads) const {
        SweepOptions s;
        s.scan.peak = peak_options();
        s.scan.threads = threads;
        s.grid_step = ghz(grids.probe_step);
        s.coverage_factor = numerics.coverage_factor;
        s.method = numerics.splitting_method;
        s.observable = numerics.observable;
        return s;
    }
};

// ---------------------------------------------------------------------------
// Value parsing and formatting.

namespace cfg {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string where(const std::string& key, int line) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << key;
    return os.str();
}

inline double parse_double(const std::string& key, const std::string& text, int line) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || !std::isfinite(v))
        throw ConfigError(where(key, line) + ": expected a finite number, got '" + text + "'");
    return v;
}

inline int parse_int(const std::string& key, const std::string& text, int line) {
    int v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ConfigError(where(key, line) + ": expected an integer, got '" + text + "'");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text, int line) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(where(key, line) + ": expected true or false, got '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text, int line) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item), line));
    return out;
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct KeySpec {
    std::string name;
    std::function<void(RunConfig&, const std::string&, int)> set;
    std::function<std::string(const RunConfig&)> get;
    bool recorded = true;  // written to result metadata
};

template <class T>
KeySpec number(std::string name, T RunConfig::*section, double T::*field) {
    return {name,
            [=](RunConfig& c, const std::string& v, int line) { (c.*section).*field = parse_double(name, v, line); },
            [=](const RunConfig& c) { return fmt((c.*section).*field); }};
}

template <class T>
KeySpec optional_number(std::string name, T RunConfig::*section, std::optional<double> T::*field,
                        std::function<double(const RunConfig&)> resolved) {
    return {name,
            [=](RunConfig& c, const std::string& v, int line) { (c.*section).*field = parse_double(name, v, line); },
            [=](const RunConfig& c) {
                const auto& v = (c.*section).*field;
                return fmt(v ? *v : resolved(c));
            }};
}

template <class T>
KeySpec integer(std::string name, T RunConfig::*section, int T::*field, bool recorded = true) {
    return {name,
            [=](RunConfig& c, const std::string& v, int line) { (c.*section).*field = parse_int(name, v, line); },
            [=](const RunConfig& c) { return std::to_string((c.*section).*field); }, recorded};
}

template <class T>
KeySpec list(std::string name, T RunConfig::*section, std::vector<double> T::*field) {
    return {name,
            [=](RunConfig& c, const std::string& v, int line) { (c.*section).*field = parse_list(name, v, line); },
            [=](const RunConfig& c) { return fmt_list((c.*section).*field); }};
}

template <class T>
KeySpec flag(std::string name, T RunConfig::*section, bool T::*field) {
    return {name,
            [=](RunConfig& c, const std::string& v, int line) { (c.*section).*field = parse_bool(name, v, line); },
            [=](const RunConfig& c) { return std::string((c.*section).*field ? "true" : "false"); }};
}

template <class T>
KeySpec text(std::string name, T RunConfig::*section, std::string T::*field) {
    return {name, [=](RunConfig& c, const std::string& v, int) { (c.*section).*field = v; },
            [=](const RunConfig& c) { return (c.*section).*field; }};
}

template <class E>
KeySpec choice(std::string name, std::function<E&(RunConfig&)> ref, std::vector<std::pair<E, std::string>> names) {
    return {name,
            [=](RunConfig& c, const std::string& v, int line) {
                for (const auto& [k, s] : names)
                    if (s == v) {
                        ref(c) = k;
                        return;
                    }
                std::string all;
                for (const auto& [k, s] : names) all += (all.empty() ? "" : ", ") + s;
                throw ConfigError(where(name, line) + ": unknown value '" + v + "' (expected one of: " + all + ")");
            },
            [=](const RunConfig& c) {
                const E value = ref(const_cast<RunConfig&>(c));
                for (const auto& [k, s] : names)
                    if (k == value) return s;
                return std::string("?");
            }};
}

inline const std::vector<KeySpec>& registry() {
    using R = RunConfig;
    static const std::vector<KeySpec> keys = [] {
        std::vector<KeySpec> k;
        k.push_back({"mode", [](R& c, const std::string& v, int line) {
                         try {
                             c.mode = parse_mode(v);
                             c.mode_explicit = true;
                         } catch (const ConfigError& e) {
                             throw ConfigError(where("mode", line) + ": " + e.what());
                         }
                     },
                     [](const R& c) { return to_string(c.mode); }});
        k.push_back(number("system.kappa", &R::system, &SystemConfig::kappa));
        k.push_back(number("system.gamma", &R::system, &SystemConfig::gamma));
        k.push_back(number("system.gamma_r", &R::system, &SystemConfig::gamma_r));
        k.push_back(number("system.gamma_d", &R::system, &SystemConfig::gamma_d));
        k.push_back(optional_number("system.delta_dc", &R::system, &SystemConfig::delta_dc,
                                    [](const R& c) { return c.system.resolved_delta_dc(); }));
        k.push_back(number("system.delta_pump", &R::system, &SystemConfig::delta_pump));
        k.push_back(number("system.g", &R::system, &SystemConfig::g));
        k.push_back(number("system.n_bar", &R::system, &SystemConfig::n_bar));
        k.push_back(number("system.J1", &R::system, &SystemConfig::J1));
        k.push_back(number("system.J2", &R::system, &SystemConfig::J2));
        k.push_back(number("system.delta", &R::system, &SystemConfig::delta));

        k.push_back(number("geometry.quality_factor", &R::geometry, &GeometryConfig::quality_factor));
        k.push_back(number("geometry.lambda0_nm", &R::geometry, &GeometryConfig::lambda0_nm));
        k.push_back(optional_number("geometry.mode_volume_um3", &R::geometry, &GeometryConfig::mode_volume_um3,
                                    [](const R& c) { return c.geometry.resolved_mode_volume_um3(); }));
        k.push_back(number("geometry.coupling_efficiency", &R::geometry, &GeometryConfig::coupling_efficiency));
        k.push_back(number("geometry.refractive_index", &R::geometry, &GeometryConfig::refractive_index));
        k.push_back(number("geometry.mode_pattern", &R::geometry, &GeometryConfig::mode_pattern));
        k.push_back(number("geometry.spot_radius_um", &R::geometry, &GeometryConfig::spot_radius_um));
        k.push_back(number("geometry.laser_detuning_nm", &R::geometry, &GeometryConfig::laser_detuning_nm));
        k.push_back(number("geometry.dipole_debye", &R::geometry, &GeometryConfig::dipole_debye));

        k.push_back(integer("numerics.n_max_fock", &R::numerics, &NumericsConfig::n_max_fock));
        k.push_back(integer("numerics.n_max_harmonics", &R::numerics, &NumericsConfig::n_max_harmonics));
        k.push_back(number("numerics.dt_ps", &R::numerics, &NumericsConfig::dt_ps));
        k.push_back(optional_number("numerics.tau_max_ns", &R::numerics, &NumericsConfig::tau_max_ns,
                                    [](const R& c) { return c.tau_max_seconds() * 1e9; }));
        k.push_back(integer("numerics.n_phase", &R::numerics, &NumericsConfig::n_phase));
        k.push_back(integer("numerics.threads", &R::numerics, &NumericsConfig::threads, false));
        k.push_back(choice<PeakHeightMode>(
            "numerics.peak_mode", [](R& c) -> PeakHeightMode& { return c.numerics.peak_mode; },
            {{PeakHeightMode::fixed_frequency, "fixed_frequency"}, {PeakHeightMode::local_maximum, "local_maximum"}}));
        k.push_back(choice<ObservableKind>(
            "numerics.observable", [](R& c) -> ObservableKind& { return c.numerics.observable; },
            {{ObservableKind::spectrum_height, "spectrum_height"},
             {ObservableKind::mean_photon_number, "mean_photon_number"}}));
        k.push_back(choice<SplittingMethod>(
            "numerics.splitting_method", [](R& c) -> SplittingMethod& { return c.numerics.splitting_method; },
            {{SplittingMethod::peaks, "peaks"}, {SplittingMethod::dips, "dips"}}));
        k.push_back(number("numerics.splitting_factor", &R::numerics, &NumericsConfig::splitting_factor));
        k.push_back(number("numerics.coverage_factor", &R::numerics, &NumericsConfig::coverage_factor));
        k.push_back(number("numerics.oracle_settle_ns", &R::numerics, &NumericsConfig::oracle_settle_ns));

        k.push_back(number("grids.probe_step", &R::grids, &GridsConfig::probe_step));
        k.push_back(number("grids.probe_half_width", &R::grids, &GridsConfig::probe_half_width));
        k.push_back(list("grids.delta", &R::grids, &GridsConfig::delta));
        k.push_back(list("grids.J1", &R::grids, &GridsConfig::J1));
        k.push_back(list("grids.delta_pump", &R::grids, &GridsConfig::delta_pump));
        k.push_back(list("grids.detuning_linewidths", &R::grids, &GridsConfig::detuning_linewidths));
        k.push_back(list("grids.power_nw", &R::grids, &GridsConfig::power_nw));
        k.push_back(list("grids.splitting_ghz", &R::grids, &GridsConfig::splitting_ghz));

        k.push_back(text("output.csv", &R::output, &OutputConfig::csv));
        k.push_back(text("output.svg", &R::output, &OutputConfig::svg));
        k.push_back(flag("output.normalize", &R::output, &OutputConfig::normalize));
        k.push_back(flag("output.wall_time", &R::output, &OutputConfig::wall_time));
        return k;
    }();
    return keys;
}

inline const KeySpec* find_key(std::string_view name) {
    for (const auto& k : registry())
        if (k.name == name) return &k;
    return nullptr;
}

inline std::string nearest_key(std::string_view name) {
    // Compare against the full key and against its last component, so that
    // a bare or misplaced field name still finds its namespace.
    std::string best;
    std::size_t best_d = std::string::npos;
    const auto leaf = [](std::string_view s) {
        const auto dot = s.rfind('.');
        return dot == std::string_view::npos ? s : s.substr(dot + 1);
    };
    for (const auto& k : registry()) {
        const std::size_t d = std::min(levenshtein(name, k.name), levenshtein(leaf(name), leaf(k.name)));
        if (d < best_d) {
            best_d = d;
            best = k.name;
        }
    }
    return best;
}

inline void require_sorted(const std::string& key, const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) throw ConfigError(key + ": values must be strictly increasing");
}

}  // namespace cfg

// Checks everything that does not need a computation. Key paths are named
// in every message.
inline void validate(const RunConfig& c) {
    auto nonneg = [](const char* key, double v) {
        if (!(v >= 0.0)) throw ConfigError(std::string(key) + ": must be >= 0, got " + cfg::fmt(v));
    };
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0)) throw ConfigError(std::string(key) + ": must be > 0, got " + cfg::fmt(v));
    };
    nonneg("system.kappa", c.system.kappa);
    nonneg("system.gamma", c.system.gamma);
    nonneg("system.gamma_r", c.system.gamma_r);
    nonneg("system.gamma_d", c.system.gamma_d);
    nonneg("system.n_bar", c.system.n_bar);
    nonneg("system.J2", c.system.J2);
    if (c.numerics.n_max_fock < 1) throw ConfigError("numerics.n_max_fock: must be >= 1");
    if (c.numerics.n_max_harmonics < 1) throw ConfigError("numerics.n_max_harmonics: must be >= 1");
    if (c.numerics.n_phase < 1) throw ConfigError("numerics.n_phase: must be >= 1");
    if (c.numerics.threads < 0) throw ConfigError("numerics.threads: must be >= 0");
    nonneg("numerics.dt_ps", c.numerics.dt_ps);
    if (c.numerics.tau_max_ns) positive("numerics.tau_max_ns", *c.numerics.tau_max_ns);
    positive("numerics.splitting_factor", c.numerics.splitting_factor);
    positive("numerics.coverage_factor", c.numerics.coverage_factor);
    nonneg("numerics.oracle_settle_ns", c.numerics.oracle_settle_ns);
    positive("grids.probe_step", c.grids.probe_step);
    nonneg("grids.probe_half_width", c.grids.probe_half_width);
    cfg::require_sorted("grids.delta", c.grids.delta);
    cfg::require_sorted("grids.J1", c.grids.J1);
    cfg::require_sorted("grids.delta_pump", c.grids.delta_pump);
    cfg::require_sorted("grids.detuning_linewidths", c.grids.detuning_linewidths);
    cfg::require_sorted("grids.power_nw", c.grids.power_nw);
    for (double j : c.grids.J1) nonneg("grids.J1", j);
    for (double p : c.grids.power_nw) positive("grids.power_nw", p);

    positive("geometry.quality_factor", c.geometry.quality_factor);
    positive("geometry.lambda0_nm", c.geometry.lambda0_nm);
    positive("geometry.mode_volume_um3", c.geometry.resolved_mode_volume_um3());
    positive("geometry.coupling_efficiency", c.geometry.coupling_efficiency);
    positive("geometry.refractive_index", c.geometry.refractive_index);
    positive("geometry.spot_radius_um", c.geometry.spot_radius_um);
    positive("geometry.dipole_debye", c.geometry.dipole_debye);
    if (c.geometry.coupling_efficiency > 1.0) throw ConfigError("geometry.coupling_efficiency: must be <= 1");
    if (!(c.geometry.mode_pattern >= 0.0 && c.geometry.mode_pattern <= 1.0))
        throw ConfigError("geometry.mode_pattern: must lie in [0, 1]");

    switch (c.mode) {
        case Mode::pump_sweep:
            if (c.grids.J1.size() < 2) throw ConfigError("grids.J1: pump-sweep needs at least two values");
            break;
        case Mode::anticrossing:
            if (c.grids.delta_pump.empty()) throw ConfigError("grids.delta_pump: anticrossing needs a list");
            break;
        case Mode::enhancement:
            if (c.grids.detuning_linewidths.empty())
                throw ConfigError("grids.detuning_linewidths: enhancement needs a list");
            break;
        case Mode::dipole_estimate:
            if (c.grids.power_nw.size() < 2 && !c.grids.splitting_ghz.empty())
                throw ConfigError("grids.power_nw: a measured series needs at least two powers");
            if (!c.grids.splitting_ghz.empty() && c.grids.splitting_ghz.size() != c.grids.power_nw.size())
                throw ConfigError("grids.splitting_ghz: must have one value per grids.power_nw entry");
            break;
        default:
            break;
    }
    c.system.to_params().validate();
}

// Parses a config document. Unknown keys are errors when `strict`, and
// otherwise collected in RunConfig::warnings.
inline RunConfig parse_config(std::string_view text, bool strict = true) {
    RunConfig c;
    std::map<std::string, int> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = cfg::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "line " << line << ": expected 'key = value', got '" << body << "'";
            throw ConfigError(os.str());
        }
        const std::string key = cfg::trim(body.substr(0, eq));
        const std::string value = cfg::trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError(cfg::where("(empty key)", line) + ": missing key before '='");
        const cfg::KeySpec* spec = cfg::find_key(key);
        if (!spec) {
            std::string msg = cfg::where(key, line) + ": unknown key; did you mean '" + cfg::nearest_key(key) + "'?";
            if (strict) throw ConfigError(msg);
            c.warnings.push_back(msg);
            continue;
        }
        if (auto it = seen.find(key); it != seen.end()) {
            std::ostringstream os;
            os << cfg::where(key, line) + ": duplicate key (first set on line " << it->second << ")";
            throw ConfigError(os.str());
        }
        seen[key] = line;
        spec->set(c, value, line);
    }
    // Derived defaults become explicit values, so that the resolved config
    // written to result metadata reads back identical.
    if (!c.system.delta_dc) c.system.delta_dc = c.system.resolved_delta_dc();
    if (!c.geometry.mode_volume_um3) c.geometry.mode_volume_um3 = c.geometry.resolved_mode_volume_um3();
    if (!c.numerics.tau_max_ns) c.numerics.tau_max_ns = c.tau_max_seconds() * 1e9;
    validate(c);
    return c;
}

// Fully resolved `key = value` lines, every default made explicit.
inline std::vector<std::string> config_lines(const RunConfig& c, bool include_unrecorded = false) {
    std::vector<std::string> out;
    for (const auto& k : cfg::registry()) {
        if (!k.recorded && !include_unrecorded) continue;
        out.push_back(k.name + " = " + k.get(c));
    }
    return out;
}

inline std::string to_config_text(const RunConfig& c) {
    std::string s;
    for (const auto& l : config_lines(c)) s += l + "\n";
    return s;
}

}  // namespace qdcav
