#pragma once

// Closed-form cavity photonics: intracavity field from input power, field
// enhancement against the bare (no cavity) case, Rabi frequency, dipole
// estimation from splitting-vs-sqrt(P) data, vacuum coupling g, and
// wavelength <-> rate conversions.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "qdcav/errors.hpp"
#include "qdcav/units.hpp"

namespace qdcav::photonics {

using namespace qdcav::units;

struct PhysicalConstants {
    static constexpr double c = 299792458.0;           // m/s
    static constexpr double hbar = 1.054571817e-34;    // J s
    static constexpr double eps0 = 8.8541878128e-12;   // F/m
    static constexpr double debye = 3.33564095198e-30;  // C m  (1e-21 / c)
};

constexpr CoulombMeters to_si(Debye d) { return CoulombMeters(d.value() * PhysicalConstants::debye); }
constexpr Debye to_debye(CoulombMeters d) { return Debye(d.value() / PhysicalConstants::debye); }

struct CavityGeometry {
    double quality_factor = 1e4;
    Meters lambda0 = nanometers(927.0);
    CubicMeters mode_volume{0.0};
    double coupling_efficiency = 0.01;
    double refractive_index = 3.5;
    double mode_pattern = 1.0;  // psi(x, y) at the QD
    Meters spot_radius = micrometers(3.0);

    // eta = 1 %, Q = 1e4, lambda0 = 927 nm, n = 3.5 (GaAs), V_m = 0.8 (lambda0/n)^3,
    // sigma0 = 3 um, QD at the field maximum.
    static CavityGeometry reference_geometry() {
        CavityGeometry g;
        const double l_over_n = g.lambda0.value() / g.refractive_index;
        g.mode_volume = CubicMeters(0.8 * l_over_n * l_over_n * l_over_n);
        return g;
    }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("geometry.") + name + " must be > 0");
        };
        positive(quality_factor, "quality_factor");
        positive(lambda0.value(), "lambda0");
        positive(mode_volume.value(), "mode_volume");
        positive(coupling_efficiency, "coupling_efficiency");
        positive(refractive_index, "refractive_index");
        positive(spot_radius.value(), "spot_radius");
        if (coupling_efficiency > 1.0) throw ConfigError("geometry.coupling_efficiency must be <= 1");
        if (!(mode_pattern >= 0.0 && mode_pattern <= 1.0))
            throw ConfigError("geometry.mode_pattern must lie in [0, 1]");
    }

    // Permittivity of the medium, n^2 eps0.
    double permittivity() const { return refractive_index * refractive_index * PhysicalConstants::eps0; }
};

// omega0 / Q = 2 pi c / (Q lambda0), the full width of the cavity line.
inline RadPerSec cavity_linewidth(const CavityGeometry& g) {
    return RadPerSec(2.0 * std::numbers::pi * PhysicalConstants::c / (g.quality_factor * g.lambda0.value()));
}

// f = 1 / (1 + (2 Delta / Delta_omega)^2)
inline double lorentzian_factor(RadPerSec detuning, RadPerSec linewidth) {
    if (!(linewidth.value() > 0.0)) throw ConfigError("cavity linewidth must be > 0");
    const double x = 2.0 * detuning.value() / linewidth.value();
    return 1.0 / (1.0 + x * x);
}

struct DriveEstimate {
    Watts power{0.0};
    RadPerSec detuning{0.0};  // laser - cavity
    VoltsPerMeter e_max{0.0};
    VoltsPerMeter e_at_qd{0.0};
    RadPerSec rabi{0.0};  // filled only when a dipole is supplied
};

inline RadPerSec rabi_frequency(CoulombMeters mu, VoltsPerMeter e) {
    if (mu.value() < 0.0 || e.value() < 0.0) throw ConfigError("rabi_frequency: inputs must be nonnegative");
    return RadPerSec(mu.value() * e.value() / PhysicalConstants::hbar);
}
inline RadPerSec rabi_frequency(Debye mu, VoltsPerMeter e) { return rabi_frequency(to_si(mu), e); }

// |E_max| = sqrt(eta P Q lambda0 / (2 pi c eps V_m) * f),  |E_qd| = psi |E_max|
inline DriveEstimate intracavity_field(Watts power, const CavityGeometry& g, RadPerSec detuning,
                                       std::optional<CoulombMeters> dipole = std::nullopt) {
    g.validate();
    if (power.value() < 0.0) throw ConfigError("power must be >= 0");
    const double f = lorentzian_factor(detuning, cavity_linewidth(g));
    const double num = g.coupling_efficiency * power.value() * g.quality_factor * g.lambda0.value();
    const double den = 2.0 * std::numbers::pi * PhysicalConstants::c * g.permittivity() * g.mode_volume.value();
    DriveEstimate d;
    d.power = power;
    d.detuning = detuning;
    d.e_max = VoltsPerMeter(std::sqrt(num / den * f));
    d.e_at_qd = VoltsPerMeter(d.e_max.value() * g.mode_pattern);
    if (dipole) d.rabi = rabi_frequency(*dipole, d.e_at_qd);
    return d;
}

// Field at the QD without a cavity: Gaussian beam of radius sigma0 through
// the air/GaAs interface, |E| = 2/(1+n) sqrt(P / (c eps pi sigma0^2)).
// The same medium permittivity as the cavity chain is used, so the ratio
// of the two chains equals enhancement_ratio exactly.
inline VoltsPerMeter no_cavity_field(Watts power, const CavityGeometry& g) {
    g.validate();
    const double s0 = g.spot_radius.value();
    const double e = std::sqrt(power.value() / (PhysicalConstants::c * g.permittivity() * std::numbers::pi * s0 * s0));
    return VoltsPerMeter(2.0 / (1.0 + g.refractive_index) * e);
}

// E_cav / E_nocav = (1+n)/2 sqrt(eta Q lambda0 sigma0^2 / (2 V_m) * f) psi
inline double enhancement_ratio(const CavityGeometry& g, RadPerSec detuning) {
    g.validate();
    const double f = lorentzian_factor(detuning, cavity_linewidth(g));
    const double s0 = g.spot_radius.value();
    const double inner =
        g.coupling_efficiency * g.quality_factor * g.lambda0.value() * s0 * s0 / (2.0 * g.mode_volume.value()) * f;
    return 0.5 * (1.0 + g.refractive_index) * std::sqrt(inner) * g.mode_pattern;
}

// Inverts splitting = factor * mu * E_qd(P) / hbar with E_qd(P) = k sqrt(P):
//   mu = slope * hbar / (factor * k).
inline CoulombMeters dipole_from_splitting_slope(RadPerSecPerRootWatt slope, const CavityGeometry& g,
                                                 RadPerSec detuning, double splitting_factor = 4.0) {
    if (!(slope.value() > 0.0)) throw ConfigError("splitting slope must be > 0");
    if (!(splitting_factor > 0.0)) throw ConfigError("splitting factor must be > 0");
    const double k = intracavity_field(Watts(1.0), g, detuning).e_at_qd.value();
    if (!(k > 0.0)) throw ConfigError("no field at the QD (mode_pattern = 0)");
    return CoulombMeters(slope.value() * PhysicalConstants::hbar / (splitting_factor * k));
}

// Forward model matching dipole_from_splitting_slope.
inline RadPerSecPerRootWatt splitting_slope(CoulombMeters mu, const CavityGeometry& g, RadPerSec detuning,
                                            double splitting_factor = 4.0) {
    const double k = intracavity_field(Watts(1.0), g, detuning).e_at_qd.value();
    return RadPerSecPerRootWatt(splitting_factor * mu.value() * k / PhysicalConstants::hbar);
}

// g = mu sqrt(omega0 / (2 hbar eps V_m)), eps = n^2 eps0, omega0 = 2 pi c / lambda0.
inline RadPerSec g_max(CoulombMeters mu, const CavityGeometry& g) {
    g.validate();
    if (mu.value() < 0.0) throw ConfigError("dipole must be >= 0");
    const double w0 = 2.0 * std::numbers::pi * PhysicalConstants::c / g.lambda0.value();
    return RadPerSec(mu.value() *
                     std::sqrt(w0 / (2.0 * PhysicalConstants::hbar * g.permittivity() * g.mode_volume.value())));
}
inline RadPerSec g_max(Debye mu, const CavityGeometry& g) { return g_max(to_si(mu), g); }

struct WavelengthRate {
    double delta_nu_hz = 0.0;           // c dlambda / lambda0^2
    RadPerSec angular_offset{0.0};      // 2 pi delta_nu
    RadPerSec field_half_width{0.0};    // pi delta_nu: kappa when dlambda is a FWHM linewidth
};

inline WavelengthRate wavelength_offset_to_rate(Meters dlambda, Meters lambda0) {
    if (!(lambda0.value() > 0.0)) throw ConfigError("lambda0 must be > 0");
    WavelengthRate r;
    r.delta_nu_hz = PhysicalConstants::c * dlambda.value() / (lambda0.value() * lambda0.value());
    r.angular_offset = RadPerSec(2.0 * std::numbers::pi * r.delta_nu_hz);
    r.field_half_width = RadPerSec(std::numbers::pi * r.delta_nu_hz);
    return r;
}

// Inverse of wavelength_offset_to_rate(...).angular_offset.
inline Meters rate_to_wavelength_offset(RadPerSec angular_offset, Meters lambda0) {
    if (!(lambda0.value() > 0.0)) throw ConfigError("lambda0 must be > 0");
    const double nu = angular_offset.value() / (2.0 * std::numbers::pi);
    return Meters(nu * lambda0.value() * lambda0.value() / PhysicalConstants::c);
}

// Inverse of wavelength_offset_to_rate(...).field_half_width.
inline Meters kappa_to_linewidth(RadPerSec kappa, Meters lambda0) {
    return rate_to_wavelength_offset(RadPerSec(2.0 * kappa.value()), lambda0);
}

}  // namespace qdcav::photonics
