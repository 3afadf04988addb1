#pragma once

// Tagged physical quantities. Distinct tags never convert into each other,
// so e.g. a Debye value cannot be passed where SI C*m is expected without
// an explicit to_si().

#include <compare>

namespace qdcav::units {

template <class Tag>
class Quantity {
public:
    constexpr Quantity() = default;
    constexpr explicit Quantity(double v) : v_(v) {}
    constexpr double value() const { return v_; }

    constexpr Quantity operator+(Quantity o) const { return Quantity(v_ + o.v_); }
    constexpr Quantity operator-(Quantity o) const { return Quantity(v_ - o.v_); }
    constexpr Quantity operator-() const { return Quantity(-v_); }
    constexpr Quantity operator*(double s) const { return Quantity(v_ * s); }
    constexpr Quantity operator/(double s) const { return Quantity(v_ / s); }
    constexpr double operator/(Quantity o) const { return v_ / o.v_; }
    friend constexpr Quantity operator*(double s, Quantity q) { return Quantity(s * q.v_); }
    constexpr auto operator<=>(const Quantity&) const = default;

private:
    double v_ = 0.0;
};

struct LengthTag {};
struct VolumeTag {};
struct PowerTag {};
struct AngularRateTag {};
struct FieldTag {};
struct DipoleTag {};
struct DebyeTag {};
struct SplittingSlopeTag {};

using Meters = Quantity<LengthTag>;
using CubicMeters = Quantity<VolumeTag>;
using Watts = Quantity<PowerTag>;
using RadPerSec = Quantity<AngularRateTag>;
using VoltsPerMeter = Quantity<FieldTag>;
using CoulombMeters = Quantity<DipoleTag>;
using Debye = Quantity<DebyeTag>;
// d(splitting) / d(sqrt P), in rad/s per sqrt(W)
using RadPerSecPerRootWatt = Quantity<SplittingSlopeTag>;

constexpr Meters nanometers(double v) { return Meters(v * 1e-9); }
constexpr Meters micrometers(double v) { return Meters(v * 1e-6); }
constexpr Watts nanowatts(double v) { return Watts(v * 1e-9); }

}  // namespace qdcav::units
