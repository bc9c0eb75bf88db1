#pragma once

#include <numbers>

namespace crossfield {

namespace units {

/// Magnetic field of one atomic unit, in tesla.
inline constexpr double tesla_per_au = 2.35e5;
/// Electric field of one atomic unit, in V/cm.
inline constexpr double volt_per_cm_per_au = 5.14e9;
/// Hartree in cm^-1.
inline constexpr double wavenumber_per_au = 219474.63;

inline constexpr double deg = std::numbers::pi / 180.0;

constexpr double gamma_from_tesla(double tesla) { return tesla / tesla_per_au; }
constexpr double f_from_kv_per_cm(double kv_per_cm) { return kv_per_cm * 1.0e3 / volt_per_cm_per_au; }
constexpr double tesla_from_gamma(double gamma) { return gamma * tesla_per_au; }
constexpr double kv_per_cm_from_f(double f) { return f * volt_per_cm_per_au * 1.0e-3; }

/// Degrees to radians, exact at the perpendicular endpoint.
constexpr double radians(double degrees)
{
    return degrees == 90.0 ? std::numbers::pi / 2 : degrees * deg;
}

constexpr double degrees(double radians) { return radians / deg; }

constexpr double to_wavenumber(double energy_au, double factor = wavenumber_per_au)
{
    return energy_au * factor;
}

} // namespace units

/// Field strengths in atomic units. The magnetic field points along z, the
/// electric field lies in the (x,z) plane at angle `beta` from the magnetic
/// axis: beta = 0 is parallel, beta = pi/2 perpendicular.
struct FieldParams {
    double gamma = 0.0;
    double f = 0.0;
    double beta = 0.0;

    double f_parallel() const;
    double f_perp() const;

    /// Throws InvalidArgument unless gamma >= 0, f >= 0, 0 <= beta <= pi/2.
    void validate() const;

    /// Fields for manifold n at fixed scaled strengths n^3 gamma and n^4 f.
    static FieldParams from_scaled(int n, double scaled_gamma, double scaled_f, double beta);
};

} // namespace crossfield
