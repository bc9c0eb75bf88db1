#include "crossfield/units.hpp"

#include "crossfield/errors.hpp"

#include <cmath>
#include <string>

namespace crossfield {

double FieldParams::f_parallel() const
{
    // cos(pi/2) is not exactly zero in floating point; perpendicular fields
    // must keep their exact z-parity.
    if (beta == std::numbers::pi / 2) return 0.0;
    return f * std::cos(beta);
}

double FieldParams::f_perp() const { return f * std::sin(beta); }

void FieldParams::validate() const
{
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw InvalidArgument("gamma must be finite and >= 0, got " + std::to_string(gamma));
    if (!(f >= 0.0) || !std::isfinite(f))
        throw InvalidArgument("f must be finite and >= 0, got " + std::to_string(f));
    // Grids accumulated in degrees can land a hair past pi/2.
    if (!(beta >= 0.0) || beta > std::numbers::pi / 2 + 1e-12)
        throw InvalidArgument("beta must lie in [0, pi/2], got " + std::to_string(beta));
}

FieldParams FieldParams::from_scaled(int n, double scaled_gamma, double scaled_f, double beta)
{
    if (n < 1) throw InvalidArgument("principal quantum number must be >= 1");
    const double nn = static_cast<double>(n);
    return FieldParams{scaled_gamma / (nn * nn * nn), scaled_f / (nn * nn * nn * nn), beta};
}

} // namespace crossfield
