#ifndef SSICAST_CLEARSKY_HPP
#define SSICAST_CLEARSKY_HPP

#include <array>
#include <cstdint>
#include <optional>

#include "ssicast/grid.hpp"

namespace ssicast {

/// Inputs of the deterministic clear-sky model. Turbidity is either a
/// single Linke factor or a 12-entry monthly table.
struct ClearSkyParams {
    double linke_turbidity = 3.0;
    std::optional<std::array<double, 12>> linke_turbidity_monthly;

    double turbidity_for_month(unsigned month) const;  // month 1..12
    void validate() const;
};

/// Sun geometry for one instant and site. `month` is carried along so the
/// monthly turbidity table can be resolved without re-deriving the date.
struct SolarPosition {
    double declination = 0.0;            // radians
    double hour_angle = 0.0;             // radians, 0 at local solar noon
    double solar_elevation = 0.0;        // radians
    double earth_sun_correction = 1.0;   // unitless, ~[0.96, 1.04]
    unsigned month = 1;                  // 1..12
};

struct ClearSkyComponents {
    double global = 0.0;   // Wh/m^2 (hourly)
    double beam = 0.0;
    double diffuse = 0.0;
};

/// Solar geometry from the Spencer (1971) Fourier fits: declination,
/// equation of time and earth-sun distance correction; hour angle from UTC
/// time and longitude.
SolarPosition solar_position(int64_t timestamp, double lat_deg, double lon_deg);

/// ESRA clear-sky global horizontal irradiation for one hour, following
/// Rigollier, Bauer, Wald 2000 (Sol. Energy 68:33-48):
///   beam    = I0 eps sin(el) exp(-0.8662 TL m dR(m))
///   diffuse = I0 eps Trd(TL) Fd(el, TL)
/// Constants: I0 = 1367 W/m^2; 0.8662 rescales TL (air mass 2) onto the
/// Kasten 1996 Rayleigh optical thickness 1/dR = 6.6296 + 1.7513 m
/// - 0.1202 m^2 + 0.0065 m^3 - 0.00013 m^4 (1/dR = 10.4 + 0.718 m past
/// m = 20); m is the Kasten & Young 1989 relative air mass
/// m = (p/p0) / (sin el' + 0.50572 (el'_deg + 6.07995)^-1.6364) with
/// p/p0 = exp(-z / 8434.5 m) and el' the refraction-corrected elevation;
/// Trd and the Fd = A0 + A1 sin el + A2 sin^2 el coefficients are the
/// published second-order polynomials in TL, with A0 floored so that
/// A0 Trd >= 2e-3. Zero when the sun is at or below the horizon. The
/// hourly irradiation is the instantaneous irradiance at the given
/// instant times one hour, so the numeric value doubles as W/m^2.
ClearSkyComponents clear_sky_components(const SolarPosition& pos, const ClearSkyParams& params,
                                        double elevation_m);
double clear_sky_ghi(const SolarPosition& pos, const ClearSkyParams& params, double elevation_m);

/// Clear-sky stack over the grid: frame t, pixel (i,j) is clear_sky_ghi at
/// that pixel's coordinates and the midpoint of interval [t, t+step).
MapStack clear_sky_stack(const GridSpec& spec, const ClearSkyParams& params,
                         unsigned workers = 1);

}  // namespace ssicast

#endif
