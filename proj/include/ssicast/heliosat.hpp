#ifndef SSICAST_HELIOSAT_HPP
#define SSICAST_HELIOSAT_HPP

#include "ssicast/grid.hpp"

namespace ssicast {

/// Apparent albedos entering the cloud-index computation: the sensor
/// reading, the brightest-cloud reference and the clear-sky ground
/// reference.
struct AlbedoTriple {
    double rho = 0.0;
    double rho_cloud = 1.0;
    double rho_cs = 0.2;
};

/// Clear-sky index is forced missing when the clear-sky irradiation is at
/// or below this floor; avoids the sunrise/sunset air-mass blowups.
inline constexpr double kCsiClearSkyFloor = 10.0;  // Wh/m^2

/// Physical range computed CSI values are clamped to before training.
inline constexpr double kCsiClampLo = 0.0;
inline constexpr double kCsiClampHi = 1.5;

/// Cloud index n = (rho - rho_cs) / (rho_cloud - rho_cs).
/// Throws std::domain_error when rho_cloud == rho_cs.
double cloud_index(const AlbedoTriple& a);

/// The Heliosat-2 piecewise mapping from cloud index to clear-sky index
/// (Rigollier, Lefevre, Wald 2004, Sol. Energy 77:159-169):
///   n < -0.2         -> 1.2
///   -0.2 <= n <= 0.8 -> 1 - n
///   0.8 < n <= 1.1   -> 2.0667 - 3.6667 n + 1.6667 n^2
///   n > 1.1          -> 0.05
/// The published quadratic coefficients are rounded, so continuity at the
/// 0.8 and 1.1 breakpoints holds to ~3e-5 / ~4.4e-5 and the curve has a
/// ~4e-10 uptick just below 1.1; callers should not assume better.
double csi_from_cloud_index(double n);

/// I = CSI * I_CS.
double irradiance_from_csi(double csi, double i_cs);

/// CSI = I / I_CS above the floor; missing at or below it.
double csi_from_irradiance(double i, double i_cs);

/// Per-pixel CSI series over the daylight hour window: timestamps outside
/// [hour_min, hour_max) are dropped, samples with I_CS <= floor (or missing
/// inputs) stay in the series as the missing sentinel so window-based
/// consumers can see the gap. Computed values are clamped to [0, 1.5] when
/// `clamp` is set (the default; training requires bounded CSI).
PixelSeries csi_pixel_series(const MapStack& irradiance, const MapStack& clear_sky,
                             uint32_t i, uint32_t j, const DaylightFilter& filter,
                             bool clamp = true);

/// Whole-stack CSI conversion (missing where I_CS is at or below the floor).
MapStack csi_stack(const MapStack& irradiance, const MapStack& clear_sky, bool clamp = true);

}  // namespace ssicast

#endif
