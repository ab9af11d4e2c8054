#include "ssicast/heliosat.hpp"

#include <cmath>

namespace ssicast {

double cloud_index(const AlbedoTriple& a) {
    const double denom = a.rho_cloud - a.rho_cs;
    if (denom == 0.0)
        throw std::domain_error("cloud_index: rho_cloud equals rho_cs (degenerate denominator)");
    return (a.rho - a.rho_cs) / denom;
}

double csi_from_cloud_index(double n) {
    if (n < -0.2) return 1.2;
    if (n <= 0.8) return 1.0 - n;
    if (n <= 1.1) return 2.0667 - 3.6667 * n + 1.6667 * n * n;
    return 0.05;
}

double irradiance_from_csi(double csi, double i_cs) { return csi * i_cs; }

double csi_from_irradiance(double i, double i_cs) {
    if (is_missing(i) || is_missing(i_cs)) return kMissingValue;
    if (i_cs <= kCsiClearSkyFloor) return kMissingValue;
    return i / i_cs;
}

namespace {

double clamped_csi(double i, double i_cs, bool clamp) {
    double csi = csi_from_irradiance(i, i_cs);
    if (is_missing(csi) || !clamp) return csi;
    if (csi < kCsiClampLo) return kCsiClampLo;
    if (csi > kCsiClampHi) return kCsiClampHi;
    return csi;
}

}  // namespace

PixelSeries csi_pixel_series(const MapStack& irradiance, const MapStack& clear_sky,
                             uint32_t i, uint32_t j, const DaylightFilter& filter,
                             bool clamp) {
    if (!irradiance.spec.same_geometry(clear_sky.spec) ||
        !irradiance.spec.same_axis(clear_sky.spec))
        throw AlignmentError("csi_pixel_series: stacks are not aligned");
    if (i >= irradiance.spec.height || j >= irradiance.spec.width)
        throw std::out_of_range("csi_pixel_series: pixel out of range");
    filter.validate();

    PixelSeries s;
    s.i = i;
    s.j = j;
    s.kind = SeriesKind::ClearSkyIndex;
    for (std::size_t t = 0; t < irradiance.frame_count(); ++t) {
        const int64_t ts = irradiance.spec.timestamp(t);
        if (!filter.hour_in_window(ts)) continue;
        s.timestamps.push_back(ts);
        s.values.push_back(clamped_csi(irradiance.at(t, i, j), clear_sky.at(t, i, j), clamp));
    }
    return s;
}

MapStack csi_stack(const MapStack& irradiance, const MapStack& clear_sky, bool clamp) {
    if (!irradiance.spec.same_geometry(clear_sky.spec) ||
        !irradiance.spec.same_axis(clear_sky.spec))
        throw AlignmentError("csi_stack: stacks are not aligned");
    MapStack out(irradiance.spec, SeriesKind::ClearSkyIndex, kMissingValue);
    for (std::size_t c = 0; c < irradiance.data.size(); ++c) {
        out.data[c] = static_cast<float>(
            clamped_csi(irradiance.data[c], clear_sky.data[c], clamp));
    }
    return out;
}

}  // namespace ssicast
