#include "ssicast/clearsky.hpp"

#include <cmath>

#include "ssicast/parallel.hpp"
#include "ssicast/timeutil.hpp"

namespace ssicast {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kSolarConstant = 1367.0;  // W/m^2

/// Refraction-corrected "true" elevation used inside the air-mass formula.
double refraction_corrected(double el) {
    double d = 0.061359 * (0.1594 + 1.1230 * el + 0.065656 * el * el) /
               (1.0 + 28.9344 * el + 277.3971 * el * el);
    return el + d;
}

/// Kasten & Young 1989 relative optical air mass, pressure-corrected.
double relative_air_mass(double el, double elevation_m) {
    const double p_ratio = std::exp(-elevation_m / 8434.5);
    const double el_true = refraction_corrected(el);
    const double el_deg = el_true / kDegToRad;
    return p_ratio / (std::sin(el_true) + 0.50572 * std::pow(el_deg + 6.07995, -1.6364));
}

/// Kasten 1996 integral Rayleigh optical thickness.
double rayleigh_thickness(double m) {
    if (m <= 20.0)
        return 1.0 / (6.6296 + m * (1.7513 + m * (-0.1202 + m * (0.0065 - 0.00013 * m))));
    return 1.0 / (10.4 + 0.718 * m);
}

}  // namespace

double ClearSkyParams::turbidity_for_month(unsigned month) const {
    if (linke_turbidity_monthly) {
        if (month < 1 || month > 12) throw std::invalid_argument("month must be 1..12");
        return (*linke_turbidity_monthly)[month - 1];
    }
    return linke_turbidity;
}

void ClearSkyParams::validate() const {
    if (linke_turbidity < 1.0)
        throw std::invalid_argument("linke_turbidity must be >= 1");
    if (linke_turbidity_monthly)
        for (double tl : *linke_turbidity_monthly)
            if (tl < 1.0) throw std::invalid_argument("monthly linke turbidity must be >= 1");
}

SolarPosition solar_position(int64_t timestamp, double lat_deg, double lon_deg) {
    const UtcParts utc = utc_parts(timestamp);
    const double g = 2.0 * kPi * (utc.day_of_year - 1) / 365.0;

    // Spencer 1971 series
    const double decl = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                        0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                        0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
    const double eot_min = 229.18 * (0.000075 + 0.001868 * std::cos(g) -
                                     0.032077 * std::sin(g) - 0.014615 * std::cos(2 * g) -
                                     0.040849 * std::sin(2 * g));
    const double esd = 1.000110 + 0.034221 * std::cos(g) + 0.001280 * std::sin(g) +
                       0.000719 * std::cos(2 * g) + 0.000077 * std::sin(2 * g);

    const double solar_hour = utc.hour_fraction + lon_deg / 15.0 + eot_min / 60.0;
    const double hour_angle = (solar_hour - 12.0) * kPi / 12.0;

    const double lat = lat_deg * kDegToRad;
    double sin_el = std::sin(lat) * std::sin(decl) +
                    std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
    if (sin_el > 1.0) sin_el = 1.0;
    if (sin_el < -1.0) sin_el = -1.0;

    SolarPosition pos;
    pos.declination = decl;
    pos.hour_angle = hour_angle;
    pos.solar_elevation = std::asin(sin_el);
    pos.earth_sun_correction = esd;
    pos.month = utc.month;
    return pos;
}

ClearSkyComponents clear_sky_components(const SolarPosition& pos, const ClearSkyParams& params,
                                        double elevation_m) {
    ClearSkyComponents out;
    const double el = pos.solar_elevation;
    const double sin_el = std::sin(el);
    if (sin_el <= 0.0) return out;

    const double tl = params.turbidity_for_month(pos.month);
    const double esd = pos.earth_sun_correction;

    const double m = relative_air_mass(el, elevation_m);
    const double dr = rayleigh_thickness(m);
    out.beam = kSolarConstant * esd * sin_el * std::exp(-0.8662 * tl * m * dr);

    const double trd = -1.5843e-2 + 3.0543e-2 * tl + 3.797e-4 * tl * tl;
    double a0 = 2.6463e-1 - 6.1581e-2 * tl + 3.1408e-3 * tl * tl;
    if (a0 * trd < 2e-3) a0 = 2e-3 / trd;
    const double a1 = 2.0402 + 1.8945e-2 * tl - 1.1161e-2 * tl * tl;
    const double a2 = -1.3025 + 3.9231e-2 * tl + 8.5079e-3 * tl * tl;
    const double fd = a0 + a1 * sin_el + a2 * sin_el * sin_el;
    out.diffuse = kSolarConstant * esd * trd * fd;
    if (out.diffuse < 0.0) out.diffuse = 0.0;

    out.global = out.beam + out.diffuse;
    return out;
}

double clear_sky_ghi(const SolarPosition& pos, const ClearSkyParams& params, double elevation_m) {
    return clear_sky_components(pos, params, elevation_m).global;
}

MapStack clear_sky_stack(const GridSpec& spec, const ClearSkyParams& params, unsigned workers) {
    spec.validate();
    params.validate();
    MapStack stack(spec, SeriesKind::Irradiance);

    parallel_for(spec.frames, workers, [&](std::size_t t) {
        // instantaneous value at the interval midpoint stands for the hour
        const int64_t mid = spec.timestamp(t) + spec.step_s / 2;
        auto frame = stack.frame(t);
        for (uint32_t i = 0; i < spec.height; ++i) {
            const double lat = spec.pixel_lat(i);
            for (uint32_t j = 0; j < spec.width; ++j) {
                const SolarPosition pos = solar_position(mid, lat, spec.pixel_lon(j));
                frame[std::size_t(i) * spec.width + j] = static_cast<float>(
                    clear_sky_ghi(pos, params, spec.pixel_elevation(i, j)));
            }
        }
    });
    return stack;
}

}  // namespace ssicast
