#ifndef SSICAST_GRID_HPP
#define SSICAST_GRID_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssicast/common.hpp"

namespace ssicast {

/// Payload tag for rasters and series. Values match the SSI1 kind byte.
enum class SeriesKind : uint8_t {
    Irradiance = 0,     // Wh/m^2 per hour
    ClearSkyIndex = 1,  // unitless
    CloudIndex = 2,     // unitless
};

const char* to_string(SeriesKind kind);

/// Raster-stack geometry: dimensions, pixel size, geographic anchor and the
/// hourly timestamp axis. The anchor is the center of pixel (0, 0); row
/// indices grow southward, column indices eastward. Elevation is an optional
/// per-pixel raster (meters), empty meaning sea level everywhere.
struct GridSpec {
    uint32_t width = 0;
    uint32_t height = 0;
    float pixel_size_m = 2500.0f;
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    std::vector<float> elevation_m;  // optional, height*width row-major
    int64_t t0 = 0;                  // Unix seconds, UTC
    uint32_t step_s = 3600;
    uint32_t frames = 0;             // timestamp axis length

    std::size_t pixel_count() const { return std::size_t(width) * height; }
    int64_t timestamp(std::size_t frame) const { return t0 + int64_t(frame) * step_s; }
    double pixel_lat(uint32_t i) const;
    double pixel_lon(uint32_t j) const;
    double pixel_elevation(uint32_t i, uint32_t j) const;

    /// Throws std::invalid_argument on violated invariants.
    void validate() const;

    /// Header-field equality (elevation raster excluded; it is not part of
    /// the on-disk header).
    bool same_geometry(const GridSpec& other) const;
    bool same_axis(const GridSpec& other) const;
};

/// A time-ordered stack of rasters over one GridSpec. Frames are stored
/// contiguously, row-major within each frame. Immutable by convention once
/// built; all read paths are const and thread-safe.
struct MapStack {
    GridSpec spec;
    SeriesKind kind = SeriesKind::Irradiance;
    std::vector<float> data;  // frames * height * width

    MapStack() = default;
    MapStack(GridSpec s, SeriesKind k, float fill = 0.0f);

    std::size_t frame_count() const { return spec.frames; }
    std::size_t frame_size() const { return spec.pixel_count(); }

    std::span<const float> frame(std::size_t t) const;
    std::span<float> frame(std::size_t t);

    float at(std::size_t t, uint32_t i, uint32_t j) const {
        return data[t * frame_size() + std::size_t(i) * spec.width + j];
    }
    float& at(std::size_t t, uint32_t i, uint32_t j) {
        return data[t * frame_size() + std::size_t(i) * spec.width + j];
    }

    void validate() const;
};

/// One pixel's scalar time series with aligned UTC timestamps.
struct PixelSeries {
    uint32_t i = 0;
    uint32_t j = 0;
    SeriesKind kind = SeriesKind::Irradiance;
    std::vector<int64_t> timestamps;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Retention rule for evaluation samples: UTC hour window plus an
/// irradiance floor (0.1 Wh/m^2 drops night values, 10 Wh/m^2 additionally
/// drops the sunrise/sunset artifact hours).
struct DaylightFilter {
    int hour_min = 8;
    int hour_max = 18;
    double irradiance_floor = 10.0;

    bool hour_in_window(int64_t timestamp) const;
    void validate() const;
};

// ---- operations ----

PixelSeries extract_series(const MapStack& stack, uint32_t i, uint32_t j);

/// Keeps samples with hour_min <= UTC hour < hour_max and value >= floor.
/// Original timestamps are preserved; missing samples never pass the floor.
PixelSeries apply_filter(const PixelSeries& series, const DaylightFilter& filter);

// ---- SSI1 binary raster-stack format ----
//
// magic "SSI1" | u16 LE version (=1) | u8 kind | u32 LE width | u32 LE height
// | u32 LE frame count | i64 LE t0 (Unix s) | u32 LE step_s | f32 LE
// pixel_size_m | f64 LE origin_lat | f64 LE origin_lon | payload: frames in
// time order, each row-major height*width f32 LE.

inline constexpr std::size_t kSsi1HeaderSize = 51;

void write_stack(const MapStack& stack, const std::string& path);
MapStack read_stack(const std::string& path);

/// Serialize/parse without touching the filesystem (used by tests and the
/// byte-identity checks).
std::vector<unsigned char> serialize_stack(const MapStack& stack);
MapStack parse_stack(std::span<const unsigned char> bytes);

/// CSV fixture import: header "t,i,j,value", one sample per row; cells not
/// mentioned stay missing. t is the frame index on spec's timestamp axis.
MapStack read_stack_csv(const std::string& path, const GridSpec& spec, SeriesKind kind);

/// Plain-text sidecar (key=value per line) written next to every artifact.
void write_sidecar(const std::string& artifact_path,
                   const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace ssicast

#endif
