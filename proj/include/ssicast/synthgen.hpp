#ifndef SSICAST_SYNTHGEN_HPP
#define SSICAST_SYNTHGEN_HPP

#include <string>

#include "ssicast/clearsky.hpp"
#include "ssicast/grid.hpp"

namespace ssicast {

/// Stochastic cloud-index field standing in for the satellite-derived one.
/// `clear` is n = 0 everywhere (so truth equals the clear-sky stack
/// bit-for-bit); `ar1` evolves an independent AR(1) per pixel around
/// ar1_mean; `advecting_blobs` drifts Gaussian cloud blobs across the grid
/// with optional additive noise. Emitted n is clipped to [-0.2, 1.3].
struct CloudProcess {
    enum class Mode { Clear, Ar1, AdvectingBlobs };

    Mode mode = Mode::Ar1;
    double ar1_phi = 0.9;
    double ar1_mean = 0.2;
    double noise_sigma = 0.15;
    int blob_count = 6;
    double blob_radius_px = 3.0;
    double blob_drift_px = 1.0;  // pixels per frame, along +x
    uint64_t seed = 0;

    void validate() const;
};

CloudProcess::Mode cloud_mode_from_string(const std::string& name);
const char* to_string(CloudProcess::Mode mode);

inline constexpr double kCloudIndexClipLo = -0.2;
inline constexpr double kCloudIndexClipHi = 1.3;

struct SynthResult {
    MapStack truth;      // kind irradiance
    MapStack cloud;      // kind cloud_index
    MapStack clear_sky;  // kind irradiance
};

/// Deterministic per seed; parallel generation equals sequential.
SynthResult generate(const GridSpec& spec, const ClearSkyParams& cs_params,
                     const CloudProcess& proc, unsigned workers = 1);

}  // namespace ssicast

#endif
