#include "ssicast/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "ssicast/heliosat.hpp"
#include "ssicast/parallel.hpp"
#include "ssicast/rng.hpp"

namespace ssicast {

void CloudProcess::validate() const {
    if (ar1_phi < 0.0 || ar1_phi >= 1.0)
        throw std::invalid_argument("CloudProcess: ar1_phi must be in [0, 1)");
    if (noise_sigma < 0.0) throw std::invalid_argument("CloudProcess: noise_sigma must be >= 0");
    if (blob_count < 0) throw std::invalid_argument("CloudProcess: blob_count must be >= 0");
    if (blob_radius_px <= 0.0)
        throw std::invalid_argument("CloudProcess: blob_radius_px must be > 0");
}

CloudProcess::Mode cloud_mode_from_string(const std::string& name) {
    if (name == "clear") return CloudProcess::Mode::Clear;
    if (name == "ar1") return CloudProcess::Mode::Ar1;
    if (name == "blobs" || name == "advecting_blobs") return CloudProcess::Mode::AdvectingBlobs;
    throw std::invalid_argument("unknown cloud mode '" + name + "' (clear|ar1|blobs)");
}

const char* to_string(CloudProcess::Mode mode) {
    switch (mode) {
        case CloudProcess::Mode::Clear: return "clear";
        case CloudProcess::Mode::Ar1: return "ar1";
        case CloudProcess::Mode::AdvectingBlobs: return "blobs";
    }
    return "unknown";
}

namespace {

double clip_index(double n) {
    if (n < kCloudIndexClipLo) return kCloudIndexClipLo;
    if (n > kCloudIndexClipHi) return kCloudIndexClipHi;
    return n;
}

struct Blob {
    double row;
    double col0;
    double amplitude;
};

}  // namespace

SynthResult generate(const GridSpec& spec, const ClearSkyParams& cs_params,
                     const CloudProcess& proc, unsigned workers) {
    spec.validate();
    proc.validate();

    SynthResult out{
        MapStack(spec, SeriesKind::Irradiance),
        MapStack(spec, SeriesKind::CloudIndex),
        clear_sky_stack(spec, cs_params, workers),
    };

    const std::size_t npx = spec.pixel_count();
    const std::size_t frames = spec.frames;

    switch (proc.mode) {
        case CloudProcess::Mode::Clear: {
            // n = 0, CSI = 1: truth is the clear-sky stack bit-for-bit
            std::fill(out.cloud.data.begin(), out.cloud.data.end(), 0.0f);
            out.truth.data = out.clear_sky.data;
            return out;
        }

        case CloudProcess::Mode::Ar1: {
            // one independent stream per pixel, evolved through time; output
            // is identical for any worker count
            parallel_for(npx, workers, [&](std::size_t px) {
                SplitMix64 rng(derive_seed(proc.seed, px));
                const double phi = proc.ar1_phi;
                const double stationary =
                    proc.noise_sigma / std::sqrt(std::max(1e-12, 1.0 - phi * phi));
                double dev = stationary * rng.gaussian();
                for (std::size_t t = 0; t < frames; ++t) {
                    if (t > 0) dev = phi * dev + proc.noise_sigma * rng.gaussian();
                    const double n = clip_index(proc.ar1_mean + dev);
                    out.cloud.data[t * npx + px] = static_cast<float>(n);
                }
            });
            break;
        }

        case CloudProcess::Mode::AdvectingBlobs: {
            SplitMix64 rng(derive_seed(proc.seed, 0x626c6f62));  // blob layout stream
            std::vector<Blob> blobs(std::size_t(proc.blob_count));
            for (Blob& b : blobs) {
                b.row = rng.uniform(0.0, double(spec.height));
                b.col0 = rng.uniform(0.0, double(spec.width));
                b.amplitude = rng.uniform(0.5, 1.1);
            }
            const double r2 = proc.blob_radius_px * proc.blob_radius_px;
            parallel_for(frames, workers, [&](std::size_t t) {
                auto frame = out.cloud.frame(t);
                for (uint32_t i = 0; i < spec.height; ++i) {
                    for (uint32_t j = 0; j < spec.width; ++j) {
                        double n = 0.0;
                        for (const Blob& b : blobs) {
                            // drift along +x, wrapped
                            double dc = std::fmod(b.col0 + proc.blob_drift_px * double(t),
                                                  double(spec.width));
                            double dj = std::abs(double(j) - dc);
                            dj = std::min(dj, double(spec.width) - dj);  // periodic in x
                            const double di = double(i) - b.row;
                            n += b.amplitude * std::exp(-(di * di + dj * dj) / (2.0 * r2));
                        }
                        frame[std::size_t(i) * spec.width + j] = static_cast<float>(clip_index(n));
                    }
                }
                if (proc.noise_sigma > 0.0) {
                    SplitMix64 noise(derive_seed(proc.seed, 0x6e6f6973 + t));
                    for (float& v : frame)
                        v = static_cast<float>(
                            clip_index(double(v) + proc.noise_sigma * noise.gaussian()));
                }
            });
            break;
        }
    }

    // truth = CSI(n) * I_CS
    parallel_for(frames, workers, [&](std::size_t t) {
        const auto cloud = out.cloud.frame(t);
        const auto cs = out.clear_sky.frame(t);
        auto truth = out.truth.frame(t);
        for (std::size_t c = 0; c < npx; ++c)
            truth[c] = static_cast<float>(csi_from_cloud_index(cloud[c]) * double(cs[c]));
    });
    return out;
}

}  // namespace ssicast
