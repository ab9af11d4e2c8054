#include <doctest.h>

#include <cmath>
#include <cstring>

#include "ssicast/heliosat.hpp"
#include "ssicast/metrics.hpp"
#include "ssicast/predictors.hpp"
#include "ssicast/synthgen.hpp"
#include "support/fixtures.hpp"

using namespace ssicast;
using ssicast::testing::make_spec;

namespace {

GridSpec month_spec(uint32_t w = 6, uint32_t h = 6) {
    return make_spec(w, h, 24 * 30, utc_timestamp(2015, 6, 1), 42.0, 8.8);
}

}  // namespace

TEST_CASE("clear mode reproduces the clear-sky stack bit for bit") {
    const GridSpec spec = month_spec();
    CloudProcess proc;
    proc.mode = CloudProcess::Mode::Clear;
    const SynthResult r = generate(spec, ClearSkyParams{}, proc);
    REQUIRE(r.truth.data.size() == r.clear_sky.data.size());
    CHECK(std::memcmp(r.truth.data.data(), r.clear_sky.data.data(),
                      r.truth.data.size() * 4) == 0);
    for (float n : r.cloud.data) CHECK(n == 0.0f);
}

TEST_CASE("same seed, same stacks; different seed, different clouds") {
    const GridSpec spec = month_spec(4, 4);
    CloudProcess proc;
    proc.seed = 31415;
    const SynthResult a = generate(spec, ClearSkyParams{}, proc);
    const SynthResult b = generate(spec, ClearSkyParams{}, proc);
    CHECK(a.truth.data == b.truth.data);
    CHECK(a.cloud.data == b.cloud.data);

    proc.seed = 31416;
    const SynthResult c = generate(spec, ClearSkyParams{}, proc);
    CHECK(a.cloud.data != c.cloud.data);
}

TEST_CASE("worker count never changes the output") {
    const GridSpec spec = month_spec(5, 3);
    for (auto mode : {CloudProcess::Mode::Ar1, CloudProcess::Mode::AdvectingBlobs}) {
        CloudProcess proc;
        proc.mode = mode;
        proc.seed = 99;
        const SynthResult one = generate(spec, ClearSkyParams{}, proc, 1);
        const SynthResult four = generate(spec, ClearSkyParams{}, proc, 4);
        CHECK(one.truth.data == four.truth.data);
        CHECK(one.cloud.data == four.cloud.data);
    }
}

TEST_CASE("phi = 0 gives temporally independent cloud fields") {
    GridSpec spec = make_spec(10, 10, 200, utc_timestamp(2015, 6, 1));
    CloudProcess proc;
    proc.ar1_phi = 0.0;
    proc.noise_sigma = 0.2;
    proc.seed = 7;
    const SynthResult r = generate(spec, ClearSkyParams{}, proc);

    // pooled lag-1 autocorrelation across all pixels (1e4+ samples)
    double sum = 0.0, sum_sq = 0.0, cross = 0.0;
    std::size_t n = 0, n_cross = 0;
    for (std::size_t px = 0; px < spec.pixel_count(); ++px) {
        for (std::size_t t = 0; t < spec.frames; ++t) {
            const double v = r.cloud.data[t * spec.pixel_count() + px];
            sum += v;
            sum_sq += v * v;
            ++n;
            if (t > 0) {
                cross += v * double(r.cloud.data[(t - 1) * spec.pixel_count() + px]);
                ++n_cross;
            }
        }
    }
    const double mean = sum / double(n);
    const double var = sum_sq / double(n) - mean * mean;
    const double autocov = cross / double(n_cross) - mean * mean;
    REQUIRE(var > 0.0);
    CHECK(std::abs(autocov / var) <= 0.1);
}

TEST_CASE("cloud index and irradiance stay inside their physical bands") {
    const GridSpec spec = month_spec(5, 5);
    for (auto mode : {CloudProcess::Mode::Ar1, CloudProcess::Mode::AdvectingBlobs}) {
        CloudProcess proc;
        proc.mode = mode;
        proc.noise_sigma = 0.4;  // stress the clipping
        proc.seed = 11;
        const SynthResult r = generate(spec, ClearSkyParams{}, proc);
        for (float n : r.cloud.data) {
            CHECK(n >= float(kCloudIndexClipLo));
            CHECK(n <= float(kCloudIndexClipHi));
        }
        for (std::size_t c = 0; c < r.truth.data.size(); ++c) {
            const double cs = r.clear_sky.data[c];
            if (cs <= 0.0) continue;
            CHECK(r.truth.data[c] >= float(0.05 * cs) - 1e-3f);
            CHECK(r.truth.data[c] <= float(1.2 * cs) + 1e-3f);
        }
    }
}

TEST_CASE("predictor orderings the generator is designed to produce") {
    const DaylightFilter filter;

    SUBCASE("persistent clouds: scaled persistence beats the clear-sky predictor") {
        GridSpec spec = make_spec(8, 8, 24 * 60, utc_timestamp(2015, 4, 1), 42.0, 8.8);
        CloudProcess proc;
        proc.ar1_phi = 0.9;
        proc.ar1_mean = 0.3;
        proc.noise_sigma = 0.12;
        proc.seed = 2025;
        const SynthResult r = generate(spec, ClearSkyParams{}, proc, 2);
        const MapStack scaled = forecast_stack(r.truth, r.clear_sky,
                                               PredictorId::ScaledPersistence, nullptr, filter, 2);
        const MapStack cspred = forecast_stack(r.truth, r.clear_sky, PredictorId::ClearSky,
                                               nullptr, filter, 2);
        CHECK(nrmse(r.truth, scaled, filter) < nrmse(r.truth, cspred, filter));
    }

    SUBCASE("fast blob drift hurts persistence more than slow drift") {
        GridSpec spec = make_spec(12, 12, 24 * 40, utc_timestamp(2015, 5, 1), 42.0, 8.8);
        auto persistence_error = [&](double drift) {
            CloudProcess proc;
            proc.mode = CloudProcess::Mode::AdvectingBlobs;
            proc.blob_drift_px = drift;
            proc.blob_count = 5;
            proc.blob_radius_px = 2.5;
            proc.noise_sigma = 0.0;
            proc.seed = 77;
            const SynthResult r = generate(spec, ClearSkyParams{}, proc, 2);
            const MapStack pers = forecast_stack(r.truth, r.clear_sky,
                                                 PredictorId::Persistence, nullptr, filter, 2);
            return nrmse(r.truth, pers, filter);
        };
        CHECK(persistence_error(3.0) > persistence_error(0.25));
    }
}
