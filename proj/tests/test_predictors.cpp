#include <doctest.h>

#include <cmath>

#include "ssicast/clearsky.hpp"
#include "ssicast/metrics.hpp"
#include "ssicast/predictors.hpp"
#include "ssicast/rng.hpp"
#include "ssicast/synthgen.hpp"
#include "support/fixtures.hpp"

using namespace ssicast;
using ssicast::testing::constant_stack;
using ssicast::testing::make_spec;
using ssicast::testing::make_stack;

namespace {

/// Daytime target: 13:00 UTC with an hourly axis starting at midnight.
constexpr std::size_t kTarget = 13;

struct Fixture {
    GridSpec spec;
    MapStack history;
    MapStack clear_sky;

    explicit Fixture(uint32_t w = 3, uint32_t h = 3)
        : spec(make_spec(w, h, 16, utc_timestamp(2015, 6, 10))),
          history(spec, SeriesKind::Irradiance),
          clear_sky(spec, SeriesKind::Irradiance) {
        SplitMix64 rng(1);
        for (std::size_t t = 0; t < spec.frames; ++t) {
            const int hour = int(t % 24);
            const double cs = (hour >= 5 && hour < 21) ? 400.0 + 30.0 * hour : 0.0;
            for (uint32_t i = 0; i < spec.height; ++i)
                for (uint32_t j = 0; j < spec.width; ++j) {
                    clear_sky.at(t, i, j) = static_cast<float>(cs);
                    history.at(t, i, j) =
                        static_cast<float>(cs * rng.uniform(0.3, 1.1));
                }
        }
    }

    ForecastRequest request(std::size_t target = kTarget) const {
        ForecastRequest req;
        req.history = &history;
        req.clear_sky = &clear_sky;
        req.target_index = target;
        return req;
    }
};

}  // namespace

TEST_CASE("persistence") {
    Fixture fx;

    SUBCASE("forecast equals the last frame bit-exactly") {
        const ForecastMap map = persistence(fx.request());
        for (std::size_t c = 0; c < map.values.size(); ++c)
            CHECK(map.values[c] == fx.history.frame(kTarget - 1)[c]);
    }

    SUBCASE("constant last frame gives a constant forecast") {
        for (float& v : fx.history.frame(kTarget - 1)) v = 500.0f;
        const ForecastMap map = persistence(fx.request());
        for (float v : map.values) CHECK(v == 500.0f);
    }

    SUBCASE("missing pixel propagates") {
        fx.history.at(kTarget - 1, 1, 1) = kMissingValue;
        const ForecastMap map = persistence(fx.request());
        CHECK(is_missing(map.values[1 * 3 + 1]));
        CHECK(!is_missing(map.values[0]));
    }

    SUBCASE("empty history is rejected") {
        ForecastRequest req = fx.request(0);
        CHECK_THROWS_AS(persistence(req), std::invalid_argument);
    }

    SUBCASE("a single frame of history is enough") {
        GridSpec one = fx.spec;
        one.frames = 1;
        one.t0 = utc_timestamp(2015, 6, 10, 12);  // 12:00, daytime target 13:00
        MapStack history(one, SeriesKind::Irradiance, 480.0f);
        GridSpec two = one;
        two.frames = 2;
        const MapStack cs(two, SeriesKind::Irradiance, 600.0f);
        ForecastRequest req;
        req.history = &history;
        req.clear_sky = &cs;
        req.target_index = 1;
        const ForecastMap map = persistence(req);
        for (float v : map.values) CHECK(v == 480.0f);
    }

    SUBCASE("night target is fully missing") {
        const ForecastMap map = persistence(fx.request(3));  // 03:00 UTC
        for (float v : map.values) CHECK(is_missing(v));
    }
}

TEST_CASE("scaled persistence") {
    Fixture fx;

    SUBCASE("evaluates Eq-5 style ratio") {
        fx.history.at(kTarget - 1, 0, 0) = 400.0f;
        fx.clear_sky.at(kTarget - 1, 0, 0) = 800.0f;
        fx.clear_sky.at(kTarget, 0, 0) = 600.0f;
        const ForecastMap map = scaled_persistence(fx.request());
        CHECK(map.values[0] == doctest::Approx(300.0).epsilon(1e-6));
    }

    SUBCASE("reduces to persistence when the ratio is one") {
        for (std::size_t t = 0; t < fx.spec.frames; ++t)
            for (float& v : fx.clear_sky.frame(t)) v = 700.0f;
        const ForecastMap scaled = scaled_persistence(fx.request());
        const ForecastMap plain = persistence(fx.request());
        for (std::size_t c = 0; c < scaled.values.size(); ++c)
            CHECK(scaled.values[c] == plain.values[c]);
    }

    SUBCASE("clear-sky input data forecasts itself exactly") {
        ForecastRequest req;
        req.history = &fx.clear_sky;
        req.clear_sky = &fx.clear_sky;
        req.target_index = kTarget;
        const ForecastMap map = scaled_persistence(req);
        for (std::size_t c = 0; c < map.values.size(); ++c)
            CHECK(map.values[c] == fx.clear_sky.frame(kTarget)[c]);
    }

    SUBCASE("clear-sky at t at or below the floor yields missing") {
        fx.clear_sky.at(kTarget - 1, 2, 2) = 10.0f;
        const ForecastMap map = scaled_persistence(fx.request());
        CHECK(is_missing(map.values[2 * 3 + 2]));
    }
}

TEST_CASE("clear-sky predictor") {
    Fixture fx;

    SUBCASE("forecast is the clear-sky frame at t+1") {
        const ForecastMap map = clear_sky_predictor(fx.request());
        for (std::size_t c = 0; c < map.values.size(); ++c)
            CHECK(map.values[c] == fx.clear_sky.frame(kTarget)[c]);
    }

    SUBCASE("night target is masked missing by the daylight rule") {
        const ForecastMap map = clear_sky_predictor(fx.request(2));
        for (float v : map.values) CHECK(is_missing(v));
    }
}

TEST_CASE("mlp predictor") {
    Fixture fx;
    GridModels models;
    models.width = fx.spec.width;
    models.height = fx.spec.height;
    models.in_count = 1;
    models.hidden_count = 1;
    models.models.assign(fx.spec.pixel_count(), std::nullopt);
    models.reports.assign(fx.spec.pixel_count(), TrainReport{});

    SUBCASE("all-zero weights with output bias c forecast c * clear-sky") {
        PixelMlp net(3, 2);
        net.b2 = 0.75;
        models.in_count = 3;
        models.hidden_count = 2;
        for (auto& slot : models.models) slot = net;
        const ForecastMap map = mlp_predict(fx.request(), models);
        for (std::size_t c = 0; c < map.values.size(); ++c) {
            REQUIRE(!is_missing(map.values[c]));
            CHECK(map.values[c] ==
                  doctest::Approx(0.75 * fx.clear_sky.frame(kTarget)[c]).epsilon(1e-6));
        }
    }

    SUBCASE("zero clear-sky at the target forces a zero forecast") {
        PixelMlp net(1, 1);
        net.b2 = 0.9;
        for (auto& slot : models.models) slot = net;
        for (float& v : fx.clear_sky.frame(kTarget)) v = 0.0f;
        const ForecastMap map = mlp_predict(fx.request(), models);
        for (float v : map.values) {
            REQUIRE(!is_missing(v));
            CHECK(v == 0.0f);
        }
    }

    SUBCASE("hand-built 1-input network: 2 tanh(0.5) * clear sky") {
        // w1 = 1, b1 = 0, w2 = 2, b2 = 0 on CSI = 0.5 gives
        // CSI_pred = 2 tanh(0.5) = 0.924234, clamped range untouched
        PixelMlp net(1, 1);
        net.w1 = {1.0};
        net.b1 = {0.0};
        net.w2 = {2.0};
        net.b2 = 0.0;
        for (auto& slot : models.models) slot = net;
        // make every daytime CSI exactly 0.5
        for (std::size_t t = 0; t < fx.spec.frames; ++t)
            for (std::size_t c = 0; c < fx.spec.pixel_count(); ++c)
                fx.history.frame(t)[c] = 0.5f * fx.clear_sky.frame(t)[c];
        const ForecastMap map = mlp_predict(fx.request(), models);
        const double expected_csi = 2.0 * std::tanh(0.5);
        for (std::size_t c = 0; c < map.values.size(); ++c)
            CHECK(map.values[c] ==
                  doctest::Approx(expected_csi * fx.clear_sky.frame(kTarget)[c]).epsilon(1e-6));
    }

    SUBCASE("output clamps into [0, 1.2] x clear-sky") {
        PixelMlp net(1, 1);
        net.b2 = 55.0;  // wildly extrapolating network
        for (auto& slot : models.models) slot = net;
        const ForecastMap map = mlp_predict(fx.request(), models);
        for (std::size_t c = 0; c < map.values.size(); ++c)
            CHECK(map.values[c] ==
                  doctest::Approx(1.2 * fx.clear_sky.frame(kTarget)[c]).epsilon(1e-6));
    }

    SUBCASE("insufficient CSI history yields missing") {
        PixelMlp net(48, 1);  // wants 48 daytime lags; only ~9 exist
        models.in_count = 48;
        for (auto& slot : models.models) slot = net;
        const ForecastMap map = mlp_predict(fx.request(), models);
        for (float v : map.values) CHECK(is_missing(v));
    }

    SUBCASE("untrained pixel yields missing") {
        PixelMlp net(1, 1);
        net.b2 = 0.5;
        for (auto& slot : models.models) slot = net;
        models.models[4] = std::nullopt;
        const ForecastMap map = mlp_predict(fx.request(), models);
        CHECK(is_missing(map.values[4]));
        CHECK(!is_missing(map.values[0]));
    }
}

TEST_CASE("predictors are pixel-local: permuting pixels permutes forecasts") {
    Fixture fx;
    // swap pixels (0,0) and (2,1) in both inputs
    Fixture swapped;
    auto swap_pixels = [](MapStack& stack, uint32_t i1, uint32_t j1, uint32_t i2, uint32_t j2) {
        for (std::size_t t = 0; t < stack.frame_count(); ++t)
            std::swap(stack.at(t, i1, j1), stack.at(t, i2, j2));
    };
    swap_pixels(swapped.history, 0, 0, 2, 1);
    swap_pixels(swapped.clear_sky, 0, 0, 2, 1);

    for (PredictorId id :
         {PredictorId::Persistence, PredictorId::ScaledPersistence, PredictorId::ClearSky}) {
        ForecastRequest a = fx.request();
        ForecastRequest b = swapped.request();
        ForecastMap ma, mb;
        switch (id) {
            case PredictorId::Persistence: ma = persistence(a); mb = persistence(b); break;
            case PredictorId::ScaledPersistence:
                ma = scaled_persistence(a);
                mb = scaled_persistence(b);
                break;
            default: ma = clear_sky_predictor(a); mb = clear_sky_predictor(b); break;
        }
        CHECK(ma.values[0 * 3 + 0] == mb.values[2 * 3 + 1]);
        CHECK(ma.values[2 * 3 + 1] == mb.values[0 * 3 + 0]);
        CHECK(ma.values[1 * 3 + 1] == mb.values[1 * 3 + 1]);
    }
}

TEST_CASE("forecast_stack") {
    GridSpec spec = make_spec(4, 4, 24 * 20, utc_timestamp(2015, 6, 1), 42.0, 8.8);
    const MapStack cs = clear_sky_stack(spec, ClearSkyParams{});
    const DaylightFilter filter;

    SUBCASE("clear-sky data: scaled persistence and clear-sky predictor are exact") {
        const MapStack scaled =
            forecast_stack(cs, cs, PredictorId::ScaledPersistence, nullptr, filter);
        const MapStack cspred = forecast_stack(cs, cs, PredictorId::ClearSky, nullptr, filter);
        const MapStack pers = forecast_stack(cs, cs, PredictorId::Persistence, nullptr, filter);
        CHECK(nrmse(cs, scaled, filter) <= 1e-9);
        CHECK(nrmse(cs, cspred, filter) <= 1e-9);
        CHECK(nrmse(cs, pers, filter) > 0.0);  // the diurnal ramp moves hour to hour
    }

    SUBCASE("worker count does not change the result") {
        SplitMix64 rng(3);
        MapStack truth = cs;
        for (float& v : truth.data)
            v = static_cast<float>(double(v) * rng.uniform(0.2, 1.15));
        for (PredictorId id : {PredictorId::Persistence, PredictorId::ScaledPersistence,
                               PredictorId::ClearSky}) {
            const MapStack one = forecast_stack(truth, cs, id, nullptr, filter, 1);
            const MapStack four = forecast_stack(truth, cs, id, nullptr, filter, 4);
            CHECK(one.data == four.data);
        }
    }

    SUBCASE("MLP stack forecasts stay inside [0, 1.2 x clear-sky]") {
        GridModels models;
        models.width = spec.width;
        models.height = spec.height;
        models.in_count = 2;
        models.hidden_count = 2;
        PixelMlp net(2, 2);
        net.init_weights(5);
        net.w2 = {3.0, -2.0};  // strong weights to hit the clamp sometimes
        models.models.assign(spec.pixel_count(), net);
        models.reports.assign(spec.pixel_count(), TrainReport{});

        SplitMix64 rng(4);
        MapStack truth = cs;
        for (float& v : truth.data)
            v = static_cast<float>(double(v) * rng.uniform(0.2, 1.15));
        const MapStack fc = forecast_stack(truth, cs, PredictorId::Mlp, &models, filter);
        for (std::size_t t = 0; t < fc.frame_count(); ++t) {
            for (std::size_t c = 0; c < fc.frame_size(); ++c) {
                const float v = fc.frame(t)[c];
                if (is_missing(v)) continue;
                CHECK(v >= 0.0f);
                CHECK(v <= 1.2f * cs.frame(t)[c] + 1e-4f);
            }
        }
    }
}
