#ifndef SSICAST_PREDICTORS_HPP
#define SSICAST_PREDICTORS_HPP

#include <string>

#include "ssicast/grid.hpp"
#include "ssicast/mlp_train.hpp"

namespace ssicast {

enum class PredictorId { Persistence, ScaledPersistence, ClearSky, Mlp };

const char* to_string(PredictorId id);
PredictorId predictor_from_string(const std::string& name);  // CLI names

/// Inputs of one next-hour forecast: measured history through t and the
/// clear-sky stack covering t+1, on the same grid and axis. target_index is
/// the frame index of t+1 on that shared axis. Forecasts are only emitted
/// for target hours inside the daylight window; outside it the whole map is
/// missing.
struct ForecastRequest {
    const MapStack* history = nullptr;
    const MapStack* clear_sky = nullptr;
    std::size_t target_index = 0;
    DaylightFilter daylight;

    int64_t target_time() const { return clear_sky->spec.timestamp(target_index); }
    void validate() const;
};

struct ForecastMap {
    GridSpec spec;
    PredictorId predictor_id = PredictorId::Persistence;
    int64_t target_time = 0;
    std::vector<float> values;  // height*width, missing sentinel where undefined
};

/// Network outputs (predicted CSI) are clamped to this range before scaling
/// by the clear-sky irradiation.
inline constexpr double kMlpCsiClampLo = 0.0;
inline constexpr double kMlpCsiClampHi = 1.2;

ForecastMap persistence(const ForecastRequest& req);
ForecastMap scaled_persistence(const ForecastRequest& req);
ForecastMap clear_sky_predictor(const ForecastRequest& req);
ForecastMap mlp_predict(const ForecastRequest& req, const GridModels& models);

/// Batch driver: forecasts every target frame 1..frames-1 of the measured
/// stack and returns them as a stack aligned with it (frame 0 all missing).
/// Pixels are independent work units; output is identical for any worker
/// count.
MapStack forecast_stack(const MapStack& measured, const MapStack& clear_sky, PredictorId id,
                        const GridModels* models, const DaylightFilter& filter,
                        unsigned workers = 1);

}  // namespace ssicast

#endif
