#include "ssicast/predictors.hpp"

#include <cmath>

#include "ssicast/heliosat.hpp"
#include "ssicast/parallel.hpp"

namespace ssicast {

const char* to_string(PredictorId id) {
    switch (id) {
        case PredictorId::Persistence: return "persistence";
        case PredictorId::ScaledPersistence: return "scaled";
        case PredictorId::ClearSky: return "clearsky";
        case PredictorId::Mlp: return "mlp";
    }
    return "unknown";
}

PredictorId predictor_from_string(const std::string& name) {
    if (name == "persistence") return PredictorId::Persistence;
    if (name == "scaled") return PredictorId::ScaledPersistence;
    if (name == "clearsky") return PredictorId::ClearSky;
    if (name == "mlp") return PredictorId::Mlp;
    throw std::invalid_argument("unknown predictor '" + name +
                                "' (expected persistence|scaled|clearsky|mlp)");
}

void ForecastRequest::validate() const {
    if (!history || !clear_sky) throw std::invalid_argument("ForecastRequest: null stacks");
    if (!history->spec.same_geometry(clear_sky->spec) ||
        history->spec.t0 != clear_sky->spec.t0 || history->spec.step_s != clear_sky->spec.step_s)
        throw AlignmentError("ForecastRequest: grids are not identical");
    if (target_index < 1) throw std::invalid_argument("ForecastRequest: empty history");
    if (target_index >= clear_sky->spec.frames)
        throw std::invalid_argument("ForecastRequest: clear_sky does not cover target_time");
    if (history->spec.frames < target_index)
        throw std::invalid_argument("ForecastRequest: history does not reach t");
    daylight.validate();
}

namespace {

ForecastMap make_map(const ForecastRequest& req, PredictorId id) {
    ForecastMap map;
    map.spec = req.history->spec;
    map.predictor_id = id;
    map.target_time = req.target_time();
    map.values.assign(map.spec.pixel_count(), kMissingValue);
    return map;
}

// ---- per-frame kernels (shared by the one-shot ops and the batch driver) ----

void persistence_frame(std::span<const float> last, std::span<float> out) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = last[c];
}

void scaled_persistence_frame(std::span<const float> last, std::span<const float> cs_prev,
                              std::span<const float> cs_next, std::span<float> out) {
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double csi = csi_from_irradiance(last[c], cs_prev[c]);
        if (is_missing(csi) || is_missing(cs_next[c])) {
            out[c] = kMissingValue;
        } else {
            // grouped as CSI_t * I_CS(t+1): algebraically the same as
            // I_t * ratio, but exact on clear-sky data (x/x == 1)
            out[c] = static_cast<float>(csi * double(cs_next[c]));
        }
    }
}

void clear_sky_frame(std::span<const float> cs_next, std::span<float> out) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = cs_next[c];
}

/// Per-pixel MLP evaluation context: the daylight-window CSI series with
/// missing sentinels kept, the run length of valid samples ending at each
/// position, and the timestamp of each retained sample.
struct MlpPixelContext {
    std::vector<double> values;
    std::vector<int64_t> timestamps;
    std::vector<int> runlen;

    void build(const MapStack& measured, const MapStack& clear_sky, uint32_t i, uint32_t j,
               const DaylightFilter& filter) {
        PixelSeries s = csi_pixel_series(measured, clear_sky, i, j, filter);
        values = std::move(s.values);
        timestamps = std::move(s.timestamps);
        runlen.assign(values.size(), 0);
        int run = 0;
        for (std::size_t k = 0; k < values.size(); ++k) {
            run = is_missing(values[k]) ? 0 : run + 1;
            runlen[k] = run;
        }
    }

    /// Index of the last retained sample strictly before `when`, or -1.
    std::ptrdiff_t last_before(int64_t when) const {
        // series timestamps are ascending; binary search
        std::size_t lo = 0, hi = timestamps.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (timestamps[mid] < when) lo = mid + 1;
            else hi = mid;
        }
        return static_cast<std::ptrdiff_t>(lo) - 1;
    }
};

double mlp_forecast_value(const MlpPixelContext& ctx, const PixelMlp& net,
                          std::vector<double>& window, int64_t target_time, double cs_next) {
    if (is_missing(cs_next)) return kMissingValue;
    const std::ptrdiff_t k = ctx.last_before(target_time);
    const int in = net.in_count;
    if (k < 0 || ctx.runlen[std::size_t(k)] < in) return kMissingValue;
    window.resize(in);
    for (int d = 0; d < in; ++d) window[d] = ctx.values[std::size_t(k) - d];
    double csi = net.forward(window);
    if (csi < kMlpCsiClampLo) csi = kMlpCsiClampLo;
    if (csi > kMlpCsiClampHi) csi = kMlpCsiClampHi;
    return csi * cs_next;
}

}  // namespace

ForecastMap persistence(const ForecastRequest& req) {
    req.validate();
    ForecastMap map = make_map(req, PredictorId::Persistence);
    if (!req.daylight.hour_in_window(map.target_time)) return map;
    persistence_frame(req.history->frame(req.target_index - 1), map.values);
    return map;
}

ForecastMap scaled_persistence(const ForecastRequest& req) {
    req.validate();
    ForecastMap map = make_map(req, PredictorId::ScaledPersistence);
    if (!req.daylight.hour_in_window(map.target_time)) return map;
    scaled_persistence_frame(req.history->frame(req.target_index - 1),
                             req.clear_sky->frame(req.target_index - 1),
                             req.clear_sky->frame(req.target_index), map.values);
    return map;
}

ForecastMap clear_sky_predictor(const ForecastRequest& req) {
    req.validate();
    ForecastMap map = make_map(req, PredictorId::ClearSky);
    if (!req.daylight.hour_in_window(map.target_time)) return map;
    clear_sky_frame(req.clear_sky->frame(req.target_index), map.values);
    return map;
}

ForecastMap mlp_predict(const ForecastRequest& req, const GridModels& models) {
    req.validate();
    if (models.width != req.history->spec.width || models.height != req.history->spec.height)
        throw AlignmentError("mlp_predict: model grid does not match data grid");
    ForecastMap map = make_map(req, PredictorId::Mlp);
    if (!req.daylight.hour_in_window(map.target_time)) return map;

    const auto cs_next = req.clear_sky->frame(req.target_index);
    MlpPixelContext ctx;
    std::vector<double> window;
    for (uint32_t i = 0; i < map.spec.height; ++i) {
        for (uint32_t j = 0; j < map.spec.width; ++j) {
            const std::size_t px = std::size_t(i) * map.spec.width + j;
            const auto& model = models.models[px];
            if (!model || !model->finite()) continue;
            ctx.build(*req.history, *req.clear_sky, i, j, req.daylight);
            map.values[px] = static_cast<float>(
                mlp_forecast_value(ctx, *model, window, map.target_time, cs_next[px]));
        }
    }
    return map;
}

MapStack forecast_stack(const MapStack& measured, const MapStack& clear_sky, PredictorId id,
                        const GridModels* models, const DaylightFilter& filter,
                        unsigned workers) {
    if (!measured.spec.same_geometry(clear_sky.spec) || !measured.spec.same_axis(clear_sky.spec))
        throw AlignmentError("forecast_stack: stacks are not aligned");
    filter.validate();
    if (id == PredictorId::Mlp) {
        if (!models) throw std::invalid_argument("forecast_stack: mlp needs trained models");
        if (models->width != measured.spec.width || models->height != measured.spec.height)
            throw AlignmentError("forecast_stack: model grid does not match data grid");
    }

    MapStack out(measured.spec, SeriesKind::Irradiance, kMissingValue);
    const std::size_t frames = measured.frame_count();
    if (frames < 2) return out;

    if (id == PredictorId::Mlp) {
        // pixels are the work unit so the CSI series is built once per pixel
        parallel_for(measured.spec.pixel_count(), workers, [&](std::size_t px) {
            const auto i = static_cast<uint32_t>(px / measured.spec.width);
            const auto j = static_cast<uint32_t>(px % measured.spec.width);
            const auto& model = models->models[px];
            if (!model || !model->finite()) return;
            MlpPixelContext ctx;
            ctx.build(measured, clear_sky, i, j, filter);
            std::vector<double> window;
            for (std::size_t t = 1; t < frames; ++t) {
                const int64_t when = measured.spec.timestamp(t);
                if (!filter.hour_in_window(when)) continue;
                out.frame(t)[px] = static_cast<float>(
                    mlp_forecast_value(ctx, *model, window, when, clear_sky.at(t, i, j)));
            }
        });
        return out;
    }

    parallel_for(frames - 1, workers, [&](std::size_t k) {
        const std::size_t t = k + 1;
        if (!filter.hour_in_window(measured.spec.timestamp(t))) return;
        auto dst = out.frame(t);
        switch (id) {
            case PredictorId::Persistence:
                persistence_frame(measured.frame(t - 1), dst);
                break;
            case PredictorId::ScaledPersistence:
                scaled_persistence_frame(measured.frame(t - 1), clear_sky.frame(t - 1),
                                         clear_sky.frame(t), dst);
                break;
            case PredictorId::ClearSky:
                clear_sky_frame(clear_sky.frame(t), dst);
                break;
            case PredictorId::Mlp:
                break;  // handled above
        }
    });
    return out;
}

}  // namespace ssicast
