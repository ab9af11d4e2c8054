// Command-line front end for the irradiance-map forecasting pipeline:
//   generate -> lagselect -> train -> predict -> evaluate -> report
// Every stage reads and writes artifacts on disk so runs are resumable and
// each stage is independently testable. Given identical config and seed the
// outputs are byte-identical.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ssicast/clearsky.hpp"
#include "ssicast/config.hpp"
#include "ssicast/heliosat.hpp"
#include "ssicast/lagselect.hpp"
#include "ssicast/metrics.hpp"
#include "ssicast/mlp_train.hpp"
#include "ssicast/parallel.hpp"
#include "ssicast/predictors.hpp"
#include "ssicast/synthgen.hpp"

namespace fs = std::filesystem;
using namespace ssicast;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    int64_t seed = -1;
    int workers = 0;
};

RunConfig load_run_config(const GlobalArgs& args) {
    KeyValueConfig kv;
    if (!args.config_path.empty()) kv = KeyValueConfig::load(args.config_path);
    RunConfig rc = RunConfig::from_config(kv);
    if (!args.out_dir.empty()) rc.out_dir = args.out_dir;
    if (args.seed >= 0) {
        rc.seed = static_cast<uint64_t>(args.seed);
        rc.cloud.seed = rc.seed;
    }
    if (args.workers > 0) rc.workers = static_cast<unsigned>(args.workers);
    fs::create_directories(rc.out_dir);
    return rc;
}

std::vector<std::pair<std::string, std::string>> base_sidecar(const RunConfig& rc,
                                                              const std::string& stage) {
    return {
        {"stage", stage},
        {"seed", std::to_string(rc.seed)},
    };
}

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

MapStack load_required_stack(const RunConfig& rc, const std::string& name,
                             const std::string& produced_by) {
    const std::string path = rc.path(name);
    if (!fs::exists(path))
        throw std::runtime_error("missing input " + path + " (run '" + produced_by +
                                 "' first)");
    return read_stack(path);
}

// ---- generate ----

int cmd_generate(const RunConfig& rc) {
    SynthResult synth = generate(rc.grid, rc.clear_sky, rc.cloud, rc.workers);

    write_stack(synth.truth, rc.path("truth.ssi1"));
    write_stack(synth.cloud, rc.path("cloud.ssi1"));
    write_stack(synth.clear_sky, rc.path("clearsky.ssi1"));

    auto meta = base_sidecar(rc, "generate");
    meta.emplace_back("cloud_mode", to_string(rc.cloud.mode));
    meta.emplace_back("linke_turbidity", fmt_double(rc.clear_sky.linke_turbidity));
    meta.emplace_back("frames", std::to_string(rc.grid.frames));
    write_sidecar(rc.path("truth.ssi1"), meta);
    write_sidecar(rc.path("cloud.ssi1"), meta);
    write_sidecar(rc.path("clearsky.ssi1"), meta);

    std::cout << "generate: wrote " << rc.grid.frames << " frames of "
              << rc.grid.width << "x" << rc.grid.height << " to " << rc.out_dir << "\n";
    return 0;
}

// ---- lagselect ----

int cmd_lagselect(const RunConfig& rc, const std::string& curve_pixel) {
    const MapStack truth = load_required_stack(rc, "truth.ssi1", "generate");
    const MapStack cs = load_required_stack(rc, "clearsky.ssi1", "generate");

    const std::size_t npx = truth.spec.pixel_count();
    std::vector<MiCurve> curves(npx);
    parallel_for(npx, rc.workers, [&](std::size_t px) {
        const auto i = static_cast<uint32_t>(px / truth.spec.width);
        const auto j = static_cast<uint32_t>(px % truth.spec.width);
        const PixelSeries csi = csi_pixel_series(truth, cs, i, j, rc.filter);
        curves[px] = auto_mi_curve(csi, rc.tau_max, rc.mi_bins);
    });

    const std::string lags_path = rc.path("lags.csv");
    {
        std::ofstream out(lags_path, std::ios::trunc);
        out << "i,j,selected_lag,minimum_found\n";
        for (std::size_t px = 0; px < npx; ++px) {
            out << px / truth.spec.width << "," << px % truth.spec.width << ","
                << curves[px].selected_lag << "," << (curves[px].minimum_found ? 1 : 0)
                << "\n";
        }
    }
    write_sidecar(lags_path, base_sidecar(rc, "lagselect"));

    const LagSummary summary = grid_lag_statistics(curves);
    const std::string summary_path = rc.path("lag_summary.csv");
    {
        std::ofstream out(summary_path, std::ios::trunc);
        out << "min,max,mean,median,stddev,count\n";
        out << summary.min << "," << summary.max << "," << fmt_double(summary.mean) << ","
            << fmt_double(summary.median) << "," << fmt_double(summary.stddev) << ","
            << summary.count << "\n";
    }
    write_sidecar(summary_path, base_sidecar(rc, "lagselect"));

    if (!curve_pixel.empty()) {
        unsigned i = 0, j = 0;
        if (std::sscanf(curve_pixel.c_str(), "%u,%u", &i, &j) != 2)
            throw std::invalid_argument("--pixel expects i,j");
        const std::size_t px = std::size_t(i) * truth.spec.width + j;
        if (px >= npx) throw std::out_of_range("--pixel out of range");
        const std::string curve_path =
            rc.path("mi_curve_" + std::to_string(i) + "_" + std::to_string(j) + ".csv");
        std::ofstream out(curve_path, std::ios::trunc);
        out << "lag,mi_bits\n";
        for (std::size_t k = 0; k < curves[px].lags.size(); ++k)
            out << curves[px].lags[k] << "," << fmt_double(curves[px].mi[k]) << "\n";
        write_sidecar(curve_path, base_sidecar(rc, "lagselect"));
    }

    std::cout << "lagselect: median " << summary.median << " (min " << summary.min << ", max "
              << summary.max << ", mean " << summary.mean << ", sd " << summary.stddev
              << ") over " << summary.count << " pixels\n";
    return 0;
}

// ---- train ----

int cmd_train(const RunConfig& rc) {
    const MapStack truth = load_required_stack(rc, "truth.ssi1", "generate");
    const MapStack cs = load_required_stack(rc, "clearsky.ssi1", "generate");

    const GridModels models = train_grid(truth, cs, rc.filter, rc.train, rc.in_count,
                                         rc.hidden_count, rc.seed, rc.workers);
    const std::string path = rc.path("models.mlp");
    save_models(models, path);

    std::size_t trained = 0;
    for (const auto& m : models.models)
        if (m) ++trained;
    auto meta = base_sidecar(rc, "train");
    meta.emplace_back("in_count", std::to_string(rc.in_count));
    meta.emplace_back("hidden_count", std::to_string(rc.hidden_count));
    meta.emplace_back("trained_pixels", std::to_string(trained));
    write_sidecar(path, meta);

    const std::string report_path = rc.path("train_report.csv");
    {
        std::ofstream out(report_path, std::ios::trunc);
        out << "i,j,epochs,stop_reason,train_mse,val_mse\n";
        for (std::size_t px = 0; px < models.models.size(); ++px) {
            if (!models.models[px]) continue;
            const TrainReport& r = models.reports[px];
            out << px / models.width << "," << px % models.width << "," << r.epochs << ","
                << to_string(r.stop_reason) << "," << fmt_double(r.train_mse) << ","
                << fmt_double(r.val_mse) << "\n";
        }
    }
    write_sidecar(report_path, base_sidecar(rc, "train"));

    std::cout << "train: " << trained << "/" << models.models.size() << " pixels trained -> "
              << path << "\n";
    return 0;
}

// ---- predict ----

int cmd_predict(const RunConfig& rc, const std::string& predictor) {
    const PredictorId id = predictor_from_string(predictor);
    const MapStack truth = load_required_stack(rc, "truth.ssi1", "generate");
    const MapStack cs = load_required_stack(rc, "clearsky.ssi1", "generate");

    GridModels models;
    if (id == PredictorId::Mlp) {
        const std::string mpath = rc.path("models.mlp");
        if (!fs::exists(mpath))
            throw std::runtime_error("missing " + mpath + " (run 'train' first)");
        models = load_models(mpath);
    }

    const GridModels* model_ptr = id == PredictorId::Mlp ? &models : nullptr;

    // retrospective stack, aligned with the truth axis (frame 0 has no
    // history and stays missing)
    if (truth.spec.frames >= 2) {
        const MapStack forecast = forecast_stack(truth, cs, id, model_ptr, rc.filter,
                                                 rc.workers);
        const std::string path = rc.path(std::string("forecast_") + to_string(id) + ".ssi1");
        write_stack(forecast, path);
        auto meta = base_sidecar(rc, "predict");
        meta.emplace_back("predictor", to_string(id));
        meta.emplace_back("target_time",
                          std::to_string(forecast.spec.timestamp(1)) + ".." +
                              std::to_string(forecast.spec.timestamp(forecast.spec.frames - 1)));
        write_sidecar(path, meta);
        std::cout << "predict: " << to_string(id) << " -> " << path << "\n";
    }

    // the operational product: the hour after the last observation, against
    // a clear-sky axis extended by one frame (works from a 1-frame history)
    MapStack extended = cs;
    extended.spec.frames += 1;
    {
        GridSpec tail = cs.spec;
        tail.t0 = cs.spec.timestamp(cs.spec.frames);
        tail.frames = 1;
        const MapStack last = clear_sky_stack(tail, rc.clear_sky, rc.workers);
        extended.data.insert(extended.data.end(), last.data.begin(), last.data.end());
    }
    ForecastRequest req;
    req.history = &truth;
    req.clear_sky = &extended;
    req.target_index = truth.spec.frames;
    req.daylight = rc.filter;
    ForecastMap next;
    switch (id) {
        case PredictorId::Persistence: next = persistence(req); break;
        case PredictorId::ScaledPersistence: next = scaled_persistence(req); break;
        case PredictorId::ClearSky: next = clear_sky_predictor(req); break;
        case PredictorId::Mlp: next = mlp_predict(req, models); break;
    }
    GridSpec next_spec = truth.spec;
    next_spec.t0 = next.target_time;
    next_spec.frames = 1;
    MapStack next_stack(next_spec, SeriesKind::Irradiance);
    std::copy(next.values.begin(), next.values.end(), next_stack.frame(0).begin());
    const std::string next_path = rc.path(std::string("nexthour_") + to_string(id) + ".ssi1");
    write_stack(next_stack, next_path);
    auto meta = base_sidecar(rc, "predict");
    meta.emplace_back("predictor", to_string(id));
    meta.emplace_back("target_time", std::to_string(next.target_time));
    write_sidecar(next_path, meta);
    std::cout << "predict: " << to_string(id) << " next hour -> " << next_path << "\n";
    return 0;
}

// ---- evaluate ----

int cmd_evaluate(const RunConfig& rc, const std::string& predictor, int mask_frame) {
    const PredictorId id = predictor_from_string(predictor);
    const MapStack truth = load_required_stack(rc, "truth.ssi1", "generate");
    const std::string fpath = rc.path(std::string("forecast_") + to_string(id) + ".ssi1");
    if (!fs::exists(fpath))
        throw std::runtime_error("missing " + fpath + " (run 'predict' first)");
    const MapStack forecast = read_stack(fpath);

    const ErrorSummary err = nrmse_summary(truth, forecast, rc.filter);
    const GammaStackResult gres = gamma_stack(truth, forecast, rc.gamma, rc.filter, rc.workers);

    const std::string metrics_path =
        rc.path(std::string("metrics_") + to_string(id) + ".csv");
    {
        std::ofstream out(metrics_path, std::ios::trunc);
        out << "predictor,nrmse,mean_error,n_samples,gamma_mean,gp_percent,evaluated\n";
        out << to_string(id) << "," << fmt_double(err.nrmse) << ","
            << fmt_double(err.mean_error) << "," << err.n_samples << ","
            << fmt_double(gres.gamma_mean) << "," << fmt_double(gres.passing_rate) << ","
            << gres.evaluated << "\n";
    }
    write_sidecar(metrics_path, base_sidecar(rc, "evaluate"));

    // per-pixel nRMSE raster (spatial error repartition)
    {
        const auto raster = nrmse_map(truth, forecast, rc.filter);
        GridSpec one = truth.spec;
        one.frames = 1;
        MapStack nstack(one, SeriesKind::ClearSkyIndex, kMissingValue);
        std::copy(raster.begin(), raster.end(), nstack.frame(0).begin());
        const std::string npath =
            rc.path(std::string("nrmse_map_") + to_string(id) + ".ssi1");
        write_stack(nstack, npath);
        write_sidecar(npath, base_sidecar(rc, "evaluate"));
    }

    // gamma stack (unitless; reuses the index kind tag)
    MapStack gstack(truth.spec, SeriesKind::ClearSkyIndex, kMissingValue);
    for (std::size_t t = 0; t < gres.frames.size(); ++t) {
        if (gres.frames[t].gamma_map.empty()) continue;
        std::copy(gres.frames[t].gamma_map.begin(), gres.frames[t].gamma_map.end(),
                  gstack.frame(t).begin());
    }
    const std::string gpath = rc.path(std::string("gamma_") + to_string(id) + ".ssi1");
    write_stack(gstack, gpath);
    write_sidecar(gpath, base_sidecar(rc, "evaluate"));

    // per-frame passing rates
    const std::string frames_path = rc.path(std::string("gp_frames_") + to_string(id) + ".csv");
    {
        std::ofstream out(frames_path, std::ios::trunc);
        out << "frame,timestamp,evaluated,passed,gp_percent,gamma_mean\n";
        for (std::size_t t = 0; t < gres.frames.size(); ++t) {
            const GammaResult& r = gres.frames[t];
            if (r.gamma_map.empty()) continue;
            out << t << "," << truth.spec.timestamp(t) << "," << r.evaluated << "," << r.passed
                << "," << fmt_double(r.passing_rate) << "," << fmt_double(r.gamma_mean) << "\n";
        }
    }
    write_sidecar(frames_path, base_sidecar(rc, "evaluate"));

    // pass-mask preview for one frame (default: first evaluated frame)
    std::size_t preview = gres.frames.size();
    if (mask_frame >= 0 && std::size_t(mask_frame) < gres.frames.size() &&
        !gres.frames[std::size_t(mask_frame)].gamma_map.empty()) {
        preview = std::size_t(mask_frame);
    } else {
        for (std::size_t t = 0; t < gres.frames.size(); ++t)
            if (gres.frames[t].evaluated > 0) {
                preview = t;
                break;
            }
    }
    if (preview < gres.frames.size()) {
        const std::string pgm_path = rc.path(std::string("gamma_mask_") + to_string(id) + "_f" +
                                             std::to_string(preview) + ".pgm");
        write_pass_mask_pgm(gres.frames[preview], truth.spec.width, truth.spec.height, pgm_path);
        write_sidecar(pgm_path, base_sidecar(rc, "evaluate"));
    }

    std::cout << "evaluate: " << to_string(id) << " nRMSE " << err.nrmse << "% over "
              << err.n_samples << " pixel-hours, %GP " << gres.passing_rate << " (mean gamma "
              << gres.gamma_mean << ")\n";
    return 0;
}

// ---- report ----

int cmd_report(const RunConfig& rc) {
    const MapStack truth = load_required_stack(rc, "truth.ssi1", "generate");

    std::vector<std::pair<std::string, MapStack>> loaded;
    for (const char* name : {"persistence", "scaled", "clearsky", "mlp"}) {
        const std::string path = rc.path(std::string("forecast_") + name + ".ssi1");
        if (fs::exists(path)) loaded.emplace_back(name, read_stack(path));
    }
    if (loaded.empty())
        throw std::runtime_error("report: no forecast stacks in " + rc.out_dir +
                                 " (run 'predict' first)");

    std::vector<std::pair<std::string, const MapStack*>> predictions;
    predictions.reserve(loaded.size());
    for (const auto& [name, stack] : loaded) predictions.emplace_back(name, &stack);

    const auto rows = seasonal_report(truth, predictions, rc.gamma, rc.filter, rc.workers);
    const std::string path = rc.path("report.csv");
    write_report_csv(rows, path);
    write_sidecar(path, base_sidecar(rc, "report"));

    std::cout << "report: " << loaded.size() << " predictors -> " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-D next-hour irradiance forecasting on satellite-style raster stacks"};
    app.require_subcommand(1);

    GlobalArgs args;
    app.add_option("--config", args.config_path, "key=value config file");
    app.add_option("--out", args.out_dir, "output directory (overrides config)");
    app.add_option("--seed", args.seed, "RNG seed (overrides config)");
    app.add_option("--workers", args.workers, "worker thread count (overrides config)");

    auto* generate_cmd = app.add_subcommand("generate", "synthesize truth/cloud/clear-sky stacks");
    auto* lagselect_cmd =
        app.add_subcommand("lagselect", "per-pixel auto-MI lag selection and grid statistics");
    std::string curve_pixel;
    lagselect_cmd->add_option("--pixel", curve_pixel, "emit the MI curve CSV for pixel i,j");

    auto* train_cmd = app.add_subcommand("train", "train one MLP per pixel on CSI series");

    std::string predictor = "scaled";
    auto* predict_cmd = app.add_subcommand("predict", "write a forecast stack");
    predict_cmd->add_option("--predictor", predictor,
                            "persistence|scaled|clearsky|mlp");

    std::string eval_predictor = "scaled";
    int mask_frame = -1;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "nRMSE + gamma maps for one forecast");
    evaluate_cmd->add_option("--predictor", eval_predictor, "persistence|scaled|clearsky|mlp");
    evaluate_cmd->add_option("--frame", mask_frame, "frame index for the pass-mask preview");

    auto* report_cmd = app.add_subcommand("report", "seasonal comparison table across predictors");

    CLI11_PARSE(app, argc, argv);

    std::string stage = "startup";
    try {
        const RunConfig rc = load_run_config(args);
        if (generate_cmd->parsed()) return stage = "generate", cmd_generate(rc);
        if (lagselect_cmd->parsed()) return stage = "lagselect", cmd_lagselect(rc, curve_pixel);
        if (train_cmd->parsed()) return stage = "train", cmd_train(rc);
        if (predict_cmd->parsed()) return stage = "predict", cmd_predict(rc, predictor);
        if (evaluate_cmd->parsed())
            return stage = "evaluate", cmd_evaluate(rc, eval_predictor, mask_frame);
        if (report_cmd->parsed()) return stage = "report", cmd_report(rc);
    } catch (const std::exception& e) {
        std::cerr << "error in " << stage << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
