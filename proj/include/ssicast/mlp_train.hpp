#ifndef SSICAST_MLP_TRAIN_HPP
#define SSICAST_MLP_TRAIN_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ssicast/grid.hpp"
#include "ssicast/mlp.hpp"

namespace ssicast {

struct TrainConfig {
    double train_frac = 0.8;
    double val_frac = 0.2;
    double test_frac = 0.0;
    int max_fail = 3;         // epochs since best validation before stopping
    int max_epochs = 1000;
    double lambda0 = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 10.0;
    double lambda_max = 1e10;
    double min_gradient = 1e-10;  // stop when ||J^T e||_inf falls below

    void validate() const;
};

enum class StopReason { MaxFail, MaxEpochs, GradientSmall };

const char* to_string(StopReason reason);

struct TrainReport {
    double train_mse = 0.0;  // at the returned (best-validation) weights
    double val_mse = 0.0;
    int epochs = 0;
    StopReason stop_reason = StopReason::MaxEpochs;
};

struct TrainingSet {
    Eigen::MatrixXd inputs;   // rows = windows, cols = in_count (lag 1 first)
    Eigen::VectorXd targets;  // next value per window
};

/// Sliding windows over the series: row k is (v[k], v[k-1], ..., v[k-In+1])
/// with target v[k+1]; windows touching a missing sample are dropped and
/// chronological order is preserved. Throws InsufficientDataError when
/// fewer than In + 2 valid samples survive.
TrainingSet build_training_set(const PixelSeries& series, int in_count);

/// (J^T J + lambda I) delta = J^T e with e = targets - outputs; the Gauss-
/// Newton step of the damped least-squares iteration.
Eigen::VectorXd lm_delta(const PixelMlp& net, const Eigen::MatrixXd& inputs,
                         const Eigen::VectorXd& targets, double lambda);

/// Convenience: candidate network with the lambda-damped step applied.
PixelMlp lm_step(const PixelMlp& net, const Eigen::MatrixXd& inputs,
                 const Eigen::VectorXd& targets, double lambda);

double mse(const PixelMlp& net, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets);

/// Levenberg-Marquardt fit with chronological 80/20 split and early
/// stopping; returns the weights of the best validation epoch. Deterministic
/// for a fixed seed. Throws TrainingDivergedError if the loss goes
/// non-finite and damping escalation cannot recover.
struct TrainResult {
    PixelMlp net;
    TrainReport report;
};

TrainResult train_on_set(const TrainingSet& set, const TrainConfig& cfg, int in_count,
                         int hidden_count, uint64_t seed);

TrainResult train(const PixelSeries& series, const TrainConfig& cfg, uint64_t seed,
                  int in_count = 7, int hidden_count = 7);

/// Grid driver: one independent training job per pixel, seeded
/// seed ^ linear pixel index. Pixels with insufficient data yield an empty
/// optional. Results are independent of worker count.
struct GridModels {
    uint32_t width = 0;
    uint32_t height = 0;
    int in_count = 7;
    int hidden_count = 7;
    uint64_t seed = 0;
    int64_t train_t_begin = 0;  // informational: first/last timestamp seen
    int64_t train_t_end = 0;
    std::vector<std::optional<PixelMlp>> models;  // row-major
    std::vector<TrainReport> reports;             // aligned; default for untrained

    const std::optional<PixelMlp>& at(uint32_t i, uint32_t j) const {
        return models[std::size_t(i) * width + j];
    }
};

GridModels train_grid(const MapStack& irradiance, const MapStack& clear_sky,
                      const DaylightFilter& filter, const TrainConfig& cfg, int in_count,
                      int hidden_count, uint64_t seed, unsigned workers = 1);

/// Model bundle: text header, then per-pixel blocks of f64 LE weights in
/// row-major pixel order ([w1, b1, w2, b2]); untrained pixels are NaN-filled
/// blocks. Round-trips exactly.
void save_models(const GridModels& models, const std::string& path);
GridModels load_models(const std::string& path);

}  // namespace ssicast

#endif
