#include "ssicast/mlp_train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "ssicast/heliosat.hpp"
#include "ssicast/parallel.hpp"
#include "ssicast/rng.hpp"

namespace ssicast {

void TrainConfig::validate() const {
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("TrainConfig: fractions must sum to 1");
    if (train_frac <= 0.0 || val_frac < 0.0 || test_frac < 0.0)
        throw std::invalid_argument("TrainConfig: bad split fractions");
    if (max_fail < 1) throw std::invalid_argument("TrainConfig: max_fail must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::MaxFail: return "max_fail";
        case StopReason::MaxEpochs: return "max_epochs";
        case StopReason::GradientSmall: return "gradient_small";
    }
    return "unknown";
}

TrainingSet build_training_set(const PixelSeries& series, int in_count) {
    if (in_count < 1) throw std::invalid_argument("build_training_set: in_count must be >= 1");
    const std::size_t n = series.size();
    if (n <= std::size_t(in_count))
        throw InsufficientDataError("build_training_set: series shorter than window");

    std::vector<std::size_t> rows;
    for (std::size_t k = in_count - 1; k + 1 < n; ++k) {
        bool ok = !is_missing(series.values[k + 1]);
        for (int d = 0; ok && d < in_count; ++d) ok = !is_missing(series.values[k - d]);
        if (ok) rows.push_back(k);
    }
    if (rows.size() < 2)
        throw InsufficientDataError("build_training_set: fewer than " +
                                    std::to_string(in_count + 2) + " valid samples");

    TrainingSet set;
    set.inputs.resize(static_cast<Eigen::Index>(rows.size()), in_count);
    set.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t k = rows[r];
        for (int d = 0; d < in_count; ++d)
            set.inputs(static_cast<Eigen::Index>(r), d) = series.values[k - d];
        set.targets(static_cast<Eigen::Index>(r)) = series.values[k + 1];
    }
    return set;
}

namespace {

/// Residuals e = targets - outputs and the transposed Jacobian of the
/// outputs (one contiguous column per sample).
void residuals_and_jacobian(const PixelMlp& net, const Eigen::MatrixXd& inputs,
                            const Eigen::VectorXd& targets, Eigen::VectorXd& e,
                            Eigen::MatrixXd& jac_t) {
    const Eigen::Index n = inputs.rows();
    const auto nw = static_cast<Eigen::Index>(net.weight_count());
    e.resize(n);
    jac_t.resize(nw, n);
    std::vector<double> row(inputs.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < inputs.cols(); ++c) row[c] = inputs(r, c);
        std::span<double> grad(jac_t.col(r).data(), std::size_t(nw));
        e(r) = targets(r) - net.forward_with_gradient(row, grad);
    }
}

}  // namespace

Eigen::VectorXd lm_delta(const PixelMlp& net, const Eigen::MatrixXd& inputs,
                         const Eigen::VectorXd& targets, double lambda) {
    Eigen::VectorXd e;
    Eigen::MatrixXd jac_t;
    residuals_and_jacobian(net, inputs, targets, e, jac_t);
    Eigen::MatrixXd jtj = Eigen::MatrixXd::Zero(jac_t.rows(), jac_t.rows());
    jtj.selfadjointView<Eigen::Lower>().rankUpdate(jac_t);
    jtj.diagonal().array() += lambda;
    const Eigen::VectorXd jte = jac_t * e;
    return jtj.selfadjointView<Eigen::Lower>().ldlt().solve(jte);
}

PixelMlp lm_step(const PixelMlp& net, const Eigen::MatrixXd& inputs,
                 const Eigen::VectorXd& targets, double lambda) {
    const Eigen::VectorXd delta = lm_delta(net, inputs, targets, lambda);
    std::vector<double> theta(net.weight_count());
    net.to_params(theta);
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += delta(static_cast<Eigen::Index>(k));
    PixelMlp out = net;
    out.from_params(theta);
    return out;
}

double mse(const PixelMlp& net, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
    const Eigen::Index n = inputs.rows();
    if (n == 0) return 0.0;
    double s = 0.0;
    std::vector<double> row(inputs.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < inputs.cols(); ++c) row[c] = inputs(r, c);
        const double d = targets(r) - net.forward(row);
        s += d * d;
    }
    return s / static_cast<double>(n);
}

TrainResult train_on_set(const TrainingSet& set, const TrainConfig& cfg, int in_count,
                         int hidden_count, uint64_t seed) {
    cfg.validate();
    const Eigen::Index n = set.inputs.rows();
    if (n < 2) throw InsufficientDataError("train: need at least 2 windows");
    if (set.inputs.cols() != in_count)
        throw std::invalid_argument("train: training set does not match in_count");

    // chronological split: earliest train_frac trains, the tail validates
    Eigen::Index n_val = static_cast<Eigen::Index>(std::llround(cfg.val_frac * double(n)));
    if (cfg.val_frac > 0.0 && n_val < 1) n_val = 1;
    if (n_val > n - 1) n_val = n - 1;
    const Eigen::Index n_train = n - n_val;

    const Eigen::MatrixXd x_train = set.inputs.topRows(n_train);
    const Eigen::VectorXd y_train = set.targets.head(n_train);
    const Eigen::MatrixXd x_val = set.inputs.bottomRows(n_val);
    const Eigen::VectorXd y_val = set.targets.tail(n_val);
    const bool has_val = n_val > 0;

    PixelMlp net(in_count, hidden_count);
    net.init_weights(seed);

    const auto nw = static_cast<Eigen::Index>(net.weight_count());
    Eigen::VectorXd e;
    Eigen::MatrixXd jac_t;
    Eigen::MatrixXd jtj(nw, nw);
    Eigen::VectorXd theta(nw), cand(nw);

    double lambda = cfg.lambda0;
    double train_mse = mse(net, x_train, y_train);
    if (!std::isfinite(train_mse)) throw TrainingDivergedError("train: non-finite initial loss");

    PixelMlp best = net;
    double best_val = has_val ? mse(net, x_val, y_val) : train_mse;
    double best_train = train_mse;
    int fail = 0;
    int epoch = 0;
    StopReason reason = StopReason::MaxEpochs;

    while (epoch < cfg.max_epochs) {
        ++epoch;
        residuals_and_jacobian(net, x_train, y_train, e, jac_t);
        const Eigen::VectorXd jte = jac_t * e;
        if (jte.lpNorm<Eigen::Infinity>() < cfg.min_gradient) {
            reason = StopReason::GradientSmall;
            --epoch;  // no step taken this round
            break;
        }
        jtj.setZero();
        jtj.selfadjointView<Eigen::Lower>().rankUpdate(jac_t);  // lower triangle only

        // inner damping loop: escalate lambda until the step reduces the
        // training MSE
        bool accepted = false;
        while (lambda <= cfg.lambda_max) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd delta = damped.selfadjointView<Eigen::Lower>().ldlt().solve(jte);
            net.to_params(std::span<double>(theta.data(), std::size_t(nw)));
            cand = theta + delta;
            PixelMlp candidate = net;
            candidate.from_params(std::span<const double>(cand.data(), std::size_t(nw)));
            const double cand_mse = mse(candidate, x_train, y_train);
            if (std::isfinite(cand_mse) && cand_mse < train_mse) {
                net = candidate;
                train_mse = cand_mse;
                lambda /= cfg.lambda_down;
                if (lambda < 1e-20) lambda = 1e-20;
                accepted = true;
                break;
            }
            lambda *= cfg.lambda_up;
        }
        if (!accepted) {
            if (!std::isfinite(train_mse))
                throw TrainingDivergedError("train: loss went non-finite");
            // damping maxed out without making progress: the step size is
            // effectively zero, treat as a vanished gradient
            reason = StopReason::GradientSmall;
            break;
        }

        if (has_val) {
            const double val = mse(net, x_val, y_val);
            if (val < best_val) {
                best_val = val;
                best = net;
                best_train = train_mse;
                fail = 0;
            } else {
                ++fail;
                if (fail >= cfg.max_fail) {
                    reason = StopReason::MaxFail;
                    break;
                }
            }
        } else {
            best = net;
            best_val = train_mse;
            best_train = train_mse;
        }
    }

    TrainResult result;
    result.net = best;
    result.report.train_mse = best_train;
    result.report.val_mse = best_val;
    result.report.epochs = epoch;
    result.report.stop_reason = reason;
    return result;
}

TrainResult train(const PixelSeries& series, const TrainConfig& cfg, uint64_t seed,
                  int in_count, int hidden_count) {
    return train_on_set(build_training_set(series, in_count), cfg, in_count, hidden_count, seed);
}

GridModels train_grid(const MapStack& irradiance, const MapStack& clear_sky,
                      const DaylightFilter& filter, const TrainConfig& cfg, int in_count,
                      int hidden_count, uint64_t seed, unsigned workers) {
    if (!irradiance.spec.same_geometry(clear_sky.spec) ||
        !irradiance.spec.same_axis(clear_sky.spec))
        throw AlignmentError("train_grid: stacks are not aligned");
    cfg.validate();

    GridModels grid;
    grid.width = irradiance.spec.width;
    grid.height = irradiance.spec.height;
    grid.in_count = in_count;
    grid.hidden_count = hidden_count;
    grid.seed = seed;
    grid.train_t_begin = irradiance.spec.t0;
    grid.train_t_end = irradiance.spec.timestamp(
        irradiance.spec.frames == 0 ? 0 : irradiance.spec.frames - 1);
    const std::size_t npx = irradiance.spec.pixel_count();
    grid.models.assign(npx, std::nullopt);
    grid.reports.assign(npx, TrainReport{});

    parallel_for(npx, workers, [&](std::size_t px) {
        const auto i = static_cast<uint32_t>(px / irradiance.spec.width);
        const auto j = static_cast<uint32_t>(px % irradiance.spec.width);
        const PixelSeries csi = csi_pixel_series(irradiance, clear_sky, i, j, filter);
        try {
            TrainResult r = train(csi, cfg, seed ^ static_cast<uint64_t>(px), in_count,
                                  hidden_count);
            grid.models[px] = std::move(r.net);
            grid.reports[px] = r.report;
        } catch (const InsufficientDataError&) {
            // pixel stays untrained; predictors emit missing there
        }
    });
    return grid;
}

namespace {

void put_f64le_stream(std::ofstream& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char buf[8];
    for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

double get_f64le(const unsigned char* p) {
    uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= uint64_t(p[k]) << (8 * k);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_models(const GridModels& models, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "SSIMLP 1\n";
    out << "width " << models.width << "\n";
    out << "height " << models.height << "\n";
    out << "in " << models.in_count << "\n";
    out << "hidden " << models.hidden_count << "\n";
    out << "seed " << models.seed << "\n";
    out << "train_t_begin " << models.train_t_begin << "\n";
    out << "train_t_end " << models.train_t_end << "\n";
    out << "end\n";

    const std::size_t block =
        std::size_t(models.hidden_count) * models.in_count + 2 * std::size_t(models.hidden_count) + 1;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> theta(block);
    for (const auto& m : models.models) {
        if (m) {
            m->to_params(theta);
        } else {
            std::fill(theta.begin(), theta.end(), nan);
        }
        for (double v : theta) put_f64le_stream(out, v);
    }
    if (!out) throw std::runtime_error("short write to " + path);
}

GridModels load_models(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);

    GridModels models;
    std::string line;
    if (!std::getline(in, line) || line != "SSIMLP 1")
        throw FormatError(path + ": not a model bundle (bad first line)");
    bool saw_end = false;
    while (std::getline(in, line)) {
        if (line == "end") {
            saw_end = true;
            break;
        }
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "width") ss >> models.width;
        else if (key == "height") ss >> models.height;
        else if (key == "in") ss >> models.in_count;
        else if (key == "hidden") ss >> models.hidden_count;
        else if (key == "seed") ss >> models.seed;
        else if (key == "train_t_begin") ss >> models.train_t_begin;
        else if (key == "train_t_end") ss >> models.train_t_end;
        else throw FormatError(path + ": unknown header key '" + key + "'");
        if (ss.fail()) throw FormatError(path + ": bad header line '" + line + "'");
    }
    if (!saw_end) throw FormatError(path + ": header never terminated");
    if (models.width == 0 || models.height == 0 || models.in_count < 1 ||
        models.hidden_count < 1)
        throw FormatError(path + ": invalid header dimensions");

    const std::size_t npx = std::size_t(models.width) * models.height;
    const std::size_t block =
        std::size_t(models.hidden_count) * models.in_count + 2 * std::size_t(models.hidden_count) + 1;
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < npx * block * 8)
        throw TruncationError(path + ": model payload truncated", bytes.size());

    models.models.assign(npx, std::nullopt);
    models.reports.assign(npx, TrainReport{});
    const unsigned char* p = bytes.data();
    std::vector<double> theta(block);
    for (std::size_t px = 0; px < npx; ++px) {
        bool finite = true;
        for (std::size_t k = 0; k < block; ++k) {
            theta[k] = get_f64le(p);
            p += 8;
            if (!std::isfinite(theta[k])) finite = false;
        }
        if (!finite) continue;
        PixelMlp net(models.in_count, models.hidden_count);
        net.from_params(theta);
        models.models[px] = std::move(net);
    }
    return models;
}

}  // namespace ssicast
