#ifndef SSICAST_MLP_HPP
#define SSICAST_MLP_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace ssicast {

/// One pixel's forecaster: In inputs, one tanh hidden layer of H units, a
/// linear output. The output is the predicted clear-sky index; scaling by
/// the clear-sky irradiation happens in the predictor, not here.
struct PixelMlp {
    int in_count = 7;
    int hidden_count = 7;
    std::vector<double> w1;  // hidden_count x in_count, row-major
    std::vector<double> b1;  // hidden_count
    std::vector<double> w2;  // hidden_count
    double b2 = 0.0;
    uint64_t rng_seed = 0;

    PixelMlp() = default;
    PixelMlp(int inputs, int hidden);

    std::size_t weight_count() const {
        return std::size_t(hidden_count) * in_count + 2 * std::size_t(hidden_count) + 1;
    }

    /// Uniform init in [-0.5, 0.5] from the given deterministic seed.
    void init_weights(uint64_t seed);

    bool finite() const;

    /// Raw network output for one input window (most recent sample first).
    double forward(std::span<const double> inputs) const;

    /// Output plus d(output)/d(theta) with theta packed as
    /// [w1 row-major, b1, w2, b2]; grad must have weight_count() slots.
    double forward_with_gradient(std::span<const double> inputs, std::span<double> grad) const;

    void to_params(std::span<double> theta) const;
    void from_params(std::span<const double> theta);
};

}  // namespace ssicast

#endif
