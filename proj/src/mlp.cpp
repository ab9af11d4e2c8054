#include "ssicast/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "ssicast/rng.hpp"

namespace ssicast {

PixelMlp::PixelMlp(int inputs, int hidden) : in_count(inputs), hidden_count(hidden) {
    if (inputs < 1 || hidden < 1)
        throw std::invalid_argument("PixelMlp: need at least one input and one hidden unit");
    w1.assign(std::size_t(hidden) * inputs, 0.0);
    b1.assign(hidden, 0.0);
    w2.assign(hidden, 0.0);
}

void PixelMlp::init_weights(uint64_t seed) {
    rng_seed = seed;
    SplitMix64 rng(seed);
    for (double& w : w1) w = rng.uniform(-0.5, 0.5);
    for (double& w : b1) w = rng.uniform(-0.5, 0.5);
    for (double& w : w2) w = rng.uniform(-0.5, 0.5);
    b2 = rng.uniform(-0.5, 0.5);
}

bool PixelMlp::finite() const {
    for (double w : w1)
        if (!std::isfinite(w)) return false;
    for (double w : b1)
        if (!std::isfinite(w)) return false;
    for (double w : w2)
        if (!std::isfinite(w)) return false;
    return std::isfinite(b2);
}

double PixelMlp::forward(std::span<const double> inputs) const {
    double out = b2;
    for (int h = 0; h < hidden_count; ++h) {
        double z = b1[h];
        const double* row = &w1[std::size_t(h) * in_count];
        for (int k = 0; k < in_count; ++k) z += row[k] * inputs[k];
        out += w2[h] * std::tanh(z);
    }
    return out;
}

double PixelMlp::forward_with_gradient(std::span<const double> inputs,
                                       std::span<double> grad) const {
    const std::size_t nw1 = std::size_t(hidden_count) * in_count;
    double out = b2;
    for (int h = 0; h < hidden_count; ++h) {
        double z = b1[h];
        const double* row = &w1[std::size_t(h) * in_count];
        for (int k = 0; k < in_count; ++k) z += row[k] * inputs[k];
        const double o = std::tanh(z);
        const double dsig = (1.0 - o * o) * w2[h];
        double* grow = &grad[std::size_t(h) * in_count];
        for (int k = 0; k < in_count; ++k) grow[k] = dsig * inputs[k];
        grad[nw1 + h] = dsig;                          // d/db1
        grad[nw1 + hidden_count + h] = o;              // d/dw2
        out += w2[h] * o;
    }
    grad[nw1 + 2 * std::size_t(hidden_count)] = 1.0;   // d/db2
    return out;
}

void PixelMlp::to_params(std::span<double> theta) const {
    std::size_t p = 0;
    for (double w : w1) theta[p++] = w;
    for (double w : b1) theta[p++] = w;
    for (double w : w2) theta[p++] = w;
    theta[p] = b2;
}

void PixelMlp::from_params(std::span<const double> theta) {
    std::size_t p = 0;
    for (double& w : w1) w = theta[p++];
    for (double& w : b1) w = theta[p++];
    for (double& w : w2) w = theta[p++];
    b2 = theta[p];
}

}  // namespace ssicast
