#ifndef SSICAST_CONFIG_HPP
#define SSICAST_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "ssicast/clearsky.hpp"
#include "ssicast/grid.hpp"
#include "ssicast/metrics.hpp"
#include "ssicast/mlp_train.hpp"
#include "ssicast/synthgen.hpp"

namespace ssicast {

/// Plain-text key-value configuration: one `key = value` per line, `#`
/// comments, bracketed comma lists for multi-valued keys.
class KeyValueConfig {
public:
    static KeyValueConfig load(const std::string& path);
    static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    std::string origin_;
};

/// Everything one pipeline run needs; parsed from the config file, then
/// overridden by CLI flags.
struct RunConfig {
    std::string out_dir = "out";
    uint64_t seed = 42;
    unsigned workers = 1;

    GridSpec grid;                 // grid_width, grid_height, ..., t0, step_s, frames
    double elevation_const_m = 0;  // constant per-pixel elevation shortcut
    ClearSkyParams clear_sky;      // linke_turbidity / linke_turbidity_monthly
    CloudProcess cloud;            // cloud_mode, ar1_phi, noise_sigma, blob_*
    DaylightFilter filter;         // hour_min, hour_max, irradiance_floor
    TrainConfig train;             // max_fail, max_epochs, train_frac, val_frac
    int in_count = 7;
    int hidden_count = 7;
    GammaConfig gamma;             // tol_r_m, tol_i_fraction, tol_i_absolute, ...
    int tau_max = 24;
    int mi_bins = 0;               // 0 = ceil(sqrt(n)) capped at 64

    static RunConfig from_config(const KeyValueConfig& cfg);

    std::string path(const std::string& filename) const;
};

}  // namespace ssicast

#endif
