#include "ssicast/config.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ssicast {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw FormatError("config: key '" + key + "' is not a number: '" + v + "'");
    return d;
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw FormatError(origin + ":" + std::to_string(lineno) + ": empty key");
        cfg.entries_[key] = value;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::string v = it->second;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return parse_double(it->second, key);
}

int64_t KeyValueConfig::get_int(const std::string& key, int64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const double d = parse_double(it->second, key);
    const auto v = static_cast<int64_t>(d);
    if (static_cast<double>(v) != d)
        throw FormatError("config: key '" + key + "' is not an integer: '" + it->second + "'");
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw FormatError("config: key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    std::string v = it->second;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw FormatError("config: key '" + key + "' is not a [list]");
    v = v.substr(1, v.size() - 2);
    std::vector<double> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(item, key));
    }
    return out;
}

RunConfig RunConfig::from_config(const KeyValueConfig& cfg) {
    RunConfig rc;
    rc.out_dir = cfg.get_string("out_dir", rc.out_dir);
    rc.seed = static_cast<uint64_t>(cfg.get_int("seed", static_cast<int64_t>(rc.seed)));
    rc.workers = static_cast<unsigned>(cfg.get_int("workers", rc.workers));

    rc.grid.width = static_cast<uint32_t>(cfg.get_int("grid_width", 16));
    rc.grid.height = static_cast<uint32_t>(cfg.get_int("grid_height", 16));
    rc.grid.pixel_size_m = static_cast<float>(cfg.get_double("pixel_size_m", 2500.0));
    rc.grid.origin_lat = cfg.get_double("origin_lat", 42.3);
    rc.grid.origin_lon = cfg.get_double("origin_lon", 8.9);
    rc.grid.t0 = cfg.get_int("t0", 1420070400);  // 2015-01-01T00:00:00Z
    rc.grid.step_s = static_cast<uint32_t>(cfg.get_int("step_s", 3600));
    rc.grid.frames = static_cast<uint32_t>(cfg.get_int("frames", 24 * 90));
    rc.elevation_const_m = cfg.get_double("elevation_m", 0.0);
    if (rc.elevation_const_m != 0.0)
        rc.grid.elevation_m.assign(rc.grid.pixel_count(),
                                   static_cast<float>(rc.elevation_const_m));

    rc.clear_sky.linke_turbidity = cfg.get_double("linke_turbidity", 3.0);
    if (cfg.has("linke_turbidity_monthly")) {
        const auto values = cfg.get_list("linke_turbidity_monthly");
        if (values.size() != 12)
            throw FormatError("config: linke_turbidity_monthly needs exactly 12 values");
        std::array<double, 12> monthly;
        std::copy(values.begin(), values.end(), monthly.begin());
        rc.clear_sky.linke_turbidity_monthly = monthly;
    }

    rc.cloud.mode = cloud_mode_from_string(cfg.get_string("cloud_mode", "ar1"));
    rc.cloud.ar1_phi = cfg.get_double("ar1_phi", rc.cloud.ar1_phi);
    rc.cloud.ar1_mean = cfg.get_double("ar1_mean", rc.cloud.ar1_mean);
    rc.cloud.noise_sigma = cfg.get_double("noise_sigma", rc.cloud.noise_sigma);
    rc.cloud.blob_count = static_cast<int>(cfg.get_int("blob_count", rc.cloud.blob_count));
    rc.cloud.blob_radius_px = cfg.get_double("blob_radius_px", rc.cloud.blob_radius_px);
    rc.cloud.blob_drift_px = cfg.get_double("blob_drift_px", rc.cloud.blob_drift_px);
    rc.cloud.seed = rc.seed;

    rc.filter.hour_min = static_cast<int>(cfg.get_int("hour_min", rc.filter.hour_min));
    rc.filter.hour_max = static_cast<int>(cfg.get_int("hour_max", rc.filter.hour_max));
    rc.filter.irradiance_floor =
        cfg.get_double("irradiance_floor", rc.filter.irradiance_floor);

    rc.train.train_frac = cfg.get_double("train_frac", rc.train.train_frac);
    rc.train.val_frac = cfg.get_double("val_frac", rc.train.val_frac);
    rc.train.test_frac = 1.0 - rc.train.train_frac - rc.train.val_frac;
    if (rc.train.test_frac < 1e-12) rc.train.test_frac = 0.0;
    rc.train.max_fail = static_cast<int>(cfg.get_int("max_fail", rc.train.max_fail));
    rc.train.max_epochs = static_cast<int>(cfg.get_int("max_epochs", rc.train.max_epochs));
    rc.in_count = static_cast<int>(cfg.get_int("in_count", rc.in_count));
    rc.hidden_count = static_cast<int>(cfg.get_int("hidden_count", rc.hidden_count));

    rc.gamma.tol_r_m = cfg.get_double("tol_r_m", rc.gamma.tol_r_m);
    rc.gamma.tol_i_fraction = cfg.get_double("tol_i_fraction", rc.gamma.tol_i_fraction);
    rc.gamma.tol_i_absolute = cfg.get_double("tol_i_absolute", rc.gamma.tol_i_absolute);
    rc.gamma.tol_i_floor = cfg.get_double("tol_i_floor", rc.gamma.tol_i_floor);
    rc.gamma.search_radius = static_cast<int>(cfg.get_int("gamma_search_radius", 0));
    rc.gamma.intensity_only = cfg.get_bool("intensity_only", false);

    rc.tau_max = static_cast<int>(cfg.get_int("tau_max", rc.tau_max));
    rc.mi_bins = static_cast<int>(cfg.get_int("mi_bins", rc.mi_bins));

    rc.grid.validate();
    rc.clear_sky.validate();
    rc.cloud.validate();
    rc.filter.validate();
    rc.train.validate();
    rc.gamma.validate();
    return rc;
}

std::string RunConfig::path(const std::string& filename) const {
    if (out_dir.empty()) return filename;
    return out_dir + "/" + filename;
}

}  // namespace ssicast
