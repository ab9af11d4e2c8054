#include "ssicast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ssicast/parallel.hpp"
#include "ssicast/timeutil.hpp"

namespace ssicast {

namespace {

void require_aligned(const MapStack& a, const MapStack& b, const char* who) {
    if (!a.spec.same_geometry(b.spec) || !a.spec.same_axis(b.spec))
        throw AlignmentError(std::string(who) + ": stacks are not aligned");
}

}  // namespace

int GammaConfig::effective_radius(float pixel_size_m) const {
    if (search_radius > 0) return search_radius;
    const int r = 3 * static_cast<int>(std::ceil(tol_r_m / double(pixel_size_m)));
    return std::max(r, 1);
}

void GammaConfig::validate() const {
    if (!(tol_r_m > 0)) throw std::invalid_argument("GammaConfig: tol_r must be > 0");
    const bool absolute = tol_i_absolute > 0.0;
    if (!absolute && !(tol_i_fraction > 0))
        throw std::invalid_argument("GammaConfig: tol_i must be > 0");
    if (tol_i_floor < 0) throw std::invalid_argument("GammaConfig: tol_i_floor must be >= 0");
    if (search_radius < 0)
        throw std::invalid_argument("GammaConfig: search_radius must be >= 1 (0 = default)");
}

MapStack pixel_error(const MapStack& measured, const MapStack& predicted) {
    require_aligned(measured, predicted, "pixel_error");
    MapStack out(measured.spec, measured.kind, kMissingValue);
    for (std::size_t c = 0; c < out.data.size(); ++c) {
        const float m = measured.data[c];
        const float p = predicted.data[c];
        if (is_missing(m) || is_missing(p)) continue;
        out.data[c] = m - p;
    }
    return out;
}

namespace {

struct PooledError {
    double sq_sum = 0.0;
    double ref_sum = 0.0;
    double err_sum = 0.0;
    std::size_t n = 0;
};

/// Retained pixel-hours: hour window, measured >= floor, both non-missing.
template <typename Fn>
void for_each_retained(const MapStack& measured, const MapStack& predicted,
                       const DaylightFilter& filter, Fn&& fn) {
    const std::size_t fsz = measured.frame_size();
    for (std::size_t t = 0; t < measured.frame_count(); ++t) {
        if (!filter.hour_in_window(measured.spec.timestamp(t))) continue;
        const auto mf = measured.frame(t);
        const auto pf = predicted.frame(t);
        for (std::size_t c = 0; c < fsz; ++c) {
            const double m = mf[c];
            const double p = pf[c];
            if (is_missing(m) || m < filter.irradiance_floor || is_missing(p)) continue;
            fn(t, c, m, p);
        }
    }
}

}  // namespace

ErrorSummary nrmse_summary(const MapStack& measured, const MapStack& predicted,
                           const DaylightFilter& filter) {
    require_aligned(measured, predicted, "nrmse");
    filter.validate();
    PooledError pool;
    for_each_retained(measured, predicted, filter,
                      [&](std::size_t, std::size_t, double m, double p) {
                          const double e = m - p;
                          pool.sq_sum += e * e;
                          pool.err_sum += e;
                          pool.ref_sum += m;
                          ++pool.n;
                      });
    if (pool.n == 0) throw InsufficientDataError("nrmse: no retained pixel-hours");
    const double mean_ref = pool.ref_sum / double(pool.n);
    if (mean_ref == 0.0) throw std::domain_error("nrmse: reference mean is zero");
    ErrorSummary s;
    s.n_samples = pool.n;
    s.mean_error = pool.err_sum / double(pool.n);
    s.nrmse = 100.0 * std::sqrt(pool.sq_sum / double(pool.n)) / mean_ref;
    return s;
}

double nrmse(const MapStack& measured, const MapStack& predicted, const DaylightFilter& filter) {
    return nrmse_summary(measured, predicted, filter).nrmse;
}

std::vector<float> nrmse_map(const MapStack& measured, const MapStack& predicted,
                             const DaylightFilter& filter) {
    require_aligned(measured, predicted, "nrmse_map");
    filter.validate();
    const std::size_t fsz = measured.frame_size();
    std::vector<PooledError> pools(fsz);
    for_each_retained(measured, predicted, filter,
                      [&](std::size_t, std::size_t c, double m, double p) {
                          const double e = m - p;
                          pools[c].sq_sum += e * e;
                          pools[c].ref_sum += m;
                          ++pools[c].n;
                      });
    std::vector<float> out(fsz, kMissingValue);
    for (std::size_t c = 0; c < fsz; ++c) {
        if (pools[c].n == 0 || pools[c].ref_sum == 0.0) continue;
        const double mean_ref = pools[c].ref_sum / double(pools[c].n);
        out[c] = static_cast<float>(100.0 * std::sqrt(pools[c].sq_sum / double(pools[c].n)) /
                                    mean_ref);
    }
    return out;
}

namespace {

struct WindowOffset {
    int di;
    int dj;
    double dist2_m;  // squared center-to-center distance
};

/// Window offsets sorted by distance so the search can stop as soon as the
/// distance term alone exceeds the best gamma so far.
std::vector<WindowOffset> make_window(int radius, double pixel_size_m) {
    std::vector<WindowOffset> w;
    w.reserve(std::size_t(2 * radius + 1) * (2 * radius + 1));
    for (int di = -radius; di <= radius; ++di) {
        for (int dj = -radius; dj <= radius; ++dj) {
            const double dx = di * pixel_size_m;
            const double dy = dj * pixel_size_m;
            w.push_back({di, dj, dx * dx + dy * dy});
        }
    }
    std::sort(w.begin(), w.end(), [](const WindowOffset& a, const WindowOffset& b) {
        if (a.dist2_m != b.dist2_m) return a.dist2_m < b.dist2_m;
        if (a.di != b.di) return a.di < b.di;
        return a.dj < b.dj;
    });
    return w;
}

double tolerance_for(const GammaConfig& cfg, double reference_value) {
    if (cfg.tol_i_absolute > 0.0) return cfg.tol_i_absolute;
    const double tol = cfg.tol_i_fraction * std::abs(reference_value);
    return std::max(tol, cfg.tol_i_floor);
}

}  // namespace

namespace {

GammaResult gamma_map_windowed(std::span<const float> reference,
                               std::span<const float> evaluated, const GammaConfig& cfg,
                               const GridSpec& spec, const std::vector<WindowOffset>& window) {
    const std::size_t fsz = spec.pixel_count();
    if (reference.size() != fsz || evaluated.size() != fsz)
        throw AlignmentError("gamma_map: raster shape does not match grid");

    GammaResult res;
    res.gamma_map.assign(fsz, kMissingValue);
    res.pass_mask.assign(fsz, kGammaNotEvaluated);

    const double tol_r2 = double(cfg.tol_r_m) * cfg.tol_r_m;

    double gamma_sum = 0.0;
    const int h = static_cast<int>(spec.height);
    const int w = static_cast<int>(spec.width);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const std::size_t px = std::size_t(i) * w + j;
            const double ref = reference[px];
            if (is_missing(ref)) continue;
            const double tol_i = tolerance_for(cfg, ref);

            double best2 = -1.0;
            if (cfg.intensity_only) {
                const double ev = evaluated[px];
                if (!is_missing(ev)) {
                    const double di = ev - ref;
                    const double g = std::abs(di) / tol_i;
                    best2 = g * g;
                }
            } else {
                for (const WindowOffset& o : window) {
                    const double dterm = o.dist2_m / tol_r2;
                    if (best2 >= 0.0 && dterm >= best2) break;  // sorted by distance
                    const int pi = i + o.di;
                    const int pj = j + o.dj;
                    if (pi < 0 || pi >= h || pj < 0 || pj >= w) continue;
                    const double ev = evaluated[std::size_t(pi) * w + pj];
                    if (is_missing(ev)) continue;
                    const double di = ev - ref;
                    const double g2 = dterm + (di * di) / (tol_i * tol_i);
                    if (best2 < 0.0 || g2 < best2) best2 = g2;
                }
            }
            if (best2 < 0.0) continue;  // nothing to compare against

            const double gamma = std::sqrt(best2);
            res.gamma_map[px] = static_cast<float>(gamma);
            const bool pass = gamma <= 1.0;
            res.pass_mask[px] = pass ? kGammaPass : kGammaFail;
            ++res.evaluated;
            if (pass) ++res.passed;
            gamma_sum += gamma;
        }
    }
    if (res.evaluated > 0) {
        res.passing_rate = 100.0 * double(res.passed) / double(res.evaluated);
        res.gamma_mean = gamma_sum / double(res.evaluated);
    }
    return res;
}

}  // namespace

GammaResult gamma_map(std::span<const float> reference, std::span<const float> evaluated,
                      const GammaConfig& cfg, const GridSpec& spec) {
    cfg.validate();
    const std::vector<WindowOffset> window =
        cfg.intensity_only
            ? std::vector<WindowOffset>{}
            : make_window(cfg.effective_radius(spec.pixel_size_m), spec.pixel_size_m);
    return gamma_map_windowed(reference, evaluated, cfg, spec, window);
}

GammaStackResult gamma_stack(const MapStack& measured, const MapStack& predicted,
                             const GammaConfig& cfg, const DaylightFilter& filter,
                             unsigned workers) {
    require_aligned(measured, predicted, "gamma_stack");
    cfg.validate();
    filter.validate();

    const std::size_t frames = measured.frame_count();
    GammaStackResult out;
    out.frames.resize(frames);

    // one shared sorted window for every frame
    const std::vector<WindowOffset> window =
        cfg.intensity_only
            ? std::vector<WindowOffset>{}
            : make_window(cfg.effective_radius(measured.spec.pixel_size_m),
                          measured.spec.pixel_size_m);

    parallel_for(frames, workers, [&](std::size_t t) {
        if (!filter.hour_in_window(measured.spec.timestamp(t))) return;
        // reference pixels below the floor are not evaluated
        std::vector<float> ref(measured.frame(t).begin(), measured.frame(t).end());
        for (float& v : ref)
            if (!is_missing(v) && v < filter.irradiance_floor) v = kMissingValue;
        out.frames[t] = gamma_map_windowed(ref, predicted.frame(t), cfg, measured.spec, window);
    });

    double gamma_weighted = 0.0;
    for (const GammaResult& r : out.frames) {
        out.evaluated += r.evaluated;
        out.passed += r.passed;
        gamma_weighted += r.gamma_mean * double(r.evaluated);
    }
    if (out.evaluated > 0) {
        out.passing_rate = 100.0 * double(out.passed) / double(out.evaluated);
        out.gamma_mean = gamma_weighted / double(out.evaluated);
    }
    return out;
}

const char* to_string(Season s) {
    switch (s) {
        case Season::Winter: return "winter";
        case Season::Spring: return "spring";
        case Season::Summer: return "summer";
        case Season::Autumn: return "autumn";
    }
    return "unknown";
}

Season season_of_month(unsigned month) {
    switch (month) {
        case 12: case 1: case 2: return Season::Winter;
        case 3: case 4: case 5: return Season::Spring;
        case 6: case 7: case 8: return Season::Summer;
        default: return Season::Autumn;
    }
}

namespace {

struct SeasonPool {
    PooledError err;
    std::size_t gp_evaluated = 0;
    std::size_t gp_passed = 0;
    double gamma_sum = 0.0;
};

}  // namespace

std::vector<ReportRow> seasonal_report(
    const MapStack& measured,
    const std::vector<std::pair<std::string, const MapStack*>>& predictions,
    const GammaConfig& gamma_cfg, const DaylightFilter& filter, unsigned workers) {
    std::vector<ReportRow> rows;
    for (const auto& [name, predicted] : predictions) {
        require_aligned(measured, *predicted, "seasonal_report");

        std::array<SeasonPool, 5> pools;  // 4 seasons + pooled year at [4]
        for_each_retained(measured, *predicted, filter,
                          [&](std::size_t t, std::size_t, double m, double p) {
                              const auto season = static_cast<std::size_t>(
                                  season_of_month(utc_month(measured.spec.timestamp(t))));
                              const double e = m - p;
                              for (std::size_t s : {season, std::size_t(4)}) {
                                  pools[s].err.sq_sum += e * e;
                                  pools[s].err.ref_sum += m;
                                  pools[s].err.err_sum += e;
                                  ++pools[s].err.n;
                              }
                          });

        const GammaStackResult gres = gamma_stack(measured, *predicted, gamma_cfg, filter,
                                                  workers);
        for (std::size_t t = 0; t < gres.frames.size(); ++t) {
            const GammaResult& r = gres.frames[t];
            if (r.evaluated == 0) continue;
            const auto season = static_cast<std::size_t>(
                season_of_month(utc_month(measured.spec.timestamp(t))));
            for (std::size_t s : {season, std::size_t(4)}) {
                pools[s].gp_evaluated += r.evaluated;
                pools[s].gp_passed += r.passed;
                pools[s].gamma_sum += r.gamma_mean * double(r.evaluated);
            }
        }

        for (std::size_t s = 0; s < 5; ++s) {
            ReportRow row;
            row.predictor = name;
            row.season = (s < 4) ? to_string(static_cast<Season>(s)) : "year";
            const SeasonPool& pool = pools[s];
            if (pool.err.n > 0 && pool.err.ref_sum != 0.0) {
                row.has_data = true;
                const double mean_ref = pool.err.ref_sum / double(pool.err.n);
                row.nrmse = 100.0 * std::sqrt(pool.err.sq_sum / double(pool.err.n)) / mean_ref;
            }
            if (pool.gp_evaluated > 0) {
                row.gp_percent = 100.0 * double(pool.gp_passed) / double(pool.gp_evaluated);
                row.gamma_mean = pool.gamma_sum / double(pool.gp_evaluated);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "predictor,season,nrmse,gamma_mean,gp_percent\n";
    char buf[64];
    for (const ReportRow& row : rows) {
        out << row.predictor << "," << row.season << ",";
        if (row.has_data) {
            std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", row.nrmse, row.gamma_mean,
                          row.gp_percent);
            out << buf;
        } else {
            out << ",,";
        }
        out << "\n";
    }
}

void write_pass_mask_pgm(const GammaResult& result, uint32_t width, uint32_t height,
                         const std::string& path) {
    if (result.pass_mask.size() != std::size_t(width) * height)
        throw AlignmentError("write_pass_mask_pgm: mask does not match dimensions");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    std::vector<unsigned char> pixels(result.pass_mask.size());
    for (std::size_t c = 0; c < pixels.size(); ++c) {
        switch (result.pass_mask[c]) {
            case kGammaPass: pixels[c] = 255; break;
            case kGammaFail: pixels[c] = 0; break;
            default: pixels[c] = 128; break;
        }
    }
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
}

}  // namespace ssicast
