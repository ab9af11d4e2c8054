#ifndef SSICAST_METRICS_HPP
#define SSICAST_METRICS_HPP

#include <string>
#include <vector>

#include "ssicast/grid.hpp"

namespace ssicast {

/// Gamma-test tolerances. tol_i_fraction scales with the reference pixel's
/// intensity (floored at tol_i_floor Wh/m^2 so dawn pixels keep a nonzero
/// tolerance); setting tol_i_absolute > 0 switches to a fixed tolerance.
/// search_radius 0 means the default 3 * ceil(tol_r / pixel size) pixels.
struct GammaConfig {
    double tol_r_m = 2500.0;
    double tol_i_fraction = 0.10;
    double tol_i_absolute = 0.0;
    double tol_i_floor = 10.0;
    int search_radius = 0;
    bool intensity_only = false;

    int effective_radius(float pixel_size_m) const;
    void validate() const;
};

/// Per-map gamma outcome. Missing gammas (reference missing, or no valid
/// evaluated pixel in the search window) are excluded from both counts.
struct GammaResult {
    std::vector<float> gamma_map;   // per pixel, missing sentinel where undefined
    std::vector<uint8_t> pass_mask; // 1 = gamma <= 1, 0 = fail, 2 = not evaluated
    std::size_t evaluated = 0;
    std::size_t passed = 0;
    double passing_rate = 0.0;      // percent
    double gamma_mean = 0.0;        // over evaluated pixels
};

inline constexpr uint8_t kGammaPass = 1;
inline constexpr uint8_t kGammaFail = 0;
inline constexpr uint8_t kGammaNotEvaluated = 2;

struct ErrorSummary {
    double nrmse = 0.0;       // percent
    double mean_error = 0.0;  // Wh/m^2, measured - predicted
    std::size_t n_samples = 0;
};

/// Algebraic error stack, measured - predicted; missing propagates.
MapStack pixel_error(const MapStack& measured, const MapStack& predicted);

/// nRMSE percent pooled over every retained pixel-hour (hour window +
/// irradiance floor on the measured value, both stacks non-missing):
/// 100 * sqrt(mean((I - Ihat)^2)) / mean(I). Throws InsufficientDataError
/// when nothing survives the filter, std::domain_error when the reference
/// mean is zero.
ErrorSummary nrmse_summary(const MapStack& measured, const MapStack& predicted,
                           const DaylightFilter& filter);
double nrmse(const MapStack& measured, const MapStack& predicted, const DaylightFilter& filter);

/// Per-pixel nRMSE raster (percent; missing where a pixel has no retained
/// samples) for the spatial-repartition view.
std::vector<float> nrmse_map(const MapStack& measured, const MapStack& predicted,
                             const DaylightFilter& filter);

/// Gamma test of one evaluated raster against one reference raster:
/// gamma(r_m) = min over evaluated pixels r_p within the search window of
/// sqrt(r^2/Tol_r^2 + dI^2/Tol_I^2); pass iff gamma <= 1 (closed boundary).
/// In intensity_only mode only r_p = r_m is considered and
/// gamma = |dI| / Tol_I.
GammaResult gamma_map(std::span<const float> reference, std::span<const float> evaluated,
                      const GammaConfig& cfg, const GridSpec& spec);

/// Frame-by-frame gamma over a stack pair; frames whose hour is outside the
/// window are skipped (result left empty). Reference pixels below the
/// irradiance floor are not evaluated. Parallel across frames.
struct GammaStackResult {
    std::vector<GammaResult> frames;    // empty gamma_map where skipped
    std::size_t evaluated = 0;
    std::size_t passed = 0;
    double passing_rate = 0.0;          // percent, pooled
    double gamma_mean = 0.0;            // pooled over evaluated pixel-hours
};

GammaStackResult gamma_stack(const MapStack& measured, const MapStack& predicted,
                             const GammaConfig& cfg, const DaylightFilter& filter,
                             unsigned workers = 1);

// ---- seasonal report (meteorological quarters) ----

enum class Season { Winter, Spring, Summer, Autumn };

const char* to_string(Season s);
Season season_of_month(unsigned month);

struct ReportRow {
    std::string predictor;
    std::string season;      // "winter", ..., or "year"
    bool has_data = false;
    double nrmse = 0.0;      // percent
    double gamma_mean = 0.0;
    double gp_percent = 0.0;
};

/// Table-2-shaped comparison: for each predictor one row per season plus a
/// pooled "year" row. Empty seasons produce rows with has_data = false.
std::vector<ReportRow> seasonal_report(
    const MapStack& measured,
    const std::vector<std::pair<std::string, const MapStack*>>& predictions,
    const GammaConfig& gamma_cfg, const DaylightFilter& filter, unsigned workers = 1);

/// CSV emit: header "predictor,season,nrmse,gamma_mean,gp_percent"; absent
/// cells stay empty.
void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path);

/// Black/white pass-mask preview (portable graymap, P5): white = pass,
/// black = fail, mid-gray = not evaluated.
void write_pass_mask_pgm(const GammaResult& result, uint32_t width, uint32_t height,
                         const std::string& path);

}  // namespace ssicast

#endif
