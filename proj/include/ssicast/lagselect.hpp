#ifndef SSICAST_LAGSELECT_HPP
#define SSICAST_LAGSELECT_HPP

#include <span>
#include <vector>

#include "ssicast/grid.hpp"

namespace ssicast {

/// Equal-width joint histogram of two samples over their observed ranges.
struct Histogram2D {
    int bins_x = 0;
    int bins_y = 0;
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    std::vector<uint32_t> joint;  // bins_x * bins_y, row-major over x
    uint64_t n = 0;

    uint32_t count(int bx, int by) const { return joint[std::size_t(bx) * bins_y + by]; }
    std::vector<uint64_t> marginal_x() const;
    std::vector<uint64_t> marginal_y() const;
    std::vector<double> edges_x() const;
    std::vector<double> edges_y() const;
};

Histogram2D joint_histogram(std::span<const double> x, std::span<const double> y,
                            int bins_x, int bins_y);
Histogram2D joint_histogram(std::span<const double> x, std::span<const double> y,
                            int bins_x, int bins_y, double x_min, double x_max,
                            double y_min, double y_max);

/// Bin-count rule used when the caller passes bins = 0: ceil(sqrt(n)),
/// capped at 64.
int default_bin_count(std::size_t n);

/// Shannon entropy of the equal-width histogram, in bits. bins = 0 applies
/// the default rule. Throws std::invalid_argument on empty input.
double entropy(std::span<const double> samples, int bins = 0);

/// Histogram mutual information in bits. Summation runs over value-sorted
/// terms so MI(x, y) and MI(y, x) are bit-identical.
double mutual_information(std::span<const double> x, std::span<const double> y, int bins = 0);

/// H(X|Y) in bits from the joint histogram; mutual_information equals
/// entropy(x) - conditional_entropy(x, y) under identical binning.
double conditional_entropy(std::span<const double> x, std::span<const double> y, int bins = 0);

/// Auto-mutual-information curve over lags 1..tau_max. The lag-0 anchor for
/// the first-minimum search is the series' own entropy. selected_lag is the
/// first interior local minimum (strictly below both neighbors); when no
/// interior minimum exists the territory-wide default of 7 inputs applies.
struct MiCurve {
    std::vector<int> lags;
    std::vector<double> mi;      // bits, aligned with lags
    double self_info = 0.0;      // H(series), the lag-0 anchor
    int selected_lag = 0;
    bool minimum_found = false;
};

inline constexpr int kDefaultInputLag = 7;

/// Missing samples are pairwise-deleted per lag; bin edges come from the
/// full series and are reused for every lagged copy.
MiCurve auto_mi_curve(const PixelSeries& series, int tau_max = 24, int bins = 0);

struct LagSummary {
    int min = 0;
    int max = 0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;  // population
    std::size_t count = 0;
};

LagSummary grid_lag_statistics(std::span<const MiCurve> curves);
LagSummary grid_lag_statistics(std::span<const int> lags);

}  // namespace ssicast

#endif
