#include "ssicast/lagselect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssicast {

namespace {

int bin_of(double v, double lo, double hi, int bins) {
    if (!(hi > lo)) return 0;  // degenerate range: single occupied bin
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    return b;
}

/// Sums values in ascending order; gives a canonical result for any input
/// permutation of equal multisets, which is what makes MI symmetric
/// bit-for-bit.
double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

void observed_range(std::span<const double> v, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        if (x < lo) lo = x;
        if (x > hi) hi = x;
    }
}

}  // namespace

std::vector<uint64_t> Histogram2D::marginal_x() const {
    std::vector<uint64_t> m(bins_x, 0);
    for (int bx = 0; bx < bins_x; ++bx)
        for (int by = 0; by < bins_y; ++by) m[bx] += count(bx, by);
    return m;
}

std::vector<uint64_t> Histogram2D::marginal_y() const {
    std::vector<uint64_t> m(bins_y, 0);
    for (int bx = 0; bx < bins_x; ++bx)
        for (int by = 0; by < bins_y; ++by) m[by] += count(bx, by);
    return m;
}

std::vector<double> Histogram2D::edges_x() const {
    std::vector<double> e(bins_x + 1);
    for (int k = 0; k <= bins_x; ++k) e[k] = x_min + (x_max - x_min) * k / bins_x;
    return e;
}

std::vector<double> Histogram2D::edges_y() const {
    std::vector<double> e(bins_y + 1);
    for (int k = 0; k <= bins_y; ++k) e[k] = y_min + (y_max - y_min) * k / bins_y;
    return e;
}

int default_bin_count(std::size_t n) {
    int b = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    if (b < 1) b = 1;
    if (b > 64) b = 64;
    return b;
}

Histogram2D joint_histogram(std::span<const double> x, std::span<const double> y,
                            int bins_x, int bins_y, double x_min, double x_max,
                            double y_min, double y_max) {
    if (x.size() != y.size())
        throw std::invalid_argument("joint_histogram: length mismatch");
    if (bins_x < 1 || bins_y < 1) throw std::invalid_argument("joint_histogram: bins must be >= 1");
    Histogram2D h;
    h.bins_x = bins_x;
    h.bins_y = bins_y;
    h.x_min = x_min;
    h.x_max = x_max;
    h.y_min = y_min;
    h.y_max = y_max;
    h.joint.assign(std::size_t(bins_x) * bins_y, 0);
    h.n = x.size();
    for (std::size_t k = 0; k < x.size(); ++k) {
        int bx = bin_of(x[k], x_min, x_max, bins_x);
        int by = bin_of(y[k], y_min, y_max, bins_y);
        ++h.joint[std::size_t(bx) * bins_y + by];
    }
    return h;
}

Histogram2D joint_histogram(std::span<const double> x, std::span<const double> y,
                            int bins_x, int bins_y) {
    double xlo, xhi, ylo, yhi;
    observed_range(x, xlo, xhi);
    observed_range(y, ylo, yhi);
    return joint_histogram(x, y, bins_x, bins_y, xlo, xhi, ylo, yhi);
}

double entropy(std::span<const double> samples, int bins) {
    if (samples.empty()) throw std::invalid_argument("entropy: empty input");
    if (bins == 0) bins = default_bin_count(samples.size());
    if (bins < 1) throw std::invalid_argument("entropy: bins must be >= 1");

    double lo, hi;
    observed_range(samples, lo, hi);
    std::vector<uint64_t> counts(bins, 0);
    for (double v : samples) ++counts[bin_of(v, lo, hi, bins)];

    const double n = static_cast<double>(samples.size());
    std::vector<double> terms;
    terms.reserve(bins);
    for (uint64_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        terms.push_back(-p * std::log2(p));
    }
    return sorted_sum(terms);
}

namespace {

double mi_from_histogram(const Histogram2D& h) {
    const auto mx = h.marginal_x();
    const auto my = h.marginal_y();
    const double n = static_cast<double>(h.n);
    std::vector<double> terms;
    terms.reserve(h.joint.size());
    for (int bx = 0; bx < h.bins_x; ++bx) {
        for (int by = 0; by < h.bins_y; ++by) {
            const uint32_t c = h.count(bx, by);
            if (c == 0) continue;
            const double pxy = c / n;
            const double px = mx[bx] / n;
            const double py = my[by] / n;
            terms.push_back(pxy * std::log2(pxy / (px * py)));
        }
    }
    return sorted_sum(terms);
}

}  // namespace

double mutual_information(std::span<const double> x, std::span<const double> y, int bins) {
    if (x.size() != y.size())
        throw std::invalid_argument("mutual_information: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("mutual_information: need at least 2 samples");
    if (bins == 0) bins = default_bin_count(x.size());
    return mi_from_histogram(joint_histogram(x, y, bins, bins));
}

double conditional_entropy(std::span<const double> x, std::span<const double> y, int bins) {
    if (x.size() != y.size())
        throw std::invalid_argument("conditional_entropy: length mismatch");
    if (x.empty()) throw std::invalid_argument("conditional_entropy: empty input");
    if (bins == 0) bins = default_bin_count(x.size());
    const Histogram2D h = joint_histogram(x, y, bins, bins);
    const auto my = h.marginal_y();
    const double n = static_cast<double>(h.n);
    std::vector<double> terms;
    terms.reserve(h.joint.size());
    for (int bx = 0; bx < h.bins_x; ++bx) {
        for (int by = 0; by < h.bins_y; ++by) {
            const uint32_t c = h.count(bx, by);
            if (c == 0) continue;
            const double pxy = c / n;
            const double py = my[by] / n;
            terms.push_back(-pxy * std::log2(pxy / py));
        }
    }
    return sorted_sum(terms);
}

MiCurve auto_mi_curve(const PixelSeries& series, int tau_max, int bins) {
    const std::size_t n = series.size();
    if (tau_max < 1) throw std::invalid_argument("auto_mi_curve: tau_max must be >= 1");
    if (n <= std::size_t(tau_max) + 2)
        throw std::invalid_argument("auto_mi_curve: series too short for tau_max");

    // shared edges from all valid samples
    std::vector<double> valid;
    valid.reserve(n);
    for (double v : series.values)
        if (!is_missing(v)) valid.push_back(v);
    if (valid.size() <= std::size_t(tau_max) + 2)
        throw std::invalid_argument("auto_mi_curve: too few valid samples for tau_max");
    if (bins == 0) bins = default_bin_count(valid.size());
    double lo, hi;
    observed_range(valid, lo, hi);

    MiCurve curve;
    curve.self_info = entropy(valid, bins);
    curve.lags.reserve(tau_max);
    curve.mi.reserve(tau_max);

    std::vector<double> xs, ys;
    for (int tau = 1; tau <= tau_max; ++tau) {
        xs.clear();
        ys.clear();
        for (std::size_t t = std::size_t(tau); t < n; ++t) {
            const double a = series.values[t];
            const double b = series.values[t - tau];
            if (is_missing(a) || is_missing(b)) continue;  // pairwise deletion
            xs.push_back(a);
            ys.push_back(b);
        }
        double mi = 0.0;
        if (xs.size() >= 2)
            mi = mi_from_histogram(joint_histogram(xs, ys, bins, bins, lo, hi, lo, hi));
        curve.lags.push_back(tau);
        curve.mi.push_back(mi);
    }

    curve.selected_lag = kDefaultInputLag;
    for (int tau = 1; tau <= tau_max; ++tau) {
        const double prev = (tau == 1) ? curve.self_info : curve.mi[tau - 2];
        if (tau == tau_max) break;  // needs a right neighbor
        const double here = curve.mi[tau - 1];
        const double next = curve.mi[tau];
        if (prev > here && here < next) {
            curve.selected_lag = tau;
            curve.minimum_found = true;
            break;
        }
    }
    return curve;
}

LagSummary grid_lag_statistics(std::span<const int> lags) {
    if (lags.empty()) throw std::invalid_argument("grid_lag_statistics: no curves");
    std::vector<int> sorted(lags.begin(), lags.end());
    std::sort(sorted.begin(), sorted.end());

    LagSummary s;
    s.count = sorted.size();
    s.min = sorted.front();
    s.max = sorted.back();
    double sum = 0.0;
    for (int v : sorted) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    const std::size_t mid = s.count / 2;
    s.median = (s.count % 2 == 1) ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    double ss = 0.0;
    for (int v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.count));
    return s;
}

LagSummary grid_lag_statistics(std::span<const MiCurve> curves) {
    std::vector<int> lags;
    lags.reserve(curves.size());
    for (const MiCurve& c : curves) lags.push_back(c.selected_lag);
    return grid_lag_statistics(std::span<const int>(lags));
}

}  // namespace ssicast
