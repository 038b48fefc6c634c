#ifndef DSC_DISTRIBUTION_HPP
#define DSC_DISTRIBUTION_HPP

#include <span>
#include <vector>

namespace dsc {

// Regular quantile grid {i/G : i = 0..G}.
struct QuantileGrid {
    int g = 1000;

    int num_points() const { return g + 1; }
    double point(int i) const { return static_cast<double>(i) / g; }
    bool operator==(const QuantileGrid&) const = default;
};

// Empirical quantile function evaluated on a grid. values[i] corresponds to
// grid point i/G and is non-decreasing by construction.
struct EmpiricalQuantile {
    QuantileGrid grid;
    std::vector<double> values;
};

// Discrete CDF on a strictly increasing support. cum[k] = P(Y <= support[k]);
// the final entry is 1.
struct DiscreteCDF {
    std::vector<double> support;
    std::vector<double> cum;

    void validate() const;  // throws on a malformed CDF
};

// Gram matrix of control quantile functions with its minimum eigenvalue; the
// well-posedness ("variance") diagnostic for the weight program. A minimum
// eigenvalue near zero means the donors are linearly dependent on the fit
// range and the optimal weights are not unique.
struct GramDiagnostic {
    int size = 0;
    std::vector<double> matrix;  // row-major size x size, symmetric
    double min_eigenvalue = 0.0;
    bool warning = false;  // min_eigenvalue < threshold

    static constexpr double kWarnThreshold = 1e-8;

    double at(int j, int k) const { return matrix[static_cast<std::size_t>(j) * size + k]; }
};

// Trapezoid quadrature restricted to the grid points inside [q_min, q_max]:
// index window [lo, hi] plus one weight per point in the window.
struct GridWindow {
    int lo = 0;
    int hi = 0;
    std::vector<double> weights;

    int size() const { return hi - lo + 1; }
};

GridWindow grid_window(const QuantileGrid& grid, double q_min, double q_max);

// Left-continuous generalized inverse on the grid: value at q is the smallest
// order statistic y_(k) with k/n >= q; q = 0 maps to the sample minimum.
EmpiricalQuantile empirical_quantile(std::span<const double> samples, const QuantileGrid& grid);

// As above when the caller already holds the sorted sample.
EmpiricalQuantile empirical_quantile_sorted(std::span<const double> sorted_samples,
                                            const QuantileGrid& grid);

// cum[k] = #{samples <= support[k]} / n. Every sample value must appear in
// the support exactly.
DiscreteCDF empirical_cdf(std::span<const double> samples, std::span<const double> support);

// 2-Wasserstein distance between quantile functions, restricted to
// [q_min, q_max]: sqrt of the trapezoid approximation of the integral of the
// squared gap.
double wasserstein2(const EmpiricalQuantile& a, const EmpiricalQuantile& b, double q_min = 0.0,
                    double q_max = 1.0);

// Integral of |F_a - F_b| over the support: sum_k |a.cum[k] - b.cum[k]| * w_k
// with w_k the gap to the next support point (0 for the last, where both
// CDFs equal 1 onward).
double l1_cdf_distance(const DiscreteCDF& a, const DiscreteCDF& b);

// Restriction of l1_cdf_distance to support points y in [y_min, y_max].
double l1_cdf_distance_restricted(const DiscreteCDF& a, const DiscreteCDF& b, double y_min,
                                  double y_max);

GramDiagnostic gram_diagnostic(std::span<const EmpiricalQuantile> controls, double q_min = 0.0,
                               double q_max = 1.0);

// Same conditioning check for discrete CDFs, with support-gap weights in
// place of the quantile quadrature.
GramDiagnostic gram_diagnostic(std::span<const DiscreteCDF> controls);

}  // namespace dsc

#endif
