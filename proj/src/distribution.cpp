#include "dsc/distribution.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "dsc/error.hpp"

namespace dsc {
namespace {

GramDiagnostic finish_gram(const Eigen::MatrixXd& m) {
    const int j_count = static_cast<int>(m.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    GramDiagnostic out;
    out.size = j_count;
    out.matrix.resize(static_cast<std::size_t>(j_count) * j_count);
    for (int j = 0; j < j_count; ++j)
        for (int k = 0; k < j_count; ++k)
            out.matrix[static_cast<std::size_t>(j) * j_count + k] = m(j, k);
    out.min_eigenvalue = solver.eigenvalues().minCoeff();
    out.warning = out.min_eigenvalue < GramDiagnostic::kWarnThreshold;
    return out;
}

}  // namespace

void DiscreteCDF::validate() const {
    if (support.empty() || support.size() != cum.size())
        throw_internal("discrete CDF: support/cum size mismatch");
    for (std::size_t k = 1; k < support.size(); ++k) {
        if (!(support[k] > support[k - 1]))
            throw_internal("discrete CDF: support not strictly increasing");
        if (cum[k] < cum[k - 1] - 1e-12) throw_internal("discrete CDF: cum not non-decreasing");
    }
    for (double c : cum) {
        if (c < -1e-12 || c > 1.0 + 1e-12) throw_internal("discrete CDF: cum outside [0,1]");
    }
    if (std::fabs(cum.back() - 1.0) > 1e-12) throw_internal("discrete CDF: terminal mass != 1");
}

GridWindow grid_window(const QuantileGrid& grid, double q_min, double q_max) {
    if (!(q_min >= 0.0 && q_min < q_max && q_max <= 1.0))
        throw_usage("quantile range must satisfy 0 <= q_min < q_max <= 1");
    const int g = grid.g;
    int lo = static_cast<int>(std::ceil(q_min * g - 1e-9));
    int hi = static_cast<int>(std::floor(q_max * g + 1e-9));
    lo = std::clamp(lo, 0, g);
    hi = std::clamp(hi, 0, g);
    if (hi - lo < 1) throw_usage("quantile range [q_min, q_max] too narrow for grid");
    GridWindow w;
    w.lo = lo;
    w.hi = hi;
    const double h = 1.0 / g;
    w.weights.assign(static_cast<std::size_t>(hi - lo + 1), h);
    w.weights.front() = h / 2.0;
    w.weights.back() = h / 2.0;
    return w;
}

EmpiricalQuantile empirical_quantile(std::span<const double> samples, const QuantileGrid& grid) {
    if (samples.empty()) throw_data("empirical quantile: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return empirical_quantile_sorted(sorted, grid);
}

EmpiricalQuantile empirical_quantile_sorted(std::span<const double> sorted_samples,
                                            const QuantileGrid& grid) {
    if (sorted_samples.empty()) throw_data("empirical quantile: empty sample");
    const std::int64_t n = static_cast<std::int64_t>(sorted_samples.size());
    const std::int64_t g = grid.g;
    EmpiricalQuantile out;
    out.grid = grid;
    out.values.resize(static_cast<std::size_t>(g) + 1);
    for (std::int64_t i = 0; i <= g; ++i) {
        // Smallest k with k/n >= i/g, i.e. ceil(i*n/g); k = 0 maps to the minimum.
        std::int64_t k = (i * n + g - 1) / g;
        if (k < 1) k = 1;
        out.values[static_cast<std::size_t>(i)] = sorted_samples[static_cast<std::size_t>(k - 1)];
    }
    return out;
}

DiscreteCDF empirical_cdf(std::span<const double> samples, std::span<const double> support) {
    if (samples.empty()) throw_data("empirical CDF: empty sample");
    if (support.empty()) throw_data("empirical CDF: empty support");
    for (std::size_t k = 1; k < support.size(); ++k) {
        if (!(support[k] > support[k - 1]))
            throw_data("empirical CDF: support not strictly increasing");
    }
    std::vector<std::int64_t> counts(support.size(), 0);
    for (double y : samples) {
        auto it = std::lower_bound(support.begin(), support.end(), y);
        if (it == support.end() || *it != y) {
            std::ostringstream msg;
            msg << "empirical CDF: sample value " << y << " not in support";
            throw_data(msg.str());
        }
        ++counts[static_cast<std::size_t>(it - support.begin())];
    }
    DiscreteCDF out;
    out.support.assign(support.begin(), support.end());
    out.cum.resize(support.size());
    std::int64_t running = 0;
    const double n = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
        running += counts[k];
        out.cum[k] = static_cast<double>(running) / n;
    }
    return out;
}

double wasserstein2(const EmpiricalQuantile& a, const EmpiricalQuantile& b, double q_min,
                    double q_max) {
    if (a.grid != b.grid) throw_internal("wasserstein2: mismatched quantile grids");
    GridWindow w = grid_window(a.grid, q_min, q_max);
    double acc = 0.0;
    for (int i = w.lo; i <= w.hi; ++i) {
        double d = a.values[static_cast<std::size_t>(i)] - b.values[static_cast<std::size_t>(i)];
        acc += w.weights[static_cast<std::size_t>(i - w.lo)] * d * d;
    }
    return std::sqrt(acc);
}

double l1_cdf_distance(const DiscreteCDF& a, const DiscreteCDF& b) {
    if (a.support != b.support) throw_internal("l1_cdf_distance: mismatched supports");
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < a.support.size(); ++k) {
        acc += std::fabs(a.cum[k] - b.cum[k]) * (a.support[k + 1] - a.support[k]);
    }
    return acc;
}

double l1_cdf_distance_restricted(const DiscreteCDF& a, const DiscreteCDF& b, double y_min,
                                  double y_max) {
    if (a.support != b.support) throw_internal("l1_cdf_distance: mismatched supports");
    if (!(y_min <= y_max)) throw_usage("support range must satisfy y_min <= y_max");
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < a.support.size(); ++k) {
        if (a.support[k] < y_min || a.support[k] > y_max) continue;
        acc += std::fabs(a.cum[k] - b.cum[k]) * (a.support[k + 1] - a.support[k]);
    }
    return acc;
}

GramDiagnostic gram_diagnostic(std::span<const EmpiricalQuantile> controls, double q_min,
                               double q_max) {
    if (controls.empty()) throw_internal("gram diagnostic: no controls");
    const int j_count = static_cast<int>(controls.size());
    for (const auto& c : controls) {
        if (c.grid != controls[0].grid) throw_internal("gram diagnostic: mismatched grids");
    }
    GridWindow w = grid_window(controls[0].grid, q_min, q_max);
    Eigen::MatrixXd m(j_count, j_count);
    for (int j = 0; j < j_count; ++j) {
        for (int k = j; k < j_count; ++k) {
            double acc = 0.0;
            const auto& qj = controls[static_cast<std::size_t>(j)].values;
            const auto& qk = controls[static_cast<std::size_t>(k)].values;
            for (int i = w.lo; i <= w.hi; ++i) {
                acc += w.weights[static_cast<std::size_t>(i - w.lo)] *
                       qj[static_cast<std::size_t>(i)] * qk[static_cast<std::size_t>(i)];
            }
            m(j, k) = acc;
            m(k, j) = acc;
        }
    }
    return finish_gram(m);
}

GramDiagnostic gram_diagnostic(std::span<const DiscreteCDF> controls) {
    if (controls.empty()) throw_internal("gram diagnostic: no controls");
    const int j_count = static_cast<int>(controls.size());
    for (const auto& c : controls) {
        if (c.support != controls[0].support)
            throw_internal("gram diagnostic: mismatched supports");
    }
    const auto& support = controls[0].support;
    Eigen::MatrixXd m(j_count, j_count);
    for (int j = 0; j < j_count; ++j) {
        for (int k = j; k < j_count; ++k) {
            double acc = 0.0;
            const auto& fj = controls[static_cast<std::size_t>(j)].cum;
            const auto& fk = controls[static_cast<std::size_t>(k)].cum;
            for (std::size_t i = 0; i + 1 < support.size(); ++i)
                acc += (support[i + 1] - support[i]) * fj[i] * fk[i];
            m(j, k) = acc;
            m(k, j) = acc;
        }
    }
    return finish_gram(m);
}

}  // namespace dsc
