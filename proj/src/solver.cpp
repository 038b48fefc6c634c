#include "dsc/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dsc/error.hpp"
#include "dsc/lp.hpp"

namespace dsc {
namespace {

void check_quantile_inputs(const EmpiricalQuantile& target,
                           std::span<const EmpiricalQuantile> controls) {
    if (controls.empty()) throw_estimation("control pool is empty");
    const int n = target.grid.num_points();
    if (static_cast<int>(target.values.size()) != n)
        throw_internal("target quantile length does not match its grid");
    for (double v : target.values)
        if (!std::isfinite(v)) throw_data("target quantile function contains non-finite values");
    for (size_t j = 0; j < controls.size(); ++j) {
        if (!(controls[j].grid == target.grid))
            throw_internal("control quantile grid does not match target grid");
        if (static_cast<int>(controls[j].values.size()) != n)
            throw_internal("control quantile length does not match its grid");
        for (double v : controls[j].values)
            if (!std::isfinite(v))
                throw_data("control " + std::to_string(j) +
                           " quantile function contains non-finite values");
    }
}

void check_cdf_inputs(const DiscreteCDF& target, std::span<const DiscreteCDF> controls) {
    if (controls.empty()) throw_estimation("control pool is empty");
    for (const auto& c : controls) {
        if (c.support != target.support)
            throw_internal("control CDF support does not match target support");
    }
}

// Normalizes solver output so weights are exactly non-negative and sum to 1.
void clean_weights(std::vector<double>& w) {
    double sum = 0.0;
    for (double& x : w) {
        if (x < 0.0) x = 0.0;
        sum += x;
    }
    if (sum <= 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
        return;
    }
    for (double& x : w) x /= sum;
}

}  // namespace

std::vector<double> project_simplex(std::span<const double> v) {
    const size_t n = v.size();
    if (n == 0) throw_internal("cannot project an empty vector onto the simplex");
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double theta = 0.0;
    for (size_t k = 0; k < n; ++k) {
        css += u[k];
        const double cand = (css - 1.0) / static_cast<double>(k + 1);
        if (u[k] - cand > 0.0) theta = cand;
    }
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = std::max(v[i] - theta, 0.0);
    return out;
}

double quantile_mixture_objective(std::span<const double> weights, const EmpiricalQuantile& target,
                                  std::span<const EmpiricalQuantile> controls, double q_min,
                                  double q_max) {
    check_quantile_inputs(target, controls);
    if (weights.size() != controls.size())
        throw_internal("weight vector length does not match control pool");
    const GridWindow win = grid_window(target.grid, q_min, q_max);
    double acc = 0.0;
    for (int i = 0; i < win.size(); ++i) {
        const int g = win.lo + i;
        double mix = 0.0;
        for (size_t j = 0; j < controls.size(); ++j) mix += weights[j] * controls[j].values[g];
        const double d = mix - target.values[g];
        acc += win.weights[i] * d * d;
    }
    return acc;
}

double cdf_mixture_objective(std::span<const double> weights, const DiscreteCDF& target,
                             std::span<const DiscreteCDF> controls) {
    check_cdf_inputs(target, controls);
    if (weights.size() != controls.size())
        throw_internal("weight vector length does not match control pool");
    const size_t k_n = target.support.size();
    double acc = 0.0;
    for (size_t k = 0; k + 1 < k_n; ++k) {
        double mix = 0.0;
        for (size_t j = 0; j < controls.size(); ++j) mix += weights[j] * controls[j].cum[k];
        acc += std::fabs(mix - target.cum[k]) * (target.support[k + 1] - target.support[k]);
    }
    return acc;
}

SimplexWeights solve_quantile_weights(const EmpiricalQuantile& target,
                                      std::span<const EmpiricalQuantile> controls,
                                      const SolverConfig& cfg, double q_min, double q_max) {
    check_quantile_inputs(target, controls);
    const int j_n = static_cast<int>(controls.size());
    const GridWindow win = grid_window(target.grid, q_min, q_max);

    // Objective in quadratic form: w'Aw - 2 b'w + c0 with A the windowed Gram
    // matrix of the controls and b their inner products with the target.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(j_n, j_n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(j_n);
    double c0 = 0.0;
    for (int i = 0; i < win.size(); ++i) {
        const int g = win.lo + i;
        const double wq = win.weights[i];
        const double t = target.values[g];
        c0 += wq * t * t;
        for (int j = 0; j < j_n; ++j) {
            const double cj = controls[j].values[g];
            b(j) += wq * cj * t;
            for (int k = 0; k <= j; ++k) a(j, k) += wq * cj * controls[k].values[g];
        }
    }
    for (int j = 0; j < j_n; ++j)
        for (int k = j + 1; k < j_n; ++k) a(j, k) = a(k, j);

    const auto objective = [&](const Eigen::VectorXd& w) {
        return w.dot(a * w) - 2.0 * b.dot(w) + c0;
    };

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    const double lip = 2.0 * std::max(eig.eigenvalues().maxCoeff(), 0.0);

    SimplexWeights out;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(j_n, 1.0 / j_n);
    if (lip > 0.0) {
        // FISTA with fixed step 1/L, deterministic uniform start, and a
        // function-value restart to keep momentum from overshooting.
        const double step = 1.0 / lip;
        Eigen::VectorXd y = x;
        double tk = 1.0;
        double fx = objective(x);
        std::vector<double> scratch(j_n);
        out.converged = false;
        for (int it = 0; it < cfg.max_iterations; ++it) {
            const Eigen::VectorXd grad = 2.0 * (a * y - b);
            for (int j = 0; j < j_n; ++j) scratch[j] = y(j) - step * grad(j);
            const std::vector<double> proj = project_simplex(scratch);
            Eigen::VectorXd x_new = Eigen::Map<const Eigen::VectorXd>(proj.data(), j_n);
            const double fx_new = objective(x_new);
            out.iterations = it + 1;
            // The symmetric test keeps a float-precision uptick at an optimum
            // from triggering restarts forever.
            if (it > 0 && std::fabs(fx - fx_new) < cfg.tolerance) {
                if (fx_new < fx) {
                    x = x_new;
                    fx = fx_new;
                }
                out.converged = true;
                break;
            }
            if (fx_new > fx) {
                // Restart from the best point with momentum reset.
                y = x;
                tk = 1.0;
                continue;
            }
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            y = x_new + ((tk - 1.0) / t_next) * (x_new - x);
            x = x_new;
            fx = fx_new;
            tk = t_next;
        }
    }

    // Certify against the vertices: a vertex with a lower objective replaces
    // the iterate, so the result is never worse than any single control.
    double fx = objective(x);
    int best_vertex = -1;
    for (int j = 0; j < j_n; ++j) {
        const double fv = a(j, j) - 2.0 * b(j) + c0;
        if (fv < fx) {
            fx = fv;
            best_vertex = j;
        }
    }
    if (best_vertex >= 0) {
        x.setZero();
        x(best_vertex) = 1.0;
    }

    out.weights.assign(x.data(), x.data() + j_n);
    clean_weights(out.weights);
    const Eigen::Map<const Eigen::VectorXd> wf(out.weights.data(), j_n);
    out.objective = std::max(objective(wf), 0.0);
    return out;
}

SimplexWeights solve_cdf_weights(const DiscreteCDF& target, std::span<const DiscreteCDF> controls,
                                 const SolverConfig& cfg) {
    check_cdf_inputs(target, controls);
    const int j_n = static_cast<int>(controls.size());
    const int k_n = static_cast<int>(target.support.size());

    // Support gaps with positive width; the terminal point carries none.
    std::vector<int> gaps;
    for (int k = 0; k + 1 < k_n; ++k) gaps.push_back(k);
    const int t_n = static_cast<int>(gaps.size());

    // Variables: weights w_0..w_{J-1}, then one t_k per gap bounding the
    // absolute deviation of the mixture CDF from the target at that point.
    LpProblem lp;
    lp.n_vars = j_n + t_n;
    lp.c.assign(lp.n_vars, 0.0);
    for (int i = 0; i < t_n; ++i) {
        const int k = gaps[i];
        lp.c[j_n + i] = target.support[k + 1] - target.support[k];
    }
    lp.b_ub.assign(static_cast<size_t>(2 * t_n), 0.0);
    lp.a_ub.assign(static_cast<size_t>(2 * t_n) * lp.n_vars, 0.0);
    for (int i = 0; i < t_n; ++i) {
        const int k = gaps[i];
        double* up = &lp.a_ub[static_cast<size_t>(2 * i) * lp.n_vars];
        double* dn = &lp.a_ub[static_cast<size_t>(2 * i + 1) * lp.n_vars];
        for (int j = 0; j < j_n; ++j) {
            up[j] = controls[j].cum[k];
            dn[j] = -controls[j].cum[k];
        }
        up[j_n + i] = -1.0;
        dn[j_n + i] = -1.0;
        lp.b_ub[2 * i] = target.cum[k];
        lp.b_ub[2 * i + 1] = -target.cum[k];
    }
    lp.a_eq.assign(static_cast<size_t>(lp.n_vars), 0.0);
    for (int j = 0; j < j_n; ++j) lp.a_eq[j] = 1.0;
    lp.b_eq = {1.0};

    const LpResult res = solve_lp(lp, cfg.max_iterations);
    if (res.status == LpStatus::Infeasible)
        throw_internal("weight program reported infeasible; the simplex is never empty");
    if (res.status == LpStatus::Unbounded)
        throw_internal("weight program reported unbounded; the objective is non-negative");

    SimplexWeights out;
    out.iterations = res.pivots;
    out.converged = res.status == LpStatus::Optimal;
    out.weights.assign(res.x.begin(), res.x.begin() + j_n);
    clean_weights(out.weights);
    out.objective = cdf_mixture_objective(out.weights, target, controls);
    return out;
}

}  // namespace dsc
