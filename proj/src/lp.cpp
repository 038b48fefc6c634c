#include "dsc/lp.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "dsc/error.hpp"

namespace dsc {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// Tableau rows hold the constraint coefficients plus the right-hand side in
// the last column; the basis array maps each row to its basic column.
struct Tableau {
    int rows = 0;
    int cols = 0;  // structural + slack + artificial, excluding rhs
    std::vector<double> t;
    std::vector<int> basis;

    double& at(int r, int c) { return t[static_cast<size_t>(r) * (cols + 1) + c]; }
    double at(int r, int c) const { return t[static_cast<size_t>(r) * (cols + 1) + c]; }
    double& rhs(int r) { return t[static_cast<size_t>(r) * (cols + 1) + cols]; }
    double rhs(int r) const { return t[static_cast<size_t>(r) * (cols + 1) + cols]; }

    void pivot(int pr, int pc) {
        const double p = at(pr, pc);
        for (int c = 0; c <= cols; ++c) at(pr, c) /= p;
        at(pr, pc) = 1.0;
        for (int r = 0; r < rows; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis[pr] = pc;
    }
};

// Runs Bland-rule pivots for the given cost vector until optimality. Columns
// with blocked[c] set are never brought into the basis.
LpStatus run_phase(Tableau& tab, const std::vector<double>& cost, const std::vector<char>& blocked,
                   int max_pivots, int& pivots) {
    const int n = tab.cols;
    std::vector<double> red(n);
    while (true) {
        // Reduced costs from scratch each pivot: r = c - c_B B^-1 A. The
        // tableau is kept in canonical form so this is c minus the basic
        // costs folded through the rows.
        for (int c = 0; c < n; ++c) red[c] = cost[c];
        for (int r = 0; r < tab.rows; ++r) {
            const double cb = cost[tab.basis[r]];
            if (cb == 0.0) continue;
            for (int c = 0; c < n; ++c) red[c] -= cb * tab.at(r, c);
        }
        int enter = -1;
        for (int c = 0; c < n; ++c) {
            if (!blocked[c] && red[c] < -kCostTol) {
                enter = c;
                break;
            }
        }
        if (enter < 0) return LpStatus::Optimal;

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int r = 0; r < tab.rows; ++r) {
            const double a = tab.at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = tab.rhs(r) / a;
            if (ratio < best_ratio - kPivotTol ||
                (ratio < best_ratio + kPivotTol && (leave < 0 || tab.basis[r] < tab.basis[leave]))) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave < 0) return LpStatus::Unbounded;
        tab.pivot(leave, enter);
        if (++pivots >= max_pivots) return LpStatus::IterationLimit;
    }
}

}  // namespace

LpResult solve_lp(const LpProblem& problem, int max_pivots) {
    const int n = problem.n_vars;
    const int m_ub = static_cast<int>(problem.b_ub.size());
    const int m_eq = static_cast<int>(problem.b_eq.size());
    const int m = m_ub + m_eq;
    if (static_cast<int>(problem.c.size()) != n ||
        problem.a_ub.size() != static_cast<size_t>(m_ub) * n ||
        problem.a_eq.size() != static_cast<size_t>(m_eq) * n) {
        throw_internal("linear program dimensions are inconsistent");
    }

    Tableau tab;
    tab.rows = m;
    // Column layout: [structural | slack (one per ub row) | artificial].
    const int slack0 = n;
    const int art0 = n + m_ub;
    // Worst case every row needs an artificial variable.
    tab.cols = n + m_ub + m;
    tab.t.assign(static_cast<size_t>(m) * (tab.cols + 1), 0.0);
    tab.basis.assign(m, -1);

    int n_art = 0;
    std::vector<char> is_art(tab.cols, 0);
    for (int r = 0; r < m; ++r) {
        const bool ub_row = r < m_ub;
        const double* a = ub_row ? &problem.a_ub[static_cast<size_t>(r) * n]
                                 : &problem.a_eq[static_cast<size_t>(r - m_ub) * n];
        double b = ub_row ? problem.b_ub[r] : problem.b_eq[r - m_ub];
        double sign = 1.0;
        if (b < 0.0) {
            sign = -1.0;
            b = -b;
        }
        for (int c = 0; c < n; ++c) tab.at(r, c) = sign * a[c];
        tab.rhs(r) = b;
        if (ub_row) tab.at(r, slack0 + r) = sign;
        // A slack entering with +1 gives a ready-made basic variable;
        // otherwise the row gets an artificial one.
        if (ub_row && sign > 0.0) {
            tab.basis[r] = slack0 + r;
        } else {
            const int ac = art0 + n_art++;
            tab.at(r, ac) = 1.0;
            tab.basis[r] = ac;
            is_art[ac] = 1;
        }
    }
    const int used_cols = art0 + n_art;
    tab.cols = used_cols;  // trailing unused artificial columns are dropped
    {
        // Re-pack rows for the reduced column count.
        std::vector<double> packed(static_cast<size_t>(m) * (used_cols + 1));
        const int full = n + m_ub + m + 1;
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < used_cols; ++c)
                packed[static_cast<size_t>(r) * (used_cols + 1) + c] =
                    tab.t[static_cast<size_t>(r) * full + c];
            packed[static_cast<size_t>(r) * (used_cols + 1) + used_cols] =
                tab.t[static_cast<size_t>(r) * full + (full - 1)];
        }
        tab.t = std::move(packed);
    }

    LpResult out;
    std::vector<char> blocked(tab.cols, 0);

    if (n_art > 0) {
        std::vector<double> phase1_cost(tab.cols, 0.0);
        for (int c = art0; c < art0 + n_art; ++c) phase1_cost[c] = 1.0;
        const LpStatus st = run_phase(tab, phase1_cost, blocked, max_pivots, out.pivots);
        if (st != LpStatus::Optimal) {
            out.status = st == LpStatus::Unbounded ? LpStatus::Infeasible : st;
            return out;
        }
        double art_sum = 0.0;
        for (int r = 0; r < m; ++r)
            if (is_art[tab.basis[r]]) art_sum += tab.rhs(r);
        if (art_sum > 1e-7) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        // Drive any zero-valued artificial out of the basis when a real
        // column is available; a row with none is redundant and stays inert.
        for (int r = 0; r < m; ++r) {
            if (!is_art[tab.basis[r]]) continue;
            for (int c = 0; c < art0; ++c) {
                if (std::fabs(tab.at(r, c)) > kPivotTol) {
                    tab.pivot(r, c);
                    ++out.pivots;
                    break;
                }
            }
        }
        for (int c = art0; c < art0 + n_art; ++c) blocked[c] = 1;
    }

    std::vector<double> phase2_cost(tab.cols, 0.0);
    for (int c = 0; c < n; ++c) phase2_cost[c] = problem.c[c];
    out.status = run_phase(tab, phase2_cost, blocked, max_pivots, out.pivots);
    if (out.status != LpStatus::Optimal) return out;

    out.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n) out.x[tab.basis[r]] = tab.rhs(r);
    out.objective = 0.0;
    for (int c = 0; c < n; ++c) out.objective += problem.c[c] * out.x[c];
    return out;
}

}  // namespace dsc
