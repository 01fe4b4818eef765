#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lpcsp/csp.hpp"

namespace lpcsp {

enum class Comparator { Le, Eq, Ge };

struct LpRow {
    std::vector<std::pair<int, double>> coeffs;  // (column, coefficient)
    Comparator cmp = Comparator::Le;
    double rhs = 0.0;
    std::string label;
};

/// max objective^T z subject to rows, z >= 0.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::string> labels;
    std::vector<LpRow> rows;

    int num_columns() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    int add_column(std::string label, double obj = 0.0);
    int add_row(std::vector<std::pair<int, double>> coeffs, Comparator cmp, double rhs, std::string label = {});

    /// Largest violation of any row by the point z (negative entries count as
    /// violations of z >= 0).
    double max_violation(const std::vector<double>& z) const;
    double objective_value(const std::vector<double>& z) const;
};

struct SolverOptions {
    int max_columns = 50000;
    std::int64_t max_pivots = 2'000'000;
    /// Consecutive degenerate pivots tolerated under largest-coefficient
    /// pricing before switching to Bland's rule.
    int degenerate_switch = 30;
};

struct SolveResult {
    double value = 0.0;
    std::vector<double> z;
    std::int64_t pivots = 0;
};

/// Two-phase dense simplex in extended precision.
SolveResult solve_lp(const LinearProgram& lp, const SolverOptions& options = {});

/// Column layout shared by BasicLP and the pipeline LPs: x_{v,a} at v*q + a,
/// then the mu table of each constraint in id order, each indexed over
/// assignments to its distinct variables.
class BasicLayout {
public:
    BasicLayout() = default;
    explicit BasicLayout(const CspInstance& instance);

    int x_col(int v, int a) const { return v * q_ + a; }
    int mu_col(int id, std::int64_t beta) const { return static_cast<int>(mu_offset_[id] + beta); }
    int mu_size(int id) const { return static_cast<int>(mu_offset_[id + 1] - mu_offset_[id]); }
    int num_x() const { return n_ * q_; }
    int num_columns() const { return static_cast<int>(mu_offset_.back()); }
    int q() const { return q_; }
    int n() const { return n_; }

private:
    int n_ = 0;
    int q_ = 2;
    std::vector<std::int64_t> mu_offset_{0};
};

/// Digit of beta (over the distinct variables of a constraint, first most
/// significant) at slot `slot`, for a table with `k` slots.
int beta_digit(std::int64_t beta, int slot, int k, int q);

LinearProgram build_basic_lp(const CspInstance& instance);

struct LpSolution {
    std::vector<std::vector<double>> x;   // n x q
    std::vector<std::vector<double>> mu;  // per constraint, q^{#distinct vars}
    double value = 0.0;
};

/// Sum_P w_P sum_beta P(beta) mu_{P,beta}.
double lp_value(const CspInstance& instance, const LpSolution& sol);

LpSolution solution_from_columns(const CspInstance& instance, const std::vector<double>& z);
std::vector<double> columns_from_solution(const CspInstance& instance, const LpSolution& sol);

/// Solves BasicLP exactly; the returned solution's value is recomputed from
/// its entries.
LpSolution solve_basic_lp(const CspInstance& instance, const SolverOptions& options = {});

/// Smallest eps for which sol is eps-infeasible for BasicLP.
double infeasibility(const CspInstance& instance, const LpSolution& sol);

}  // namespace lpcsp
