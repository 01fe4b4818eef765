#include "lpcsp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpcsp {

int LinearProgram::add_column(std::string label, double obj) {
    objective.push_back(obj);
    labels.push_back(std::move(label));
    return num_columns() - 1;
}

int LinearProgram::add_row(std::vector<std::pair<int, double>> coeffs, Comparator cmp, double rhs,
                           std::string label) {
    for (auto& [col, a] : coeffs)
        if (col < 0 || col >= num_columns()) throw Error(ErrorCode::Usage, "row references unknown column");
    rows.push_back(LpRow{std::move(coeffs), cmp, rhs, std::move(label)});
    return num_rows() - 1;
}

double LinearProgram::max_violation(const std::vector<double>& z) const {
    double worst = 0.0;
    for (double v : z) worst = std::max(worst, -v);
    for (const auto& row : rows) {
        long double lhs = 0;
        for (auto [col, a] : row.coeffs) lhs += static_cast<long double>(a) * z[col];
        double d = static_cast<double>(lhs - row.rhs);
        switch (row.cmp) {
            case Comparator::Le: worst = std::max(worst, d); break;
            case Comparator::Ge: worst = std::max(worst, -d); break;
            case Comparator::Eq: worst = std::max(worst, std::abs(d)); break;
        }
    }
    return worst;
}

double LinearProgram::objective_value(const std::vector<double>& z) const {
    long double v = 0;
    for (int i = 0; i < num_columns(); ++i) v += static_cast<long double>(objective[i]) * z[i];
    return static_cast<double>(v);
}

namespace {

using Real = long double;

class Tableau {
public:
    Tableau(const LinearProgram& lp, const SolverOptions& opt) : opt_(opt) {
        n_struct_ = lp.num_columns();
        m_ = lp.num_rows();
        // Normalize so every rhs is nonnegative.
        std::vector<Comparator> cmp(m_);
        std::vector<int> sign(m_, 1);
        for (int i = 0; i < m_; ++i) {
            cmp[i] = lp.rows[i].cmp;
            if (lp.rows[i].rhs < 0) {
                sign[i] = -1;
                if (cmp[i] == Comparator::Le)
                    cmp[i] = Comparator::Ge;
                else if (cmp[i] == Comparator::Ge)
                    cmp[i] = Comparator::Le;
            }
        }
        int n_slack = 0, n_art = 0;
        for (int i = 0; i < m_; ++i) {
            if (cmp[i] != Comparator::Eq) ++n_slack;
            if (cmp[i] != Comparator::Le) ++n_art;
        }
        art_begin_ = n_struct_ + n_slack;
        width_ = art_begin_ + n_art + 1;  // last column is the rhs
        rhs_col_ = width_ - 1;
        t_.assign(static_cast<std::size_t>(m_) * width_, 0);
        basis_.assign(m_, -1);
        int slack = n_struct_, art = art_begin_;
        for (int i = 0; i < m_; ++i) {
            for (auto [col, a] : lp.rows[i].coeffs) at(i, col) += sign[i] * static_cast<Real>(a);
            at(i, rhs_col_) = sign[i] * static_cast<Real>(lp.rows[i].rhs);
            if (cmp[i] == Comparator::Le) {
                at(i, slack) = 1;
                basis_[i] = slack++;
            } else if (cmp[i] == Comparator::Ge) {
                at(i, slack++) = -1;
                at(i, art) = 1;
                basis_[i] = art++;
            } else {
                at(i, art) = 1;
                basis_[i] = art++;
            }
        }
        allowed_ = width_ - 1;
    }

    Real& at(int i, int j) { return t_[static_cast<std::size_t>(i) * width_ + j]; }
    Real at(int i, int j) const { return t_[static_cast<std::size_t>(i) * width_ + j]; }

    // Maximizes cost^T z over the current tableau; cost has width_-1 entries.
    void optimize(const std::vector<Real>& cost) {
        // Reduced costs d_j = cost_j - c_B^T column_j.
        std::vector<Real> d(cost.begin(), cost.end());
        d.resize(width_, 0);
        for (int i = 0; i < m_; ++i) {
            Real cb = cost[basis_[i]];
            if (cb == 0) continue;
            const Real* row = &t_[static_cast<std::size_t>(i) * width_];
            for (int j = 0; j < width_; ++j) d[j] -= cb * row[j];
        }
        int degenerate_run = 0;
        std::vector<int> col_rows;
        while (true) {
            if (pivots_ >= opt_.max_pivots) throw Error(ErrorCode::SizeLimit, "simplex pivot limit reached");
            bool bland = degenerate_run >= opt_.degenerate_switch;
            int enter = -1;
            Real best = 0;
            for (int j = 0; j < allowed_; ++j) {
                if (d[j] <= kOptTol) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                if (d[j] > best) {
                    best = d[j];
                    enter = j;
                }
            }
            if (enter < 0) return;

            int leave = -1;
            Real ratio = 0;
            for (int i = 0; i < m_; ++i) {
                Real a = at(i, enter);
                if (a <= kPivotTol) continue;
                Real r = at(i, rhs_col_) / a;
                if (leave < 0 || r < ratio - kRatioTol) {
                    ratio = r;
                    leave = i;
                } else if (r <= ratio + kRatioTol && basis_[i] < basis_[leave]) {
                    leave = i;
                }
            }
            if (leave < 0) throw Error(ErrorCode::Unbounded, "LP objective is unbounded");
            degenerate_run = (ratio <= kRatioTol) ? degenerate_run + 1 : 0;
            pivot(leave, enter, d);
        }
    }

    void pivot(int r, int c, std::vector<Real>& d) {
        ++pivots_;
        Real* prow = &t_[static_cast<std::size_t>(r) * width_];
        Real inv = 1 / prow[c];
        nz_.clear();
        for (int j = 0; j < width_; ++j) {
            if (prow[j] != 0) {
                prow[j] *= inv;
                nz_.push_back(j);
            }
        }
        prow[c] = 1;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            Real* row = &t_[static_cast<std::size_t>(i) * width_];
            Real f = row[c];
            if (f == 0) continue;
            for (int j : nz_) row[j] -= f * prow[j];
            row[c] = 0;
            if (row[rhs_col_] < 0 && row[rhs_col_] > -kPivotTol) row[rhs_col_] = 0;
        }
        Real f = d[c];
        if (f != 0) {
            for (int j : nz_) d[j] -= f * prow[j];
            d[c] = 0;
        }
        basis_[r] = c;
    }

    SolveResult run(const LinearProgram& lp) {
        const int n_art = width_ - 1 - art_begin_;
        if (n_art > 0) {
            std::vector<Real> cost(width_ - 1, 0);
            for (int j = art_begin_; j < width_ - 1; ++j) cost[j] = -1;
            allowed_ = width_ - 1;
            optimize(cost);
            Real infeas = 0, scale = 1;
            for (int i = 0; i < m_; ++i) {
                if (basis_[i] >= art_begin_) infeas += at(i, rhs_col_);
                scale = std::max<Real>(scale, std::abs(lp.rows[i].rhs));
            }
            if (infeas > 1e-9L * scale) throw Error(ErrorCode::Infeasible, "LP has no feasible point");
            // Drive zero-level artificials out of the basis where possible.
            std::vector<Real> dummy(width_, 0);
            for (int i = 0; i < m_; ++i) {
                if (basis_[i] < art_begin_) continue;
                int col = -1;
                Real best = kPivotTol;
                for (int j = 0; j < art_begin_; ++j) {
                    if (std::abs(at(i, j)) > best) {
                        best = std::abs(at(i, j));
                        col = j;
                    }
                }
                if (col >= 0) pivot(i, col, dummy);
            }
        }
        allowed_ = art_begin_;
        std::vector<Real> cost(width_ - 1, 0);
        for (int j = 0; j < n_struct_; ++j) cost[j] = lp.objective[j];
        optimize(cost);

        SolveResult res;
        res.z.assign(n_struct_, 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_struct_) res.z[basis_[i]] = std::max<double>(0.0, static_cast<double>(at(i, rhs_col_)));
        res.value = lp.objective_value(res.z);
        res.pivots = pivots_;
        return res;
    }

private:
    static constexpr Real kOptTol = 1e-11L;
    static constexpr Real kPivotTol = 1e-12L;
    static constexpr Real kRatioTol = 1e-14L;

    SolverOptions opt_;
    int n_struct_ = 0;
    int m_ = 0;
    int art_begin_ = 0;
    int width_ = 0;
    int rhs_col_ = 0;
    int allowed_ = 0;
    std::int64_t pivots_ = 0;
    std::vector<Real> t_;
    std::vector<int> basis_;
    std::vector<int> nz_;
};

}  // namespace

SolveResult solve_lp(const LinearProgram& lp, const SolverOptions& options) {
    if (lp.num_columns() > options.max_columns)
        throw Error(ErrorCode::SizeLimit, "LP has " + std::to_string(lp.num_columns()) + " columns");
    Tableau tab(lp, options);
    return tab.run(lp);
}

BasicLayout::BasicLayout(const CspInstance& instance) : n_(instance.n()), q_(instance.q()) {
    mu_offset_.assign(1, static_cast<std::int64_t>(n_) * q_);
    for (int id = 0; id < instance.num_constraints(); ++id)
        mu_offset_.push_back(mu_offset_.back() + static_cast<std::int64_t>(instance.payoff(id).size()));
}

int beta_digit(std::int64_t beta, int slot, int k, int q) {
    for (int j = k - 1; j > slot; --j) beta /= q;
    return static_cast<int>(beta % q);
}

namespace {

std::string beta_label(std::int64_t beta, int k, int q) {
    std::string s;
    for (int j = 0; j < k; ++j) {
        if (j) s += ',';
        s += std::to_string(beta_digit(beta, j, k, q));
    }
    return s;
}

}  // namespace

LinearProgram build_basic_lp(const CspInstance& inst) {
    BasicLayout layout(inst);
    const int q = inst.q();
    LinearProgram lp;
    for (int v = 0; v < inst.n(); ++v)
        for (int a = 0; a < q; ++a) lp.add_column("x[" + std::to_string(v) + "," + std::to_string(a) + "]");
    for (int id = 0; id < inst.num_constraints(); ++id) {
        const int k = inst.distinct_count(id);
        auto pay = inst.payoff(id);
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(pay.size()); ++b)
            lp.add_column("mu[" + std::to_string(id) + "," + beta_label(b, k, q) + "]",
                          inst.constraint(id).weight * pay[b]);
    }
    for (int v = 0; v < inst.n(); ++v) {
        std::vector<std::pair<int, double>> row;
        for (int a = 0; a < q; ++a) row.emplace_back(layout.x_col(v, a), 1.0);
        lp.add_row(std::move(row), Comparator::Eq, 1.0, "norm[" + std::to_string(v) + "]");
    }
    for (int id = 0; id < inst.num_constraints(); ++id) {
        const int k = inst.distinct_count(id);
        auto dv = inst.distinct_vars(id);
        const int size = layout.mu_size(id);
        for (int slot = 0; slot < k; ++slot) {
            for (int a = 0; a < q; ++a) {
                std::vector<std::pair<int, double>> row;
                for (int b = 0; b < size; ++b)
                    if (beta_digit(b, slot, k, q) == a) row.emplace_back(layout.mu_col(id, b), 1.0);
                row.emplace_back(layout.x_col(dv[slot], a), -1.0);
                lp.add_row(std::move(row), Comparator::Eq, 0.0,
                           "marg[" + std::to_string(id) + "," + std::to_string(dv[slot]) + "," + std::to_string(a) + "]");
            }
        }
    }
    return lp;
}

double lp_value(const CspInstance& inst, const LpSolution& sol) {
    long double v = 0;
    for (int id = 0; id < inst.num_constraints(); ++id) {
        auto pay = inst.payoff(id);
        long double part = 0;
        for (std::size_t b = 0; b < pay.size(); ++b)
            if (pay[b]) part += sol.mu[id][b];
        v += part * inst.constraint(id).weight;
    }
    return static_cast<double>(v);
}

LpSolution solution_from_columns(const CspInstance& inst, const std::vector<double>& z) {
    BasicLayout layout(inst);
    LpSolution sol;
    sol.x.assign(inst.n(), std::vector<double>(inst.q(), 0.0));
    for (int v = 0; v < inst.n(); ++v)
        for (int a = 0; a < inst.q(); ++a) sol.x[v][a] = z[layout.x_col(v, a)];
    sol.mu.resize(inst.num_constraints());
    for (int id = 0; id < inst.num_constraints(); ++id) {
        sol.mu[id].resize(layout.mu_size(id));
        for (int b = 0; b < layout.mu_size(id); ++b) sol.mu[id][b] = z[layout.mu_col(id, b)];
    }
    sol.value = lp_value(inst, sol);
    return sol;
}

std::vector<double> columns_from_solution(const CspInstance& inst, const LpSolution& sol) {
    BasicLayout layout(inst);
    std::vector<double> z(layout.num_columns(), 0.0);
    for (int v = 0; v < inst.n(); ++v)
        for (int a = 0; a < inst.q(); ++a) z[layout.x_col(v, a)] = sol.x[v][a];
    for (int id = 0; id < inst.num_constraints(); ++id)
        for (int b = 0; b < layout.mu_size(id); ++b) z[layout.mu_col(id, b)] = sol.mu[id][b];
    return z;
}

LpSolution solve_basic_lp(const CspInstance& inst, const SolverOptions& options) {
    auto lp = build_basic_lp(inst);
    auto res = solve_lp(lp, options);
    return solution_from_columns(inst, res.z);
}

double infeasibility(const CspInstance& inst, const LpSolution& sol) {
    const int q = inst.q();
    if (static_cast<int>(sol.x.size()) != inst.n() || static_cast<int>(sol.mu.size()) != inst.num_constraints())
        throw Error(ErrorCode::Usage, "solution shape does not match instance");
    for (const auto& row : sol.x) {
        if (static_cast<int>(row.size()) != q) throw Error(ErrorCode::Usage, "x row has wrong length");
        for (double e : row)
            if (e < -1e-12) throw Error(ErrorCode::NegativeEntry, "x entry " + std::to_string(e));
    }
    for (int id = 0; id < inst.num_constraints(); ++id) {
        if (sol.mu[id].size() != inst.payoff(id).size()) throw Error(ErrorCode::Usage, "mu table has wrong size");
        for (double e : sol.mu[id])
            if (e < -1e-12) throw Error(ErrorCode::NegativeEntry, "mu entry " + std::to_string(e));
    }
    long double worst = 0;
    for (int v = 0; v < inst.n(); ++v) {
        long double s = 0;
        for (double e : sol.x[v]) s += e;
        worst = std::max(worst, std::abs(s - 1));
    }
    std::vector<long double> marg;
    for (int id = 0; id < inst.num_constraints(); ++id) {
        const int k = inst.distinct_count(id);
        auto dv = inst.distinct_vars(id);
        const auto& tab = sol.mu[id];
        for (int slot = 0; slot < k; ++slot) {
            marg.assign(q, 0);
            for (std::size_t b = 0; b < tab.size(); ++b) marg[beta_digit(b, slot, k, q)] += tab[b];
            for (int a = 0; a < q; ++a) worst = std::max(worst, std::abs(marg[a] - sol.x[dv[slot]][a]));
        }
    }
    return static_cast<double>(worst);
}

}  // namespace lpcsp
