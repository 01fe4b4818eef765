#include "lpcsp/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace lpcsp {

const char* to_string(ColKind kind) {
    switch (kind) {
        case ColKind::X: return "x";
        case ColKind::XBar: return "xbar";
        case ColKind::Mu: return "mu";
        case ColKind::MuBar: return "mubar";
    }
    return "?";
}

const char* to_string(RowKind kind) {
    switch (kind) {
        case RowKind::R1: return "R1";
        case RowKind::R2: return "R2";
        case RowKind::R3: return "R3";
        case RowKind::R4: return "R4";
        case RowKind::R5: return "R5";
        case RowKind::R6: return "R6";
    }
    return "?";
}

PipelineParams PipelineParams::defaults(int q, int s, int t, double w, double eps) {
    if (!(eps > 0 && eps < 0.5)) throw Error(ErrorCode::Usage, "pipeline eps must lie in (0, 1/2)");
    PipelineParams p;
    const double q2s = std::pow(static_cast<double>(q), 2.0 * s);
    const double tw2 = (t * w) * (t * w);
    p.eps = eps;
    p.C = q2s * tw2 / (eps * eps);
    p.eps_prime = eps * eps * eps / (q2s * tw2);
    p.eps_dprime = eps;
    return p;
}

PipelineParams PipelineParams::defaults(const CspInstance& inst, double eps) {
    return defaults(inst.q(), inst.s(), inst.t(), inst.w(), eps);
}

namespace {

using Coeffs = std::vector<std::pair<int, double>>;

// Columns of mu_{id, beta} with beta_slot = a.
Coeffs marginal_mu(const BasicLayout& layout, int id, int slot, int k, int q, int a, int offset) {
    Coeffs row;
    for (int b = 0; b < layout.mu_size(id); ++b)
        if (beta_digit(b, slot, k, q) == a) row.emplace_back(offset + layout.mu_col(id, b), 1.0);
    return row;
}

std::string idx(std::initializer_list<int> parts) {
    std::string s = "[";
    bool first = true;
    for (int p : parts) {
        if (!first) s += ",";
        s += std::to_string(p);
        first = false;
    }
    return s + "]";
}

}  // namespace

LinearProgram relax_basic_lp(const CspInstance& inst, double eps, bool unit_box) {
    LinearProgram basic = build_basic_lp(inst);
    BasicLayout layout(inst);
    const int q = inst.q();
    LinearProgram lp;
    lp.objective = basic.objective;
    lp.labels = basic.labels;
    for (int v = 0; v < inst.n(); ++v) {
        Coeffs row;
        for (int a = 0; a < q; ++a) row.emplace_back(layout.x_col(v, a), 1.0);
        lp.add_row(row, Comparator::Le, q - 1 + eps, "norm" + idx({v}) + "<=");
        lp.add_row(row, Comparator::Ge, q - 1 - eps, "norm" + idx({v}) + ">=");
    }
    for (int id = 0; id < inst.num_constraints(); ++id) {
        const int k = inst.distinct_count(id);
        auto dv = inst.distinct_vars(id);
        for (int slot = 0; slot < k; ++slot)
            for (int a = 0; a < q; ++a) {
                Coeffs row = marginal_mu(layout, id, slot, k, q, a, 0);
                row.emplace_back(layout.x_col(dv[slot], a), 1.0);
                lp.add_row(row, Comparator::Le, 1 + eps, "marg" + idx({id, dv[slot], a}) + "<=");
                lp.add_row(row, Comparator::Ge, 1 - eps, "marg" + idx({id, dv[slot], a}) + ">=");
            }
    }
    if (unit_box)
        for (int i = 0; i < lp.num_columns(); ++i) lp.add_row({{i, 1.0}}, Comparator::Le, 1.0, "box" + idx({i}));
    return lp;
}

ComplementedLp to_packing(const CspInstance& inst, const PipelineParams& params) {
    BasicLayout layout(inst);
    const int q = inst.q();
    const int N = layout.num_columns();
    const double eps = params.eps;
    ComplementedLp out;
    out.base_columns = N;
    auto& lp = out.lp;
    LinearProgram basic = build_basic_lp(inst);

    for (int i = 0; i < N; ++i) {
        bool is_x = i < layout.num_x();
        lp.add_column(basic.labels[i], basic.objective[i] + params.C);
        out.col_kind.push_back(is_x ? ColKind::X : ColKind::Mu);
    }
    for (int i = 0; i < N; ++i) {
        bool is_x = i < layout.num_x();
        lp.add_column((is_x ? "xbar" : "mubar") + basic.labels[i].substr(basic.labels[i].find('[')), params.C);
        out.col_kind.push_back(is_x ? ColKind::XBar : ColKind::MuBar);
    }

    auto add = [&](Coeffs row, double rhs, RowKind kind, std::string label) {
        lp.add_row(std::move(row), Comparator::Le, rhs, std::string(to_string(kind)) + label);
        out.row_kind.push_back(kind);
    };

    for (int v = 0; v < inst.n(); ++v) {
        Coeffs row;
        for (int a = 0; a < q; ++a) row.emplace_back(layout.x_col(v, a), 1.0);
        add(row, lp3_rhs(RowKind::R1, q, 0, eps), RowKind::R1, idx({v}));
    }
    for (int v = 0; v < inst.n(); ++v) {
        Coeffs row;
        for (int a = 0; a < q; ++a) row.emplace_back(N + layout.x_col(v, a), 1.0);
        add(row, lp3_rhs(RowKind::R2, q, 0, eps), RowKind::R2, idx({v}));
    }
    for (int id = 0; id < inst.num_constraints(); ++id) {
        const int k = inst.distinct_count(id);
        auto dv = inst.distinct_vars(id);
        for (int slot = 0; slot < k; ++slot)
            for (int a = 0; a < q; ++a) {
                Coeffs row{{layout.x_col(dv[slot], a), 1.0}};
                auto mu = marginal_mu(layout, id, slot, k, q, a, 0);
                row.insert(row.end(), mu.begin(), mu.end());
                add(row, lp3_rhs(RowKind::R3, q, k, eps), RowKind::R3, idx({id, dv[slot], a}));
            }
    }
    for (int id = 0; id < inst.num_constraints(); ++id) {
        const int k = inst.distinct_count(id);
        auto dv = inst.distinct_vars(id);
        const double rhs = lp3_rhs(RowKind::R4, q, k, eps);
        for (int slot = 0; slot < k; ++slot)
            for (int a = 0; a < q; ++a) {
                Coeffs row{{N + layout.x_col(dv[slot], a), 1.0}};
                auto mu = marginal_mu(layout, id, slot, k, q, a, N);
                row.insert(row.end(), mu.begin(), mu.end());
                add(row, rhs, RowKind::R4, idx({id, dv[slot], a}));
            }
    }
    for (int v = 0; v < inst.n(); ++v)
        for (int a = 0; a < q; ++a) {
            int c = layout.x_col(v, a);
            add({{c, 1.0}, {N + c, 1.0}}, lp3_rhs(RowKind::R5, q, 0, eps), RowKind::R5, idx({v, a}));
        }
    for (int id = 0; id < inst.num_constraints(); ++id)
        for (int b = 0; b < layout.mu_size(id); ++b) {
            int c = layout.mu_col(id, b);
            add({{c, 1.0}, {N + c, 1.0}}, lp3_rhs(RowKind::R6, q, 0, eps), RowKind::R6, idx({id, b}));
        }
    return out;
}

PackingStats compute_packing_stats(const std::vector<LpRow>& rows, int num_columns) {
    PackingStats st;
    std::vector<double> col_sum(num_columns, 0.0);
    std::vector<double> col_min_rhs(num_columns, 0.0);
    std::vector<int> col_deg(num_columns, 0);
    for (const auto& row : rows) {
        st.c_max = std::max(st.c_max, row.rhs);
        double sum = 0.0;
        int nz = 0;
        for (auto [col, a] : row.coeffs) {
            if (a == 0.0) continue;
            sum += a;
            ++nz;
            col_sum[col] += a;
            col_min_rhs[col] = col_deg[col] == 0 ? row.rhs : std::min(col_min_rhs[col], row.rhs);
            ++col_deg[col];
        }
        st.gamma_d = std::max(st.gamma_d, sum);
        st.delta_p = std::max(st.delta_p, nz);
    }
    for (int i = 0; i < num_columns; ++i) {
        st.delta_d = std::max(st.delta_d, col_deg[i]);
        if (col_deg[i] > 0 && col_min_rhs[i] > 0)
            st.gamma_p = std::max(st.gamma_p, st.c_max / col_min_rhs[i] * col_sum[i]);
    }
    return st;
}

double column_scale(ColKind kind, double weight_times_payoff, double C) {
    return kind == ColKind::Mu ? weight_times_payoff + C : C;
}

double lp3_rhs(RowKind kind, int q, int k, double eps) {
    switch (kind) {
        case RowKind::R1: return q - 1 + eps;
        case RowKind::R2: return 1 + eps;
        case RowKind::R3: return 1 + eps;
        case RowKind::R4: return static_cast<double>(ipow(q, k - 1)) + eps;
        case RowKind::R5:
        case RowKind::R6: return 1.0;
    }
    return 0.0;
}

double row_multiplier(RowKind kind, double w, double C) {
    return (kind == RowKind::R3 || kind == RowKind::R6) ? w + C : C;
}

std::vector<double> PackingProgram::scale(const std::vector<double>& z) const {
    std::vector<double> y(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) y[i] = z[i] * col_scale[i];
    return y;
}

std::vector<double> PackingProgram::unscale(const std::vector<double>& y) const {
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] / col_scale[i];
    return z;
}

PackingProgram normalize_packing(const ComplementedLp& lp3, double w, double C) {
    PackingProgram out;
    const int ncol = lp3.lp.num_columns();
    out.col_kind = lp3.col_kind;
    out.row_kind = lp3.row_kind;
    out.col_scale.resize(ncol);
    for (int i = 0; i < ncol; ++i) {
        // The complemented LP objective coefficient is C, or w_P P(beta) + C on mu.
        out.col_scale[i] = lp3.lp.objective[i];
        out.lp.add_column(lp3.lp.labels[i], 1.0);
    }
    for (int j = 0; j < lp3.lp.num_rows(); ++j) {
        const auto& row = lp3.lp.rows[j];
        double mult = row_multiplier(lp3.row_kind[j], w, C);
        out.row_mult.push_back(mult);
        Coeffs coeffs;
        for (auto [col, a] : row.coeffs) coeffs.emplace_back(col, a * mult / out.col_scale[col]);
        out.lp.add_row(std::move(coeffs), Comparator::Le, row.rhs * mult, row.label);
    }
    out.stats = compute_packing_stats(out.lp.rows, ncol);
    return out;
}

std::vector<double> product_table(const CspInstance& inst, int id, const std::vector<std::vector<double>>& x) {
    const int q = inst.q();
    const int k = inst.distinct_count(id);
    auto dv = inst.distinct_vars(id);
    std::vector<std::vector<double>> marg(k);
    for (int j = 0; j < k; ++j) {
        marg[j] = x[dv[j]];
        double s = 0;
        for (double e : marg[j]) s += std::max(0.0, e);
        for (auto& e : marg[j]) e = s > 0 ? std::max(0.0, e) / s : 1.0 / q;
    }
    const auto cells = inst.payoff(id).size();
    std::vector<double> table(cells, 1.0);
    for (std::size_t b = 0; b < cells; ++b)
        for (int j = 0; j < k; ++j) table[b] *= marg[j][beta_digit(static_cast<std::int64_t>(b), j, k, q)];
    return table;
}

RepairOutcome restore_and_repair(const CspInstance& inst, const std::vector<double>& z, const PipelineParams& params,
                                 double feasibility_tol) {
    auto lp3 = to_packing(inst, params);
    if (static_cast<int>(z.size()) != lp3.lp.num_columns())
        throw Error(ErrorCode::Usage, "point has wrong length for the complemented LP");
    double viol = lp3.lp.max_violation(z);
    if (viol > feasibility_tol)
        throw Error(ErrorCode::NotFeasibleForLp3, "max violation " + std::to_string(viol));

    BasicLayout layout(inst);
    const int q = inst.q();
    const int N = lp3.base_columns;
    auto deficient = [&](int col) { return 1.0 - z[col] - z[N + col] >= params.eps_dprime; };

    RepairOutcome out;
    for (int i = 0; i < N; ++i)
        if (deficient(i)) ++out.deficient_columns;

    auto& sol = out.solution;
    sol.x.assign(inst.n(), std::vector<double>(q, 0.0));
    std::vector<char> reset(inst.n(), 0);
    for (int v = 0; v < inst.n(); ++v) {
        for (int a = 0; a < q; ++a)
            if (deficient(layout.x_col(v, a))) reset[v] = 1;
        for (int a = 0; a < q; ++a)
            sol.x[v][a] = reset[v] ? 1.0 / q : std::max(0.0, 1.0 - z[layout.x_col(v, a)]);
        out.reset_variables += reset[v];
    }
    sol.mu.resize(inst.num_constraints());
    for (int id = 0; id < inst.num_constraints(); ++id) {
        bool redo = false;
        for (int v : inst.distinct_vars(id)) redo = redo || reset[v];
        for (int b = 0; b < layout.mu_size(id) && !redo; ++b) redo = deficient(layout.mu_col(id, b));
        if (redo) {
            sol.mu[id] = product_table(inst, id, sol.x);
            ++out.reset_constraints;
        } else {
            sol.mu[id].resize(layout.mu_size(id));
            for (int b = 0; b < layout.mu_size(id); ++b) sol.mu[id][b] = std::max(0.0, z[layout.mu_col(id, b)]);
        }
    }
    sol.value = lp_value(inst, sol);
    out.infeasibility = infeasibility(inst, sol);
    return out;
}

}  // namespace lpcsp
