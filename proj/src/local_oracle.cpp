#include "lpcsp/local_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace lpcsp {

bool is_column(NodeKind kind) {
    return kind == NodeKind::X || kind == NodeKind::XBar || kind == NodeKind::Mu || kind == NodeKind::MuBar;
}

std::uint64_t NodeKey::packed() const {
    return (static_cast<std::uint64_t>(kind) << 59) | (static_cast<std::uint64_t>(a) << 30) |
           static_cast<std::uint64_t>(b);
}

namespace {

RowKind row_kind_of(NodeKind k) {
    switch (k) {
        case NodeKind::R1: return RowKind::R1;
        case NodeKind::R2: return RowKind::R2;
        case NodeKind::R3: return RowKind::R3;
        case NodeKind::R4: return RowKind::R4;
        case NodeKind::R5: return RowKind::R5;
        default: return RowKind::R6;
    }
}

ColKind col_kind_of(NodeKind k) {
    switch (k) {
        case NodeKind::X: return ColKind::X;
        case NodeKind::XBar: return ColKind::XBar;
        case NodeKind::Mu: return ColKind::Mu;
        default: return ColKind::MuBar;
    }
}

struct SimGraph {
    std::vector<std::vector<std::pair<int, double>>> col_rows;
    std::vector<std::vector<std::pair<int, double>>> row_cols;
    std::vector<double> rhs;
};

std::vector<double> run_local_rule(const SimGraph& g, double gamma, double eta, int rounds) {
    const int nc = static_cast<int>(g.col_rows.size());
    const int nr = static_cast<int>(g.row_cols.size());
    std::vector<double> z(nc, 0.0), load(nr, 0.0);
    for (int i = 0; i < nc; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (auto [j, a] : g.col_rows[i]) best = std::min(best, g.rhs[j] / (a * gamma));
        z[i] = std::isfinite(best) ? best : 0.0;
    }
    auto compute_loads = [&] {
        for (int j = 0; j < nr; ++j) {
            double s = 0.0;
            for (auto [i, a] : g.row_cols[j]) s += a * z[i];
            load[j] = s;
        }
    };
    for (int round = 0; round < rounds; ++round) {
        compute_loads();
        for (int i = 0; i < nc; ++i) {
            double slack = std::numeric_limits<double>::infinity();
            for (auto [j, a] : g.col_rows[i]) slack = std::min(slack, (g.rhs[j] - load[j]) / g.rhs[j]);
            if (!std::isfinite(slack)) continue;
            double mult = std::clamp(1.0 + eta * slack, 1.0, 1.0 + eta);
            z[i] *= mult;
        }
    }
    compute_loads();
    std::vector<double> out(nc);
    for (int i = 0; i < nc; ++i) {
        double f = 1.0;
        for (auto [j, a] : g.col_rows[i])
            if (load[j] > 0) f = std::min(f, g.rhs[j] / load[j]);
        out[i] = z[i] * f;
    }
    return out;
}

}  // namespace

GammaBounds gamma_bounds(int q, int s, int t, double w, const PipelineParams& pp) {
    const double C = pp.C, eps = pp.eps;
    const double big = (w + C) / C;
    const double qs1 = std::pow(static_cast<double>(q), s - 1);
    GammaBounds g;
    g.gamma_d = std::max({static_cast<double>(q), (1 + qs1) * big, 2 * big});
    const double c_max = std::max({C * (q - 1 + eps), C * (1 + eps), (1 + eps) * (w + C), C * (qs1 + eps), w + C});
    const double col = std::max({2 + t * big, 2.0 + t, (s + 1) * big, s + big});
    g.gamma_p = c_max / C * col;
    return g;
}

int local_rounds(const GammaBounds& g, const LocalSolverParams& lp) {
    double r = lp.kappa * std::log(g.gamma_p) * std::log(g.gamma_d) / std::pow(lp.eps, 4);
    if (!std::isfinite(r) || r > lp.round_cap) return std::max(1, lp.round_cap);
    return std::clamp(static_cast<int>(std::ceil(r)), 1, std::max(1, lp.round_cap));
}

std::vector<int> CommGraphView::ball() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i)
        if (vertices[i].dist <= radius_hops) out.push_back(i);
    return out;
}

int CommGraphView::find(const NodeKey& key) const {
    auto it = index_.find(key.packed());
    return it == index_.end() ? -1 : it->second;
}

/// Discovers the communication graph through oracle queries. Incident
/// constraint lists are fetched once per variable and cached for the
/// lifetime of the builder (one query session).
class BallBuilder {
public:
    BallBuilder(ConstraintOracle& oracle, const PipelineParams& pp, CommGraphView& view)
        : oracle_(oracle), pp_(pp), view_(view), start_(oracle.query_count()) {}

    NodeKey resolve(const LocalName& name) {
        const int q = oracle_.q();
        if (name.v < 0 || name.v >= oracle_.n()) throw Error(ErrorCode::Usage, "variable out of range");
        switch (name.kind) {
            case NodeKind::X:
            case NodeKind::XBar:
            case NodeKind::R5:
                if (name.value < 0 || name.value >= q) throw Error(ErrorCode::Usage, "value out of range");
                return {name.kind, name.v, name.value};
            case NodeKind::R1:
            case NodeKind::R2: return {name.kind, name.v, 0};
            default: break;
        }
        auto view = oracle_.query(name.v, name.index);
        if (!view) throw Error(ErrorCode::Usage, "no constraint at that index");
        cons_[view->id] = *view;
        const std::int64_t cells = static_cast<std::int64_t>(view->payoff.size());
        if (name.kind == NodeKind::R3 || name.kind == NodeKind::R4) {
            if (name.value < 0 || name.value >= q) throw Error(ErrorCode::Usage, "value out of range");
            int slot = slot_in(*view, name.v);
            return {name.kind, view->id, static_cast<std::int64_t>(slot) * q + name.value};
        }
        if (name.value < 0 || name.value >= cells) throw Error(ErrorCode::Usage, "assignment index out of range");
        return {name.kind, view->id, name.value};
    }

    void seed_constraint(const ConstraintView& view) { cons_[view.id] = view; }

    int add(const NodeKey& key, int dist) {
        auto [it, fresh] = view_.index_.emplace(key.packed(), static_cast<int>(view_.vertices.size()));
        if (fresh) {
            CommGraphView::Vertex vx;
            vx.key = key;
            vx.dist = dist;
            if (!is_column(key.kind)) vx.rhs = row_rhs(key);
            view_.vertices.push_back(std::move(vx));
        }
        return it->second;
    }

    /// Expands columns with dist <= hops and rows with dist < hops.
    void grow(int hops) {
        view_.radius_hops = hops;
        std::deque<int> queue;
        for (int i = 0; i < static_cast<int>(view_.vertices.size()); ++i) queue.push_back(i);
        while (!queue.empty()) {
            int id = queue.front();
            queue.pop_front();
            auto& vx = view_.vertices[id];
            if (vx.expanded) continue;
            bool col = is_column(vx.key.kind);
            if (vx.dist > hops || (!col && vx.dist >= hops)) continue;
            const int d = vx.dist;
            auto nbrs = neighbours(vx.key);
            std::vector<std::pair<int, double>> adj;
            adj.reserve(nbrs.size());
            for (auto& [key, coeff] : nbrs) {
                std::size_t before = view_.vertices.size();
                int nid = add(key, d + 1);
                adj.emplace_back(nid, coeff);
                if (view_.vertices.size() > before) queue.push_back(nid);
            }
            view_.vertices[id].adj = std::move(adj);
            view_.vertices[id].expanded = true;
        }
        view_.query_cost = oracle_.query_count() - start_;
    }

private:
    int slot_in(const ConstraintView& view, int v) const {
        for (int j = 0; j < static_cast<int>(view.distinct_vars.size()); ++j)
            if (view.distinct_vars[j] == v) return j;
        throw Error(ErrorCode::Usage, "variable not in constraint");
    }

    const std::vector<int>& incident(int v) {
        auto it = incident_.find(v);
        if (it != incident_.end()) return it->second;
        std::vector<int> ids;
        for (int i = 1; i <= oracle_.t(); ++i) {
            auto view = oracle_.query(v, i);
            if (!view) break;
            cons_[view->id] = *view;
            ids.push_back(view->id);
        }
        return incident_.emplace(v, std::move(ids)).first->second;
    }

    const ConstraintView& cons(int id) const {
        auto it = cons_.find(id);
        if (it == cons_.end()) throw Error(ErrorCode::Usage, "constraint reached without discovery");
        return it->second;
    }

    double wpp(const ConstraintView& c, std::int64_t beta) const { return c.weight * c.payoff[beta]; }

    double coeff(NodeKind row, NodeKind col, double weight_times_payoff) const {
        return (1.0 * row_multiplier(row_kind_of(row), oracle_.w(), pp_.C)) /
               column_scale(col_kind_of(col), weight_times_payoff, pp_.C);
    }

    double row_rhs(const NodeKey& key) const {
        int k = 0;
        if (key.kind == NodeKind::R4) k = static_cast<int>(cons(key.a).distinct_vars.size());
        RowKind rk = row_kind_of(key.kind);
        return lp3_rhs(rk, oracle_.q(), k, pp_.eps) * row_multiplier(rk, oracle_.w(), pp_.C);
    }

    std::vector<std::pair<NodeKey, double>> neighbours(const NodeKey& key) {
        const int q = oracle_.q();
        std::vector<std::pair<NodeKey, double>> out;
        switch (key.kind) {
            case NodeKind::X:
            case NodeKind::XBar: {
                bool bar = key.kind == NodeKind::XBar;
                const int v = key.a;
                const int a = static_cast<int>(key.b);
                NodeKind own = bar ? NodeKind::R2 : NodeKind::R1;
                NodeKind cross = bar ? NodeKind::R4 : NodeKind::R3;
                out.push_back({{own, v, 0}, coeff(own, key.kind, 0)});
                out.push_back({{NodeKind::R5, v, a}, coeff(NodeKind::R5, key.kind, 0)});
                for (int id : incident(v)) {
                    int slot = slot_in(cons(id), v);
                    out.push_back({{cross, id, static_cast<std::int64_t>(slot) * q + a}, coeff(cross, key.kind, 0)});
                }
                break;
            }
            case NodeKind::Mu:
            case NodeKind::MuBar: {
                bool bar = key.kind == NodeKind::MuBar;
                const auto& c = cons(key.a);
                const int k = static_cast<int>(c.distinct_vars.size());
                const double wp = bar ? 0.0 : wpp(c, key.b);
                NodeKind cross = bar ? NodeKind::R4 : NodeKind::R3;
                for (int slot = 0; slot < k; ++slot) {
                    int digit = beta_digit(key.b, slot, k, q);
                    out.push_back({{cross, key.a, static_cast<std::int64_t>(slot) * q + digit}, coeff(cross, key.kind, wp)});
                }
                out.push_back({{NodeKind::R6, key.a, key.b}, coeff(NodeKind::R6, key.kind, wp)});
                break;
            }
            case NodeKind::R1:
            case NodeKind::R2: {
                NodeKind col = key.kind == NodeKind::R1 ? NodeKind::X : NodeKind::XBar;
                for (int a = 0; a < q; ++a) out.push_back({{col, key.a, a}, coeff(key.kind, col, 0)});
                break;
            }
            case NodeKind::R5:
                out.push_back({{NodeKind::X, key.a, key.b}, coeff(key.kind, NodeKind::X, 0)});
                out.push_back({{NodeKind::XBar, key.a, key.b}, coeff(key.kind, NodeKind::XBar, 0)});
                break;
            case NodeKind::R3:
            case NodeKind::R4: {
                bool bar = key.kind == NodeKind::R4;
                const auto& c = cons(key.a);
                const int k = static_cast<int>(c.distinct_vars.size());
                const int slot = static_cast<int>(key.b / q);
                const int a = static_cast<int>(key.b % q);
                NodeKind xk = bar ? NodeKind::XBar : NodeKind::X;
                NodeKind mk = bar ? NodeKind::MuBar : NodeKind::Mu;
                out.push_back({{xk, c.distinct_vars[slot], a}, coeff(key.kind, xk, 0)});
                const std::int64_t cells = static_cast<std::int64_t>(c.payoff.size());
                for (std::int64_t b = 0; b < cells; ++b)
                    if (beta_digit(b, slot, k, q) == a)
                        out.push_back({{mk, key.a, b}, coeff(key.kind, mk, bar ? 0.0 : wpp(c, b))});
                break;
            }
            case NodeKind::R6: {
                const auto& c = cons(key.a);
                out.push_back({{NodeKind::Mu, key.a, key.b}, coeff(key.kind, NodeKind::Mu, wpp(c, key.b))});
                out.push_back({{NodeKind::MuBar, key.a, key.b}, coeff(key.kind, NodeKind::MuBar, 0)});
                break;
            }
        }
        return out;
    }

    ConstraintOracle& oracle_;
    const PipelineParams& pp_;
    CommGraphView& view_;
    std::int64_t start_;
    std::unordered_map<int, std::vector<int>> incident_;
    std::unordered_map<int, ConstraintView> cons_;
};

CommGraphView build_ball(ConstraintOracle& oracle, const LocalName& center, int rounds, const PipelineParams& pp) {
    CommGraphView view;
    BallBuilder builder(oracle, pp, view);
    std::int64_t before = oracle.query_count();
    builder.add(builder.resolve(center), 0);
    builder.grow(2 * rounds);
    view.query_cost = oracle.query_count() - before;
    return view;
}

std::vector<double> simulate_view(const CommGraphView& view, double gamma_init, double eta, int rounds) {
    const int nv = static_cast<int>(view.vertices.size());
    std::vector<int> local(nv, -1);
    SimGraph g;
    int nc = 0, nr = 0;
    for (int i = 0; i < nv; ++i) local[i] = is_column(view.vertices[i].key.kind) ? nc++ : nr++;
    g.col_rows.resize(nc);
    g.row_cols.resize(nr);
    g.rhs.resize(nr);
    for (int i = 0; i < nv; ++i) {
        const auto& vx = view.vertices[i];
        if (is_column(vx.key.kind)) {
            if (!vx.expanded) continue;
            for (auto [j, a] : vx.adj) g.col_rows[local[i]].emplace_back(local[j], a);
        } else {
            g.rhs[local[i]] = vx.rhs;
            if (vx.expanded)
                for (auto [j, a] : vx.adj) g.row_cols[local[i]].emplace_back(local[j], a);
        }
    }
    // Boundary rows: loads from whatever columns of the view touch them.
    for (int i = 0; i < nv; ++i) {
        const auto& vx = view.vertices[i];
        if (!is_column(vx.key.kind) || !vx.expanded) continue;
        for (auto [j, a] : vx.adj)
            if (!view.vertices[j].expanded) g.row_cols[local[j]].emplace_back(local[i], a);
    }
    auto zc = run_local_rule(g, gamma_init, eta, rounds);
    std::vector<double> out(nv, 0.0);
    for (int i = 0; i < nv; ++i)
        if (is_column(view.vertices[i].key.kind)) out[i] = zc[local[i]];
    return out;
}

std::vector<double> simulate_global(const PackingProgram& pk, double gamma_init, double eta, int rounds) {
    SimGraph g;
    const int nc = pk.lp.num_columns();
    g.col_rows.resize(nc);
    for (int j = 0; j < pk.lp.num_rows(); ++j) {
        const auto& row = pk.lp.rows[j];
        g.row_cols.push_back(row.coeffs);
        g.rhs.push_back(row.rhs);
        for (auto [i, a] : row.coeffs) g.col_rows[i].emplace_back(j, a);
    }
    return run_local_rule(g, gamma_init, eta, rounds);
}

int global_column(const CspInstance& inst, const NodeKey& key) {
    BasicLayout layout(inst);
    const int N = layout.num_columns();
    switch (key.kind) {
        case NodeKind::X: return layout.x_col(key.a, static_cast<int>(key.b));
        case NodeKind::XBar: return N + layout.x_col(key.a, static_cast<int>(key.b));
        case NodeKind::Mu: return layout.mu_col(key.a, key.b);
        case NodeKind::MuBar: return N + layout.mu_col(key.a, key.b);
        default: throw Error(ErrorCode::Usage, "not a column key");
    }
}

LocalLpOracle::LocalLpOracle(ConstraintOracle& oracle, PipelineParams pp, LocalSolverParams sp)
    : oracle_(&oracle), pp_(pp), sp_(sp) {
    auto g = gamma_bounds(oracle.q(), oracle.s(), oracle.t(), oracle.w(), pp_);
    gamma_init_ = g.gamma_d;
    rounds_ = local_rounds(g, sp_);
}

LocalLpOracle::LocalLpOracle(ConstraintOracle& oracle, double eps)
    : LocalLpOracle(oracle, PipelineParams::defaults(oracle.q(), oracle.s(), oracle.t(), oracle.w(), eps), [&] {
          LocalSolverParams sp;
          sp.eps = PipelineParams::defaults(oracle.q(), oracle.s(), oracle.t(), oracle.w(), eps).eps_prime;
          return sp;
      }()) {}

double LocalLpOracle::packing_value(const LocalName& column) {
    if (!is_column(column.kind)) throw Error(ErrorCode::Usage, "packing_value needs a column name");
    CommGraphView view;
    BallBuilder builder(*oracle_, pp_, view);
    std::int64_t before = oracle_->query_count();
    builder.add(builder.resolve(column), 0);
    builder.grow(2 * rounds_ + 2);
    auto vals = simulate_view(view, gamma_init_, sp_.eta, rounds_);
    last_cost_ = oracle_->query_count() - before;
    return vals[0];
}

double LocalLpOracle::query_x(int v, int a) {
    const int q = oracle_->q();
    if (v < 0 || v >= oracle_->n() || a < 0 || a >= q) throw Error(ErrorCode::Usage, "x name out of range");
    CommGraphView view;
    BallBuilder builder(*oracle_, pp_, view);
    std::int64_t before = oracle_->query_count();
    for (int b = 0; b < q; ++b) builder.add({NodeKind::X, v, b}, 0);
    for (int b = 0; b < q; ++b) builder.add({NodeKind::XBar, v, b}, 0);
    builder.grow(2 * rounds_ + 2);
    auto y = simulate_view(view, gamma_init_, sp_.eta, rounds_);
    last_cost_ = oracle_->query_count() - before;

    bool reset = false;
    for (int b = 0; b < q; ++b) {
        double zx = y[b] / pp_.C;
        double zb = y[q + b] / pp_.C;
        if (1.0 - zx - zb >= pp_.eps_dprime) reset = true;
    }
    return reset ? 1.0 / q : std::max(0.0, 1.0 - y[a] / pp_.C);
}

double LocalLpOracle::query_mu(int v, int index, std::int64_t beta) {
    const int q = oracle_->q();
    if (v < 0 || v >= oracle_->n() || index < 1 || index > oracle_->t())
        throw Error(ErrorCode::Usage, "mu name out of range");
    std::int64_t before = oracle_->query_count();
    auto cv = oracle_->query(v, index);
    if (!cv) throw Error(ErrorCode::Usage, "no constraint at that index");
    const int k = static_cast<int>(cv->distinct_vars.size());
    const std::int64_t cells = static_cast<std::int64_t>(cv->payoff.size());
    if (beta < 0 || beta >= cells) throw Error(ErrorCode::Usage, "assignment index out of range");

    CommGraphView view;
    BallBuilder builder(*oracle_, pp_, view);
    builder.seed_constraint(*cv);
    for (int j = 0; j < k; ++j) {
        for (int b = 0; b < q; ++b) builder.add({NodeKind::X, cv->distinct_vars[j], b}, 0);
        for (int b = 0; b < q; ++b) builder.add({NodeKind::XBar, cv->distinct_vars[j], b}, 0);
    }
    for (std::int64_t b = 0; b < cells; ++b) builder.add({NodeKind::Mu, cv->id, b}, 0);
    for (std::int64_t b = 0; b < cells; ++b) builder.add({NodeKind::MuBar, cv->id, b}, 0);
    builder.grow(2 * rounds_ + 2);
    auto y = simulate_view(view, gamma_init_, sp_.eta, rounds_);
    last_cost_ = oracle_->query_count() - before;

    auto at = [&](NodeKind kind, int a, std::int64_t b) { return y[view.find({kind, a, b})]; };
    bool redo = false;
    std::vector<std::vector<double>> marg(k, std::vector<double>(q));
    for (int j = 0; j < k; ++j) {
        const int u = cv->distinct_vars[j];
        bool reset = false;
        for (int b = 0; b < q; ++b)
            if (1.0 - at(NodeKind::X, u, b) / pp_.C - at(NodeKind::XBar, u, b) / pp_.C >= pp_.eps_dprime) reset = true;
        for (int b = 0; b < q; ++b) marg[j][b] = reset ? 1.0 / q : std::max(0.0, 1.0 - at(NodeKind::X, u, b) / pp_.C);
        redo = redo || reset;
    }
    auto scale = [&](std::int64_t b) { return column_scale(ColKind::Mu, cv->weight * cv->payoff[b], pp_.C); };
    for (std::int64_t b = 0; b < cells && !redo; ++b)
        if (1.0 - at(NodeKind::Mu, cv->id, b) / scale(b) - at(NodeKind::MuBar, cv->id, b) / pp_.C >= pp_.eps_dprime)
            redo = true;
    if (!redo) return std::max(0.0, at(NodeKind::Mu, cv->id, beta) / scale(beta));

    double entry = 1.0;
    for (int j = 0; j < k; ++j) {
        double s = 0;
        for (double e : marg[j]) s += std::max(0.0, e);
        double e = marg[j][beta_digit(beta, j, k, q)];
        entry *= s > 0 ? std::max(0.0, e) / s : 1.0 / q;
    }
    return entry;
}

std::vector<double> assemble_packing(LocalLpOracle& olp, const CspInstance& inst) {
    BasicLayout layout(inst);
    std::vector<double> y(2 * layout.num_columns(), 0.0);
    std::vector<char> seen(inst.n(), 0);
    const int rounds = olp.rounds();
    for (int v = 0; v < inst.n(); ++v) {
        if (seen[v]) continue;
        CommGraphView view;
        BallBuilder builder(olp.oracle(), olp.pipeline(), view);
        builder.add({NodeKind::X, v, 0}, 0);
        builder.grow(std::numeric_limits<int>::max() / 2);
        auto vals = simulate_view(view, olp.gamma_init(), olp.solver().eta, rounds);
        for (int i = 0; i < static_cast<int>(view.vertices.size()); ++i) {
            const auto& key = view.vertices[i].key;
            if (!is_column(key.kind)) continue;
            if (key.kind == NodeKind::X) seen[key.a] = 1;
            y[global_column(inst, key)] = vals[i];
        }
    }
    return y;
}

AssembledSolution assemble_global(LocalLpOracle& olp, const CspInstance& inst) {
    AssembledSolution out;
    std::int64_t before = olp.oracle().query_count();
    out.packing = assemble_packing(olp, inst);
    out.query_cost = olp.oracle().query_count() - before;
    BasicLayout layout(inst);
    const int N = layout.num_columns();
    const double C = olp.pipeline().C;
    std::vector<double> z(out.packing.size());
    for (int i = 0; i < 2 * N; ++i) {
        double scale = C;
        if (i >= layout.num_x() && i < N) {
            // Locate the constraint owning mu column i.
            int id = 0;
            while (layout.mu_col(id, 0) + layout.mu_size(id) <= i) ++id;
            const auto pay = inst.payoff(id)[i - layout.mu_col(id, 0)];
            scale = column_scale(ColKind::Mu, inst.constraint(id).weight * pay, C);
        }
        z[i] = out.packing[i] / scale;
    }
    out.repair = restore_and_repair(inst, z, olp.pipeline());
    out.solution = out.repair.solution;
    return out;
}

double log_query_bound(int q, int s, const PackingStats& stats, int rounds) {
    return std::log(static_cast<double>(std::max(q, q * s))) +
           (rounds + 2) * std::log(static_cast<double>(stats.delta_p) * stats.delta_d);
}

}  // namespace lpcsp
