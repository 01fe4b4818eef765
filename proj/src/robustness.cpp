#include "lpcsp/robustness.hpp"

#include <algorithm>
#include <cmath>

namespace lpcsp {

double CharacterBasis::max_abs() const {
    double m = 0;
    for (const auto& row : chi)
        for (double e : row) m = std::max(m, std::abs(e));
    return m;
}

CharacterBasis build_basis(int q) {
    if (q < 2) throw Error(ErrorCode::Usage, "basis needs q >= 2");
    CharacterBasis b;
    b.q = q;
    auto dot = [q](const std::vector<double>& f, const std::vector<double>& g) {
        double s = 0;
        for (int a = 0; a < q; ++a) s += f[a] * g[a];
        return s / q;
    };
    b.chi.push_back(std::vector<double>(q, 1.0));
    for (int e = 0; e < q && static_cast<int>(b.chi.size()) < q; ++e) {
        std::vector<double> v(q, 0.0);
        v[e] = 1.0;
        for (const auto& c : b.chi) {
            double p = dot(v, c);
            for (int a = 0; a < q; ++a) v[a] -= p * c[a];
        }
        double norm = std::sqrt(dot(v, v));
        if (norm < 1e-9) continue;
        for (auto& x : v) x /= norm;
        auto first = std::find_if(v.begin(), v.end(), [](double x) { return std::abs(x) > 1e-12; });
        if (*first < 0)
            for (auto& x : v) x = -x;
        b.chi.push_back(std::move(v));
    }
    return b;
}

namespace {

int table_arity(std::size_t size, int q) {
    int k = 0;
    std::size_t n = 1;
    while (n < size) {
        n *= q;
        ++k;
    }
    if (n != size) throw Error(ErrorCode::Usage, "table length is not a power of q");
    return k;
}

// Applies m (q x q) along every coordinate: out[.. s ..] = sum_a m[s][a] in[.. a ..].
std::vector<double> along_axes(std::vector<double> f, int q, const std::vector<std::vector<double>>& m) {
    const int k = table_arity(f.size(), q);
    std::vector<double> tmp(q);
    std::size_t stride = 1;
    for (int axis = 0; axis < k; ++axis, stride *= q) {
        const std::size_t block = stride * q;
        for (std::size_t base = 0; base < f.size(); base += block)
            for (std::size_t off = 0; off < stride; ++off) {
                for (int s = 0; s < q; ++s) {
                    double acc = 0;
                    for (int a = 0; a < q; ++a) acc += m[s][a] * f[base + off + a * stride];
                    tmp[s] = acc;
                }
                for (int s = 0; s < q; ++s) f[base + off + s * stride] = tmp[s];
            }
    }
    return f;
}

}  // namespace

std::vector<double> hat(const std::vector<double>& f, const CharacterBasis& basis) {
    return along_axes(f, basis.q, basis.chi);
}

std::vector<double> unhat(const std::vector<double>& fhat, const CharacterBasis& basis) {
    const int q = basis.q;
    std::vector<std::vector<double>> m(q, std::vector<double>(q));
    for (int a = 0; a < q; ++a)
        for (int s = 0; s < q; ++s) m[a][s] = basis.chi[s][a] / q;
    return along_axes(fhat, q, m);
}

std::vector<std::vector<double>> surgery(const std::vector<std::vector<double>>& x) {
    auto out = x;
    for (auto& row : out) {
        double s = 0;
        for (double e : row) {
            if (e < 0) throw Error(ErrorCode::NegativeEntry, "negative marginal");
            s += e;
        }
        if (s <= 0) throw Error(ErrorCode::ZeroRow, "all-zero marginal row");
        for (auto& e : row) e /= s;
    }
    return out;
}

double smoothing_delta(int k, int q, double eps) { return k * std::pow(static_cast<double>(q), 3) * eps; }

std::vector<double> smooth(const std::vector<double>& mu, const std::vector<std::vector<double>>& x, double delta,
                           const CharacterBasis& basis) {
    const int q = basis.q;
    const int k = table_arity(mu.size(), q);
    if (static_cast<int>(x.size()) != k) throw Error(ErrorCode::Usage, "need one marginal row per table coordinate");
    for (double e : mu)
        if (!(e >= 0)) throw Error(ErrorCode::NotADistribution, "negative table entry");
    delta = std::clamp(delta, 0.0, 1.0);

    auto fh = hat(mu, basis);
    // sigma = (0,..,s at i,..,0) sits at s * q^{k-1-i}.
    for (int i = 0; i < k; ++i) {
        std::size_t stride = 1;
        for (int j = i + 1; j < k; ++j) stride *= q;
        for (int s = 0; s < q; ++s) {
            double g = 0;
            for (int a = 0; a < q; ++a) g += x[i][a] * basis.chi[s][a];
            fh[s * stride] = g;
        }
    }
    auto h = unhat(fh, basis);
    const double u = 1.0 / static_cast<double>(mu.size());
    for (auto& e : h) {
        e = (1 - delta) * e + delta * u;
        if (e < 0) {
            if (e < -1e-12) throw Error(ErrorCode::NotADistribution, "smoothing parameter too small");
            e = 0;
        }
    }
    return h;
}

RepairReport repair_to_feasible(const CspInstance& inst, const LpSolution& sol) {
    const int q = inst.q();
    RepairReport rep;
    rep.eps_in = infeasibility(inst, sol);
    rep.value_in = lp_value(inst, sol);

    LpSolution mid = sol;
    mid.x = surgery(sol.x);
    rep.eps_surgery = infeasibility(inst, mid);
    rep.delta = std::min(1.0, smoothing_delta(inst.s(), q, rep.eps_surgery));

    const auto basis = build_basis(q);
    auto& out = rep.solution;
    out.x = mid.x;
    out.mu.resize(inst.num_constraints());
    for (int id = 0; id < inst.num_constraints(); ++id) {
        std::vector<std::vector<double>> xs;
        for (int v : inst.distinct_vars(id)) xs.push_back(mid.x[v]);
        out.mu[id] = smooth(sol.mu[id], xs, rep.delta, basis);
        double l1 = 0;
        for (std::size_t b = 0; b < out.mu[id].size(); ++b) l1 += std::abs(out.mu[id][b] - sol.mu[id][b]);
        rep.l1_bound += inst.constraint(id).weight * l1;
    }
    for (auto& row : out.x)
        for (auto& e : row) e = (1 - rep.delta) * e + rep.delta / q;
    out.value = lp_value(inst, out);
    rep.loss = rep.value_in - out.value;
    rep.kappa = rep.eps_in > 0 && inst.total_weight() > 0 ? rep.loss / (rep.eps_in * inst.total_weight()) : 0.0;
    rep.infeasibility = infeasibility(inst, out);
    return rep;
}

}  // namespace lpcsp
