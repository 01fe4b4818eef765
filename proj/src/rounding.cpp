#include "lpcsp/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

namespace lpcsp {

double integral_eps(double eps) {
    if (!(eps > 0 && eps <= 1)) throw Error(ErrorCode::Usage, "eps must lie in (0, 1]");
    double k = std::ceil(1.0 / eps - 1e-9);
    return 1.0 / k;
}

double discretize(double x, double eps) {
    if (x <= 0) return 0.0;
    double m = std::ceil(x / eps);
    if (m > 1 && (m - 1) * eps >= x) m -= 1;
    if (m * eps < x) m += 1;
    return m * eps;
}

FoldingMap folding_map(const std::vector<std::vector<double>>& x, double eps) {
    FoldingMap fm;
    fm.eps = eps;
    std::map<std::vector<double>, int> ids;
    fm.bucket_of.reserve(x.size());
    for (const auto& row : x) {
        std::vector<double> key(row.size());
        for (std::size_t a = 0; a < row.size(); ++a) key[a] = discretize(row[a], eps);
        auto [it, fresh] = ids.emplace(key, fm.num_buckets());
        if (fresh) fm.buckets.push_back(std::move(key));
        fm.bucket_of.push_back(it->second);
    }
    return fm;
}

CspInstance fold_instance(const CspInstance& inst, const FoldingMap& fm) {
    InstanceSpec spec;
    spec.q = inst.q();
    spec.s = inst.s();
    spec.w = inst.w();
    spec.n = fm.num_buckets();
    spec.predicates = inst.predicates();
    std::vector<int> degree(fm.num_buckets(), 0);
    for (int id = 0; id < inst.num_constraints(); ++id) {
        Constraint c = inst.constraint(id);
        for (int& v : c.scope) v = fm.bucket_of[v];
        std::vector<int> distinct = c.scope;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (int b : distinct) ++degree[b];
        spec.constraints.push_back(std::move(c));
    }
    spec.t = std::max(1, degree.empty() ? 1 : *std::max_element(degree.begin(), degree.end()));
    return CspInstance::build(spec);
}

Assignment unfold(const FoldingMap& fm, const Assignment& folded) {
    Assignment out(fm.bucket_of.size());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = folded[fm.bucket_of[v]];
    return out;
}

double f_value(ConstraintOracle& oracle, const FoldingMap& fm, const Assignment& folded, int v) {
    const int q = oracle.q();
    double f = 0.0;
    for (int i = 1; i <= oracle.t(); ++i) {
        auto c = oracle.query(v, i);
        if (!c) break;
        std::int64_t idx = 0;
        for (int u : c->scope) idx = idx * q + folded[fm.bucket_of[u]];
        if (c->predicate->truth_table[idx]) f += c->weight / static_cast<double>(c->distinct_vars.size());
    }
    return f;
}

double estimate_assignment_value(ConstraintOracle& oracle, const FoldingMap& fm, const Assignment& folded, double eps,
                                 double delta, std::uint64_t seed) {
    auto f = [&](int v) { return f_value(oracle, fm, folded, v); };
    return sum_estimator(f, oracle.n(), oracle.t() * oracle.w(), eps / 2, delta, seed);
}

double default_fold_eps(double eps, int q, int s, int t, double w) {
    return eps * eps / (static_cast<double>(ipow(q, s)) * s * t * w * 8);
}

namespace {

Assignment digits_of(std::int64_t index, int len, int q) {
    Assignment a(len);
    for (int j = len - 1; j >= 0; --j) {
        a[j] = static_cast<int>(index % q);
        index /= q;
    }
    return a;
}

}  // namespace

RoundingResult round_csp(ConstraintOracle& oracle, const std::vector<std::vector<double>>& x,
                         const RoundingParams& params, std::uint64_t seed) {
    if (!(params.eps > 0 && params.eps < 1)) throw Error(ErrorCode::Usage, "eps must lie in (0, 1)");
    if (static_cast<int>(x.size()) != oracle.n()) throw Error(ErrorCode::Usage, "marginals do not match the instance");
    const int q = oracle.q();
    const int n = oracle.n();
    RoundingResult res;
    double fe = params.fold_eps > 0 ? params.fold_eps
                                    : default_fold_eps(params.eps, q, oracle.s(), oracle.t(), oracle.w());
    res.fold_eps = integral_eps(std::min(fe, 1.0));
    res.fold = folding_map(x, res.fold_eps);

    const double w_total = oracle.instance().total_weight();
    if (w_total < params.eps * n) {
        res.short_circuit = true;
        res.folded_argmax.assign(res.fold.num_buckets(), 0);
        return res;
    }

    const int k = res.fold.num_buckets();
    std::int64_t count = 1;
    for (int j = 0; j < k; ++j) {
        if (count > params.budget / q) throw Error(ErrorCode::FoldTooLarge, "folded assignment count exceeds budget");
        count *= q;
    }
    if (count > params.budget) throw Error(ErrorCode::FoldTooLarge, "folded assignment count exceeds budget");
    res.num_assignments = count;
    res.delta = 1.0 / (3.0 * static_cast<double>(count));
    res.samples_per_assignment = n > 0 ? hoeffding_samples(oracle.t() * oracle.w(), params.eps / 2, res.delta) : 0;
    res.estimates.assign(count, 0.0);

    const int jobs = std::max(1, std::min<int>(params.jobs, static_cast<int>(std::min<std::int64_t>(count, 256))));
    std::vector<std::int64_t> spent(jobs, 0);
    auto work = [&](int job) {
        ConstraintOracle local(oracle.instance());
        for (std::int64_t b = job; b < count; b += jobs)
            res.estimates[b] = estimate_assignment_value(local, res.fold, digits_of(b, k, q), params.eps, res.delta,
                                                         derive_seed(seed, static_cast<std::uint64_t>(b)));
        spent[job] = local.query_count();
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(work, j);
        for (auto& th : pool) th.join();
    }
    for (auto s : spent) res.oracle_queries += s;

    std::int64_t best = 0;
    for (std::int64_t b = 1; b < count; ++b)
        if (res.estimates[b] > res.estimates[best]) best = b;
    res.estimate = res.estimates[best];
    res.folded_argmax = digits_of(best, k, q);
    return res;
}

int assignment_query(const RoundingResult& result, int v) {
    if (v < 0 || v >= static_cast<int>(result.fold.bucket_of.size()))
        throw Error(ErrorCode::Usage, "variable out of range");
    return result.folded_argmax[result.fold.bucket_of[v]];
}

std::optional<double> family_delta(const std::string& family, double eps) {
    if (family == "horn") return eps / 2;
    if (family == "2sat") return std::nullopt;
    throw Error(ErrorCode::Usage, "unknown family preset: " + family);
}

TestOutcome test_satisfiability(ConstraintOracle& oracle, const std::vector<std::vector<double>>& x, double eps,
                                double delta, std::uint64_t seed, const RoundingParams& base) {
    if (!(eps > 0 && eps < 1)) throw Error(ErrorCode::Usage, "eps must lie in (0, 1)");
    if (!(delta > 0)) throw Error(ErrorCode::Usage, "delta must be positive");
    TestOutcome out;
    const int n = oracle.n();
    const double w_total = oracle.instance().total_weight();
    out.threshold = (1 - eps / 2) * w_total - eps * oracle.t() * oracle.w() * n / 2;
    if (oracle.instance().num_constraints() == 0) {
        out.accept = true;
        return out;
    }
    RoundingParams p = base;
    p.eps = std::min(eps / 2, delta);
    out.rounding = round_csp(oracle, x, p, seed);
    out.estimate = out.rounding.estimate;
    out.accept = out.estimate > out.threshold;
    return out;
}

}  // namespace lpcsp
