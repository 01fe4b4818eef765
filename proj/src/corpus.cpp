#include "lpcsp/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace lpcsp {

namespace {

// Picks k distinct variables among those with spare degree; empty if fewer
// than k are available.
std::vector<int> pick_scope(std::vector<int>& load, int t, int k, std::mt19937_64& rng) {
    std::vector<int> free;
    for (int v = 0; v < static_cast<int>(load.size()); ++v)
        if (load[v] < t) free.push_back(v);
    if (static_cast<int>(free.size()) < k) return {};
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> d(i, static_cast<int>(free.size()) - 1);
        std::swap(free[i], free[d(rng)]);
    }
    free.resize(k);
    for (int v : free) ++load[v];
    return free;
}

// A clause over k literals; negated[i] marks literal i as negative.
Predicate clause_predicate(const std::vector<bool>& negated) {
    const int k = static_cast<int>(negated.size());
    Predicate p;
    p.arity = k;
    p.name = "OR";
    for (bool b : negated) p.name += b ? "-" : "+";
    p.truth_table.resize(std::size_t{1} << k);
    for (std::size_t idx = 0; idx < p.truth_table.size(); ++idx) {
        bool sat = false;
        for (int i = 0; i < k; ++i) {
            int bit = static_cast<int>((idx >> (k - 1 - i)) & 1);
            if (bit != static_cast<int>(negated[i])) sat = true;
        }
        p.truth_table[idx] = sat;
    }
    return p;
}

class PredicatePool {
public:
    int id_of(const Predicate& p) {
        auto it = ids_.find(p.name);
        if (it != ids_.end()) return it->second;
        int id = static_cast<int>(preds_.size());
        preds_.push_back(p);
        ids_[p.name] = id;
        return id;
    }
    std::vector<Predicate> take() { return std::move(preds_); }

private:
    std::vector<Predicate> preds_;
    std::map<std::string, int> ids_;
};

std::vector<bool> random_horn_signs(int k, std::mt19937_64& rng) {
    // At most one positive literal: choose none or one position uniformly.
    std::uniform_int_distribution<int> d(-1, k - 1);
    int pos = d(rng);
    std::vector<bool> neg(k, true);
    if (pos >= 0) neg[pos] = false;
    return neg;
}

}  // namespace

CspInstance random_instance(const RandomCorpusParams& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    InstanceSpec spec;
    spec.q = p.q, spec.s = p.s, spec.t = p.t, spec.w = p.w, spec.n = p.n;
    std::vector<std::vector<int>> by_arity(p.s + 1);
    for (int k = 1; k <= p.s; ++k) {
        const auto cells = static_cast<std::size_t>(ipow(p.q, k));
        for (int r = 0; r < p.predicates_per_arity; ++r) {
            Predicate pr;
            pr.arity = k;
            pr.name = "R" + std::to_string(k) + "_" + std::to_string(r);
            pr.truth_table.resize(cells);
            std::bernoulli_distribution coin(0.5);
            do {
                for (auto& e : pr.truth_table) e = coin(rng);
            } while (std::all_of(pr.truth_table.begin(), pr.truth_table.end(), [](auto e) { return e == 0; }) ||
                     std::all_of(pr.truth_table.begin(), pr.truth_table.end(), [](auto e) { return e == 1; }));
            by_arity[k].push_back(static_cast<int>(spec.predicates.size()));
            spec.predicates.push_back(std::move(pr));
        }
    }
    const int m = p.m >= 0 ? p.m : p.n * p.t / p.s;
    std::vector<int> load(p.n, 0);
    std::uniform_int_distribution<int> arity(1, p.s);
    std::uniform_int_distribution<int> which(0, p.predicates_per_arity - 1);
    const int wmax = std::max(1, static_cast<int>(std::floor(p.w)));
    std::uniform_int_distribution<int> iw(1, wmax);
    std::uniform_real_distribution<double> rw(1.0, p.w);
    for (int c = 0; c < m; ++c) {
        int k = std::min(arity(rng), p.n);
        auto scope = pick_scope(load, p.t, k, rng);
        if (scope.empty()) break;
        double weight = p.integer_weights ? iw(rng) : rw(rng);
        spec.constraints.push_back({by_arity[k][which(rng)], std::move(scope), weight});
    }
    return CspInstance::build(std::move(spec));
}

CspInstance planted_horn_instance(const HornParams& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> planted(p.n);
    std::bernoulli_distribution coin(0.5);
    for (auto& b : planted) b = coin(rng);
    InstanceSpec spec;
    spec.q = 2, spec.s = p.s, spec.t = p.t, spec.w = 1.0, spec.n = p.n;
    PredicatePool pool;
    const int m = p.m >= 0 ? p.m : p.n * p.t / p.s;
    std::vector<int> load(p.n, 0);
    std::uniform_int_distribution<int> arity(1, p.s);
    int attempts = 0;
    while (static_cast<int>(spec.constraints.size()) < m && attempts++ < 50 * (m + 1)) {
        int k = std::min(arity(rng), p.n);
        auto trial_load = load;
        auto scope = pick_scope(trial_load, p.t, k, rng);
        if (scope.empty()) break;
        auto neg = random_horn_signs(k, rng);
        bool sat = false;
        for (int i = 0; i < k; ++i)
            if (planted[scope[i]] != static_cast<int>(neg[i])) sat = true;
        if (!sat) continue;
        load = std::move(trial_load);
        spec.constraints.push_back({pool.id_of(clause_predicate(neg)), std::move(scope), 1.0});
    }
    spec.predicates = pool.take();
    return CspInstance::build(std::move(spec));
}

CspInstance contradictory_horn_instance(const HornParams& p, std::uint64_t seed) {
    if (p.t < 2) throw Error(ErrorCode::Usage, "contradictory Horn instances need t >= 2");
    std::mt19937_64 rng(seed);
    InstanceSpec spec;
    spec.q = 2, spec.s = p.s, spec.t = p.t, spec.w = 1.0, spec.n = p.n;
    PredicatePool pool;
    std::vector<int> load(p.n, 2);
    for (int v = 0; v < p.n; ++v) {
        spec.constraints.push_back({pool.id_of(clause_predicate({false})), {v}, 1.0});
        spec.constraints.push_back({pool.id_of(clause_predicate({true})), {v}, 1.0});
    }
    const int extra = p.m >= 0 ? p.m : p.n * (p.t - 2) / p.s;
    std::uniform_int_distribution<int> arity(1, p.s);
    for (int c = 0; c < extra; ++c) {
        int k = std::min(arity(rng), p.n);
        auto scope = pick_scope(load, p.t, k, rng);
        if (scope.empty()) break;
        spec.constraints.push_back({pool.id_of(clause_predicate(random_horn_signs(k, rng))), std::move(scope), 1.0});
    }
    spec.predicates = pool.take();
    return CspInstance::build(std::move(spec));
}

CspInstance random_2sat_instance(int n, int t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    InstanceSpec spec;
    spec.q = 2, spec.s = 2, spec.t = t, spec.w = 1.0, spec.n = n;
    PredicatePool pool;
    std::vector<int> load(n, 0);
    std::bernoulli_distribution coin(0.5);
    for (int c = 0; c < n * t / 2; ++c) {
        auto scope = pick_scope(load, t, 2, rng);
        if (scope.empty()) break;
        spec.constraints.push_back({pool.id_of(clause_predicate({coin(rng), coin(rng)})), std::move(scope), 1.0});
    }
    spec.predicates = pool.take();
    return CspInstance::build(std::move(spec));
}

namespace {

InstanceSpec neq_spec(int n) {
    InstanceSpec s;
    s.q = 2, s.s = 2, s.t = 2, s.w = 1, s.n = n;
    s.predicates = {{"NEQ", 2, {0, 1, 1, 0}}};
    return s;
}

}  // namespace

CspInstance triangle_instance() {
    auto s = neq_spec(3);
    s.constraints = {{0, {0, 1}, 1}, {0, {1, 2}, 1}, {0, {2, 0}, 1}};
    return CspInstance::build(std::move(s));
}

CspInstance single_instance() {
    auto s = neq_spec(5);
    s.constraints = {{0, {0, 1}, 1}};
    return CspInstance::build(std::move(s));
}

}  // namespace lpcsp
