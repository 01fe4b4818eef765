#include "lpcsp/csp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace lpcsp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Usage: return "Usage";
        case ErrorCode::DegreeExceeded: return "DegreeExceeded";
        case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
        case ErrorCode::ArityExceeded: return "ArityExceeded";
        case ErrorCode::BadTruthTableLength: return "BadTruthTableLength";
        case ErrorCode::BadInstance: return "BadInstance";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::SizeLimit: return "SizeLimit";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::NotFeasibleForLp3: return "NotFeasibleForLp3";
        case ErrorCode::FoldTooLarge: return "FoldTooLarge";
        case ErrorCode::ZeroRow: return "ZeroRow";
        case ErrorCode::NotADistribution: return "NotADistribution";
        case ErrorCode::InfeasibleSeedSolution: return "InfeasibleSeedSolution";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::UnseenVariableQuery: return "UnseenVariableQuery";
    }
    return "Unknown";
}

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > (std::int64_t{1} << 62) / base)
            throw Error(ErrorCode::BudgetExceeded, "integer power overflow");
        r *= base;
    }
    return r;
}

CspInstance CspInstance::build(InstanceSpec spec) {
    CspInstance inst;
    inst.spec_ = std::move(spec);
    inst.finalize(nullptr);
    return inst;
}

CspInstance CspInstance::build_with_index(InstanceSpec spec, std::vector<std::vector<int>> degree_index) {
    CspInstance inst;
    inst.spec_ = std::move(spec);
    inst.finalize(&degree_index);
    return inst;
}

void CspInstance::finalize(std::vector<std::vector<int>>* explicit_index) {
    const auto& sp = spec_;
    if (sp.q < 2) throw Error(ErrorCode::BadInstance, "q must be at least 2");
    if (sp.s < 1 || sp.t < 1 || sp.n < 0) throw Error(ErrorCode::BadInstance, "s, t must be positive and n nonnegative");
    if (!(sp.w >= 1.0)) throw Error(ErrorCode::BadInstance, "w must be at least 1");

    for (const auto& p : sp.predicates) {
        if (p.arity < 1 || p.arity > sp.s)
            throw Error(ErrorCode::ArityExceeded, "predicate '" + p.name + "' has arity " + std::to_string(p.arity));
        if (static_cast<std::int64_t>(p.truth_table.size()) != ipow(sp.q, p.arity))
            throw Error(ErrorCode::BadTruthTableLength, "predicate '" + p.name + "'");
        for (auto e : p.truth_table)
            if (e > 1) throw Error(ErrorCode::BadTruthTableLength, "truth table entries must be 0 or 1");
    }

    const int m = num_constraints();
    distinct_.assign(m, {});
    slots_.assign(m, {});
    payoff_.assign(m, {});
    total_weight_ = 0.0;

    for (int id = 0; id < m; ++id) {
        const auto& c = sp.constraints[id];
        if (c.predicate < 0 || c.predicate >= static_cast<int>(sp.predicates.size()))
            throw Error(ErrorCode::BadInstance, "constraint " + std::to_string(id) + " names an unknown predicate");
        const auto& p = sp.predicates[c.predicate];
        if (static_cast<int>(c.scope.size()) != p.arity)
            throw Error(ErrorCode::ArityExceeded,
                        "constraint " + std::to_string(id) + " scope length differs from predicate arity");
        if (!(c.weight >= 1.0 && c.weight <= sp.w))
            throw Error(ErrorCode::WeightOutOfRange, "constraint " + std::to_string(id));
        total_weight_ += c.weight;

        auto& dv = distinct_[id];
        auto& sl = slots_[id];
        for (int v : c.scope) {
            if (v < 0 || v >= sp.n)
                throw Error(ErrorCode::BadInstance, "constraint " + std::to_string(id) + " references variable " +
                                                        std::to_string(v));
            auto it = std::find(dv.begin(), dv.end(), v);
            if (it == dv.end()) {
                sl.push_back(static_cast<int>(dv.size()));
                dv.push_back(v);
            } else {
                sl.push_back(static_cast<int>(it - dv.begin()));
            }
        }

        const int k = static_cast<int>(dv.size());
        const auto cells = ipow(sp.q, k);
        auto& pay = payoff_[id];
        pay.resize(static_cast<std::size_t>(cells));
        std::vector<int> beta(k, 0);
        for (std::int64_t b = 0; b < cells; ++b) {
            std::int64_t rest = b;
            for (int j = k - 1; j >= 0; --j) {
                beta[j] = static_cast<int>(rest % sp.q);
                rest /= sp.q;
            }
            std::int64_t idx = 0;
            for (int pos = 0; pos < p.arity; ++pos) idx = idx * sp.q + beta[sl[pos]];
            pay[static_cast<std::size_t>(b)] = p.truth_table[static_cast<std::size_t>(idx)];
        }
    }

    if (explicit_index) {
        if (static_cast<int>(explicit_index->size()) != sp.n)
            throw Error(ErrorCode::BadInstance, "degree index must have one list per variable");
        std::vector<std::vector<int>> expected(sp.n);
        for (int id = 0; id < m; ++id)
            for (int v : distinct_[id]) expected[v].push_back(id);
        for (int v = 0; v < sp.n; ++v) {
            auto got = (*explicit_index)[v];
            std::sort(got.begin(), got.end());
            if (got != expected[v])
                throw Error(ErrorCode::BadInstance, "degree index of variable " + std::to_string(v) +
                                                        " is not a permutation of its incident constraints");
        }
        degree_index_ = std::move(*explicit_index);
    } else {
        degree_index_.assign(sp.n, {});
        for (int id = 0; id < m; ++id)
            for (int v : distinct_[id]) degree_index_[v].push_back(id);
    }
    for (int v = 0; v < sp.n; ++v)
        if (static_cast<int>(degree_index_[v].size()) > sp.t)
            throw Error(ErrorCode::DegreeExceeded, "variable " + std::to_string(v) + " has degree " +
                                                       std::to_string(degree_index_[v].size()) + " > t");
}

int CspInstance::slot_of(int id, int v) const {
    const auto& dv = distinct_[id];
    for (int j = 0; j < static_cast<int>(dv.size()); ++j)
        if (dv[j] == v) return j;
    return -1;
}

bool CspInstance::satisfied(int id, std::span<const int> assignment) const {
    const auto& c = spec_.constraints[id];
    const auto& p = spec_.predicates[c.predicate];
    std::int64_t idx = 0;
    for (int v : c.scope) idx = idx * spec_.q + assignment[v];
    return p.truth_table[static_cast<std::size_t>(idx)] != 0;
}

ConstraintView view_of(const CspInstance& instance, int id) {
    ConstraintView view;
    view.id = id;
    view.predicate = &instance.predicate_of(id);
    view.scope = instance.constraint(id).scope;
    view.distinct_vars = instance.distinct_vars(id);
    view.scope_slots = instance.scope_slots(id);
    view.payoff = instance.payoff(id);
    view.weight = instance.constraint(id).weight;
    return view;
}

std::optional<ConstraintView> ConstraintOracle::query(int v, int index) {
    if (v < 0 || v >= instance_->n())
        throw Error(ErrorCode::Usage, "oracle query on variable " + std::to_string(v) + " out of range");
    if (index < 1 || index > instance_->t())
        throw Error(ErrorCode::Usage, "oracle query index " + std::to_string(index) + " outside [1, t]");
    ++queries_;
    auto list = instance_->incident(v);
    if (index > static_cast<int>(list.size())) return std::nullopt;
    return view_of(*instance_, list[index - 1]);
}

double evaluate(const CspInstance& instance, std::span<const int> assignment) {
    if (static_cast<int>(assignment.size()) != instance.n())
        throw Error(ErrorCode::Usage, "assignment length differs from n");
    double total = 0.0;
    for (int id = 0; id < instance.num_constraints(); ++id)
        if (instance.satisfied(id, assignment)) total += instance.constraint(id).weight;
    return total;
}

int count_satisfied(const CspInstance& instance, std::span<const int> assignment) {
    int total = 0;
    for (int id = 0; id < instance.num_constraints(); ++id)
        if (instance.satisfied(id, assignment)) ++total;
    return total;
}

namespace {

// Enumerates [q]^n with a reflected mixed-radix Gray code, maintaining the
// score incrementally. Returns the best score and the lexicographically
// smallest assignment attaining it.
OptResult enumerate_best(const CspInstance& inst, bool weighted, std::int64_t budget) {
    const int n = inst.n();
    const int q = inst.q();
    double log_count = n * std::log2(static_cast<double>(q));
    if (log_count > 62 || ipow(q, n) > budget)
        throw Error(ErrorCode::BudgetExceeded, "q^n exceeds the enumeration budget");
    const std::int64_t total = ipow(q, n);

    auto weight = [&](int id) { return weighted ? inst.constraint(id).weight : 1.0; };

    Assignment cur(n, 0);
    std::vector<int> dir(n, 1);
    std::vector<char> sat(inst.num_constraints(), 0);
    double score = 0.0;
    for (int id = 0; id < inst.num_constraints(); ++id) {
        sat[id] = inst.satisfied(id, cur);
        if (sat[id]) score += weight(id);
    }

    const double tol = 1e-9 * std::max(1.0, inst.total_weight());
    OptResult best{score, cur};

    for (std::int64_t step = 1; step < total; ++step) {
        // Find the coordinate to move: the lowest one that can still move in
        // its current direction; coordinates below it reverse direction.
        int j = 0;
        while (true) {
            int nv = cur[j] + dir[j];
            if (nv >= 0 && nv < q) break;
            dir[j] = -dir[j];
            ++j;
        }
        cur[j] += dir[j];
        for (int id : inst.incident(j)) {
            char now = inst.satisfied(id, cur);
            if (now != sat[id]) {
                score += now ? weight(id) : -weight(id);
                sat[id] = now;
            }
        }
        if (score > best.value + tol ||
            (score >= best.value - tol && std::lexicographical_compare(cur.begin(), cur.end(), best.argmax.begin(),
                                                                       best.argmax.end()))) {
            best.value = std::max(score, best.value);
            best.argmax = cur;
        }
    }
    // Remove drift from the incremental updates.
    best.value = weighted ? evaluate(inst, best.argmax) : count_satisfied(inst, best.argmax);
    return best;
}

}  // namespace

OptResult brute_force_opt(const CspInstance& instance, std::int64_t budget) {
    return enumerate_best(instance, true, budget);
}

int distance_to_satisfiability(const CspInstance& instance, std::int64_t budget) {
    auto best = enumerate_best(instance, false, budget);
    return instance.num_constraints() - static_cast<int>(std::lround(best.value));
}

std::int64_t hoeffding_samples(double w, double eps, double delta) {
    if (!(eps > 0 && eps < 1 && delta > 0 && delta < 1))
        throw Error(ErrorCode::Usage, "sum estimator needs eps, delta in (0,1)");
    double m = w * w * std::log(2.0 / delta) / (2.0 * eps * eps);
    return static_cast<std::int64_t>(std::ceil(m - 1e-9));
}

double sum_estimator(const std::function<double(int)>& f, int n, double w, double eps, double delta,
                     std::uint64_t seed) {
    if (n <= 0) return 0.0;
    const std::int64_t m = hoeffding_samples(w, eps, delta);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    double sum = 0.0;
    for (std::int64_t i = 0; i < m; ++i) sum += f(pick(rng));
    return static_cast<double>(n) / static_cast<double>(m) * sum;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace lpcsp
