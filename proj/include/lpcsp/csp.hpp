#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpcsp/error.hpp"

namespace lpcsp {

/// Values of [q] are represented 0-based: 0, ..., q-1.
using Assignment = std::vector<int>;

/// A {0,1}-valued predicate over [q]^arity. The truth table is indexed
/// lexicographically with the first scope position most significant.
struct Predicate {
    std::string name;
    int arity = 0;
    std::vector<std::uint8_t> truth_table;
};

struct Constraint {
    int predicate = 0;
    std::vector<int> scope;  // repeats permitted
    double weight = 1.0;
};

/// Raw description of an instance before validation.
struct InstanceSpec {
    int q = 2;
    int s = 2;
    int t = 1;
    double w = 1.0;
    int n = 0;
    std::vector<Predicate> predicates;
    std::vector<Constraint> constraints;
};

/// q^k as an integer; throws on overflow past 2^62.
std::int64_t ipow(std::int64_t base, int exp);

/// Validated, immutable CSP instance with the per-variable degree index of
/// the bounded-degree model.
///
/// A constraint occupies exactly one slot in the index of each distinct
/// variable of its scope. Per-constraint data is precomputed: the distinct
/// variables in order of first appearance, the map from scope positions to
/// distinct slots, and the payoff table P(beta) over assignments to the
/// distinct variables (first distinct variable most significant).
class CspInstance {
public:
    CspInstance() = default;

    static CspInstance build(InstanceSpec spec);

    /// Same validation as build(), but with a caller-supplied degree index.
    /// Each list must be a permutation of the constraints containing that
    /// variable.
    static CspInstance build_with_index(InstanceSpec spec, std::vector<std::vector<int>> degree_index);

    int q() const { return spec_.q; }
    int s() const { return spec_.s; }
    int t() const { return spec_.t; }
    double w() const { return spec_.w; }
    int n() const { return spec_.n; }
    int num_constraints() const { return static_cast<int>(spec_.constraints.size()); }
    double total_weight() const { return total_weight_; }

    const InstanceSpec& spec() const { return spec_; }
    const std::vector<Predicate>& predicates() const { return spec_.predicates; }
    const Constraint& constraint(int id) const { return spec_.constraints[id]; }
    const Predicate& predicate_of(int id) const { return spec_.predicates[spec_.constraints[id].predicate]; }

    std::span<const int> distinct_vars(int id) const { return distinct_[id]; }
    std::span<const int> scope_slots(int id) const { return slots_[id]; }
    std::span<const std::uint8_t> payoff(int id) const { return payoff_[id]; }
    int distinct_count(int id) const { return static_cast<int>(distinct_[id].size()); }

    /// Index of v among the distinct variables of constraint id, or -1.
    int slot_of(int id, int v) const;

    std::span<const int> incident(int v) const { return degree_index_[v]; }
    int degree(int v) const { return static_cast<int>(degree_index_[v].size()); }
    const std::vector<std::vector<int>>& degree_index() const { return degree_index_; }

    bool satisfied(int id, std::span<const int> assignment) const;

private:
    void finalize(std::vector<std::vector<int>>* explicit_index);

    InstanceSpec spec_;
    double total_weight_ = 0.0;
    std::vector<std::vector<int>> distinct_;
    std::vector<std::vector<int>> slots_;
    std::vector<std::vector<std::uint8_t>> payoff_;
    std::vector<std::vector<int>> degree_index_;
};

/// The constraint returned by an oracle query.
struct ConstraintView {
    int id = -1;
    const Predicate* predicate = nullptr;
    std::span<const int> scope;
    std::span<const int> distinct_vars;
    std::span<const int> scope_slots;
    std::span<const std::uint8_t> payoff;
    double weight = 0.0;
};

/// Query-counted access to an instance: (v, i) -> the i-th constraint where
/// v appears. The instance must outlive the oracle. One handle per worker.
class ConstraintOracle {
public:
    explicit ConstraintOracle(const CspInstance& instance) : instance_(&instance) {}

    /// `index` is 1-based, 1 <= index <= t. Returns nullopt for the
    /// bottom answer. Every call (including bottom answers) costs one query.
    std::optional<ConstraintView> query(int v, int index);

    std::int64_t query_count() const { return queries_; }
    void reset_count() { queries_ = 0; }

    // Model parameters the algorithm is given beforehand.
    int q() const { return instance_->q(); }
    int s() const { return instance_->s(); }
    int t() const { return instance_->t(); }
    double w() const { return instance_->w(); }
    int n() const { return instance_->n(); }

    /// Direct handle on the instance for test and tooling code only.
    const CspInstance& instance() const { return *instance_; }

private:
    const CspInstance* instance_;
    std::int64_t queries_ = 0;
};

ConstraintView view_of(const CspInstance& instance, int id);

/// val(I, beta): weighted count of satisfied constraints.
double evaluate(const CspInstance& instance, std::span<const int> assignment);

/// Number of satisfied constraints, ignoring weights.
int count_satisfied(const CspInstance& instance, std::span<const int> assignment);

struct OptResult {
    double value = 0.0;
    Assignment argmax;
};

inline constexpr std::int64_t kDefaultEnumerationBudget = std::int64_t{1} << 26;

/// Exact opt(I) by exhaustive enumeration; ties resolve to the
/// lexicographically smallest assignment.
OptResult brute_force_opt(const CspInstance& instance, std::int64_t budget = kDefaultEnumerationBudget);

/// Minimum number of constraints whose removal leaves I satisfiable.
int distance_to_satisfiability(const CspInstance& instance,
                               std::int64_t budget = kDefaultEnumerationBudget);

/// Sample count used by sum_estimator: ceil(w^2 ln(2/delta) / (2 eps^2)).
std::int64_t hoeffding_samples(double w, double eps, double delta);

/// (1, eps*n)-approximation to sum_{i<n} f(i) for f: [n] -> [0, w], valid
/// with probability at least 1 - delta. Draws indices uniformly with
/// replacement from a generator seeded with `seed`.
double sum_estimator(const std::function<double(int)>& f, int n, double w, double eps, double delta,
                     std::uint64_t seed);

/// Derives an independent stream seed from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace lpcsp
