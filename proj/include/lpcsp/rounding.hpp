#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpcsp/csp.hpp"

namespace lpcsp {

/// Largest eps' <= eps with 1/eps' an integer.
double integral_eps(double eps);

/// x^eps: 0 for x = 0, else (k+1)eps for the integer k >= 0 with
/// k eps < x <= (k+1) eps.
double discretize(double x, double eps);

/// phi_x: variable -> bucket of its discretized marginal vector. Buckets get
/// dense ids in order of first occurrence (ascending variable id).
struct FoldingMap {
    double eps = 0.0;
    std::vector<int> bucket_of;                   // per variable
    std::vector<std::vector<double>> buckets;     // bucket id -> x^eps vector

    int num_buckets() const { return static_cast<int>(buckets.size()); }
};

FoldingMap folding_map(const std::vector<std::vector<double>>& x, double eps);

/// I/phi over bucket ids. Scopes may repeat a bucket; the degree bound of
/// the result is its own maximum degree, everything else is inherited.
CspInstance fold_instance(const CspInstance& instance, const FoldingMap& fm);

/// Unfolds a bucket assignment to the source variables.
Assignment unfold(const FoldingMap& fm, const Assignment& folded);

/// f_v = sum over constraints P containing v of w_P P(beta) / |V(P)|, with
/// beta read through phi. Spends at most t oracle queries.
double f_value(ConstraintOracle& oracle, const FoldingMap& fm, const Assignment& folded, int v);

/// (1, eps n / 2)-approximation of val(I, unfold(folded)) with failure
/// probability delta.
double estimate_assignment_value(ConstraintOracle& oracle, const FoldingMap& fm, const Assignment& folded, double eps,
                                 double delta, std::uint64_t seed);

struct RoundingParams {
    double eps = 0.3;
    /// Fold resolution; negative selects eps^2 / (q^s s t w 8).
    double fold_eps = -1.0;
    std::int64_t budget = std::int64_t{1} << 20;
    int jobs = 1;
};

double default_fold_eps(double eps, int q, int s, int t, double w);

struct RoundingResult {
    double estimate = 0.0;
    Assignment folded_argmax;
    FoldingMap fold;
    double fold_eps = 0.0;
    double delta = 0.0;
    std::int64_t num_assignments = 0;
    std::int64_t samples_per_assignment = 0;
    std::int64_t oracle_queries = 0;
    /// w_I < eps n: nothing is estimated and the estimate is 0.
    bool short_circuit = false;
    std::vector<double> estimates;  // per folded assignment, enumeration order
};

/// Folds by the marginals x (one row per variable, from the LP oracle),
/// enumerates every folded assignment, and returns the best estimate.
/// Throws FoldTooLarge when q^{#buckets} exceeds the budget.
RoundingResult round_csp(ConstraintOracle& oracle, const std::vector<std::vector<double>>& x,
                         const RoundingParams& params, std::uint64_t seed);

/// beta*_v = folded argmax at phi(v).
int assignment_query(const RoundingResult& result, int v);

/// Continuity modulus delta of S at 1 for a named family, or nullopt when
/// no delta exists (the family is not constant-time testable).
std::optional<double> family_delta(const std::string& family, double eps);

struct TestOutcome {
    bool accept = false;
    double estimate = 0.0;
    double threshold = 0.0;
    RoundingResult rounding;
};

/// Runs round_csp with min(eps/2, delta) and accepts iff the estimate
/// exceeds (1 - eps/2) w_I - eps t w n / 2.
TestOutcome test_satisfiability(ConstraintOracle& oracle, const std::vector<std::vector<double>>& x, double eps,
                                double delta, std::uint64_t seed, const RoundingParams& base = {});

}  // namespace lpcsp
