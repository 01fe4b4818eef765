#pragma once

#include <cstdint>

#include "lpcsp/csp.hpp"

namespace lpcsp {

struct RandomCorpusParams {
    int n = 8;
    int q = 2;
    int s = 2;
    int t = 3;
    double w = 2.0;
    /// Target constraint count; negative means n*t/s (rounded down).
    int m = -1;
    /// Random predicates generated per arity.
    int predicates_per_arity = 2;
    /// Draw integer weights (keeps brute-force values exact).
    bool integer_weights = true;
};

/// Random bounded-degree instance. Scopes have distinct variables, arities
/// are uniform in [1, s], and each predicate has at least one satisfying and
/// one violating tuple. Generation stops early if no variable has spare
/// degree.
CspInstance random_instance(const RandomCorpusParams& params, std::uint64_t seed);

struct HornParams {
    int n = 10;
    int s = 3;
    int t = 3;
    int m = -1;  // negative means n*t/s
};

/// Satisfiable Horn instance: random Horn clauses (at most one positive
/// literal) kept only when satisfied by a hidden planted assignment.
CspInstance planted_horn_instance(const HornParams& params, std::uint64_t seed);

/// Horn instance whose distance to satisfiability is at least n: every
/// variable carries the unit clauses (x) and (not x); remaining degree is
/// filled with random Horn clauses.
CspInstance contradictory_horn_instance(const HornParams& params, std::uint64_t seed);

/// Random 2-CNF over n variables with degree at most t.
CspInstance random_2sat_instance(int n, int t, std::uint64_t seed);

/// Max Cut on the triangle (q = s = t = 2).
CspInstance triangle_instance();
/// One NEQ(0, 1) on five variables.
CspInstance single_instance();

}  // namespace lpcsp
