#pragma once

#include <vector>

#include "lpcsp/csp.hpp"

namespace fixtures {

inline lpcsp::Predicate neq2() { return {"NEQ", 2, {0, 1, 1, 0}}; }

// Max Cut on the triangle.
inline lpcsp::CspInstance triangle() {
    lpcsp::InstanceSpec s;
    s.q = 2, s.s = 2, s.t = 2, s.w = 1, s.n = 3;
    s.predicates = {neq2()};
    s.constraints = {{0, {0, 1}, 1}, {0, {1, 2}, 1}, {0, {2, 0}, 1}};
    return lpcsp::CspInstance::build(s);
}

// One NEQ(0,1) on five variables.
inline lpcsp::CspInstance single() {
    lpcsp::InstanceSpec s;
    s.q = 2, s.s = 2, s.t = 2, s.w = 1, s.n = 5;
    s.predicates = {neq2()};
    s.constraints = {{0, {0, 1}, 1}};
    return lpcsp::CspInstance::build(s);
}

// Independent enumeration of [q]^n in lexicographic order.
template <class F>
void for_each_assignment(int n, int q, F&& f) {
    std::vector<int> a(n, 0);
    while (true) {
        f(a);
        int j = n - 1;
        while (j >= 0 && a[j] == q - 1) a[j--] = 0;
        if (j < 0) return;
        ++a[j];
    }
}

// Straight-from-definition value, independent of the library's evaluate.
inline double naive_value(const lpcsp::CspInstance& inst, const std::vector<int>& beta) {
    double v = 0;
    for (int id = 0; id < inst.num_constraints(); ++id) {
        const auto& c = inst.constraint(id);
        const auto& p = inst.predicate_of(id);
        long idx = 0;
        for (int x : c.scope) idx = idx * inst.q() + beta[x];
        if (p.truth_table[idx]) v += c.weight;
    }
    return v;
}

}  // namespace fixtures
