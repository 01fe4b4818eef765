#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "lpcsp/corpus.hpp"
#include "lpcsp/local_oracle.hpp"
#include "lpcsp/lp.hpp"
#include "lpcsp/rounding.hpp"

using namespace lpcsp;

namespace {

std::vector<std::vector<double>> uniform_x(int n, int q, double v) { return std::vector(n, std::vector<double>(q, v)); }

std::vector<std::vector<double>> oracle_x(const CspInstance& inst) {
    ConstraintOracle o(inst);
    LocalLpOracle olp(o, 0.2);
    return assemble_global(olp, inst).solution.x;
}

}  // namespace

TEST_CASE("discretize") {
    CHECK(discretize(0.3, 0.25) == 0.5);
    CHECK(discretize(0.0, 0.25) == 0.0);
    CHECK(discretize(1.0, 0.25) == 1.0);
    CHECK(discretize(0.1, 0.25) == 0.25);
    CHECK(discretize(0.25, 0.25) == 0.25);
    CHECK(integral_eps(0.3) == 0.25);
    CHECK(integral_eps(0.25) == 0.25);
    CHECK(integral_eps(1.0) == 1.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    for (double eps : {0.5, 0.2, 0.1, 1.0 / 7, 0.01}) {
        std::vector<double> xs(500);
        for (auto& x : xs) x = u(rng);
        std::sort(xs.begin(), xs.end());
        double prev = 0;
        for (double x : xs) {
            double d = discretize(x, eps);
            CHECK(d >= x);
            CHECK(d < x + eps + 1e-12);
            CHECK(d >= prev);
            CHECK(discretize(d, eps) == d);
            prev = d;
        }
    }
}

TEST_CASE("fold TRIANGLE into one bucket") {
    auto inst = fixtures::triangle();
    auto fm = folding_map(uniform_x(3, 2, 0.5), 0.25);
    CHECK(fm.num_buckets() == 1);
    auto folded = fold_instance(inst, fm);
    CHECK(folded.n() == 1);
    CHECK(folded.num_constraints() == 3);
    CHECK(folded.total_weight() == 3.0);
    for (int id = 0; id < 3; ++id) {
        CHECK(folded.constraint(id).scope == std::vector<int>{0, 0});
        CHECK(folded.predicate_of(id).name == "NEQ");
    }
    CHECK(evaluate(folded, Assignment{0}) == 0.0);
    CHECK(evaluate(folded, Assignment{1}) == 0.0);
}

TEST_CASE("identity fold preserves the LP") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        RandomCorpusParams p;
        p.n = 7;
        auto inst = random_instance(p, seed);
        std::vector<std::vector<double>> x(inst.n());
        for (int v = 0; v < inst.n(); ++v) x[v] = {0.01 * (v + 1), 1 - 0.01 * (v + 1)};
        auto fm = folding_map(x, 1.0 / 1000);
        CHECK(fm.num_buckets() == inst.n());
        auto folded = fold_instance(inst, fm);
        CHECK(solve_basic_lp(folded).value == doctest::Approx(solve_basic_lp(inst).value).epsilon(1e-7));
    }
}

TEST_CASE("folding by LP marginals") {
    const double eps = 1.0 / 16;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RandomCorpusParams p;
        p.n = 8;
        p.q = 2 + seed % 2;
        auto inst = random_instance(p, 40 + seed);
        auto lp = solve_basic_lp(inst);
        auto fm = folding_map(lp.x, eps);
        auto folded = fold_instance(inst, fm);
        CHECK(folded.total_weight() == inst.total_weight());

        // Value is preserved under unfolding, for every folded assignment.
        if (std::pow(inst.q(), fm.num_buckets()) <= 4096)
            fixtures::for_each_assignment(fm.num_buckets(), inst.q(), [&](const std::vector<int>& b) {
                CHECK(evaluate(folded, b) == evaluate(inst, unfold(fm, b)));
            });

        // Rounding marginals up keeps the solution (q+1) eps-infeasible.
        LpSolution up = lp;
        for (auto& row : up.x)
            for (auto& e : row) e = discretize(e, eps);
        CHECK(infeasibility(inst, up) <= (inst.q() + 1) * eps + 1e-9);

        // The folded LP loses at most eps * kappa * n; kappa is reported.
        double drop = lp.value - solve_basic_lp(folded).value;
        double kappa = drop / (eps * inst.n());
        MESSAGE("seed " << seed << " buckets " << fm.num_buckets() << " lp drop " << drop << " kappa " << kappa);
        CHECK(kappa <= std::pow(inst.q() * inst.s() * inst.t() * inst.w(), 2));
    }
}

TEST_CASE("f_v on TRIANGLE") {
    auto inst = fixtures::triangle();
    ConstraintOracle o(inst);
    std::vector<std::vector<double>> x{{0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}};
    auto fm = folding_map(x, 0.1);
    REQUIRE(fm.num_buckets() == 3);
    Assignment beta{0, 1, 0};
    CHECK(f_value(o, fm, beta, 0) == 0.5);
    CHECK(f_value(o, fm, beta, 1) == 1.0);
    CHECK(f_value(o, fm, beta, 2) == 0.5);
    CHECK(o.query_count() <= 3 * inst.t());
}

TEST_CASE("estimator on a constant instance and failure rate") {
    InstanceSpec s;
    s.q = 2, s.s = 2, s.t = 2, s.w = 2, s.n = 12;
    s.predicates = {{"TRUE", 2, {1, 1, 1, 1}}};
    for (int i = 0; i < 12; ++i) s.constraints.push_back({0, {i, (i + 1) % 12}, 1.0 + (i % 2)});
    auto inst = CspInstance::build(s);
    ConstraintOracle o(inst);
    auto fm = folding_map(uniform_x(12, 2, 0.5), 0.5);
    const double eps = 0.2;
    double est = estimate_assignment_value(o, fm, Assignment{0}, eps, 0.01, 3);
    CHECK(std::abs(est - inst.total_weight()) <= eps * inst.n() / 2);

    RandomCorpusParams p;
    p.n = 12;
    auto rnd = random_instance(p, 17);
    ConstraintOracle ro(rnd);
    std::vector<std::vector<double>> x(rnd.n());
    for (int v = 0; v < rnd.n(); ++v) x[v] = {0.05 * v, 1 - 0.05 * v};
    auto ident = folding_map(x, 0.01);
    Assignment beta(rnd.n());
    for (int v = 0; v < rnd.n(); ++v) beta[v] = v % 2;
    const double truth = evaluate(rnd, unfold(ident, beta));
    const double delta = 0.1;
    const int trials = 10000;
    int fails = 0;
    for (int i = 0; i < trials; ++i)
        if (std::abs(estimate_assignment_value(ro, ident, beta, eps, delta, derive_seed(99, i)) - truth) >
            eps * rnd.n() / 2)
            ++fails;
    CHECK(fails <= delta * trials + 3 * std::sqrt(delta * trials));
}

TEST_CASE("round_csp basics") {
    auto inst = fixtures::triangle();
    ConstraintOracle o(inst);
    RoundingParams p;
    p.eps = 0.3;
    auto r = round_csp(o, uniform_x(3, 2, 0.5), p, 1);
    CHECK(r.fold.num_buckets() == 1);
    CHECK(r.num_assignments == 2);
    CHECK(r.estimates.size() == 2);
    CHECK(r.delta == doctest::Approx(1.0 / 6));
    for (int v = 0; v < 3; ++v) CHECK(assignment_query(r, v) == assignment_query(r, 0));
    CHECK(r.oracle_queries > 0);

    p.budget = 1;
    CHECK_THROWS_AS(round_csp(o, uniform_x(3, 2, 0.5), p, 1), Error);
    try {
        round_csp(o, uniform_x(3, 2, 0.5), p, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FoldTooLarge);
    }

    // Small total weight short-circuits.
    auto one = fixtures::single();
    ConstraintOracle so(one);
    RoundingParams sp;
    sp.eps = 0.5;
    auto sr = round_csp(so, uniform_x(5, 2, 0.5), sp, 1);
    CHECK(sr.short_circuit);
    CHECK(sr.estimate == 0.0);
}

TEST_CASE("round_csp is deterministic and parallel-invariant") {
    RandomCorpusParams p;
    p.n = 10;
    auto inst = random_instance(p, 3);
    auto x = oracle_x(inst);
    ConstraintOracle o(inst);
    RoundingParams rp;
    rp.eps = 0.3;
    auto a = round_csp(o, x, rp, 11);
    rp.jobs = 3;
    auto b = round_csp(o, x, rp, 11);
    CHECK(a.estimates == b.estimates);
    CHECK(a.folded_argmax == b.folded_argmax);
    CHECK(a.oracle_queries == b.oracle_queries);
    for (int v = 0; v < inst.n(); ++v) CHECK(assignment_query(a, v) == a.folded_argmax[a.fold.bucket_of[v]]);
}

TEST_CASE("round_csp on Horn and random instances") {
    const double eps = 0.3;
    int good = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        HornParams h;
        h.n = 10;
        auto inst = planted_horn_instance(h, seed);
        auto x = oracle_x(inst);
        ConstraintOracle o(inst);
        RoundingParams rp;
        rp.eps = eps;
        auto r = round_csp(o, x, rp, seed);
        ++total;
        if (r.estimate >= (1 - eps) * inst.total_weight() - eps * inst.n()) ++good;
        CHECK(r.estimate <= brute_force_opt(inst).value + eps * inst.n() / 2);
    }
    CHECK(3 * good >= 2 * total);

    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        RandomCorpusParams p;
        p.n = 9;
        p.q = 2 + seed % 2;
        auto inst = random_instance(p, 500 + seed);
        auto x = oracle_x(inst);
        ConstraintOracle o(inst);
        RoundingParams rp;
        rp.eps = eps;
        auto r = round_csp(o, x, rp, seed);
        CHECK(r.estimate <= brute_force_opt(inst).value + eps * inst.n() / 2);
    }
}

TEST_CASE("satisfiability tester") {
    const double eps = 0.3;
    auto delta = family_delta("horn", eps);
    REQUIRE(delta);
    CHECK_FALSE(family_delta("2sat", eps));
    CHECK_THROWS_AS(family_delta("nope", eps), Error);

    int accepted = 0, rejected = 0;
    const int trials = 12;
    for (int i = 0; i < trials; ++i) {
        HornParams h;
        h.n = 12;
        auto sat = planted_horn_instance(h, 70 + i);
        ConstraintOracle so(sat);
        if (test_satisfiability(so, oracle_x(sat), eps, *delta, i).accept) ++accepted;

        auto far = contradictory_horn_instance(h, 90 + i);
        REQUIRE(distance_to_satisfiability(far) >= eps * far.t() * far.w() * far.n());
        ConstraintOracle fo(far);
        if (!test_satisfiability(fo, oracle_x(far), eps, *delta, i).accept) ++rejected;
    }
    CHECK(3 * accepted >= 2 * trials);
    CHECK(3 * rejected >= 2 * trials);

    InstanceSpec s;
    s.n = 4;
    auto empty = CspInstance::build(s);
    ConstraintOracle eo(empty);
    CHECK(test_satisfiability(eo, uniform_x(4, 2, 0.5), eps, *delta, 1).accept);
}
