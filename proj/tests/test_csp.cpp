#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "lpcsp/corpus.hpp"
#include "lpcsp/csp.hpp"

using namespace lpcsp;

TEST_CASE("build_instance basics") {
    auto tri = fixtures::triangle();
    CHECK(tri.n() == 3);
    CHECK(tri.total_weight() == 3.0);
    for (int v = 0; v < 3; ++v) CHECK(tri.degree(v) == 2);

    auto one = fixtures::single();
    std::vector<int> deg;
    for (int v = 0; v < 5; ++v) deg.push_back(one.degree(v));
    CHECK(deg == std::vector<int>{1, 1, 0, 0, 0});
}

TEST_CASE("build_instance validation errors") {
    InstanceSpec s;
    s.q = 2, s.s = 2, s.t = 1, s.n = 3;
    s.predicates = {fixtures::neq2()};
    s.constraints = {{0, {0, 1}, 1}, {0, {1, 2}, 1}};
    try {
        CspInstance::build(s);
        FAIL("expected DegreeExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegreeExceeded);
    }

    s.t = 2;
    s.constraints = {{0, {0, 1}, 0.5}};
    CHECK_THROWS_AS(CspInstance::build(s), Error);
    try {
        CspInstance::build(s);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WeightOutOfRange);
    }

    s.constraints = {{0, {0, 1}, 1}};
    s.predicates = {{"BAD", 2, {0, 1, 1}}};
    try {
        CspInstance::build(s);
        FAIL("expected BadTruthTableLength");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadTruthTableLength);
    }

    s.s = 1;
    s.predicates = {fixtures::neq2()};
    try {
        CspInstance::build(s);
        FAIL("expected ArityExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ArityExceeded);
    }
}

TEST_CASE("repeated scope variable occupies one slot") {
    InstanceSpec s;
    s.q = 2, s.s = 2, s.t = 1, s.n = 1;
    s.predicates = {fixtures::neq2()};
    s.constraints = {{0, {0, 0}, 1}};
    auto inst = CspInstance::build(s);
    CHECK(inst.degree(0) == 1);
    CHECK(inst.distinct_count(0) == 1);
    CHECK(inst.payoff(0).size() == 2);
    CHECK(evaluate(inst, std::vector<int>{0}) == 0.0);
    CHECK(evaluate(inst, std::vector<int>{1}) == 0.0);
}

TEST_CASE("oracle_query answers and counting") {
    auto tri = fixtures::triangle();
    ConstraintOracle o(tri);
    auto a = o.query(0, 1);
    REQUIRE(a.has_value());
    CHECK(std::vector<int>(a->scope.begin(), a->scope.end()) == std::vector<int>{0, 1});
    auto b = o.query(0, 2);
    REQUIRE(b.has_value());
    CHECK(b->id == 2);
    CHECK(o.query_count() == 2);

    InstanceSpec s = tri.spec();
    s.t = 3;
    auto tri3 = CspInstance::build(s);
    ConstraintOracle o3(tri3);
    CHECK_FALSE(o3.query(0, 3).has_value());
    CHECK(o3.query_count() == 1);

    auto one = fixtures::single();
    ConstraintOracle o1(one);
    CHECK_FALSE(o1.query(2, 1).has_value());
    CHECK(o1.query_count() == 1);
    CHECK_THROWS_AS(o1.query(5, 1), Error);
    CHECK_THROWS_AS(o1.query(0, 3), Error);
    CHECK(o1.query_count() == 1);
}

TEST_CASE("evaluate examples") {
    auto tri = fixtures::triangle();
    CHECK(evaluate(tri, std::vector<int>{0, 1, 0}) == 2.0);
    CHECK(evaluate(tri, std::vector<int>{0, 0, 0}) == 0.0);
    auto one = fixtures::single();
    CHECK(evaluate(one, std::vector<int>{0, 1, 1, 0, 1}) == 1.0);
}

TEST_CASE("brute_force_opt examples") {
    auto tri = fixtures::triangle();
    auto r = brute_force_opt(tri);
    CHECK(r.value == 2.0);
    CHECK(r.argmax == std::vector<int>{0, 0, 1});
    CHECK(brute_force_opt(fixtures::single()).value == 1.0);

    InstanceSpec s;
    s.q = 3, s.s = 1, s.t = 1, s.n = 3;
    auto empty = CspInstance::build(s);
    auto e = brute_force_opt(empty);
    CHECK(e.value == 0.0);
    CHECK(e.argmax == std::vector<int>{0, 0, 0});

    s.q = 2, s.n = 27;
    CHECK_THROWS_AS(brute_force_opt(CspInstance::build(s)), Error);
}

TEST_CASE("distance_to_satisfiability examples") {
    CHECK(distance_to_satisfiability(fixtures::triangle()) == 1);

    // (not x or y)(not y or z): truth tables over (first, second).
    InstanceSpec s;
    s.q = 2, s.s = 2, s.t = 2, s.n = 3;
    s.predicates = {{"IMP", 2, {1, 1, 0, 1}}, {"IS0", 1, {1, 0}}, {"IS1", 1, {0, 1}}};
    s.constraints = {{0, {0, 1}, 1}, {0, {1, 2}, 1}};
    CHECK(distance_to_satisfiability(CspInstance::build(s)) == 0);

    s.n = 1;
    s.constraints = {{1, {0}, 1}, {2, {0}, 1}};
    CHECK(distance_to_satisfiability(CspInstance::build(s)) == 1);
}

TEST_CASE("brute force agrees with naive enumeration on random instances") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        RandomCorpusParams p;
        p.n = 3 + static_cast<int>(seed % 7);
        p.q = 2 + static_cast<int>(seed % 2);
        p.s = 1 + static_cast<int>(seed % 3);
        p.t = 1 + static_cast<int>(seed % 4);
        p.w = 3.0;
        auto inst = random_instance(p, seed);
        double best = -1;
        std::vector<int> arg;
        int best_count = -1;
        fixtures::for_each_assignment(inst.n(), inst.q(), [&](const std::vector<int>& a) {
            double v = fixtures::naive_value(inst, a);
            CHECK(v >= 0.0);
            CHECK(v <= inst.total_weight() + 1e-9);
            CHECK(evaluate(inst, a) == doctest::Approx(v).epsilon(1e-12));
            if (v > best + 1e-9) {
                best = v;
                arg = a;
            }
            best_count = std::max(best_count, count_satisfied(inst, a));
        });
        auto r = brute_force_opt(inst);
        CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
        CHECK(r.argmax == arg);
        int d = distance_to_satisfiability(inst);
        CHECK(d == inst.num_constraints() - best_count);
        CHECK((d == 0) == (best_count == inst.num_constraints()));
    }
}

TEST_CASE("oracle answers are a pure function of (v, i)") {
    auto inst = random_instance(RandomCorpusParams{}, 11);
    ConstraintOracle a(inst), b(inst);
    int calls = 0;
    for (int v = 0; v < inst.n(); ++v)
        for (int i = 1; i <= inst.t(); ++i) {
            auto x = a.query(v, i);
            auto y = b.query(v, i);
            ++calls;
            CHECK(x.has_value() == y.has_value());
            if (x) CHECK(x->id == y->id);
        }
    CHECK(a.query_count() == calls);
}

TEST_CASE("sum_estimator") {
    CHECK(hoeffding_samples(1.0, 0.1, 1.0 / 3.0) == 90);
    auto c = sum_estimator([](int) { return 0.7; }, 1000, 1.0, 0.1, 0.1, 3);
    CHECK(c == doctest::Approx(700.0).epsilon(1e-12));

    const int n = 10000;
    const double eps = 0.05, delta = 0.01;
    auto f = [](int i) { return i % 2 == 0 ? 1.0 : 0.0; };
    const int trials = 10000;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        double est = sum_estimator(f, n, 1.0, eps, delta, derive_seed(42, t));
        if (std::abs(est - n / 2.0) > eps * n) ++failures;
    }
    CHECK(static_cast<double>(failures) / trials <= delta + 3 * std::sqrt(delta / trials));
}
