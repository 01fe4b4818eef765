#include "doctest.h"
#include "fixtures.hpp"
#include "lpcsp/corpus.hpp"
#include "lpcsp/io.hpp"

using namespace lpcsp;

TEST_CASE("instance round trip") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RandomCorpusParams p;
        p.q = 2 + seed % 2;
        auto inst = random_instance(p, seed);
        auto back = instance_from_json(instance_to_json(inst));
        CHECK(instance_to_json(back).dump() == instance_to_json(inst).dump());
        CHECK(back.degree_index() == inst.degree_index());
    }
    auto tri = fixtures::triangle();
    CHECK_FALSE(instance_to_json(tri).contains("degree_index"));

    auto swapped = tri.degree_index();
    std::swap(swapped[0][0], swapped[0][1]);
    auto custom = CspInstance::build_with_index(tri.spec(), swapped);
    auto j = instance_to_json(custom);
    REQUIRE(j.contains("degree_index"));
    CHECK(instance_from_json(j).degree_index() == swapped);
}

TEST_CASE("instance validation") {
    auto j = instance_to_json(fixtures::triangle());
    auto bad = j;
    bad["predicates"][0]["truth_table"][0] = 2;
    CHECK_THROWS_AS(instance_from_json(bad), Error);
    bad = j;
    bad["constraints"][0]["scope"][0] = 7;
    try {
        instance_from_json(bad);
        FAIL("expected BadInstance");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadInstance);
    }
    bad = j;
    bad.erase("q");
    CHECK_THROWS_AS(instance_from_json(bad), Error);
}

TEST_CASE("solution round trip") {
    auto sol = solve_basic_lp(fixtures::triangle());
    auto back = solution_from_json(solution_to_json(sol));
    CHECK(back.value == sol.value);
    CHECK(back.x == sol.x);
    CHECK(back.mu == sol.mu);
    auto j = solution_to_json(sol);
    j["mu"][0]["constraint"] = 9;
    CHECK_THROWS_AS(solution_from_json(j), Error);
}

TEST_CASE("format_double") {
    CHECK(format_double(3.0) == "3.0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.0) == "-2.0");
    CHECK(format_double(1e-20) == "1e-20");
    CHECK(format_double(0.6000000008604143) == "0.6000000008604143");
}
