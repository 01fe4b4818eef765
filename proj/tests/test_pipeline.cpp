#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "lpcsp/corpus.hpp"
#include "lpcsp/pipeline.hpp"

using namespace lpcsp;

namespace {

const LpRow* find_row(const LinearProgram& lp, const std::string& label) {
    for (const auto& r : lp.rows)
        if (r.label == label) return &r;
    return nullptr;
}

std::vector<CspInstance> small_corpus(int count, std::uint64_t seed) {
    std::vector<CspInstance> out;
    for (int i = 0; i < count; ++i) {
        RandomCorpusParams p;
        p.n = 5 + i % 4;
        p.q = 2;
        p.s = 2 + i % 2;
        p.t = 2;
        p.w = 2;
        out.push_back(random_instance(p, seed + i));
    }
    return out;
}

}  // namespace

TEST_CASE("relax_basic_lp rows on SINGLE") {
    auto inst = fixtures::single();
    auto lp = relax_basic_lp(inst, 0.1);
    BasicLayout layout(inst);
    const LpRow* le = find_row(lp, "marg[0,0,0]<=");
    const LpRow* ge = find_row(lp, "marg[0,0,0]>=");
    REQUIRE(le);
    REQUIRE(ge);
    CHECK(le->rhs == doctest::Approx(1.1));
    CHECK(ge->rhs == doctest::Approx(0.9));
    std::vector<int> cols;
    for (auto [c, a] : le->coeffs) {
        CHECK(a == 1.0);
        cols.push_back(c);
    }
    std::sort(cols.begin(), cols.end());
    CHECK(cols == std::vector<int>{layout.x_col(0, 0), layout.mu_col(0, 0), layout.mu_col(0, 1)});
}

TEST_CASE("relax_basic_lp at eps 0 is BasicLP under complement") {
    std::vector<CspInstance> insts{fixtures::triangle(), fixtures::single()};
    for (auto& i : small_corpus(6, 300)) insts.push_back(std::move(i));
    for (const auto& inst : insts) {
        auto basic = solve_basic_lp(inst);
        auto z = columns_from_solution(inst, basic);
        BasicLayout layout(inst);
        for (int c = 0; c < layout.num_x(); ++c) z[c] = 1.0 - z[c];
        auto relaxed = relax_basic_lp(inst, 0.0);
        CHECK(relaxed.max_violation(z) <= 1e-9);
        CHECK(solve_lp(relaxed).value == doctest::Approx(basic.value).epsilon(1e-7));
    }
}

TEST_CASE("relaxation enlarges TRIANGLE") {
    auto lp = relax_basic_lp(fixtures::triangle(), 0.1);
    CHECK(solve_lp(lp).value >= 3.0 - 1e-9);
}

TEST_CASE("to_packing shape") {
    auto inst = fixtures::single();
    auto pp = PipelineParams::defaults(inst, 0.1);
    auto lp3 = to_packing(inst, pp);
    CHECK(lp3.lp.num_columns() == 28);
    CHECK(lp3.base_columns == 14);
    for (const auto& r : lp3.lp.rows) CHECK(r.cmp == Comparator::Le);

    // A ternary constraint on two distinct variables: R4 rhs uses q^{2-1}.
    InstanceSpec s;
    s.q = 2, s.s = 3, s.t = 2, s.n = 2;
    s.predicates = {{"P", 3, {0, 1, 1, 0, 1, 0, 0, 1}}};
    s.constraints = {{0, {0, 1, 0}, 1}};
    auto rep = CspInstance::build(s);
    auto lp3r = to_packing(rep, PipelineParams::defaults(rep, 0.1));
    for (std::size_t j = 0; j < lp3r.row_kind.size(); ++j)
        if (lp3r.row_kind[j] == RowKind::R4) CHECK(lp3r.lp.rows[j].rhs == doctest::Approx(2.1));
}

TEST_CASE("complemented optimum on SINGLE and TRIANGLE") {
    for (const auto& inst : {fixtures::single(), fixtures::triangle()}) {
        auto pp = PipelineParams::defaults(inst, 0.1);
        auto lp2 = relax_basic_lp(inst, pp.eps);
        auto lp3 = to_packing(inst, pp);
        auto r2 = solve_lp(lp2);
        auto r3 = solve_lp(lp3.lp);
        const int N = lp3.base_columns;
        CHECK(std::abs(r3.value - pp.C * N - r2.value) <= 1e-6 * inst.total_weight());
        double gap = 0;
        for (int i = 0; i < N; ++i) gap = std::max(gap, std::abs(r3.z[i] + r3.z[N + i] - 1.0));
        CHECK(gap <= 1e-7);
    }
}

TEST_CASE("packing stats") {
    std::vector<LpRow> toy{{{{0, 1.0}, {1, 2.0}}, Comparator::Le, 4.0, ""}, {{{1, 3.0}}, Comparator::Le, 2.0, ""}};
    auto st = compute_packing_stats(toy, 2);
    CHECK(st.gamma_d == 3.0);
    CHECK(st.c_max == 4.0);
    CHECK(st.delta_p == 2);
    CHECK(st.delta_d == 2);
    // column 0: 4/4 * 1; column 1: 4/2 * 5
    CHECK(st.gamma_p == doctest::Approx(10.0));

    auto inst = fixtures::single();
    PipelineParams pp = PipelineParams::defaults(inst, 0.1);
    pp.C = 100;
    auto pk = normalize_packing(to_packing(inst, pp), inst.w(), pp.C);
    const double C = pp.C, w = inst.w();
    const int q = 2, s = 2;
    // Largest rhs is R4: C(q^{k-1}+eps).
    CHECK(pk.stats.c_max == doctest::Approx(C * (2 + pp.eps)));
    CHECK(pk.stats.c_max <= 2 * C * (w + std::pow(q, s)));
    CHECK(pk.stats.delta_p == 3);  // x + two mu in a marginal row
    CHECK(pk.stats.delta_d == 3);  // a mu column: two marginal rows and one coupling row
    double row_max = 0;
    for (const auto& r : pk.lp.rows) {
        double sum = 0;
        for (auto [c, a] : r.coeffs) sum += a;
        row_max = std::max(row_max, sum);
    }
    CHECK(pk.stats.gamma_d == doctest::Approx(row_max));
    CHECK(pk.stats.gamma_p >= pk.stats.gamma_d / 2);
}

TEST_CASE("normalize_packing restricted form and round trip") {
    auto insts = small_corpus(8, 700);
    insts.push_back(fixtures::triangle());
    for (const auto& inst : insts) {
        auto pp = PipelineParams::defaults(inst, 0.2);
        auto lp3 = to_packing(inst, pp);
        auto pk = normalize_packing(lp3, inst.w(), pp.C);
        double min_nz = 1e300;
        for (const auto& r : pk.lp.rows)
            for (auto [c, a] : r.coeffs) {
                CHECK(a >= 0);
                if (a != 0) min_nz = std::min(min_nz, a);
            }
        CHECK(min_nz >= 1 - 1e-12);
        for (double b : pk.lp.objective) CHECK(b == 1.0);

        auto r3 = solve_lp(lp3.lp);
        auto y = pk.scale(r3.z);
        auto back = pk.unscale(y);
        CHECK(lp3.lp.objective_value(back) == doctest::Approx(r3.value).epsilon(1e-12));
        CHECK(pk.lp.objective_value(y) == doctest::Approx(r3.value).epsilon(1e-9));
        CHECK(pk.lp.max_violation(y) <= 1e-9 * pk.stats.c_max);
    }
}

TEST_CASE("restore_and_repair at the exact optimum") {
    for (const auto& inst : {fixtures::single(), fixtures::triangle()}) {
        auto pp = PipelineParams::defaults(inst, 0.1);
        auto lp3 = to_packing(inst, pp);
        auto r3 = solve_lp(lp3.lp);
        auto out = restore_and_repair(inst, r3.z, pp);
        CHECK(out.deficient_columns == 0);
        CHECK(out.reset_variables == 0);
        const int N = lp3.base_columns;
        BasicLayout layout(inst);
        for (int v = 0; v < inst.n(); ++v)
            for (int a = 0; a < inst.q(); ++a)
                CHECK(out.solution.x[v][a] == doctest::Approx(r3.z[N + layout.x_col(v, a)]).epsilon(1e-7));
        CHECK(out.infeasibility <= pp.eps + 1e-9);
    }
}

TEST_CASE("restore_and_repair resets a deficient block") {
    auto inst = fixtures::triangle();
    auto pp = PipelineParams::defaults(inst, 0.1);
    pp.eps_dprime = 0.3;
    auto lp3 = to_packing(inst, pp);
    auto z = solve_lp(lp3.lp).z;
    const int N = lp3.base_columns;
    BasicLayout layout(inst);
    int c = layout.x_col(1, 0);
    double total = z[c] + z[N + c];
    z[c] *= 0.5 / total;
    z[N + c] *= 0.5 / total;
    auto out = restore_and_repair(inst, z, pp);
    CHECK(out.deficient_columns == 1);
    CHECK(out.reset_variables == 1);
    CHECK(out.solution.x[1] == std::vector<double>{0.5, 0.5});
    CHECK(out.reset_constraints == 2);  // both constraints touching variable 1
    for (int id = 0; id < 2; ++id) {
        double sum = 0;
        for (double m : out.solution.mu[id]) sum += m;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
    // Product of the repaired marginals.
    auto tab = product_table(inst, 0, out.solution.x);
    CHECK(out.solution.mu[0] == tab);

    std::vector<double> bad(z.size(), 2.0);
    try {
        restore_and_repair(inst, bad, pp);
        FAIL("expected NotFeasibleForLp3");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFeasibleForLp3);
    }
}

TEST_CASE("restore_and_repair value contract on random instances") {
    const double eps = 0.2;
    for (const auto& inst : small_corpus(10, 900)) {
        auto pp = PipelineParams::defaults(inst, eps);
        auto lp3 = to_packing(inst, pp);
        auto out = restore_and_repair(inst, solve_lp(lp3.lp).z, pp);
        double lp = solve_basic_lp(inst).value;
        CHECK(out.infeasibility <= eps + 1e-9);
        CHECK(out.solution.value >= (1 - eps) * lp - eps * inst.n());
    }
}

TEST_CASE("defaults validate eps") {
    CHECK_THROWS_AS(PipelineParams::defaults(2, 2, 2, 1, 0.0), Error);
    CHECK_THROWS_AS(PipelineParams::defaults(2, 2, 2, 1, 0.5), Error);
    auto p = PipelineParams::defaults(2, 2, 3, 1, 0.2);
    CHECK(p.C == doctest::Approx(16.0 * 9 / 0.04));
    CHECK(p.eps_prime == doctest::Approx(0.008 / (16.0 * 9)));
    CHECK(p.C >= 1);
}
