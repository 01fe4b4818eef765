#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "lpcsp/corpus.hpp"
#include "lpcsp/local_oracle.hpp"
#include "lpcsp/robustness.hpp"

using namespace lpcsp;

namespace {

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> d(n);
    double s = 0;
    for (auto& x : d) s += (x = e(rng));
    for (auto& x : d) x /= s;
    return d;
}

// Marginal of coordinate i, computed by direct enumeration.
std::vector<double> marginal(const std::vector<double>& f, int q, int k, int i) {
    std::vector<double> m(q, 0.0);
    for (std::size_t b = 0; b < f.size(); ++b) {
        std::size_t r = b;
        for (int j = k - 1; j > i; --j) r /= q;
        m[r % q] += f[b];
    }
    return m;
}

}  // namespace

TEST_CASE("character basis") {
    for (int q = 2; q <= 6; ++q) {
        auto b = build_basis(q);
        REQUIRE(b.chi.size() == static_cast<std::size_t>(q));
        for (double e : b.chi[0]) CHECK(e == 1.0);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) {
                double s = 0;
                for (int a = 0; a < q; ++a) s += b.chi[i][a] * b.chi[j][a];
                CHECK(std::abs(s / q - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
        CHECK(b.max_abs() <= std::sqrt(q) + 1e-12);
    }
    auto b2 = build_basis(2);
    CHECK(b2.chi[1][0] == doctest::Approx(1.0));
    CHECK(b2.chi[1][1] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(build_basis(1), Error);
}

TEST_CASE("hat and unhat") {
    auto b2 = build_basis(2);
    auto uni = hat(std::vector<double>(4, 0.25), b2);
    CHECK(uni[0] == doctest::Approx(1.0));
    for (int i = 1; i < 4; ++i) CHECK(std::abs(uni[i]) <= 1e-15);

    auto p0 = hat({1.0, 0.0}, b2);
    CHECK(p0[0] == doctest::Approx(1.0));
    CHECK(p0[1] == doctest::Approx(1.0));
    auto p1 = hat({0.0, 1.0}, b2);
    CHECK(p1[1] == doctest::Approx(-1.0));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int q = 2; q <= 4; ++q) {
        auto b = build_basis(q);
        for (int k = 1; k <= 3; ++k) {
            std::vector<double> f(static_cast<std::size_t>(std::pow(q, k)));
            for (auto& e : f) e = g(rng);
            auto back = unhat(hat(f, b), b);
            for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) <= 1e-9);
            auto u = hat(std::vector<double>(f.size(), 1.0 / f.size()), b);
            CHECK(u[0] == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("surgery") {
    auto out = surgery({{0.5, 0.6}, {0.25, 0.75}});
    CHECK(out[0][0] == doctest::Approx(5.0 / 11));
    CHECK(out[0][1] == doctest::Approx(6.0 / 11));
    CHECK(std::abs(out[0][1] - 0.6) <= 0.2);
    CHECK(out[1] == std::vector<double>{0.25, 0.75});
    try {
        surgery({{0.0, 0.0}});
        FAIL("expected ZeroRow");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroRow);
    }
}

TEST_CASE("smooth fixed points") {
    auto b = build_basis(2);
    auto h = smooth(std::vector<double>(4, 0.25), {{0.5, 0.5}, {0.5, 0.5}}, 0.3, b);
    for (double e : h) CHECK(e == doctest::Approx(0.25));

    std::vector<double> px{0.3, 0.7}, py{0.6, 0.4};
    std::vector<double> prod{0.18, 0.12, 0.42, 0.28};
    const double delta = 0.1;
    auto hp = smooth(prod, {px, py}, delta, b);
    for (int i = 0; i < 4; ++i) CHECK(hp[i] == doctest::Approx((1 - delta) * prod[i] + delta / 4).epsilon(1e-12));

    CHECK_THROWS_AS(smooth({-0.1, 1.1}, {{0.5, 0.5}}, 0.1, b), Error);
}

TEST_CASE("smooth postconditions on random tables") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int done = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int q = 2 + trial % 3;
        const int k = 1 + trial % 3;
        const auto b = build_basis(q);
        const std::size_t size = static_cast<std::size_t>(std::pow(q, k));
        auto mu = random_distribution(rng, size);
        const double noise = 0.02 * (trial % 5);
        std::vector<std::vector<double>> x(k);
        double eps = 0;
        for (int i = 0; i < k; ++i) {
            auto m = marginal(mu, q, k, i);
            x[i] = m;
            for (auto& e : x[i]) e = std::max(0.0, e + noise * u(rng) / q);
            x[i] = surgery({x[i]})[0];
            for (int a = 0; a < q; ++a) eps = std::max(eps, std::abs(x[i][a] - m[a]));
        }
        const double delta = smoothing_delta(k, q, eps);
        auto h = smooth(mu, x, delta, b);
        const double d = std::min(delta, 1.0);
        double sum = 0, l1 = 0;
        for (std::size_t i = 0; i < size; ++i) {
            CHECK(h[i] >= 0);
            sum += h[i];
            l1 += std::abs(h[i] - mu[i]);
        }
        CHECK(std::abs(sum - 1) <= 1e-9);
        CHECK(l1 <= 2 * d + 1e-9);
        for (int i = 0; i < k; ++i) {
            auto m = marginal(h, q, k, i);
            for (int a = 0; a < q; ++a) CHECK(std::abs(m[a] - ((1 - d) * x[i][a] + d / q)) <= 1e-9);
        }
        ++done;
    }
    CHECK(done == 1000);
}

TEST_CASE("repair_to_feasible") {
    auto tri = fixtures::triangle();
    auto opt = solve_basic_lp(tri);
    auto exact = repair_to_feasible(tri, opt);
    CHECK(exact.infeasibility <= 1e-9);
    CHECK(std::abs(exact.loss) <= 1e-9);

    auto bent = opt;
    bent.x[0][0] += 0.01;
    auto rep = repair_to_feasible(tri, bent);
    CHECK(rep.eps_in == doctest::Approx(0.01));
    CHECK(rep.eps_surgery <= 3 * 0.01 + 1e-12);
    CHECK(rep.infeasibility <= 1e-9);
    CHECK(rep.solution.value >= 3 - 2 * (2 * 8 * 0.03) * 3);
    CHECK(rep.solution.value <= 3 + 1e-7);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        RandomCorpusParams p;
        p.n = 7;
        p.q = 2 + seed % 2;
        auto inst = random_instance(p, 200 + seed);
        auto sol = solve_basic_lp(inst);
        const double lp = sol.value;
        const double noise = 0.002 * (1 + seed % 4);
        for (auto& row : sol.x)
            for (auto& e : row) e += noise * u(rng);
        for (auto& tab : sol.mu)
            for (auto& e : tab) e = std::max(0.0, e + noise * (u(rng) - 0.5) / tab.size());
        sol.value = lp_value(inst, sol);
        auto r = repair_to_feasible(inst, sol);
        const double sq3 = inst.s() * std::pow(inst.q(), 3);
        CHECK(r.infeasibility <= 1e-9);
        CHECK(r.loss <= r.l1_bound + 1e-9);
        CHECK(r.l1_bound <= 2 * r.delta * inst.total_weight() + 1e-9);
        CHECK(r.solution.value <= lp + 1e-7);
        CHECK(r.kappa <= 2 * sq3 * 3);
        CHECK(lp >= sol.value - 6 * sq3 * r.eps_in * inst.total_weight());
        MESSAGE("seed " << seed << " eps " << r.eps_in << " loss ratio " << r.kappa);
    }
}

TEST_CASE("repair of the local oracle output") {
    for (const auto& inst : {fixtures::single(), fixtures::triangle()}) {
        ConstraintOracle o(inst);
        LocalLpOracle olp(o, 0.2);
        auto sol = assemble_global(olp, inst).solution;
        auto r = repair_to_feasible(inst, sol);
        CHECK(r.infeasibility <= 1e-9);
        CHECK(r.solution.value <= solve_basic_lp(inst).value + 1e-7);
    }
}
