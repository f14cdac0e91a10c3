#include <doctest.h>

#include <cmath>
#include <random>

#include <pcot/errors.hpp>
#include <pcot/sinkhorn.hpp>
#include <pcot/transportation.hpp>

#include "helpers.hpp"

using namespace pcot;

TEST_CASE("transportation: hand-solved 2x2 instances") {
    auto r = solve_transportation({0.5, 0.5}, {0.5, 0.5}, {{0, 1}, {1, 0}});
    CHECK(r.objective == doctest::Approx(0.0));
    CHECK(r.plan[0][0] == doctest::Approx(0.5));
    CHECK(r.plan[1][1] == doctest::Approx(0.5));

    r = solve_transportation({0.5, 0.5}, {0.3, 0.7}, {{1, 2}, {3, 1}});
    CHECK(r.objective == doctest::Approx(1.2));
    CHECK(r.plan[0][0] == doctest::Approx(0.3));
    CHECK(r.plan[0][1] == doctest::Approx(0.2));
    CHECK(r.plan[1][0] == doctest::Approx(0.0));
    CHECK(r.plan[1][1] == doctest::Approx(0.5));

    r = solve_transportation({0.5, 0.5}, {0.3, 0.7}, {{0.1, 0.7}, {0.7, 0.1}});
    CHECK(r.objective == doctest::Approx(0.22));

    r = solve_transportation({1}, {1}, {{0}});
    CHECK(r.objective == 0.0);
    CHECK(r.plan[0][0] == doctest::Approx(1.0));
}

TEST_CASE("transportation: degenerate shapes and zero marginals") {
    auto r = solve_transportation({1}, {0.25, 0.25, 0.5}, {{3, 1, 2}});
    CHECK(r.objective == doctest::Approx(3 * 0.25 + 1 * 0.25 + 2 * 0.5));

    r = solve_transportation({0.2, 0.8}, {1}, {{5}, {1}});
    CHECK(r.objective == doctest::Approx(0.2 * 5 + 0.8 * 1));

    r = solve_transportation({1, 0}, {0.5, 0.5}, {{1, 1}, {100, 100}});
    CHECK(r.objective == doctest::Approx(1.0));
    CHECK(r.plan[1][0] == doctest::Approx(0.0));
    CHECK(r.plan[1][1] == doctest::Approx(0.0));
}

TEST_CASE("transportation: input validation") {
    CHECK_THROWS_AS(solve_transportation({0.5, 0.5}, {0.4, 0.4}, {{0, 1}, {1, 0}}), InfeasibleError);
    CHECK_THROWS_AS(solve_transportation({-0.1, 1.1}, {0.5, 0.5}, {{0, 1}, {1, 0}}), InfeasibleError);
    CHECK_THROWS_AS(solve_transportation({0.5, 0.5}, {0.5, 0.5}, {{0, 1}}), LengthMismatchError);
}

namespace {

struct Instance {
    std::vector<double> r, c;
    std::vector<std::vector<double>> cost;
};

Instance random_instance(std::mt19937_64& eng, int m, int n, bool with_zeros) {
    std::uniform_real_distribution<double> u(0, 1), uc(0, 10);
    Instance inst;
    inst.r.resize(size_t(m));
    inst.c.resize(size_t(n));
    double sr = 0, sc = 0;
    for (auto& x : inst.r) {
        x = with_zeros && u(eng) < 0.2 ? 0.0 : u(eng) + 0.01;
        sr += x;
    }
    for (auto& x : inst.c) {
        x = with_zeros && u(eng) < 0.2 ? 0.0 : u(eng) + 0.01;
        sc += x;
    }
    if (sc == 0) {
        inst.c[0] = 1;
        sc = 1;
    }
    if (sr == 0) {
        inst.r[0] = 1;
        sr = 1;
    }
    for (auto& x : inst.r) x /= sr;
    for (auto& x : inst.c) x /= sc;
    inst.cost.assign(size_t(m), std::vector<double>(size_t(n)));
    for (auto& row : inst.cost)
        for (auto& x : row) x = uc(eng);
    return inst;
}

} // namespace

TEST_CASE("transportation matches the basis-enumeration oracle") {
    std::mt19937_64 eng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        int m = 2 + int(eng() % 2), n = 2 + int(eng() % 2);
        if (trial % 3 == 0) n = 3;  // keep 3x3 well represented
        Instance inst = random_instance(eng, m, n, trial % 4 == 0);
        auto got = solve_transportation(inst.r, inst.c, inst.cost);
        double want = testutil::brute_transport(inst.r, inst.c, inst.cost);
        CHECK(got.objective == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("transportation plans are feasible and priced consistently") {
    std::mt19937_64 eng(77);
    for (int trial = 0; trial < 100; ++trial) {
        int m = 1 + int(eng() % 6), n = 1 + int(eng() % 7);
        Instance inst = random_instance(eng, m, n, true);
        auto got = solve_transportation(inst.r, inst.c, inst.cost);

        double priced = 0;
        for (int i = 0; i < m; ++i) {
            double rs = 0;
            for (int j = 0; j < n; ++j) {
                CHECK(got.plan[size_t(i)][size_t(j)] >= 0.0);
                rs += got.plan[size_t(i)][size_t(j)];
                priced += got.plan[size_t(i)][size_t(j)] * inst.cost[size_t(i)][size_t(j)];
            }
            CHECK(rs == doctest::Approx(inst.r[size_t(i)]).epsilon(1e-9));
        }
        for (int j = 0; j < n; ++j) {
            double cs = 0;
            for (int i = 0; i < m; ++i) cs += got.plan[size_t(i)][size_t(j)];
            CHECK(cs == doctest::Approx(inst.c[size_t(j)]).epsilon(1e-9));
        }
        CHECK(got.objective == doctest::Approx(priced).epsilon(1e-12));

        // objective-only entry point returns the same number, bit for bit
        CHECK(transportation_cost(inst.r, inst.c, inst.cost) == got.objective);
    }
}

TEST_CASE("transportation is deterministic") {
    std::mt19937_64 eng(5);
    Instance inst = random_instance(eng, 6, 5, false);
    auto a = solve_transportation(inst.r, inst.c, inst.cost);
    auto b = solve_transportation(inst.r, inst.c, inst.cost);
    CHECK(a.plan == b.plan);
    CHECK(a.objective == b.objective);
}

TEST_CASE("transportation beats the independence coupling on a larger instance") {
    std::mt19937_64 eng(13);
    Instance inst = random_instance(eng, 40, 60, false);
    auto got = solve_transportation(inst.r, inst.c, inst.cost);
    double indep = 0;
    for (size_t i = 0; i < inst.r.size(); ++i)
        for (size_t j = 0; j < inst.c.size(); ++j)
            indep += inst.r[i] * inst.c[j] * inst.cost[i][j];
    CHECK(got.objective <= indep + 1e-12);
}

TEST_CASE("sinkhorn: single cell and entropic gap") {
    auto r = sinkhorn({1}, {1}, {{0}}, 0.01);
    CHECK(r.objective == doctest::Approx(0.0));

    r = sinkhorn({0.5, 0.5}, {0.5, 0.5}, {{0, 1}, {1, 0}}, 0.01);
    CHECK(r.converged);
    CHECK(std::abs(r.objective) < 0.02);
}

TEST_CASE("sinkhorn: large epsilon approaches the independence plan") {
    // the deviation from a (x) b scales like (mean(c) - c_ij) / eps, so the
    // tolerance tightens by 1e3 when eps does
    std::mt19937_64 eng(31);
    Instance inst = random_instance(eng, 3, 4, false);
    for (auto [eps, tol] : {std::pair{1e3, 1e-3}, std::pair{1e6, 1e-6}}) {
        auto r = sinkhorn(inst.r, inst.c, inst.cost, eps);
        for (size_t i = 0; i < inst.r.size(); ++i)
            for (size_t j = 0; j < inst.c.size(); ++j)
                CHECK(std::abs(r.plan[i][j] - inst.r[i] * inst.c[j]) < tol);
    }
}

TEST_CASE("sinkhorn plans are near-feasible and near-optimal at small epsilon") {
    std::mt19937_64 eng(99);
    for (int trial = 0; trial < 20; ++trial) {
        Instance inst = random_instance(eng, 3, 3, false);
        auto exact = solve_transportation(inst.r, inst.c, inst.cost);
        auto ent = sinkhorn(inst.r, inst.c, inst.cost, 0.01, 100000);
        CHECK(ent.marginal_error < 1e-6);
        CHECK(ent.objective >= exact.objective - 1e-6);
        CHECK(ent.objective <= exact.objective + 0.05 * (1 + exact.objective));
    }
}
