#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "psm/lp.hpp"

using namespace psm;

static LinearProgram box2() {
    LinearProgram lp;
    lp.add_var("x");
    lp.add_var("y");
    lp.add_con({Rat(1), Rat(0)}, Rel::Le, Rat(1));
    lp.add_con({Rat(0), Rat(1)}, Rel::Le, Rat(1));
    return lp;
}

TEST_CASE("single variable max") {
    LinearProgram lp;
    lp.add_var("x");
    lp.add_con({Rat(1)}, Rel::Le, Rat(3));
    lp.objective = {Rat(1)};
    auto r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == Rat(3));
    CHECK(r.x[0] == Rat(3));
}

TEST_CASE("no constraints, zero objective") {
    LinearProgram lp;
    lp.add_var("x");
    lp.objective = {Rat(0)};
    auto r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == Rat(0));
}

TEST_CASE("infeasible and unbounded statuses") {
    LinearProgram lp;
    lp.add_var("x");
    lp.add_con({Rat(1)}, Rel::Le, Rat(-1));
    lp.objective = {Rat(1)};
    CHECK(lp_solve(lp).status == LpStatus::Infeasible);

    LinearProgram up;
    up.add_var("x");
    up.objective = {Rat(1)};
    CHECK(lp_solve(up).status == LpStatus::Unbounded);
}

TEST_CASE("free variables and equalities") {
    LinearProgram lp;
    lp.add_var("x", std::nullopt);
    lp.add_var("y", std::nullopt);
    lp.add_con({Rat(1), Rat(1)}, Rel::Eq, Rat(2));
    lp.add_con({Rat(1), Rat(-1)}, Rel::Ge, Rat(-4));
    lp.objective = {Rat(-1), Rat(1)};  // max y - x, at x-y = -4: value 4
    auto r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == Rat(4));
    CHECK(r.x[0] == Rat(-1));
    CHECK(r.x[1] == Rat(3));
}

TEST_CASE("fractional optimum is exact") {
    LinearProgram lp;
    lp.add_var("x");
    lp.add_var("y");
    lp.add_con({Rat(3), Rat(1)}, Rel::Le, Rat(1));
    lp.add_con({Rat(1), Rat(3)}, Rel::Le, Rat(1));
    lp.objective = {Rat(1), Rat(1)};
    auto r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == Rat(1, 2));
    CHECK(r.x[0] == Rat(1, 4));
}

TEST_CASE("unit simplex vertices in d=2") {
    Polytope p;
    p.num_vars = 2;
    p.cons.push_back({{Rat(1), Rat(1)}, Rel::Eq, Rat(1)});
    auto vs = enumerate_vertices(p);
    REQUIRE(vs.size() == 2);
    CHECK(vs[0] == std::vector<Rat>{Rat(0), Rat(1)});
    CHECK(vs[1] == std::vector<Rat>{Rat(1), Rat(0)});
}

TEST_CASE("unit square vertices") {
    auto vs = enumerate_vertices(Polytope::of(box2()));
    REQUIRE(vs.size() == 4);
    CHECK(vs[0] == std::vector<Rat>{Rat(0), Rat(0)});
    CHECK(vs[3] == std::vector<Rat>{Rat(1), Rat(1)});
}

TEST_CASE("degenerate vertex deduplicated") {
    // Three facets through (1,1) on top of the unit square corner.
    LinearProgram lp = box2();
    lp.add_con({Rat(1), Rat(1)}, Rel::Le, Rat(2));
    auto vs = enumerate_vertices(Polytope::of(lp));
    CHECK(vs.size() == 4);
}

TEST_CASE("transportation equalities force a single vertex") {
    // One row, one column, size 5: unique point.
    Polytope p;
    p.num_vars = 1;
    p.cons.push_back({{Rat(1)}, Rel::Eq, Rat(5)});
    auto vs = enumerate_vertices(p);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0][0] == Rat(5));
}

TEST_CASE("unbounded polytope rejected, over-cap dimension rejected") {
    Polytope p;
    p.num_vars = 1;
    CHECK_THROWS_AS(enumerate_vertices(p), InputError);
    Polytope big;
    big.num_vars = 17;
    CHECK_THROWS_AS(enumerate_vertices(big), CapacityError);
}

TEST_CASE("lp optimum equals max over vertices on random small LPs") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<int> coef(-4, 4), rhs(1, 6);
    int solved = 0;
    for (int iter = 0; iter < 200; ++iter) {
        int d = 2 + int(rng() % 3);
        LinearProgram lp;
        for (int i = 0; i < d; ++i) lp.add_var();
        // box to guarantee boundedness, plus random cuts
        for (int i = 0; i < d; ++i) {
            std::vector<Rat> a(size_t(d), Rat(0));
            a[size_t(i)] = 1;
            lp.add_con(a, Rel::Le, Rat(rhs(rng)));
        }
        for (int k = 0; k < d; ++k) {
            std::vector<Rat> a(size_t(d), Rat(0));
            for (int i = 0; i < d; ++i) a[size_t(i)] = coef(rng);
            lp.add_con(a, Rel::Le, Rat(rhs(rng)));
        }
        lp.objective.resize(size_t(d));
        for (int i = 0; i < d; ++i) lp.objective[size_t(i)] = coef(rng);
        auto r = lp_solve(lp);
        REQUIRE(r.status == LpStatus::Optimal);  // origin is always feasible
        auto vs = enumerate_vertices(Polytope::of(lp));
        REQUIRE(!vs.empty());
        Rat best = 0;
        bool first = true;
        for (const auto& v : vs) {
            Rat val = 0;
            for (int i = 0; i < d; ++i) val += lp.objective[size_t(i)] * v[size_t(i)];
            if (first || val > best) best = val;
            first = false;
        }
        CHECK(best == r.value);
        ++solved;
    }
    CHECK(solved == 200);
}

TEST_CASE("determinism: same input, same output") {
    LinearProgram lp = box2();
    lp.objective = {Rat(1), Rat(1)};
    auto r1 = lp_solve(lp);
    auto r2 = lp_solve(lp);
    CHECK(r1.x == r2.x);
    auto v1 = enumerate_vertices(Polytope::of(lp));
    auto v2 = enumerate_vertices(Polytope::of(lp));
    CHECK(v1 == v2);
}

TEST_CASE("every enumerated vertex is tight on d independent constraints") {
    LinearProgram lp = box2();
    lp.add_con({Rat(1), Rat(2)}, Rel::Le, Rat(2));
    auto vs = enumerate_vertices(Polytope::of(lp));
    for (const auto& v : vs) {
        std::vector<std::vector<Rat>> tight;
        for (const auto& c : lp.cons) {
            Rat s = c.a[0] * v[0] + c.a[1] * v[1];
            CHECK(s <= c.rhs);
            if (s == c.rhs) tight.push_back(c.a);
        }
        for (int i = 0; i < 2; ++i)
            if (v[size_t(i)] == 0) {
                std::vector<Rat> a(2, Rat(0));
                a[size_t(i)] = 1;
                tight.push_back(a);
            }
        CHECK(matrix_rank(tight) == 2);
    }
}

TEST_CASE("dump_lp round-trips the shape") {
    LinearProgram lp = box2();
    lp.objective = {Rat(1), Rat(1, 2)};
    auto s = dump_lp(lp);
    CHECK(s.find("1/2*y") != std::string::npos);
    CHECK(s.find("x >= 0") != std::string::npos);
}

TEST_CASE("gaussian helpers") {
    CHECK(matrix_rank({{Rat(1), Rat(1)}, {Rat(2), Rat(2)}}) == 1);
    auto x = solve_unique({{Rat(2), Rat(0)}, {Rat(0), Rat(4)}}, {Rat(6), Rat(8)});
    REQUIRE(x.has_value());
    CHECK((*x)[0] == Rat(3));
    CHECK((*x)[1] == Rat(2));
    CHECK(!solve_unique({{Rat(1), Rat(1)}}, {Rat(1)}).has_value());
    auto k = kernel_vector({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}});
    REQUIRE(k.has_value());
    Rat s0 = (*k)[0] + (*k)[2], s1 = (*k)[1] + (*k)[2];
    CHECK(s0 == 0);
    CHECK(s1 == 0);
    CHECK(!kernel_vector({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}).has_value());
}
