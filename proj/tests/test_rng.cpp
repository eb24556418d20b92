#include <doctest.h>

#include <cmath>

#include "inrlab/rng.hpp"

using namespace inrlab;

TEST_CASE("rng: identical seeds give identical sequences") {
    SeededRng a(42), b(42);
    auto xs = draw_normal(a, 0.0, 1.0, 1000);
    auto ys = draw_normal(b, 0.0, 1.0, 1000);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(xs[i] == ys[i]);

    SeededRng c(43);
    auto zs = draw_normal(c, 0.0, 1.0, 1000);
    std::size_t same = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) same += (xs[i] == zs[i]);
    CHECK(same == 0);
}

TEST_CASE("rng: degenerate normal(0,0) draws zeros") {
    SeededRng rng(1);
    for (double v : draw_normal(rng, 0.0, 0.0, 64)) CHECK(v == 0.0);
}

TEST_CASE("rng: normal(0,1) sample moments") {
    SeededRng rng(2024);
    auto xs = draw_normal(rng, 0.0, 1.0, 100000);
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= double(xs.size());
    double var = 0.0;
    for (double v : xs) var += (v - mean) * (v - mean);
    var /= double(xs.size());
    CHECK(std::fabs(mean) <= 0.02);
    CHECK(std::fabs(var - 1.0) <= 0.05);
}

TEST_CASE("rng: uniform stays inside its interval") {
    SeededRng rng(9);
    for (double v : draw_uniform(rng, -2.0, 3.0, 4096)) {
        CHECK(v >= -2.0);
        CHECK(v < 3.0);
    }
}

TEST_CASE("rng: invalid parameters are rejected") {
    SeededRng rng(5);
    CHECK_THROWS_AS(rng.uniform(1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(rng.normal(0.0, -1.0), ArgumentError);
    CHECK_THROWS_AS(draw_uniform(rng, 2.0, 1.0, 3), ArgumentError);
    CHECK_THROWS_AS(draw_normal(rng, 0.0, -0.5, 3), ArgumentError);
}

TEST_CASE("rng: forked streams are independent and reproducible") {
    SeededRng base(77);
    SeededRng f1 = base.fork(0);
    SeededRng f2 = base.fork(1);
    SeededRng f1again = SeededRng(77).fork(0);
    CHECK(f1.next_u64() == f1again.next_u64());
    CHECK(f1.next_u64() != f2.next_u64());
}
