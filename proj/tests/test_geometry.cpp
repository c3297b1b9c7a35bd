#include <doctest.h>

#include <cmath>

#include "ptk/geometry.hpp"

using namespace ptk;

namespace {
Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}
} // namespace

TEST_CASE("concentric exhaustion formulas") {
    Domain ball{DomainKind::ball, 2, vec2(0, 0), 1.0};
    auto ex = concentric_exhaustion(ball, 2);
    REQUIRE(ex.levels.size() == 2);
    CHECK(ex.levels[0].radius == doctest::Approx(0.5));
    CHECK(ex.levels[1].radius == doctest::Approx(0.75));

    Domain ws{DomainKind::whole_space, 3, {}, 0};
    auto ex3 = concentric_exhaustion(ws, 3);
    CHECK(ex3.levels[0].radius == doctest::Approx(2));
    CHECK(ex3.levels[1].radius == doctest::Approx(4));
    CHECK(ex3.levels[2].radius == doctest::Approx(8));

    Domain ann{DomainKind::annulus, 2, vec2(0, 0), 0, 1, 2};
    CHECK_THROWS(concentric_exhaustion(ann, 1));
}

TEST_CASE("exhaustion nesting with positive gaps") {
    Domain ball{DomainKind::ball, 3, Eigen::VectorXd::Zero(3), 2.0};
    auto ex = concentric_exhaustion(ball, 6);
    for (std::size_t i = 1; i < ex.levels.size(); ++i)
        CHECK(ex.levels[i].radius > ex.levels[i - 1].radius);
    CHECK(ex.levels.back().radius < ball.R);
}

TEST_CASE("boundary_net on circle") {
    Ball circle{vec2(0, 0), 1.0, false};
    auto big = boundary_net(circle, 2.0, 7);
    CHECK(big.size() == 1);

    auto z = boundary_net(circle, 0.5, 7);
    CHECK(z.size() >= 7);
    CHECK(z.size() <= 13);
    for (std::size_t i = 0; i < z.size(); ++i) {
        CHECK(std::abs(z[i].norm() - 1.0) < 1e-12);
        for (std::size_t j = i + 1; j < z.size(); ++j)
            CHECK((z[i] - z[j]).norm() > 0.25);
    }
    // cover on an independent angular sweep
    for (int k = 0; k < 1000; ++k) {
        double a = 2 * M_PI * (k + 0.37) / 1000.0;
        Eigen::VectorXd p = vec2(std::cos(a), std::sin(a));
        double best = 1e9;
        for (auto& q : z) best = std::min(best, (p - q).norm());
        CHECK(best < 0.5);
    }
}

TEST_CASE("boundary_net on sphere") {
    Ball sph{Eigen::VectorXd::Zero(3), 1.0, false};
    auto z = boundary_net(sph, 0.5, 42);
    CHECK(z.size() >= 20);
    CHECK(z.size() <= 120);
    double min_pair = 1e9;
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            min_pair = std::min(min_pair, (z[i] - z[j]).norm());
    CHECK(min_pair > 0.25);
    // determinism
    auto z2 = boundary_net(sph, 0.5, 42);
    REQUIRE(z.size() == z2.size());
    for (std::size_t i = 0; i < z.size(); ++i) CHECK((z[i] - z2[i]).norm() == 0.0);
}

TEST_CASE("cube_subdivide grid") {
    Cube K1{vec2(0, 0), 1.0};
    auto [ch1, ke1] = cube_subdivide(K1, 1, 0.25);
    CHECK(ch1.size() == 1);
    CHECK(ch1[0].a == doctest::Approx(1.0));
    CHECK(ke1[0].a == doctest::Approx(0.25));

    auto [ch, ke] = cube_subdivide(K1, 2, 0.2);
    REQUIRE(ch.size() == 4);
    double off = 1.0 / (4.0 * std::sqrt(2.0));
    bool seen_pp = false;
    double vol = 0.0;
    for (auto& c : ch) {
        CHECK(c.a == doctest::Approx(0.5));
        CHECK(std::abs(std::abs(c.center[0]) - off) < 1e-14);
        CHECK(std::abs(std::abs(c.center[1]) - off) < 1e-14);
        if (c.center[0] > 0 && c.center[1] > 0) seen_pp = true;
        double s = c.a / std::sqrt(2.0);
        vol += s * s;
        CHECK(cube_contains(K1, c));
    }
    CHECK(seen_pp);
    CHECK(vol == doctest::Approx(0.5));  // side of K1 is 1/sqrt(2), area 1/2
    for (std::size_t i = 0; i < ke.size(); ++i) {
        CHECK((ke[i].center - ch[i].center).norm() == 0.0);
        for (std::size_t j = i + 1; j < ke.size(); ++j)
            CHECK(cubes_disjoint(ke[i], ke[j]));
    }
    CHECK_THROWS(cube_subdivide(K1, 2, 0.3));
}

TEST_CASE("shell_partition") {
    Domain ws{DomainKind::whole_space, 2, {}, 0};
    auto ex = concentric_exhaustion(ws, 5);
    auto shells = shell_partition(ex, {1, 1, 1});
    REQUIRE(shells.size() == 3);
    CHECK(shells[0].inner == doctest::Approx(2));
    CHECK(shells[0].outer == doctest::Approx(4));
    CHECK(shells[1].inner == doctest::Approx(4));
    CHECK(shells[2].outer == doctest::Approx(16));

    Domain ball{DomainKind::ball, 2, vec2(0, 0), 1.0};
    auto exb = concentric_exhaustion(ball, 4);
    auto sb = shell_partition(exb, {1, 1});
    REQUIRE(sb.size() == 2);
    CHECK(sb[0].outer == doctest::Approx(sb[1].inner));
    CHECK(sb[0].inner < sb[0].outer);

    auto ex1 = concentric_exhaustion(ball, 1);
    CHECK_THROWS(shell_partition(ex1, {2}));
}

TEST_CASE("cube predicates") {
    Cube a{vec2(0, 0), 1.0}, b{vec2(1, 0), 1.0}, c{vec2(0.1, 0), 0.5};
    CHECK(cubes_disjoint(a, b));
    CHECK(!cubes_disjoint(a, c));
    CHECK(cube_contains(a, Cube{vec2(0.1, 0.1), 0.3}));
    CHECK(!cube_contains(a, Cube{vec2(0.3, 0.3), 0.3}));
    CHECK(cube_contains_point(a, vec2(0.3, 0.3)));
    CHECK(!cube_contains_point(a, vec2(0.4, 0)));
    CHECK(cube_distance(a, vec2(0.3, 0)) == doctest::Approx(0.0));
    double h = a.half_side();
    CHECK(cube_distance(a, vec2(1, 0)) == doctest::Approx(1 - h));
}
