#include <doctest.h>

#include <cmath>

#include "ptk/equilibrium.hpp"
#include "ptk/rng.hpp"

using namespace ptk;

namespace {
Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}
Eigen::VectorXd vec3(double x, double y, double z) {
    Eigen::VectorXd v(3);
    v << x, y, z;
    return v;
}
} // namespace

TEST_CASE("potential_eval point masses") {
    PotentialField f;
    f.profile = make_classical(3);
    f.measure.points = Eigen::MatrixXd::Zero(1, 3);
    f.measure.weights = Eigen::VectorXd::Ones(1);
    CHECK(potential_eval(f, vec3(2, 0, 0)) == doctest::Approx(0.5));
    CHECK(std::isinf(potential_eval(f, vec3(0, 0, 0))));

    PotentialField g;
    g.profile = make_riesz(2, 1.0);
    g.measure.points.resize(2, 2);
    g.measure.points << 1, 0, -1, 0;
    g.measure.weights = Eigen::VectorXd::Constant(2, 0.5);
    CHECK(potential_eval(g, vec2(0, 0)) == doctest::Approx(1.0));

    PotentialField e;
    e.profile = make_riesz(2, 1.0);
    e.measure.points.resize(0, 2);
    e.measure.weights.resize(0);
    CHECK(potential_eval(e, vec2(0, 0)) == 0.0);
}

TEST_CASE("potential_eval linearity") {
    auto p = make_riesz(2, 1.0);
    Rng rng(5);
    Eigen::MatrixXd pts(6, 2);
    Eigen::VectorXd wa(6), wb(6);
    for (int i = 0; i < 6; ++i) {
        pts(i, 0) = rng.uniform();
        pts(i, 1) = rng.uniform();
        wa[i] = rng.uniform();
        wb[i] = rng.uniform();
    }
    PotentialField fa{{pts, wa, ""}, p}, fb{{pts, wb, ""}, p},
        fab{{pts, wa + wb, ""}, p};
    Eigen::VectorXd x = vec2(3.3, -1.2);
    CHECK(potential_eval(fa, x) + potential_eval(fb, x) ==
          doctest::Approx(potential_eval(fab, x)).epsilon(1e-12));
}

TEST_CASE("cube_potential far field") {
    Cube Q{vec3(0, 0, 0), 0.1};
    auto p = make_classical(3);
    double v = cube_potential(Q, p, vec3(5, 0, 0), 1e-4);
    CHECK(v == doctest::Approx(0.2).epsilon(0.01));
}

TEST_CASE("cube_potential center self-consistency and scaling") {
    auto p = make_riesz(2, 1.0);
    Cube K1{vec2(0, 0), 1.0 / std::exp(1.0)};
    double c1a = cube_potential(K1, p, vec2(0, 0), 1e-3);
    double c1b = cube_potential(K1, p, vec2(0, 0), 1e-5);
    CHECK(c1a == doctest::Approx(c1b).epsilon(2e-3));
    // uniform square side s: integral of 1/|y| over it is s * const
    // => potential at center scales like a^(alpha-d) = 1/a
    Cube K2{vec2(0, 0), 0.5 / std::exp(1.0)};
    double c2 = cube_potential(K2, p, vec2(0, 0), 1e-4);
    CHECK(c2 == doctest::Approx(2.0 * c1b).epsilon(2e-3));
    // int over unit square of |y|^-1 dy = 4 ln(1 + sqrt 2); the side of K1
    // is 1/(e sqrt 2), so the center potential is that integral / side
    double I = 4.0 * std::log(1.0 + std::sqrt(2.0));
    CHECK(c1b ==
          doctest::Approx(I * std::sqrt(2.0) * std::exp(1.0)).epsilon(5e-3));
}

TEST_CASE("equilibrium mass: unit sphere classical d=3") {
    auto p = make_classical(3);
    auto pts = ball_support(p, 1.0, 400);
    double res = 0;
    auto mu = equilibrium_solve(pts, p, 0.0, &res);
    CHECK(res < 0.02);
    CHECK(mu.mass() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("equilibrium mass bracket: riesz disk") {
    auto p = make_riesz(2, 1.0);
    p.C_G = validate_decay(p, {0.5, 0.1});
    p.C_D = doubling_constant(p);
    double r = 0.2;
    auto pts = ball_support(p, r, 16);
    double res = 0;
    auto mu = equilibrium_solve(pts, p, 0.0, &res);
    CHECK(res < 0.02);
    CHECK(mu.mass() >= cap_eval(p, r) / p.C_G);
    CHECK(mu.mass() <= p.C_D * cap_eval(p, r));
    // exact riesz capacity of the disk in this normalization is 2r/pi
    CHECK(mu.mass() == doctest::Approx(2.0 * r / M_PI).epsilon(0.05));
}

TEST_CASE("equilibrium far-separated balls additive") {
    auto p = make_riesz(2, 1.0);
    auto one = ball_support(p, 0.1, 10);
    double res;
    double single = equilibrium_solve(one, p, 0.0, &res).mass();
    Eigen::MatrixXd two(2 * one.rows(), 2);
    two.topRows(one.rows()) = one;
    two.bottomRows(one.rows()) = one;
    two.bottomRows(one.rows()).col(0).array() += 50.0;
    double both = equilibrium_solve(two, p, 0.0, &res).mass();
    CHECK(both == doctest::Approx(2.0 * single).epsilon(0.10));
}

TEST_CASE("equilibrium maximum principle") {
    auto p = make_riesz(2, 1.0);
    auto pts = ball_support(p, 0.3, 16);
    double res;
    auto mu = equilibrium_solve(pts, p, 0.0, &res);
    PotentialField f{mu, p};
    Rng rng(11);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        Eigen::VectorXd x = vec2(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
        // stay a spacing away from the cloud so the point-mass spikes
        // of the discretization do not dominate
        double nn = 1e9;
        for (int j = 0; j < pts.rows(); ++j)
            nn = std::min(nn, (pts.row(j).transpose() - x).norm());
        if (nn < 0.02) continue;
        worst = std::max(worst, potential_eval(f, x));
    }
    CHECK(worst <= 1.0 + res + 0.02);
}

TEST_CASE("radial hitting closed form") {
    auto p3 = make_classical(3);
    CHECK(radial_hitting_closed_form(p3, 0.25, 1.0, 0.5) == doctest::Approx(1.0 / 3.0));
    double inf = std::numeric_limits<double>::infinity();
    CHECK(radial_hitting_closed_form(p3, 0.5, inf, 1.0) == doctest::Approx(0.5));
    CHECK(radial_hitting_closed_form(p3, 0.25, 1.0, 0.25) == 1.0);
    auto p2 = make_logarithmic();
    CHECK(radial_hitting_closed_form(p2, 0.25, 1.0, 0.5) ==
          doctest::Approx(std::log(2.0) / std::log(4.0)));
    CHECK_THROWS(radial_hitting_closed_form(p3, 0.5, 1.0, 0.25));
}
