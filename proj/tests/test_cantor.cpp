#include <doctest.h>

#include <cmath>

#include "ptk/cantor.hpp"

using namespace ptk;

namespace {
CantorRun& shared_run() {
    static CantorRun run = [] {
        auto p = make_riesz(2, 1.0);
        return run_cantor(p, phi_cap_over_log(p), 2);
    }();
    return run;
}
} // namespace

TEST_CASE("init_level geometry") {
    auto p = make_riesz(2, 1.0);
    auto lv = init_level(p);
    CHECK(lv.M == 1);
    CHECK(lv.a == doctest::Approx(1.0 / std::exp(1.0)));
    CHECK(lv.centers.row(0).norm() == 0.0);
    CHECK(lv.mass_bound == doctest::Approx(construction_c1(p)).epsilon(1e-6));

    auto p1 = make_riesz(1, 0.5);
    auto lv1 = init_level(p1);
    CHECK(lv1.d == 1);
    CHECK(Cube{lv1.centers.row(0).transpose(), lv1.a}.half_side() ==
          doctest::Approx(0.5 / std::exp(1.0)));
}

TEST_CASE("c1 and the capQ constant for riesz d=2 alpha=1") {
    auto& run = shared_run();
    // int over unit square of 1/|y| = 4 ln(1+sqrt 2); c1 = that / side(K1)
    double expect = 4.0 * std::log(1.0 + std::sqrt(2.0)) * std::sqrt(2.0) *
                    std::exp(1.0);
    CHECK(run.c1 == doctest::Approx(expect).epsilon(1e-3));
    // scale invariance of cap(a)*||G mu_aK||
    CHECK(run.capq_max / run.capq_min < 1.05);
}

TEST_CASE("select_step_params rejects phi = cap") {
    auto p = make_riesz(2, 1.0);
    auto lv = init_level(p);
    MeasureFunction capfn{[p](double t) { return cap_eval(p, t); }, "cap"};
    CHECK_THROWS(select_step_params(lv, capfn, p, construction_c1(p), false));
}

TEST_CASE("certified run to depth 2: conditions as stored") {
    auto& run = shared_run();
    REQUIRE(run.certs.size() == 2);
    double c2 = run.profile.c * run.profile.c;
    double M = 1.0;
    double a = 1.0 / std::exp(1.0);
    for (const auto& c : run.certs) {
        CHECK(c.holds());
        // re-derive every inequality from (m, n, r) independently
        double capa = cap_eval(run.profile, a);
        double ndcap = std::pow(double(c.n), c.d) * cap_eval(run.profile, c.r);
        CHECK(2.0 * c2 * capa < ndcap);
        CHECK(ndcap < 3.0 * c2 * capa);
        CHECK(2.0 * c.r < a / c.n);
        CHECK(c.r < 1.0 / c.m);
        CHECK(c.h_r < 1.0 / (3.0 * c.m * M * c2 * capa));
        M *= std::pow(double(c.n), c.d);
        a = c.r;
    }
}

TEST_CASE("refine bookkeeping and nesting") {
    auto& run = shared_run();
    REQUIRE(run.levels.size() == 3);
    const auto& l1 = run.levels[0];
    const auto& l2 = run.levels[1];
    CHECK(l2.M == static_cast<long long>(std::pow(run.certs[0].n, 2)));
    CHECK(l2.a == doctest::Approx(run.certs[0].r));
    // nesting: every level-2 cube inside the level-1 cube
    Cube parent{l1.centers.row(0).transpose(), l1.a};
    for (long long i = 0; i < l2.M; ++i)
        CHECK(cube_contains(parent, Cube{l2.center_of(i), l2.a}));
    // disjointness
    for (long long i = 0; i < l2.M; ++i)
        for (long long j = i + 1; j < l2.M; ++j)
            CHECK(cubes_disjoint(Cube{l2.center_of(i), l2.a},
                                 Cube{l2.center_of(j), l2.a}));
    // strictly inside B(0,1)
    for (long long i = 0; i < l2.M; ++i)
        CHECK(l2.center_of(i).norm() + 0.5 * l2.a < 0.9);
}

TEST_CASE("mass bound est-mq per level") {
    auto& run = shared_run();
    for (const auto& lv : run.levels)
        CHECK(level_potential_sup(lv, run.profile) <= lv.mass_bound * (1.0 + 1e-3));
}

TEST_CASE("covering certificate bounds below 1/m") {
    auto& run = shared_run();
    auto phi = phi_cap_over_log(run.profile);
    auto cov = covering_certificate(run.certs, phi);
    REQUIRE(cov.size() == 2);
    for (const auto& cb : cov) {
        CHECK(cb.bound < cb.threshold);
        CHECK(cb.threshold == doctest::Approx(1.0 / cb.m));
    }
}

TEST_CASE("potential growth and global sup") {
    auto& run = shared_run();
    auto gs = potential_growth_check(run, 100);
    double supcap = run.c1 * (2.0 * growth_constant(run.profile) + 3.0);
    for (const auto& g : gs) {
        CHECK(g.max_gap <= 1e-2 * run.c1);
        CHECK(g.sup_seen <= supcap + 1e-2 * run.c1);
    }
}

TEST_CASE("refine M multiplies across steps") {
    auto& run = shared_run();
    long long expect = 1;
    for (std::size_t s = 0; s < run.certs.size(); ++s) {
        expect *= static_cast<long long>(std::pow(run.certs[s].n, 2));
        CHECK(run.levels[s + 1].M == expect);
    }
}
