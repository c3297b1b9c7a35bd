#include <doctest.h>

#include <cmath>

#include "ptk/hausdorff.hpp"

using namespace ptk;

namespace {

CantorRun& shared_run3() {
    static CantorRun run = [] {
        auto p = make_riesz(2, 1.0);
        return run_cantor(p, phi_cap_over_log(p), 3);
    }();
    return run;
}

Cover level_cover(const CantorRun& run, std::size_t step) {
    auto counts = natural_cover_counts(run);
    Cover cov;
    cov.rho = 1.0 / double(run.certs[step].m);
    const auto& level = run.levels[step + 1];
    for (long long i = 0; i < level.M; ++i)
        cov.balls.emplace_back(level.center_of(i), run.certs[step].r);
    return cov;
}

} // namespace

TEST_CASE("covering sum: formula, monotonicity, additivity") {
    const auto& run = shared_run3();
    auto phi = phi_cap_over_log(run.profile);

    CHECK(covering_sum(Cover{}, phi) == 0.0);

    auto cov = level_cover(run, 0);
    auto counts = natural_cover_counts(run);
    CHECK(covering_sum(cov, phi) ==
          doctest::Approx(double(counts[0].first) * phi.phi(run.certs[0].r))
              .epsilon(1e-12));

    // phi <= psi pointwise implies sum(phi) <= sum(psi)
    MeasureFunction psi{[&](double t) { return phi.phi(t) + t; }, "phi+t"};
    CHECK(covering_sum(cov, phi) <= covering_sum(cov, psi));

    // additive over a disjoint split of the cover
    Cover a{{cov.balls.begin(), cov.balls.begin() + cov.balls.size() / 2}, cov.rho};
    Cover b{{cov.balls.begin() + cov.balls.size() / 2, cov.balls.end()}, cov.rho};
    CHECK(covering_sum(a, phi) + covering_sum(b, phi) ==
          doctest::Approx(covering_sum(cov, phi)).epsilon(1e-12));

    Cover bad = cov;
    bad.rho = run.certs[0].r;  // radii no longer strictly below rho
    CHECK_THROWS(covering_sum(bad, phi));
}

TEST_CASE("content profile decays below 1/m") {
    const auto& run = shared_run3();
    auto prof = content_upper_profile(run, phi_cap_over_log(run.profile));
    REQUIRE(prof.size() == run.certs.size());
    for (std::size_t i = 0; i < prof.size(); ++i) {
        CHECK(prof[i].rho == doctest::Approx(1.0 / double(run.certs[i].m)));
        CHECK(prof[i].bound < prof[i].rho);
        CHECK(prof[i].bound ==
              doctest::Approx(run.certs[i].covering_bound).epsilon(1e-12));
    }
    auto csv = content_profile_csv(prof);
    CHECK(csv.rfind("rho,bound\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long long>(prof.size()) + 1);
}

TEST_CASE("content profile with phi = cap echoes the capacity sandwich") {
    const auto& run = shared_run3();
    const auto& p = run.profile;
    MeasureFunction capfn{[&](double t) { return cap_eval(p, t); }, "cap"};
    auto prof = content_upper_profile(run, capfn);
    long long M = 1;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const auto& c = run.certs[i];
        // per step the cover sum is M_m * n^d cap(r) with n^d cap(r) inside
        // the (2c^2, 3c^2) cap(a) window
        CHECK(prof[i].bound ==
              doctest::Approx(double(M) * c.iii_mid).epsilon(1e-12));
        CHECK(c.iii_lo < c.iii_mid);
        CHECK(c.iii_mid < c.iii_hi);
        long long nd = 1;
        for (int k = 0; k < c.d; ++k) nd *= c.n;
        M *= nd;
    }
    // capacity content does not decay: each step multiplies by more than 2c^2
    for (std::size_t i = 1; i < prof.size(); ++i)
        CHECK(prof[i].bound > prof[i - 1].bound);
}

TEST_CASE("dimension fit: cube box count") {
    // unit square refined 3-ary: n^{2m} cubes, circumscribed radius sqrt(2) 3^{-m}
    std::vector<std::pair<long long, double>> levels;
    long long N = 1;
    for (int m = 1; m <= 19; ++m) {
        N *= 9;
        levels.emplace_back(N, std::sqrt(2.0) * std::pow(3.0, -m));
    }
    bool bounded = false;
    double fit = dim_upper_fit(levels, exponent_grid(1.0, 3.0), &bounded);
    CHECK(bounded);
    CHECK(fit == doctest::Approx(2.0).epsilon(0.026));

    CHECK_THROWS(dim_upper_fit({levels[0], levels[1]}, exponent_grid(1.0, 3.0)));
    bool flag = true;
    double top = dim_upper_fit(levels, exponent_grid(0.5, 1.0), &flag);
    CHECK(!flag);
    CHECK(top == doctest::Approx(1.0));
}

TEST_CASE("dimension fit on the certified run") {
    const auto& run = shared_run3();
    bool bounded = false;
    double fit = dim_upper_fit(natural_cover_counts(run),
                               exponent_grid(0.5, 2.0), &bounded);
    CHECK(bounded);
    CHECK(fit <= 1.1);
}
