#include <doctest.h>

#include <cmath>

#include "ptk/kernels.hpp"

using namespace ptk;

TEST_CASE("cap_eval closed forms") {
    CHECK(cap_eval(make_classical(3), 0.5) == doctest::Approx(0.5));
    CHECK(cap_eval(make_logarithmic(), 1.0 / std::exp(1.0)) == doctest::Approx(1.0));
    CHECK(cap_eval(make_riesz(2, 1.0), 0.25) == doctest::Approx(0.25));
    CHECK_THROWS(cap_eval(make_riesz(2, 1.0), -1.0));
    CHECK_THROWS(cap_eval(make_logarithmic(), 1.5));
}

TEST_CASE("cap_inv inverts cap_eval") {
    for (auto p : {make_classical(3), make_riesz(2, 1.0), make_riesz(3, 1.5),
                   make_logarithmic()}) {
        for (double r : {0.3, 0.1, 0.01})
            CHECK(cap_inv(p, cap_eval(p, r)) == doctest::Approx(r).epsilon(1e-10));
    }
}

TEST_CASE("kernel_eval values and symmetry") {
    Eigen::VectorXd o3 = Eigen::VectorXd::Zero(3), y3(3);
    y3 << 0, 0, 2;
    CHECK(kernel_eval(make_classical(3), o3, y3) == doctest::Approx(0.5));

    Eigen::VectorXd o2 = Eigen::VectorXd::Zero(2), y2(2);
    y2 << 1, 0;
    CHECK(g_eval(make_logarithmic(), 1.0) == doctest::Approx(0.0));
    y2 << 0, 0.5;
    CHECK(kernel_eval(make_riesz(2, 1.0), o2, y2) == doctest::Approx(2.0));

    CHECK(std::isinf(kernel_eval(make_riesz(2, 1.0), o2, o2)));
    CHECK_THROWS(kernel_eval(make_riesz(2, 1.0), o2, y3));

    auto p = make_riesz(3, 1.2);
    Eigen::VectorXd a(3), b(3);
    a << 0.3, -0.1, 0.7;
    b << -0.5, 0.2, 0.1;
    CHECK(kernel_eval(p, a, b) == doctest::Approx(kernel_eval(p, b, a)));
}

TEST_CASE("validate_decay matches d/alpha for riesz") {
    std::vector<double> grid{0.9, 0.5, 0.1, 0.01};
    CHECK(validate_decay(make_riesz(3, 1.5), grid) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(validate_decay(make_riesz(2, 1.0), grid) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("validate_decay rejects non-integrable g") {
    auto p = make_radial(1, {{1e-12, 1e12}, {1.0, 1e-3}});
    CHECK_THROWS(validate_decay(p, {0.5}));
}

TEST_CASE("radial table profile") {
    // g(r) = 1/r sampled on knots, d = 2: integrable, cap = r
    std::vector<std::pair<double, double>> knots;
    for (double r = 1e-6; r <= 2.0; r *= 2) knots.push_back({r, 1.0 / r});
    auto p = make_radial(2, knots);
    CHECK(g_eval(p, 0.1) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(cap_eval(p, 0.1) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(cap_inv(p, 0.05) == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(validate_decay(p, {0.5, 0.1}) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("doubling constants") {
    CHECK(doubling_constant(make_classical(3)) == doctest::Approx(2.0));
    CHECK(doubling_constant(make_riesz(2, 1.0)) == doctest::Approx(2.0));
    CHECK(doubling_constant(make_riesz(3, 1.5)) == doctest::Approx(std::pow(2.0, 1.5)));
    // logarithmic: cap(r)/cap(r/2) = 1 + log2/log(1/r) <= 1 + eta on (0, e^-1/eta]
    CHECK(doubling_constant(make_logarithmic(1.0)) <= 1.0 + std::log(2.0) + 1e-12);
}

TEST_CASE("local comparison G*cap = 1 for riesz and classical") {
    for (auto p : {make_classical(3), make_riesz(2, 1.0), make_riesz(3, 0.7)})
        for (double r : {0.9, 0.3, 0.05, 0.001})
            CHECK(g_eval(p, r) * cap_eval(p, r) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cap monotone increasing") {
    for (auto p : {make_classical(4), make_riesz(2, 0.5), make_logarithmic()}) {
        double prev = 0.0;
        for (double r = 1e-6; r < 0.3; r *= 1.7) {
            double v = cap_eval(p, r);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("h_scan finds small h") {
    auto p3 = make_classical(3);
    auto phi = phi_cap_over_log(p3);
    double t = h_scan(phi, p3, 0.1, 0.5);
    CHECK(h_eval(phi, p3, t) < 0.1);
    CHECK(std::log(1.0 / t) > 10.0);

    MeasureFunction cap_itself{[p3](double s) { return cap_eval(p3, s); }, "cap"};
    CHECK_THROWS(h_scan(cap_itself, p3, 0.5, 0.5));

    auto p = make_riesz(2, 1.0);
    auto phi2 = phi_cap_times_power(p, 0.1);
    double t2 = h_scan(phi2, p, 1e-3, 0.5, 1e-40);
    CHECK(std::pow(t2, 0.1) < 1e-3);
}
