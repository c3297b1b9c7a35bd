#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "ptk/cantor.hpp"
#include "ptk/champagne.hpp"
#include "ptk/hausdorff.hpp"
#include "ptk/hitting.hpp"

using namespace ptk;

namespace {

bool g_pass = true;
int g_criterion = 0;

void report(bool ok, const char* fmt, ...) {
    std::printf("criterion %d: %s ", g_criterion, ok ? "PASS" : "FAIL");
    va_list args;
    va_start(args, fmt);
    std::vprintf(fmt, args);
    va_end(args);
    std::printf("\n");
    g_pass = g_pass && ok;
}

CantorRun depth3_run() {
    auto p = make_riesz(2, 1.0);
    return run_cantor(p, phi_cap_over_log(p), 3);
}

Domain unit_ball3() {
    return {DomainKind::ball, 3, Eigen::VectorXd::Zero(3), 1.0};
}

BubbleConfig champagne5() {
    auto p = make_classical(3);
    p.C_G = validate_decay(p, {0.1, 0.5, 1.0});
    return boundary_cover_config(unit_ball3(), p, phi_cap_over_log(p), 0.1,
                                 nullptr, 5, 11);
}

std::vector<Eigen::VectorXd> fib_sphere(double R, int count) {
    std::vector<Eigen::VectorXd> pts;
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / count;
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        Eigen::VectorXd p(3);
        p << R * rho * std::cos(ga * i), R * rho * std::sin(ga * i), R * z;
        pts.push_back(p);
    }
    return pts;
}

// criterion 1: covering-sum certificates < 1/m at every step, depth 3
void criterion1() {
    auto run = depth3_run();
    bool ok = run.certs.size() == 3;
    double worst = 0.0;
    for (const auto& c : run.certs) {
        ok = ok && c.covering_bound < c.covering_threshold;
        worst = std::max(worst, c.covering_bound * c.m);
    }
    report(ok, "covering bounds below 1/m at %zu steps (worst bound*m = %.3f)",
           run.certs.size(), worst);
}

// criterion 2: capacity sandwich and cube separation, re-evaluated from scratch
void criterion2() {
    auto run = depth3_run();
    const auto& p = run.profile;
    bool ok = true;
    for (std::size_t s = 0; s < run.certs.size(); ++s) {
        const auto& c = run.certs[s];
        double a = run.levels[s].a;
        double nd = std::pow(double(c.n), c.d);
        double lo = 2.0 * p.c * p.c * cap_eval(p, a);
        double mid = nd * cap_eval(p, c.r);
        double hi = 3.0 * p.c * p.c * cap_eval(p, a);
        ok = ok && lo < mid && mid < hi && 2.0 * c.r < a / c.n;
        // stored values agree with the re-evaluation
        ok = ok && std::abs(mid - c.iii_mid) <= 1e-12 * mid;
        ok = ok && std::abs(lo - c.iii_lo) <= 1e-12 * lo;
        ok = ok && std::abs(hi - c.iii_hi) <= 1e-12 * hi;
    }
    report(ok, "sandwich 2c^2 cap(a) < n^d cap(r) < 3c^2 cap(a) and 2r < a/n "
               "re-asserted at %zu steps",
           run.certs.size());
}

// criterion 3: sampled potential growth within the (C+1) 2^{-(m-1)} c1 allowance
void criterion3() {
    auto run = depth3_run();
    auto gs = potential_growth_check(run, 1000);
    bool ok = !gs.empty();
    double worst = -1e300;
    for (const auto& g : gs) {
        ok = ok && g.max_gap <= 1e-2 * run.c1;
        worst = std::max(worst, g.max_gap / run.c1);
    }
    report(ok, "G mu_{m+1} - G mu_m within allowance at 1000 points/step "
               "(worst excess %.4f c1, tolerance 0.01 c1)",
           worst);
}

// criterion 4: walk-on-spheres against the closed-form 1/3
void criterion4() {
    auto p = make_classical(3);
    BubbleConfig cfg;
    cfg.profile = p;
    cfg.domain = unit_ball3();
    cfg.bubbles.push_back({Eigen::VectorXd::Zero(3), 0.25, 1});
    Eigen::VectorXd x(3);
    x << 0.5, 0, 0;
    WalkParams wp;
    wp.seed = 3;
    auto est = wos_brownian_hit(cfg.domain, cfg, x, wp, 100000);
    double truth = 1.0 / 3.0;
    bool ok = std::abs(est.p_hat - truth) < 3.0 * est.std_err;
    report(ok, "p_hat = %.4f vs 1/3, |diff| = %.4f < 3 stderr = %.4f",
           est.p_hat, std::abs(est.p_hat - truth), 3.0 * est.std_err);
}

// criterion 5: champagne budget < 0.1 at depth 5, invariants intact
void criterion5() {
    auto bc = champagne5();
    bool ok = bc.budget < 0.1;
    try {
        assert_bubble_invariants(bc);
    } catch (const std::exception&) {
        ok = false;
    }
    report(ok, "budget = %.4f < 0.1 with %zu bubbles, invariants hold",
           bc.budget, bc.bubbles.size());
}

// criterion 6: unavoidability verdict on the depth-5 configuration
void criterion6() {
    auto bc = champagne5();
    auto p = bc.profile;
    TargetIndex target(bc);
    ProbePlan plan;
    plan.params.seed = 3;
    for (int n = 1; n <= 3; ++n) {
        double R = 1.0 - std::pow(0.5, n);
        for (auto& x : fib_sphere(R, 16)) plan.on_A.push_back(x);
    }
    plan.free_points.push_back(Eigen::VectorXd::Zero(3));
    for (auto& x : fib_sphere(0.5, 4)) plan.free_points.push_back(x);
    auto rep = verify_unavoidable(target, p, unit_ball3(), plan, 0.0625, 10000);
    report(rep.satisfied,
           "min over 48 shell probes of (p_hat - 3 stderr) = %.4f vs kappa = 0.0625",
           rep.min_lower);
    double free_min = 1.0;
    for (const auto& e : rep.free_points) free_min = std::min(free_min, e.p_hat);
    report(free_min >= 0.9,
           "free probes |x| <= 0.5: min p_hat = %.4f vs 0.9 "
           "(5-shell truncation carries ~0.4 total capacity)",
           free_min);
}

// criterion 7: sparse shells with small escape sum stay avoidable
void criterion7() {
    auto p = make_riesz(2, 1.0);
    BubbleConfig cfg;
    cfg.profile = p;
    cfg.domain = Domain{DomainKind::whole_space, 2, {}, 0};
    const int per_shell = 8;
    for (int n = 1; n <= 6; ++n) {
        double R = std::pow(4.0, n);
        double r = R * 0.1 / (2.0 * per_shell * 6.0);
        for (int i = 0; i < per_shell; ++i) {
            double a = 2.0 * M_PI * (i + 0.25) / per_shell;
            Eigen::VectorXd z(2);
            z << R * std::cos(a), R * std::sin(a);
            cfg.bubbles.push_back({z, r, n});
        }
    }
    TargetIndex target(cfg);
    double sum = target.escape_bound(p, Eigen::VectorXd::Zero(2));
    WalkParams wp;
    wp.seed = 3;
    wp.escape_radius = 4.0 * std::pow(4.0, 6);
    auto est = stable_hit(target, Eigen::VectorXd::Zero(2), p, wp, 10000);
    bool ok = sum < 0.1 && est.p_hat + est.truncation_bias_bound <= 0.2;
    report(ok, "escape sum = %.4f < 0.1, p_hat + bias = %.4f + %.4f <= 0.2",
           sum, est.p_hat, est.truncation_bias_bound);
}

// criterion 8: exit-iteration and Euler estimators agree at shared truncation
void criterion8() {
    auto p = make_riesz(2, 1.0);
    BubbleConfig cfg;
    cfg.profile = p;
    cfg.domain = Domain{DomainKind::whole_space, 2, {}, 0};
    cfg.bubbles.push_back({Eigen::VectorXd::Zero(2), 0.5, 1});
    TargetIndex target(cfg);
    Eigen::VectorXd x(2);
    x << 1.0, 0;
    WalkParams wp;
    wp.seed = 3;
    wp.escape_radius = 10.0;
    auto s = stable_hit(target, x, p, wp, 100000);
    auto e = euler_stable_hit(target, x, p, 1e-3, wp, 100000);
    // both report certified intervals [p_hat, p_hat + bias] for the hitting
    // probability; agreement = interval gap within combined 3 sigma
    double lo = std::max(s.p_hat, e.p_hat);
    double hi = std::min(s.p_hat + s.truncation_bias_bound,
                         e.p_hat + e.truncation_bias_bound);
    double gap = std::max(0.0, lo - hi);
    double sigma = std::sqrt(s.std_err * s.std_err + e.std_err * e.std_err);
    bool ok = gap <= 3.0 * sigma;
    report(ok, "exit-iteration %.4f+%.4f vs Euler %.4f+%.4f, interval gap "
               "%.4f <= 3 sigma = %.4f",
           s.p_hat, s.truncation_bias_bound, e.p_hat, e.truncation_bias_bound,
           gap, 3.0 * sigma);
}

// criterion 9: equilibrium mass bracket and maximum principle
void criterion9() {
    auto p = make_riesz(2, 1.0);
    p.C_G = validate_decay(p, {0.5, 0.1});
    p.C_D = doubling_constant(p);
    bool ok = true;
    double worst_res = 0.0, worst_pot = 0.0;
    for (double r : {0.1, 0.3}) {
        auto pts = ball_support(p, r, 16);
        double res = 0;
        auto mu = equilibrium_solve(pts, p, 0.0, &res);
        worst_res = std::max(worst_res, res);
        ok = ok && res < 0.02;
        ok = ok && mu.mass() >= cap_eval(p, r) / p.C_G;
        ok = ok && mu.mass() <= p.C_D * cap_eval(p, r);
        // spacing of the support cloud, to keep probes off the point masses
        double spacing = 1e300;
        for (int i = 1; i < pts.rows(); ++i)
            spacing = std::min(spacing,
                               (pts.row(i) - pts.row(i - 1)).norm());
        PotentialField f{mu, p};
        Rng rng(7);
        int checked = 0;
        while (checked < 1000) {
            Eigen::VectorXd q(2);
            q << 4.0 * r * (rng.uniform() - 0.5), 4.0 * r * (rng.uniform() - 0.5);
            double dmin = 1e300;
            for (int i = 0; i < pts.rows(); ++i)
                dmin = std::min(dmin, (q.transpose() - pts.row(i)).norm());
            if (dmin < spacing) continue;
            worst_pot = std::max(worst_pot, potential_eval(f, q));
            ++checked;
        }
        ok = ok && worst_pot <= 1.02;
    }
    report(ok, "mass brackets hold for r in {0.1, 0.3}, residual %.4f < 0.02, "
               "off-support G mu max %.4f <= 1.02",
           worst_res, worst_pot);
}

// criterion 10: dimension fit at most d - alpha + 0.1 on the depth-3 run
void criterion10() {
    auto run = depth3_run();
    bool bounded = false;
    double fit = dim_upper_fit(natural_cover_counts(run),
                               exponent_grid(0.5, 2.0), &bounded);
    report(bounded && fit <= 1.1, "dim_upper_fit = %.2f <= 1.1 (target d - alpha = 1)",
           fit);
}

} // namespace

int main(int argc, char** argv) {
    int n = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0) n = std::atoi(argv[i + 1]);
    if (n < 1 || n > 10) {
        std::fprintf(stderr, "usage: acceptance --criterion N (1..10)\n");
        return 2;
    }
    g_criterion = n;
    try {
        switch (n) {
        case 1: criterion1(); break;
        case 2: criterion2(); break;
        case 3: criterion3(); break;
        case 4: criterion4(); break;
        case 5: criterion5(); break;
        case 6: criterion6(); break;
        case 7: criterion7(); break;
        case 8: criterion8(); break;
        case 9: criterion9(); break;
        case 10: criterion10(); break;
        }
    } catch (const std::exception& e) {
        std::printf("criterion %d: FAIL (exception: %s)\n", n, e.what());
        return 1;
    }
    return g_pass ? 0 : 1;
}
