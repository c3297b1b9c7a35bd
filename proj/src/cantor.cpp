#include "ptk/cantor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptk/rng.hpp"

namespace ptk {

Eigen::VectorXd CantorLevel::center_of(long long i) const {
    if (!factored) return centers.row(i).transpose();
    long long per = offsets.rows();
    return parents.row(i / per).transpose() + offsets.row(i % per).transpose();
}

bool StepCertificate::holds() const {
    return check_i_max < check_i_bound && h_r < check_ii_bound &&
           iii_lo < iii_mid && iii_mid < iii_hi && two_r < a_over_n &&
           covering_bound < covering_threshold;
}

double construction_c1(const CapacityProfile& profile) {
    Cube K1{Eigen::VectorXd::Zero(profile.d), 1.0 / std::exp(1.0)};
    Eigen::VectorXd c = Eigen::VectorXd::Zero(profile.d);
    double v1 = cube_potential(K1, profile, c, 1e-4);
    double v2 = cube_potential(K1, profile, c, 1e-5);
    if (std::abs(v1 - v2) > 5e-3 * std::abs(v2))
        throw std::runtime_error("construction_c1: quadrature depths disagree");
    return v2;
}

double growth_constant(const CapacityProfile& profile) {
    double expo = profile.kind == Kind::riesz ? profile.d - profile.alpha
                                              : profile.d - 2.0;
    return std::max(3.0, std::pow(1.0 + 2.0 * std::sqrt(double(profile.d)), expo));
}

CantorLevel init_level(const CapacityProfile& profile) {
    if (profile.kind != Kind::classical && profile.kind != Kind::riesz &&
        profile.kind != Kind::logarithmic)
        throw std::invalid_argument("init_level: classical, riesz, or logarithmic");
    CantorLevel lv;
    lv.m = 1;
    lv.d = profile.d;
    lv.a = 1.0 / std::exp(1.0);
    lv.M = 1;
    lv.centers = Eigen::MatrixXd::Zero(1, profile.d);
    lv.mass_bound = construction_c1(profile);
    return lv;
}

double level_potential(const CantorLevel& level, const CapacityProfile& profile,
                       const Eigen::VectorXd& x, double tol) {
    double sum = 0.0;
    if (!level.factored) {
        for (long long i = 0; i < level.M; ++i) {
            Eigen::VectorXd c = level.centers.row(i).transpose();
            double D = (x - c).norm();
            if (D > 8.0 * level.a)
                sum += g_eval(profile, D);
            else
                sum += cube_potential(Cube{c, level.a}, profile, x, tol);
        }
        return sum / double(level.M);
    }
    long long P = level.parents.rows(), per = level.offsets.rows();
    for (long long ip = 0; ip < P; ++ip) {
        Eigen::VectorXd cp = level.parents.row(ip).transpose();
        double Dp = (x - cp).norm();
        if (Dp > 8.0 * level.parent_a) {
            sum += per * g_eval(profile, Dp);
            continue;
        }
        for (long long k = 0; k < per; ++k) {
            Eigen::VectorXd c = cp + level.offsets.row(k).transpose();
            double D = (x - c).norm();
            if (D > 8.0 * level.a)
                sum += g_eval(profile, D);
            else
                sum += cube_potential(Cube{c, level.a}, profile, x, tol);
        }
    }
    return sum / double(level.M);
}

double level_potential_sup(const CantorLevel& level, const CapacityProfile& profile) {
    // (1/M) sup G mu_Q: the per-cube sup is attained at the cube center by
    // symmetry and radial monotonicity of the kernel
    Eigen::VectorXd c0 = level.center_of(0);
    double self = cube_potential(Cube{c0, level.a}, profile, c0, 1e-4);
    return self / double(level.M);
}

namespace {

struct StepScan {
    double r = 0.0;
    bool ok = false;
};

// target the low end of the (2c^2, 3c^2) sandwich: every admissible n then
// needs only n > 2f from the 2r < a/n constraint, and the per-step growth of
// M cap(a) is the factor f, which controls how fast condition (ii) tightens
constexpr double kSandwichTarget = 2.05;

StepScan scan_r(const CantorLevel& level, const MeasureFunction& phi,
                const CapacityProfile& p, int n, int m_eff, long long M_eff,
                double a_eff) {
    StepScan s;
    double c2 = p.c * p.c;
    double target = kSandwichTarget * c2 * cap_eval(p, a_eff) / std::pow(double(n), p.d);
    double r;
    try {
        r = cap_inv(p, target);
    } catch (const std::exception&) {
        return s;
    }
    if (!(r > 0) || !std::isfinite(r)) return s;
    if (!(r < 1.0 / double(m_eff))) return s;
    if (!(2.0 * r < a_eff / double(n))) return s;
    double bound_ii = 1.0 / (3.0 * m_eff * double(M_eff) * c2 * cap_eval(p, a_eff));
    if (!(h_eval(phi, p, r) < bound_ii)) return s;
    double ndcap = std::pow(double(n), p.d) * cap_eval(p, r);
    if (!(2.0 * c2 * cap_eval(p, a_eff) < ndcap && ndcap < 3.0 * c2 * cap_eval(p, a_eff)))
        return s;
    s.r = r;
    s.ok = true;
    return s;
}

bool next_step_feasible(const CantorLevel& level, const MeasureFunction& phi,
                        const CapacityProfile& p, int n, double r, int n_max) {
    CantorLevel next;
    next.m = level.m + 1;
    next.d = level.d;
    next.a = r;
    next.M = level.M * static_cast<long long>(std::pow(double(n), p.d) + 0.5);
    for (int n2 = 2; n2 <= n_max; ++n2)
        if (scan_r(next, phi, p, n2, next.m, next.M, next.a).ok) return true;
    return false;
}

// sampled max of |G nu_j - G mu_Qj| over other cubes Q_i, where nu_j spreads
// mu_Qj uniformly over the kernel cubes of the candidate subdivision
double condition_i_max(const CantorLevel& level, const CapacityProfile& p, int n,
                       double r, std::uint64_t seed) {
    if (level.M < 2) return 0.0;
    Rng rng(seed, 0xC0FFEE);
    int d = level.d;
    Cube canonical{Eigen::VectorXd::Zero(d), level.a};
    auto [children, kernels] = cube_subdivide(canonical, n, r);

    // sample pairs: nearest-neighbor pairs for a few cubes plus random pairs
    std::vector<std::pair<long long, long long>> pairs;
    long long npick = std::min<long long>(level.M, 6);
    for (long long t = 0; t < npick; ++t) {
        long long j = (t == 0) ? 0 : static_cast<long long>(rng.uniform() * level.M);
        Eigen::VectorXd cj = level.center_of(j);
        long long best = -1;
        double bd = std::numeric_limits<double>::infinity();
        long long step = std::max<long long>(1, level.M / 2048);
        for (long long i = 0; i < level.M; i += step) {
            if (i == j) continue;
            double D = (cj - level.center_of(i)).norm();
            if (D < bd) { bd = D; best = i; }
        }
        pairs.emplace_back(j, best);
        long long rnd = static_cast<long long>(rng.uniform() * level.M);
        if (rnd != j) pairs.emplace_back(j, rnd);
    }

    double worst = 0.0;
    for (auto [j, i] : pairs) {
        Eigen::VectorXd cj = level.center_of(j), ci = level.center_of(i);
        Cube Qj{cj, level.a}, Qi{ci, level.a};
        double hs = Qi.half_side();
        // 5^d grid over Q_i plus its vertices
        std::vector<Eigen::VectorXd> probes;
        std::vector<int> idx(d, 0);
        for (;;) {
            Eigen::VectorXd x = ci;
            for (int k = 0; k < d; ++k) x[k] += hs * (2.0 * idx[k] / 4.0 - 1.0);
            probes.push_back(x);
            int k = 0;
            while (k < d && ++idx[k] >= 5) idx[k++] = 0;
            if (k == d) break;
        }
        for (auto& x : probes) {
            double gmu = cube_potential(Qj, p, x, 1e-3);
            double gnu = 0.0;
            for (auto& ker : kernels) {
                Eigen::VectorXd c = cj + (ker.center - canonical.center);
                double D = (x - c).norm();
                if (D > 8.0 * r)
                    gnu += g_eval(p, D);
                else
                    gnu += cube_potential(Cube{c, r}, p, x, 1e-3);
            }
            gnu /= double(kernels.size());
            worst = std::max(worst, std::abs(gnu - gmu));
        }
    }
    return worst;
}

} // namespace

StepCertificate select_step_params(const CantorLevel& level, const MeasureFunction& phi,
                                   const CapacityProfile& profile, double c1,
                                   bool lookahead, int n_max, std::uint64_t seed) {
    double c2 = profile.c * profile.c;
    std::string last_fail = "no admissible n";
    for (int n = 2; n <= n_max; ++n) {
        auto s = scan_r(level, phi, profile, n, level.m, level.M, level.a);
        if (!s.ok) continue;
        if (lookahead && !next_step_feasible(level, phi, profile, n, s.r, n_max)) {
            last_fail = "lookahead: next step infeasible";
            continue;
        }
        double bound_i = std::pow(0.5, level.m) * c1;
        double imax = condition_i_max(level, profile, n, s.r, seed);
        if (imax >= 0.9 * bound_i) {
            last_fail = "condition (i) sampled max too large";
            continue;
        }
        StepCertificate cert;
        cert.m = level.m;
        cert.d = profile.d;
        cert.n = n;
        cert.r = s.r;
        cert.check_i_max = imax;
        cert.check_i_bound = 0.9 * bound_i;
        cert.h_r = h_eval(phi, profile, s.r);
        cert.check_ii_bound =
            1.0 / (3.0 * level.m * double(level.M) * c2 * cap_eval(profile, level.a));
        cert.iii_lo = 2.0 * c2 * cap_eval(profile, level.a);
        cert.iii_mid = std::pow(double(n), profile.d) * cap_eval(profile, s.r);
        cert.iii_hi = 3.0 * c2 * cap_eval(profile, level.a);
        cert.two_r = 2.0 * s.r;
        cert.a_over_n = level.a / double(n);
        cert.covering_bound =
            double(level.M) * std::pow(double(n), profile.d) * phi.phi(s.r);
        cert.covering_threshold = 1.0 / double(level.m);
        if (!cert.holds())
            throw std::runtime_error("select_step_params: certificate check failed");
        return cert;
    }
    throw std::runtime_error("select_step_params: search exhausted (" + last_fail +
                             "); phi decays too slowly at reachable scales");
}

CantorLevel refine(const CantorLevel& level, const StepCertificate& cert) {
    if (cert.m != level.m)
        throw std::invalid_argument("refine: certificate is for a different level");
    int d = level.d;
    Cube canonical{Eigen::VectorXd::Zero(d), level.a};
    auto [children, kernels] = cube_subdivide(canonical, cert.n, cert.r);
    long long per = static_cast<long long>(kernels.size());

    CantorLevel next;
    next.m = level.m + 1;
    next.d = d;
    next.a = cert.r;
    next.M = level.M * per;
    next.mass_bound = level.mass_bound;  // caller rescales via run driver

    Eigen::MatrixXd offs(per, d);
    for (long long k = 0; k < per; ++k) offs.row(k) = kernels[k].center.transpose();

    if (level.factored || next.M > 1000000) {
        if (level.factored)
            throw std::runtime_error("refine: refining a factored level is unsupported");
        next.factored = true;
        next.parents = level.centers;
        next.offsets = offs;
        next.parent_a = level.a;
    } else {
        next.centers.resize(next.M, d);
        for (long long i = 0; i < level.M; ++i)
            for (long long k = 0; k < per; ++k)
                next.centers.row(i * per + k) =
                    level.centers.row(i) + offs.row(k);
    }
    return next;
}

std::vector<CoverBound> covering_certificate(const std::vector<StepCertificate>& certs,
                                             const MeasureFunction& phi) {
    std::vector<CoverBound> out;
    double M = 1.0;
    for (const auto& c : certs) {
        // re-evaluate M n^d phi(r) from the stored step parameters instead of
        // trusting the recorded sum; M accumulates from the previous steps
        double bound = M * std::pow(double(c.n), c.d) * phi.phi(c.r);
        if (std::abs(bound - c.covering_bound) > 1e-9 * std::max(1.0, bound))
            throw std::runtime_error("covering_certificate: stored bound mismatch");
        if (!(bound < c.covering_threshold))
            throw std::runtime_error("covering_certificate: bound >= 1/m");
        if (!(c.r < 1.0 / double(c.m)))
            throw std::runtime_error("covering_certificate: cover radius >= 1/m");
        out.push_back({c.m, bound, c.covering_threshold});
        M *= std::pow(double(c.n), c.d);
    }
    return out;
}

std::vector<GrowthSample> potential_growth_check(const CantorRun& run, int n_points,
                                                 std::uint64_t seed) {
    std::vector<GrowthSample> out;
    double C = growth_constant(run.profile);
    int d = run.profile.d;
    for (std::size_t s = 0; s + 1 < run.levels.size(); ++s) {
        const auto& lo = run.levels[s];
        const auto& hi = run.levels[s + 1];
        Rng rng(seed, 1000 + s);
        double allowance = (C + 1.0) * std::pow(0.5, lo.m - 1) * run.c1;
        GrowthSample gs{lo.m, -std::numeric_limits<double>::infinity(), allowance, 0.0};
        for (int k = 0; k < n_points; ++k) {
            // points inside and near F_{m+1}: jittered around a random cube
            long long i = static_cast<long long>(rng.uniform() * hi.M);
            Eigen::VectorXd x = hi.center_of(i);
            double spread = (k % 2 == 0) ? hi.a : 4.0 * hi.a;
            for (int kk = 0; kk < d; ++kk)
                x[kk] += spread * (rng.uniform() - 0.5);
            double glo = level_potential(lo, run.profile, x);
            double ghi = level_potential(hi, run.profile, x);
            gs.max_gap = std::max(gs.max_gap, ghi - glo - allowance);
            gs.sup_seen = std::max({gs.sup_seen, glo, ghi});
        }
        out.push_back(gs);
    }
    return out;
}

CantorRun run_cantor(const CapacityProfile& profile, const MeasureFunction& phi,
                     int depth, int n_max, std::uint64_t seed) {
    CantorRun run;
    run.profile = profile;
    run.c1 = construction_c1(profile);

    // empirical (capQ) sweep: cap(a) * G mu_aK(center) across scales
    run.capq_min = std::numeric_limits<double>::infinity();
    run.capq_max = 0.0;
    for (int k = 1; k <= 3; ++k) {
        double a = std::pow(1.0 / std::exp(1.0), k);
        Cube Q{Eigen::VectorXd::Zero(profile.d), a};
        double v = cap_eval(profile, a) *
                   cube_potential(Q, profile, Eigen::VectorXd::Zero(profile.d), 1e-4);
        run.capq_min = std::min(run.capq_min, v);
        run.capq_max = std::max(run.capq_max, v);
    }

    CantorLevel lv = init_level(profile);
    lv.mass_bound = run.c1;
    run.levels.push_back(lv);
    for (int step = 1; step <= depth; ++step) {
        bool lookahead = step < depth;
        auto cert = select_step_params(run.levels.back(), phi, profile, run.c1,
                                       lookahead, n_max, seed + step);
        auto next = refine(run.levels.back(), cert);
        next.mass_bound = std::pow(0.5, next.m - 1) * run.c1;
        run.certs.push_back(cert);
        run.levels.push_back(std::move(next));
    }
    return run;
}

} // namespace ptk
