#include "ptk/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "ptk/quadrature.hpp"

namespace ptk {

namespace {

std::uint64_t cell_key(const Eigen::VectorXd& p, double cell) {
    std::uint64_t h = 1469598103934665603ULL;
    for (int k = 0; k < p.size(); ++k) {
        auto q = static_cast<std::int64_t>(std::floor(p[k] / cell));
        h = (h ^ static_cast<std::uint64_t>(q)) * 1099511628211ULL;
    }
    return h;
}

double stderr_of(double p, long long n) {
    return n > 0 ? std::sqrt(std::max(0.0, p * (1.0 - p)) / double(n)) : 0.0;
}

} // namespace

void TargetIndex::build(std::vector<std::pair<Eigen::VectorXd, double>> balls,
                        std::vector<int> shells) {
    balls_ = std::move(balls);
    if (balls_.empty()) return;
    std::map<int, std::vector<int>> by_shell;
    for (std::size_t i = 0; i < balls_.size(); ++i)
        by_shell[shells[i]].push_back(static_cast<int>(i));

    for (auto& [n, idx] : by_shell) {
        ShellGrid g;
        g.idx = idx;
        g.lo = std::numeric_limits<double>::infinity();
        g.hi = 0.0;
        for (int i : idx) {
            double z = balls_[i].first.norm();
            g.lo = std::min(g.lo, z);
            g.hi = std::max(g.hi, z);
            g.rmax = std::max(g.rmax, balls_[i].second);
        }
        // cell from a sampled nearest-neighbor separation
        double sep = std::numeric_limits<double>::infinity();
        std::size_t stride = std::max<std::size_t>(1, idx.size() / 64);
        for (std::size_t a = 0; a < idx.size(); a += stride) {
            double nn = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < idx.size(); ++b)
                if (b != a)
                    nn = std::min(nn, (balls_[idx[a]].first - balls_[idx[b]].first)
                                          .norm());
            sep = std::min(sep, nn);
        }
        if (!std::isfinite(sep)) sep = std::max(1.0, g.hi);
        g.cell = std::max({sep, 2.0 * g.rmax, 1e-12});
        g.mid = 0.5 * (g.lo + g.hi);
        g.w = 0.5 * (g.hi - g.lo);
        g.sphere = g.mid > 0.0 && g.w <= 0.25 * g.cell;
        for (int i : idx) g.cells[cell_key(balls_[i].first, g.cell)].push_back(i);
        grids_.push_back(std::move(g));
    }
}

TargetIndex::TargetIndex(const BubbleConfig& config) {
    std::vector<std::pair<Eigen::VectorXd, double>> balls;
    std::vector<int> shells;
    for (const auto& b : config.bubbles) {
        balls.emplace_back(b.center, b.radius);
        shells.push_back(b.shell);
    }
    std::ostringstream os;
    os << "config[" << config.bubbles.size() << "]";
    id_ = os.str();
    build(std::move(balls), std::move(shells));
}

TargetIndex::TargetIndex(const PatternSet& pattern) {
    std::ostringstream os;
    if (pattern.base_is_ball) {
        std::vector<std::pair<Eigen::VectorXd, double>> balls;
        std::vector<int> shells(pattern.placements.size(), 0);
        for (const auto& [z, r] : pattern.placements)
            balls.emplace_back(z, r * pattern.ball_radius);
        os << "pattern-ball[" << balls.size() << "]";
        build(std::move(balls), std::move(shells));
    } else {
        for (const auto& [z, r] : pattern.placements)
            for (const auto& q : pattern.base_cubes)
                cubes_.push_back({z + r * q.center, r * q.a});
        os << "pattern-cubes[" << cubes_.size() << "]";
    }
    id_ = os.str();
}

double TargetIndex::shell_distance(const ShellGrid& g, const Eigen::VectorXd& x,
                                   double cap) const {
    double z = x.norm();
    double band = std::max(0.0, std::max(g.lo - z, z - g.hi)) - g.rmax;
    if (band >= cap) return cap;
    // concentric shell: project x radially onto the sphere of centers and scan
    // only the cells around the projection q = x * mid/|x|; for a center c with
    // radial projection c', |x - c'|^2 = gap^2 + (|x|/mid) |q - c'|^2, so any
    // ball laterally outside the scanned box is certified without a lookup
    if (g.sphere && z > 1e-12) {
        int d = static_cast<int>(x.size());
        double gap = z - g.mid;
        double scale = g.mid / z;
        double best = cap;
        std::int64_t c0[8];
        for (int k = 0; k < d; ++k)
            c0[k] = static_cast<std::int64_t>(std::floor(x[k] * scale / g.cell));
        auto visit = [&](const std::int64_t* c) {
            std::uint64_t h = 1469598103934665603ULL;
            for (int k = 0; k < d; ++k)
                h = (h ^ static_cast<std::uint64_t>(c[k])) * 1099511628211ULL;
            auto it = g.cells.find(h);
            if (it == g.cells.end()) return;
            for (int i : it->second)
                best = std::min(best,
                                (x - balls_[i].first).norm() - balls_[i].second);
        };
        std::int64_t cc[8];
        if (d == 2) {
            for (std::int64_t i = -1; i <= 1; ++i)
                for (std::int64_t j = -1; j <= 1; ++j) {
                    cc[0] = c0[0] + i;
                    cc[1] = c0[1] + j;
                    visit(cc);
                }
        } else {
            for (std::int64_t i = -1; i <= 1; ++i)
                for (std::int64_t j = -1; j <= 1; ++j)
                    for (std::int64_t l = -1; l <= 1; ++l) {
                        cc[0] = c0[0] + i;
                        cc[1] = c0[1] + j;
                        cc[2] = c0[2] + l;
                        visit(cc);
                    }
        }
        // unscanned centers are laterally more than one cell from q
        double lat = std::max(0.0, g.cell - g.w);
        double lb = std::sqrt(gap * gap + (z / g.mid) * lat * lat) - g.w - g.rmax;
        return std::min(cap, std::min(best, std::max(lb, band)));
    }
    // beyond a few rings the band bound is tighter than scanning is worth:
    // the scan only has to be exact near the balls, where the nearest one
    // sits within a couple of cells
    const int max_ring = 8;
    // a ball closer than the band bound cannot exist, so once the band
    // exceeds the scan reach the scan cannot improve on it
    if (band >= max_ring * g.cell) return std::min(cap, band);

    int d = static_cast<int>(x.size());
    double best = cap;
    std::vector<std::int64_t> c0(d);
    for (int k = 0; k < d; ++k)
        c0[k] = static_cast<std::int64_t>(std::floor(x[k] / g.cell));

    auto visit_cell = [&](const std::vector<std::int64_t>& cc) {
        std::uint64_t h = 1469598103934665603ULL;
        for (int k = 0; k < d; ++k)
            h = (h ^ static_cast<std::uint64_t>(cc[k])) * 1099511628211ULL;
        auto it = g.cells.find(h);
        if (it == g.cells.end()) return;
        for (int i : it->second)
            best = std::min(best, (x - balls_[i].first).norm() - balls_[i].second);
    };

    std::vector<std::int64_t> cc(d);
    for (int ring = 0; ring <= max_ring; ++ring) {
        double ring_floor = (ring - 1) * g.cell - g.rmax;
        if (ring_floor >= best) return std::max(best, std::min(cap, band));
        if (d == 2) {
            for (std::int64_t i = -ring; i <= ring; ++i)
                for (std::int64_t j = -ring; j <= ring; ++j) {
                    if (std::max(std::llabs(i), std::llabs(j)) != ring) continue;
                    cc[0] = c0[0] + i;
                    cc[1] = c0[1] + j;
                    visit_cell(cc);
                }
        } else {
            for (std::int64_t i = -ring; i <= ring; ++i)
                for (std::int64_t j = -ring; j <= ring; ++j)
                    for (std::int64_t l = -ring; l <= ring; ++l) {
                        if (std::max({std::llabs(i), std::llabs(j),
                                      std::llabs(l)}) != ring)
                            continue;
                        cc[0] = c0[0] + i;
                        cc[1] = c0[1] + j;
                        cc[2] = c0[2] + l;
                        visit_cell(cc);
                    }
        }
    }
    // scan budget exhausted: certified lower bound for the unscanned remainder
    return std::max(std::min(best, max_ring * g.cell - g.rmax),
                    std::min(cap, band));
}

double TargetIndex::distance(const Eigen::VectorXd& x, double cap) const {
    double best = cap;
    if (!grids_.empty()) {
        double z = x.norm();
        // nearest band first so the shrinking cap prunes the other shells
        std::pair<double, unsigned> order[32];
        std::size_t nord = std::min<std::size_t>(grids_.size(), 32);
        for (std::size_t i = 0; i < nord; ++i) {
            const auto& g = grids_[i];
            double band =
                std::max(0.0, std::max(g.lo - z, z - g.hi)) - g.rmax;
            order[i] = {band, static_cast<unsigned>(i)};
        }
        std::sort(order, order + nord);
        for (std::size_t k = 0; k < nord; ++k) {
            if (order[k].first >= best) break;
            best = shell_distance(grids_[order[k].second], x, best);
        }
        for (std::size_t i = 32; i < grids_.size(); ++i)
            best = shell_distance(grids_[i], x, best);
    }
    for (const auto& q : cubes_) best = std::min(best, cube_distance(q, x));
    return best;
}

bool TargetIndex::contains(const Eigen::VectorXd& x) const {
    return distance(x, 1.0) <= 0.0;
}

double TargetIndex::escape_bound(const CapacityProfile& p,
                                 const Eigen::VectorXd& x) const {
    double s = 0.0;
    for (const auto& [z, r] : balls_) {
        double D = (x - z).norm();
        if (D <= r) return 1.0;
        s += g_eval(p, D) / g_eval(p, r);
        if (s >= 1.0) return 1.0;
    }
    for (const auto& q : cubes_) {
        double D = cube_distance(q, x);
        if (D <= 0.0) return 1.0;
        s += g_eval(p, D) / g_eval(p, 0.5 * q.a);
        if (s >= 1.0) return 1.0;
    }
    return std::min(1.0, s);
}

HittingEstimate wos_brownian_hit(const Domain& domain, const TargetIndex& target,
                                 const Eigen::VectorXd& x, const WalkParams& params,
                                 long long N) {
    if (domain.kind != DomainKind::ball)
        throw std::invalid_argument("wos_brownian_hit: ball domain required");
    int d = domain.d;
    Eigen::VectorXd c = domain.center.size() ? domain.center
                                             : Eigen::VectorXd::Zero(d);
    double eps = params.eps_shell > 0 ? params.eps_shell : 1e-6 * domain.R;
    const double tie_tol = 1e-12;

    HittingEstimate est;
    est.x = x;
    est.seed = params.seed;
    est.n_samples = N;
    est.target_id = target.id();
    if (target.contains(x)) {
        est.p_hat = 1.0;
        return est;
    }
    if (target.empty()) return est;

    long long hits = 0, ties = 0, invalid = 0;
    Eigen::VectorXd y(d), dir(d);
    for (long long path = 0; path < N; ++path) {
        Rng rng(params.seed, static_cast<std::uint64_t>(path) + 1);
        y = x;
        bool settled = false;
        for (long long step = 0; step < params.max_steps; ++step) {
            double du = domain.R - (y - c).norm();
            double da = target.distance(y, du + 2.0 * eps);
            double rho = std::min(du, da);
            if (rho < eps) {
                if (da < du - tie_tol)
                    ++hits;
                else if (du >= da - tie_tol && da >= du - tie_tol)
                    ++ties;
                settled = true;
                break;
            }
            rng.direction(d, dir.data());
            y += rho * dir;
        }
        if (!settled) ++invalid;
    }
    if (invalid * 1000 > N)
        throw std::runtime_error("wos_brownian_hit: too many truncated paths");
    est.p_hat = double(hits) / double(N);
    est.std_err = stderr_of(est.p_hat, N);
    est.ties = ties;
    return est;
}

HittingEstimate wos_brownian_hit(const Domain& domain, const BubbleConfig& config,
                                 const Eigen::VectorXd& x, const WalkParams& params,
                                 long long N) {
    return wos_brownian_hit(domain, TargetIndex(config), x, params, N);
}

namespace {

// radial exit law of the isotropic alpha-stable process from B(0,1), x = 0:
// density (2/pi) sin(pi alpha/2) (s^2-1)^{-alpha/2} s^{-1} on (1, inf)
struct ExitTable {
    double alpha = 1.0;
    std::vector<double> s, F;

    double sample_radius(Rng& rng) const {
        double u = rng.uniform();
        double top = F.back();
        if (u >= top) {
            // power-law tail beyond the table: P(S > s | S > s_max) =
            // (s / s_max)^{-alpha}
            double v = rng.uniform();
            return s.back() * std::pow(v, -1.0 / alpha);
        }
        auto it = std::lower_bound(F.begin(), F.end(), u);
        std::size_t k = it - F.begin();
        if (k == 0) return s.front();
        double f0 = F[k - 1], f1 = F[k];
        double w = f1 > f0 ? (u - f0) / (f1 - f0) : 0.5;
        return std::exp((1.0 - w) * std::log(s[k - 1]) + w * std::log(s[k]));
    }
};

ExitTable build_exit_table(double alpha) {
    ExitTable t;
    t.alpha = alpha;
    const int n = 1 << 12;
    const double smax = 1e6;
    // F(s) = c int_0^{V(s)} (1 - v^{2/(2-alpha)})^{alpha/2-1} dv with
    // V(s) = (1 - s^{-2})^{(2-alpha)/2}; the substitution removes the
    // endpoint singularity at s = 1
    double expo = 2.0 / (2.0 - alpha);
    double cnorm = (2.0 * std::sin(0.5 * M_PI * alpha)) / (M_PI * (2.0 - alpha));
    auto integrand = [&](double v) {
        return std::pow(1.0 - std::pow(v, expo), 0.5 * alpha - 1.0);
    };
    t.s.resize(n);
    t.F.resize(n);
    double acc = 0.0, vprev = 0.0;
    for (int k = 0; k < n; ++k) {
        double sk = std::exp(std::log(smax) * (k + 1) / double(n));
        double vk = std::pow(1.0 - 1.0 / (sk * sk), 0.5 * (2.0 - alpha));
        double piece = 0.0;
        if (!integrate(integrand, vprev, vk, piece, 1e-10, 1e-300, 2000))
            throw std::runtime_error("stable exit table: quadrature failed");
        acc += piece;
        t.s[k] = sk;
        t.F[k] = cnorm * acc;
        vprev = vk;
    }
    for (int k = 1; k < n; ++k) t.F[k] = std::max(t.F[k], t.F[k - 1]);
    double tail = cnorm * (2.0 - alpha) / (2.0 * alpha) * std::pow(smax, -alpha) *
                  2.0;  // crude upper envelope of the remaining mass
    if (!(t.F.back() <= 1.0 + 1e-6 && t.F.back() >= 1.0 - std::max(tail, 1e-4)))
        throw std::runtime_error("stable exit table: normalization check failed");
    return t;
}

const ExitTable& exit_table(int d, double alpha) {
    if (!(alpha > 0.0 && alpha < std::min(double(d), 2.0)))
        throw std::invalid_argument("stable exit table: bad alpha");
    static std::map<long long, ExitTable> cache;
    long long key = d * 100000000LL + llround(alpha * 1e6);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_exit_table(alpha)).first;
    return it->second;
}

} // namespace

Eigen::VectorXd stable_exit_sample(int d, double alpha, Rng& rng) {
    const ExitTable& t = exit_table(d, alpha);
    double r = t.sample_radius(rng);
    Eigen::VectorXd dir(d);
    rng.direction(d, dir.data());
    return r * dir;
}

HittingEstimate stable_hit(const TargetIndex& target, const Eigen::VectorXd& x,
                           const CapacityProfile& profile, const WalkParams& params,
                           long long N) {
    if (profile.kind != Kind::riesz)
        throw std::invalid_argument("stable_hit: riesz profile required");
    if (x.norm() >= params.escape_radius)
        throw std::invalid_argument("stable_hit: start outside escape radius");
    int d = profile.d;
    exit_table(d, profile.alpha);  // build before timing-critical loop

    HittingEstimate est;
    est.x = x;
    est.seed = params.seed;
    est.n_samples = N;
    est.target_id = target.id();
    if (target.empty()) return est;
    if (target.contains(x)) {
        est.p_hat = 1.0;
        return est;
    }

    long long hits = 0, invalid = 0;
    double bias_sum = 0.0;
    for (long long path = 0; path < N; ++path) {
        Rng rng(params.seed, static_cast<std::uint64_t>(path) + 1);
        Eigen::VectorXd y = x;
        bool settled = false;
        for (long long step = 0; step < params.max_steps; ++step) {
            if (y.norm() > params.escape_radius) {
                bias_sum += target.escape_bound(profile, y);
                settled = true;
                break;
            }
            double rho = target.distance(y, 2.0 * params.escape_radius);
            if (rho <= 0.0) {
                ++hits;
                settled = true;
                break;
            }
            y += rho * stable_exit_sample(d, profile.alpha, rng);
        }
        if (!settled) ++invalid;
    }
    if (invalid * 1000 > N)
        throw std::runtime_error("stable_hit: too many truncated paths");
    est.p_hat = double(hits) / double(N);
    est.std_err = stderr_of(est.p_hat, N);
    est.truncation_bias_bound = bias_sum / double(N);
    if (est.truncation_bias_bound > 0.5)
        throw std::runtime_error("stable_hit: escape_radius too small");
    return est;
}

HittingEstimate stable_hit(const BubbleConfig& config, const Eigen::VectorXd& x,
                           const WalkParams& params, long long N) {
    return stable_hit(TargetIndex(config), x, config.profile, params, N);
}

namespace {

// one-sided beta-stable with Laplace transform exp(-lambda^beta) (Kanter)
double one_sided_stable(double beta, Rng& rng) {
    double U = M_PI * rng.uniform();
    double W = -std::log(rng.uniform());
    double a = std::sin(beta * U) / std::pow(std::sin(U), 1.0 / beta);
    double b = std::pow(std::sin((1.0 - beta) * U) / W, (1.0 - beta) / beta);
    return a * b;
}

} // namespace

HittingEstimate euler_stable_hit(const TargetIndex& target, const Eigen::VectorXd& x,
                                 const CapacityProfile& profile, double dt,
                                 const WalkParams& params, long long N) {
    if (profile.kind != Kind::riesz)
        throw std::invalid_argument("euler_stable_hit: riesz profile required");
    if (!(dt > 0)) throw std::invalid_argument("euler_stable_hit: dt > 0");
    if (x.norm() >= params.escape_radius)
        throw std::invalid_argument("euler_stable_hit: start outside escape radius");
    int d = profile.d;
    double beta = 0.5 * profile.alpha;
    double tscale = std::pow(dt, 1.0 / beta);

    HittingEstimate est;
    est.x = x;
    est.seed = params.seed;
    est.n_samples = N;
    est.target_id = target.id();
    if (target.contains(x)) {
        est.p_hat = 1.0;
        return est;
    }
    if (target.empty()) return est;

    long long hits = 0, invalid = 0;
    double bias_sum = 0.0;
    Eigen::VectorXd y(d);
    for (long long path = 0; path < N; ++path) {
        Rng rng(params.seed, static_cast<std::uint64_t>(path) + 1);
        y = x;
        bool settled = false;
        for (long long step = 0; step < params.max_steps; ++step) {
            if (y.norm() > params.escape_radius) {
                bias_sum += target.escape_bound(profile, y);
                settled = true;
                break;
            }
            // subordinated Brownian increment: X_dt ~ N(0, 2 T_dt I)
            double T = tscale * one_sided_stable(beta, rng);
            double sd = std::sqrt(2.0 * T);
            for (int k = 0; k < d; ++k) y[k] += sd * rng.normal();
            if (target.distance(y, 1.0) <= 0.0) {
                ++hits;
                settled = true;
                break;
            }
        }
        if (!settled) ++invalid;
    }
    if (invalid * 1000 > N)
        throw std::runtime_error("euler_stable_hit: too many truncated paths");
    est.p_hat = double(hits) / double(N);
    est.std_err = stderr_of(est.p_hat, N);
    est.truncation_bias_bound = bias_sum / double(N);
    return est;
}

UnavoidReport verify_unavoidable(const TargetIndex& target,
                                 const CapacityProfile& profile,
                                 const Domain& domain, const ProbePlan& probes,
                                 double kappa, long long N) {
    UnavoidReport rep;
    rep.kappa = kappa;
    rep.min_lower = std::numeric_limits<double>::infinity();
    auto estimate = [&](const Eigen::VectorXd& x) {
        if (profile.kind == Kind::classical)
            return wos_brownian_hit(domain, target, x, probes.params, N);
        return stable_hit(target, x, profile, probes.params, N);
    };
    for (const auto& x : probes.on_A) {
        rep.on_A.push_back(estimate(x));
        const auto& e = rep.on_A.back();
        rep.min_lower = std::min(rep.min_lower, e.p_hat - 3.0 * e.std_err);
    }
    for (const auto& x : probes.free_points) rep.free_points.push_back(estimate(x));
    if (rep.on_A.empty()) rep.min_lower = 0.0;
    rep.satisfied = rep.min_lower >= kappa;
    return rep;
}

double estimate_annulus_constant(const CapacityProfile& profile, long long N,
                                 std::uint64_t seed) {
    if (profile.kind == Kind::classical) return 1.0;
    if (profile.kind != Kind::riesz)
        throw std::invalid_argument("estimate_annulus_constant: riesz or classical");
    int d = profile.d;
    double alpha = profile.alpha;
    exit_table(d, alpha);

    long long hits = 0;
    const double escape = 1e6, eps = 1e-9;
    for (long long path = 0; path < N; ++path) {
        Rng rng(seed, static_cast<std::uint64_t>(path) + 1);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
        for (long long step = 0; step < 100000; ++step) {
            double z = y.norm();
            if (z > 0.5 && z < 1.0) {
                ++hits;
                break;
            }
            if (z > escape) break;
            double rho = z <= 0.5 ? 0.5 - z : z - 1.0;
            if (rho < eps) {
                ++hits;  // absorbed on the annulus boundary
                break;
            }
            y += rho * stable_exit_sample(d, alpha, rng);
        }
    }
    double p = double(hits) / double(N);
    return p - 3.0 * stderr_of(p, N);
}

} // namespace ptk
