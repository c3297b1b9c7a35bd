#include "ptk/champagne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "ptk/rng.hpp"

namespace ptk {

namespace {

// sparse hash grid for near-neighbor queries among bubble/support points
struct HashGrid {
    double cell;
    std::unordered_map<std::uint64_t, std::vector<int>> cells;
    const Eigen::MatrixXd* pts = nullptr;

    HashGrid(const Eigen::MatrixXd& p, double cell_size) : cell(cell_size), pts(&p) {
        for (int i = 0; i < p.rows(); ++i) cells[key(p.row(i))].push_back(i);
    }

    template <class Row>
    std::uint64_t key(const Row& p) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (int k = 0; k < p.size(); ++k) {
            auto q = static_cast<std::int64_t>(std::floor(p[k] / cell));
            h = (h ^ static_cast<std::uint64_t>(q)) * 1099511628211ULL;
        }
        return h;
    }

    template <class Visit>
    void near(const Eigen::VectorXd& p, int reach, Visit&& visit) const {
        int d = static_cast<int>(p.size());
        Eigen::VectorXd q = p;
        std::vector<int> off(d, -reach);
        for (;;) {
            for (int k = 0; k < d; ++k) q[k] = p[k] + off[k] * cell;
            auto it = cells.find(key(q));
            if (it != cells.end())
                for (int idx : it->second) visit(idx);
            int k = 0;
            while (k < d && ++off[k] > reach) off[k++] = -reach;
            if (k == d) return;
        }
    }
};

double ball_boundary_dist(const Domain& dom, const Eigen::VectorXd& x) {
    Eigen::VectorXd c = dom.center.size() ? dom.center : Eigen::VectorXd::Zero(dom.d);
    return dom.R - (x - c).norm();
}

// largest dyadic r <= r_max with count * cap(r) h(r) < 0.999 * allowance
double largest_dyadic_radius(const CapacityProfile& p, const MeasureFunction& phi,
                             double r_max, double count, double allowance) {
    for (double r = r_max; r > 1e-280; r *= 0.5) {
        double cost = count * cap_eval(p, r) * h_eval(phi, p, r);
        if (cost < 0.999 * allowance) return r;
    }
    throw std::runtime_error("bubble radius scan exhausted: phi budget unreachable");
}

std::vector<Eigen::VectorXd> ball_sample(const Eigen::VectorXd& center, double R,
                                         int rings, std::uint64_t seed) {
    int d = static_cast<int>(center.size());
    std::vector<Eigen::VectorXd> out;
    Rng rng(seed, 77);
    for (int k = 0; k < rings; ++k) {
        double r = R * (k + 0.5) / rings;
        if (d == 2) {
            int m = std::max(8, static_cast<int>(2.0 * M_PI * r / (R / rings)));
            double phase = rng.uniform() * 2.0 * M_PI;
            for (int j = 0; j < m; ++j) {
                double a = phase + 2.0 * M_PI * j / m;
                Eigen::VectorXd p(2);
                p << center[0] + r * std::cos(a), center[1] + r * std::sin(a);
                out.push_back(p);
            }
        } else {
            int m = std::max(8, static_cast<int>(4.0 * M_PI * r * r /
                                                 ((R / rings) * (R / rings))));
            const double ga = M_PI * (3.0 - std::sqrt(5.0));
            double phase = rng.uniform() * 2.0 * M_PI;
            for (int j = 0; j < m; ++j) {
                double z = 1.0 - 2.0 * (j + 0.5) / m;
                double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                double a = ga * j + phase;
                Eigen::VectorXd p(3);
                p << center[0] + r * rho * std::cos(a),
                    center[1] + r * rho * std::sin(a), center[2] + r * z;
                out.push_back(p);
            }
        }
    }
    return out;
}

} // namespace

BubbleConfig boundary_cover_config(
    const Domain& domain, const CapacityProfile& profile, const MeasureFunction& phi,
    double delta, const std::function<double(const Eigen::VectorXd&)>& psi,
    int depth, std::uint64_t seed) {
    if (domain.kind != DomainKind::ball)
        throw std::invalid_argument("boundary_cover_config: ball domain required");
    if (delta <= 0) throw std::invalid_argument("boundary_cover_config: delta > 0");

    auto psi_eff = psi ? psi : [&](const Eigen::VectorXd& x) {
        return 0.5 * ball_boundary_dist(domain, x);
    };

    auto ex = concentric_exhaustion(domain, depth + 1);
    BubbleConfig cfg;
    cfg.domain = domain;
    cfg.profile = profile;
    cfg.method = BubbleMethod::boundary_cover;

    for (int n = 1; n <= depth; ++n) {
        const Ball& Vn = ex.levels[n - 1];
        double gap_out = ex.levels[n].radius - Vn.radius;
        double gap_in = n >= 2 ? Vn.radius - ex.levels[n - 2].radius
                               : std::numeric_limits<double>::infinity();
        // inf of psi over the sphere: sample it
        double psi_min = std::numeric_limits<double>::infinity();
        {
            Eigen::VectorXd probe = Vn.center;
            for (int k = 0; k < 64; ++k) {
                double a = 2.0 * M_PI * k / 64.0;
                probe = Vn.center;
                probe[0] += Vn.radius * std::cos(a);
                probe[1] += Vn.radius * std::sin(a);
                psi_min = std::min(psi_min, psi_eff(probe));
            }
        }
        double eta_n = 0.5 * std::min({std::pow(0.5, n) * delta,
                                       std::min(gap_out, gap_in), psi_min});
        if (!(eta_n > 0))
            throw std::runtime_error("boundary_cover_config: degenerate shell gap");

        // net fineness: a small multiple of eta_n, relaxed to keep the shell
        // below its point budget; the per-shell capacity depends on the count
        // only through log(1/r), so coarsening trades little fidelity for a
        // large cut in walk and build cost
        double pt_budget = n <= 3 ? 4e4 : 2e4;
        double eps_min =
            domain.d == 2
                ? 2.0 * M_PI * Vn.radius / pt_budget
                : Vn.radius * std::sqrt(14.5 / pt_budget);
        double eps_n = std::max(eta_n, eps_min);
        auto net = boundary_net(Vn, eps_n, seed + n);

        // feasibility gate mirroring the liminf h -> 0 hypothesis
        double r_cap = 0.5 * std::min(eta_n, 0.25 * eps_n);
        h_scan(phi, profile, 0.9, r_cap);
        double r_n =
            largest_dyadic_radius(profile, phi, r_cap, double(net.size()), eta_n);

        double shell_cost =
            double(net.size()) * cap_eval(profile, r_n) * h_eval(phi, profile, r_n);
        cfg.per_shell_budget.push_back(shell_cost);
        cfg.shell_budget_cap.push_back(eta_n);
        if (!(shell_cost < eta_n && eta_n <= std::pow(0.5, n) * delta))
            throw std::runtime_error("boundary_cover_config: shell budget violated");
        for (auto& z : net) cfg.bubbles.push_back({z, r_n, n});
        cfg.budget += shell_cost;
    }
    if (!(cfg.budget < delta))
        throw std::runtime_error("boundary_cover_config: total budget violated");
    return cfg;
}

KzResult kz_config(const Ball& K, const Ball& Kprime, const CapacityProfile& profile,
                   const MeasureFunction& phi, double eta, double a_const,
                   std::uint64_t seed, int base_resolution,
                   long long max_support_points) {
    if (!(eta > 0 && eta < 1)) throw std::invalid_argument("kz_config: 0 < eta < 1");
    if (Kprime.radius <= K.radius)
        throw std::invalid_argument("kz_config: Kprime must contain K");
    if (!(a_const > 0 && a_const <= 1))
        throw std::invalid_argument("kz_config: a_const in (0,1]");
    const double c = profile.c;
    const double C = std::max({profile.C_G, profile.C_D, 1.0});
    const int d = profile.d;

    KzResult res;
    res.a_const = a_const;
    res.kappa_target = 0.5 * std::pow(c * C, -4.0);

    // largest gamma on a 64-point grid satisfying the kappa constraint
    for (int k = 64; k >= 1; --k) {
        double g = k / 65.0;
        double rhs = (1.0 - g) / (c * c * C * C * (g * c * C + c * c * C * C));
        if (res.kappa_target <= rhs) {
            res.gamma = g;
            break;
        }
    }
    if (res.gamma == 0.0)
        throw std::runtime_error("kz_config: no admissible gamma for kappa target");

    double residual = 0.0;
    auto support0 = ball_support(profile, K.radius, base_resolution, seed);
    for (int i = 0; i < support0.rows(); ++i)
        support0.row(i) += K.center.transpose();
    auto mu0 = equilibrium_solve(support0, profile, 0.0, &residual);
    res.mu_mass = mu0.mass();

    // tau: minimum of G mu over Kprime, conservatively shifted
    PotentialField field{mu0, profile};
    double tau = std::numeric_limits<double>::infinity();
    for (const auto& x : ball_sample(Kprime.center, Kprime.radius, 24, seed + 1)) {
        double nn = std::numeric_limits<double>::infinity();
        for (int i = 0; i < support0.rows(); ++i)
            nn = std::min(nn, (support0.row(i).transpose() - x).norm());
        if (nn < 1e-9) continue;
        tau = std::min(tau, potential_eval(field, x));
    }
    tau -= 3.0 * residual;
    if (!(tau > 0)) throw std::runtime_error("kz_config: tau vanished numerically");
    res.tau = tau;

    // R from the Kato-type conditions, scanning dyadically downward
    double agt = a_const * res.gamma * tau;
    double h_allow = agt * eta / res.mu_mass;
    double mass_allow = agt / (c * C * C * C);
    const bool surface = profile.kind == Kind::classical;  // measure on the sphere
    std::vector<double> spacing(support0.rows(),
                                std::numeric_limits<double>::infinity());
    for (int i = 0; i < support0.rows(); ++i)
        for (int j = 0; j < support0.rows(); ++j)
            if (j != i)
                spacing[i] = std::min(spacing[i],
                                      (support0.row(i) - support0.row(j)).norm());
    // cell-averaged self contribution: the atom's mass spread uniformly over
    // its half-spacing cell, restricted to B(x, R)
    auto self_term = [&](int i, double R) {
        double rho = 0.5 * spacing[i], w = mu0.weights[i];
        if (surface)
            return (2.0 * w / rho) * std::min(1.0, R / rho);
        return w * d * g_primitive(profile, std::min(R, rho)) / std::pow(rho, d);
    };
    double R = K.radius;
    bool found = false;
    for (; R > 1e-12; R *= 0.5) {
        double h_sup = 0.0;
        for (int k = 0; k < 64; ++k)
            h_sup = std::max(h_sup, h_eval(phi, profile, R * std::pow(0.5, k / 8.0)));
        if (h_sup > h_allow) continue;
        double local_max = 0.0;
        for (int i = 0; i < support0.rows(); ++i) {
            double s = self_term(i, R);
            for (int j = 0; j < support0.rows(); ++j) {
                if (j == i) continue;
                double D = (support0.row(i) - support0.row(j)).norm();
                if (D < R) s += mu0.weights[j] * g_eval(profile, D);
            }
            local_max = std::max(local_max, s);
        }
        if (local_max <= mass_allow) {
            found = true;
            break;
        }
    }
    if (!found)
        throw std::runtime_error("kz_config: no admissible R above the resolution floor");
    res.R = R;
    res.beta = 0.5 * std::min({0.5 * R, eta, profile.r0});

    // micro-refinement: split each atom into a jittered sub-grid at the
    // partition scale so the cells L_z carry small mass
    double sub_spacing = res.beta / 3.0;
    int grid_dim = surface ? d - 1 : d;
    std::vector<Eigen::VectorXd> fine_pts;
    std::vector<double> fine_w;
    Rng rng(seed, 99);
    for (int i = 0; i < mu0.size(); ++i) {
        if (mu0.weights[i] <= 0) continue;
        double nn = spacing[i];
        int k = std::max(1, static_cast<int>(std::ceil(0.9 * nn / sub_spacing)));
        long long sub = 1;
        for (int t = 0; t < grid_dim; ++t) sub *= k;
        if (static_cast<long long>(fine_pts.size()) + sub > max_support_points)
            throw std::runtime_error(
                "kz_config: micro-refined support exceeds the resolution cap");
        double cellw = mu0.weights[i] / double(sub);
        Eigen::VectorXd base = support0.row(i).transpose();
        Eigen::MatrixXd frame;  // tangential directions for surface supports
        double rad = 0.0;
        if (surface) {
            Eigen::VectorXd nrm = base - K.center;
            rad = nrm.norm();
            nrm /= rad;
            frame.resize(d, grid_dim);
            Eigen::VectorXd e = Eigen::VectorXd::Unit(d, 0);
            if (std::abs(nrm.dot(e)) > 0.9) e = Eigen::VectorXd::Unit(d, 1);
            frame.col(0) = (e - nrm.dot(e) * nrm).normalized();
            if (grid_dim > 1)
                frame.col(1) = Eigen::Vector3d(nrm).cross(
                    Eigen::Vector3d(frame.col(0)));
        }
        std::vector<int> idx(grid_dim, 0);
        for (;;) {
            Eigen::VectorXd p = base;
            for (int t = 0; t < grid_dim; ++t) {
                double off =
                    0.9 * nn * ((idx[t] + 0.25 + 0.5 * rng.uniform()) / k - 0.5);
                if (surface)
                    p += off * frame.col(t);
                else
                    p[t] += off;
            }
            if (surface) p = K.center + rad * (p - K.center).normalized();
            fine_pts.push_back(p);
            fine_w.push_back(cellw);
            int t = 0;
            while (t < grid_dim && ++idx[t] >= k) idx[t++] = 0;
            if (t == grid_dim) break;
        }
    }
    Eigen::MatrixXd fine(fine_pts.size(), d);
    for (std::size_t i = 0; i < fine_pts.size(); ++i) fine.row(i) = fine_pts[i];

    // net: maximal (2 beta/3)-packing => beta/3 balls disjoint, 2 beta/3 cover
    auto net_idx = point_cloud_net(fine, 2.0 * res.beta / 3.0);
    Eigen::MatrixXd net(net_idx.size(), d);
    for (std::size_t i = 0; i < net_idx.size(); ++i) net.row(i) = fine.row(net_idx[i]);
    HashGrid net_grid(net, 0.5 * res.beta);

    // partition: unique z within beta/3, else the first z within the cover
    std::vector<double> cell_mass(net_idx.size(), 0.0);
    std::vector<int> owners(fine_pts.size(), -1);
    for (std::size_t i = 0; i < fine_pts.size(); ++i) {
        int inner = -1, outer = -1;
        Eigen::VectorXd p = fine.row(i).transpose();
        net_grid.near(p, 2, [&](int j) {
            double D = (net.row(j).transpose() - p).norm();
            if (D < res.beta / 3.0) inner = (inner < 0 ? j : std::min(inner, j));
            if (D < res.beta) outer = (outer < 0 ? j : std::min(outer, j));
        });
        int owner = inner >= 0 ? inner : outer;
        if (owner < 0)
            throw std::runtime_error("kz_config: partition cover failure");
        owners[i] = owner;
        cell_mass[owner] += fine_w[i];
    }

    res.config.domain = Domain{DomainKind::whole_space, d, {}, 0};
    res.config.profile = profile;
    res.config.method = BubbleMethod::kz_cut;
    double budget = 0.0;
    std::vector<int> bubble_of(net_idx.size(), -1);
    for (std::size_t j = 0; j < net_idx.size(); ++j) {
        if (cell_mass[j] <= 0) continue;
        double rz = cap_inv(profile, cell_mass[j] / agt);
        if (!(rz < res.beta / 8.0))
            throw std::runtime_error("kz_config: r_z >= beta/8, partition too coarse");
        bubble_of[j] = static_cast<int>(res.config.bubbles.size());
        res.config.bubbles.push_back({net.row(j).transpose(), rz, 0});
        budget += cap_eval(profile, rz) * h_eval(phi, profile, rz);
    }
    res.support_points = fine;
    res.support_weights = fine_w;
    res.owner.resize(owners.size());
    for (std::size_t i = 0; i < owners.size(); ++i) res.owner[i] = bubble_of[owners[i]];
    res.config.budget = budget;
    res.config.per_shell_budget = {budget};
    res.config.shell_budget_cap = {eta};
    if (!(budget < eta))
        throw std::runtime_error("kz_config: budget >= eta");
    return res;
}

BubbleConfig riesz_shell_config(const CapacityProfile& profile,
                                const std::vector<double>& radii, double delta_shell,
                                std::uint64_t seed) {
    if (profile.kind != Kind::riesz)
        throw std::invalid_argument("riesz_shell_config: riesz profile required");
    if (radii.size() < 1)
        throw std::invalid_argument("riesz_shell_config: need at least one radius");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw std::invalid_argument("riesz_shell_config: radii must increase");

    int d = profile.d;
    BubbleConfig cfg;
    cfg.domain = Domain{DomainKind::whole_space, d, {}, 0};
    cfg.profile = profile;
    cfg.method = BubbleMethod::riesz_shell;
    bool thin = profile.alpha > 1.0;  // spheres suffice; else solid annuli

    if (!thin) {
        for (std::size_t i = 0; i + 1 < radii.size(); ++i)
            if ((1.0 + delta_shell) * radii[i] >= radii[i + 1])
                throw std::invalid_argument("riesz_shell_config: shells overlap");
    }

    for (std::size_t i = 0; i < radii.size(); ++i) {
        int n = static_cast<int>(i) + 1;
        double Rn = radii[i];
        double gap_in, gap_out;
        if (thin) {
            gap_in = i == 0 ? Rn : Rn - radii[i - 1];
            gap_out = i + 1 < radii.size() ? radii[i + 1] - Rn
                                           : std::numeric_limits<double>::infinity();
        } else {
            gap_in = i == 0 ? Rn : Rn - (1.0 + delta_shell) * radii[i - 1];
            gap_out = i + 1 < radii.size()
                          ? radii[i + 1] - (1.0 + delta_shell) * Rn
                          : std::numeric_limits<double>::infinity();
        }
        double beta_n =
            0.25 * std::min({gap_in, gap_out, 1.0 / double(n)});
        std::vector<Eigen::VectorXd> net;
        if (thin)
            net = boundary_net(Ball{Eigen::VectorXd::Zero(d), Rn, false},
                               2.0 * beta_n, seed + n);
        else
            net = annulus_net(
                Shell{Eigen::VectorXd::Zero(d), Rn, (1.0 + delta_shell) * Rn},
                2.0 * beta_n, seed + n);
        for (auto& z : net) cfg.bubbles.push_back({z, beta_n, n});
    }
    return cfg;
}

namespace {
PatternSet finish_pattern(const BubbleConfig& config, PatternSet ps) {
    for (const auto& b : config.bubbles) ps.placements.emplace_back(b.center, b.radius);
    return ps;
}
} // namespace

PatternSet replace_with_pattern(const BubbleConfig& config,
                                const std::vector<Cube>& F_cubes) {
    for (const auto& q : F_cubes)
        if (q.center.norm() + 0.5 * q.a > 1.0)
            throw std::invalid_argument("replace_with_pattern: F not inside B(0,1)");
    PatternSet ps;
    ps.base_is_ball = false;
    ps.base_cubes = F_cubes;
    return finish_pattern(config, std::move(ps));
}

PatternSet replace_with_pattern(const BubbleConfig& config, double ball_radius) {
    if (!(ball_radius > 0 && ball_radius <= 1.0))
        throw std::invalid_argument("replace_with_pattern: F not inside B(0,1)");
    PatternSet ps;
    ps.base_is_ball = true;
    ps.ball_radius = ball_radius;
    return finish_pattern(config, std::move(ps));
}

BudgetReport budget_check(const BubbleConfig& config, const MeasureFunction& phi) {
    BudgetReport rep;
    std::map<int, double> per_shell, diverg;
    for (const auto& b : config.bubbles) {
        double cost =
            cap_eval(config.profile, b.radius) * h_eval(phi, config.profile, b.radius);
        rep.sum += cost;
        per_shell[b.shell] += cost;
        if (config.domain.kind == DomainKind::whole_space &&
            (config.profile.kind == Kind::riesz || config.profile.kind == Kind::radial)) {
            double z = b.center.norm();
            if (z > 0)
                diverg[b.shell] +=
                    g_eval(config.profile, z) / g_eval(config.profile, b.radius);
        }
    }
    for (auto& [n, v] : per_shell) rep.per_shell.push_back(v);
    double run = 0.0;
    for (auto& [n, v] : diverg) {
        run += v;
        rep.divergence_partial.push_back(run);
    }
    return rep;
}

void assert_bubble_invariants(const BubbleConfig& config) {
    const auto& bs = config.bubbles;
    if (bs.empty()) return;
    int d = static_cast<int>(bs[0].center.size());
    double rmax = 0.0;
    for (const auto& b : bs) rmax = std::max(rmax, b.radius);

    Eigen::MatrixXd centers(bs.size(), d);
    for (std::size_t i = 0; i < bs.size(); ++i) centers.row(i) = bs[i].center;
    HashGrid grid(centers, std::max(2.0 * rmax * 1.01, 1e-12));

    for (std::size_t i = 0; i < bs.size(); ++i) {
        grid.near(bs[i].center, 1, [&](int j) {
            if (static_cast<std::size_t>(j) <= i) return;
            double D = (bs[i].center - bs[j].center).norm();
            if (D <= bs[i].radius + bs[j].radius)
                throw std::runtime_error("bubble invariant: balls intersect");
        });
        if (config.domain.kind == DomainKind::ball) {
            double dist = ball_boundary_dist(config.domain, bs[i].center);
            if (!(dist > 0) || !(bs[i].radius / dist < 1.0) ||
                !(dist - bs[i].radius > 0))
                throw std::runtime_error("bubble invariant: ball leaves the domain");
        }
    }
    // radii tend to zero along shells: per-shell max nonincreasing
    std::map<int, double> shell_max;
    for (const auto& b : bs)
        shell_max[b.shell] = std::max(shell_max[b.shell], b.radius);
    double prev = std::numeric_limits<double>::infinity();
    for (auto& [n, v] : shell_max) {
        if (v > prev)
            throw std::runtime_error("bubble invariant: shell radii not decaying");
        prev = v;
    }
}

} // namespace ptk
