#include "ptk/geometry.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <unordered_map>

#include "ptk/rng.hpp"

namespace ptk {

Exhaustion concentric_exhaustion(const Domain& domain, int depth) {
    if (depth < 1) throw std::invalid_argument("concentric_exhaustion: depth >= 1");
    if (domain.kind != DomainKind::ball && domain.kind != DomainKind::whole_space)
        throw std::invalid_argument("concentric_exhaustion: unsupported domain kind");
    Eigen::VectorXd c = domain.center.size() ? domain.center
                                             : Eigen::VectorXd::Zero(domain.d);
    Exhaustion ex;
    ex.domain = domain;
    for (int n = 1; n <= depth; ++n) {
        double R = domain.kind == DomainKind::ball
                       ? domain.R * (1.0 - std::pow(0.5, n))
                       : std::pow(2.0, n);
        ex.levels.push_back({c, R, false});
    }
    return ex;
}

namespace {

// hash grid over ambient coordinates for near-neighbor queries on the sphere
struct PointGrid {
    double cell;
    std::unordered_map<std::uint64_t, std::vector<int>> cells;
    std::vector<Eigen::VectorXd> pts;

    explicit PointGrid(double cell_size) : cell(cell_size) {}

    std::uint64_t key(const Eigen::VectorXd& p) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (int k = 0; k < p.size(); ++k) {
            auto q = static_cast<std::int64_t>(std::floor(p[k] / cell));
            h = (h ^ static_cast<std::uint64_t>(q)) * 1099511628211ULL;
        }
        return h;
    }

    void insert(const Eigen::VectorXd& p) {
        pts.push_back(p);
        cells[key(p)].push_back(static_cast<int>(pts.size()) - 1);
    }

    bool any_within(const Eigen::VectorXd& p, double dist, int reach) const {
        int d = static_cast<int>(p.size());
        Eigen::VectorXd q = p;
        std::vector<int> off(d, -reach);
        for (;;) {
            for (int k = 0; k < d; ++k) q[k] = p[k] + off[k] * cell;
            auto it = cells.find(key(q));
            if (it != cells.end())
                for (int idx : it->second)
                    if ((p - pts[idx]).norm() <= dist) return true;
            int k = 0;
            while (k < d && ++off[k] > reach) off[k++] = -reach;
            if (k == d) return false;
        }
    }
};

// streams count quasi-uniform points of the sphere |x-c| = R to visit
template <class Visit>
void sphere_stream(const Ball& s, std::size_t count, std::uint64_t seed,
                   Visit&& visit) {
    int d = static_cast<int>(s.center.size());
    Rng rng(seed, 0x5f3759df);
    if (d == 2) {
        double phase = rng.uniform() * 2.0 * M_PI;
        Eigen::VectorXd p(2);
        for (std::size_t i = 0; i < count; ++i) {
            double a = phase + 2.0 * M_PI * double(i) / double(count);
            p << s.center[0] + s.radius * std::cos(a),
                s.center[1] + s.radius * std::sin(a);
            visit(p);
        }
        return;
    }
    // Fibonacci lattice rotated by a seeded random rotation
    Eigen::Vector3d axis;
    rng.direction(3, axis.data());
    Eigen::Matrix3d rot =
        Eigen::AngleAxisd(rng.uniform() * 2.0 * M_PI, axis).toRotationMatrix();
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    Eigen::VectorXd p(3);
    for (std::size_t i = 0; i < count; ++i) {
        double z = 1.0 - 2.0 * (double(i) + 0.5) / double(count);
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double a = ga * double(i);
        Eigen::Vector3d u(rho * std::cos(a), rho * std::sin(a), z);
        p = s.center + s.radius * (rot * u);
        visit(p);
    }
}

std::size_t sphere_count(int d, double radius, double spacing) {
    double n = d == 2 ? 2.0 * M_PI * radius / spacing
                      : 4.0 * M_PI * radius * radius / (spacing * spacing);
    if (n > 6e7)
        throw std::runtime_error("net: eps too small for the grid budget");
    return static_cast<std::size_t>(std::max(16.0, std::ceil(n)));
}

// streams a quasi-uniform grid of the solid annulus R1 <= |x-c| <= R2
template <class Visit>
void annulus_stream(const Shell& sh, double spacing, std::uint64_t seed,
                    Visit&& visit) {
    int rings = std::max(
        2, static_cast<int>(std::ceil((sh.outer - sh.inner) / spacing)) + 1);
    double budget = 0.0;
    int d = static_cast<int>(sh.center.size());
    for (int k = 0; k < rings; ++k) {
        double R = sh.inner + (sh.outer - sh.inner) * (k + 0.5) / rings;
        budget += d == 2 ? 2.0 * M_PI * R / spacing
                         : 4.0 * M_PI * R * R / (spacing * spacing);
    }
    if (budget > 6e7)
        throw std::runtime_error("net: eps too small for the grid budget");
    for (int k = 0; k < rings; ++k) {
        double R = sh.inner + (sh.outer - sh.inner) * (k + 0.5) / rings;
        sphere_stream(Ball{sh.center, R, false},
                      sphere_count(d, R, spacing), seed + k, visit);
    }
}

// greedy maximal eps-packing over streamed candidates: candidates at spacing
// eps/3 are eps-covered by maximality, so the surface is (eps + fill)-covered;
// verified at 1.25 eps on an independent stream
template <class CandStream, class CheckStream>
std::vector<Eigen::VectorXd> greedy_net(double eps, CandStream&& cands,
                                        CheckStream&& check) {
    PointGrid grid(eps);
    cands([&](const Eigen::VectorXd& p) {
        if (!grid.any_within(p, eps, 1)) grid.insert(p);
    });
    bool covered = true;
    check([&](const Eigen::VectorXd& p) {
        if (covered && !grid.any_within(p, 1.25 * eps, 2)) covered = false;
    });
    if (!covered) throw std::runtime_error("net: cover verification failed");
    return grid.pts;
}

} // namespace

std::vector<Eigen::VectorXd> boundary_net(const Ball& sphere, double eps,
                                          std::uint64_t seed) {
    int d = static_cast<int>(sphere.center.size());
    if (d != 2 && d != 3) throw std::invalid_argument("boundary_net: d must be 2 or 3");
    if (eps <= 0) throw std::invalid_argument("boundary_net: eps must be positive");

    std::exception_ptr err;
    for (int attempt = 0; attempt < 2; ++attempt) {
        double spacing = eps / (3.0 * (attempt + 1));
        try {
            return greedy_net(
                eps,
                [&](auto&& v) {
                    sphere_stream(sphere, sphere_count(d, sphere.radius, spacing),
                                  seed, v);
                },
                [&](auto&& v) {
                    sphere_stream(sphere, sphere_count(d, sphere.radius, spacing),
                                  seed ^ 0x9e3779b9ULL, v);
                });
        } catch (...) {
            err = std::current_exception();
        }
    }
    std::rethrow_exception(err);
}

std::vector<Eigen::VectorXd> annulus_net(const Shell& shell, double eps,
                                         std::uint64_t seed) {
    int d = static_cast<int>(shell.center.size());
    if (d != 2 && d != 3) throw std::invalid_argument("annulus_net: d must be 2 or 3");
    if (eps <= 0 || shell.inner >= shell.outer)
        throw std::invalid_argument("annulus_net: bad parameters");

    std::exception_ptr err;
    for (int attempt = 0; attempt < 2; ++attempt) {
        double spacing = eps / (3.0 * (attempt + 1));
        try {
            return greedy_net(
                eps,
                [&](auto&& v) { annulus_stream(shell, spacing, seed, v); },
                [&](auto&& v) {
                    annulus_stream(shell, spacing, seed ^ 0x517cc1b7ULL, v);
                });
        } catch (...) {
            err = std::current_exception();
        }
    }
    std::rethrow_exception(err);
}

std::vector<int> point_cloud_net(const Eigen::MatrixXd& pts, double eps) {
    if (eps <= 0) throw std::invalid_argument("point_cloud_net: eps must be positive");
    PointGrid grid(eps);
    std::vector<int> picked;
    for (int i = 0; i < pts.rows(); ++i) {
        Eigen::VectorXd p = pts.row(i).transpose();
        if (!grid.any_within(p, eps, 1)) {
            grid.insert(p);
            picked.push_back(i);
        }
    }
    return picked;
}

std::pair<std::vector<Cube>, std::vector<Cube>> cube_subdivide(const Cube& Q, int n,
                                                               double r) {
    if (n < 1) throw std::invalid_argument("cube_subdivide: n >= 1");
    if (!(r > 0) || !(2.0 * r < Q.a / n))
        throw std::invalid_argument("cube_subdivide: need 0 < 2r < a/n");
    int d = Q.dim();
    double side = Q.a / std::sqrt(double(d));
    std::vector<Cube> children, kernels;
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= n;
    children.reserve(total);
    kernels.reserve(total);
    std::vector<int> idx(d, 0);
    for (;;) {
        Eigen::VectorXd c = Q.center;
        for (int k = 0; k < d; ++k)
            c[k] += side * ((idx[k] + 0.5) / double(n) - 0.5);
        children.push_back({c, Q.a / n});
        kernels.push_back({c, r});
        int k = 0;
        while (k < d && ++idx[k] >= n) idx[k++] = 0;
        if (k == d) break;
    }
    return {std::move(children), std::move(kernels)};
}

std::vector<Shell> shell_partition(const Exhaustion& ex, const std::vector<int>& gaps) {
    std::vector<Shell> shells;
    std::size_t m = 0;  // 0-based index into levels: shell n = cl(V_{m'}) \ V_{m+k}
    for (int k : gaps) {
        if (k < 1) throw std::invalid_argument("shell_partition: gaps must be >= 1");
        std::size_t inner = m + k - 1;
        std::size_t outer = inner + 1;
        if (outer >= ex.levels.size())
            throw std::invalid_argument("shell_partition: exhaustion too shallow");
        shells.push_back({ex.levels[inner].center, ex.levels[inner].radius,
                          ex.levels[outer].radius});
        m = outer;
    }
    return shells;
}

bool cubes_disjoint(const Cube& p, const Cube& q) {
    double hp = p.half_side(), hq = q.half_side();
    for (int k = 0; k < p.dim(); ++k)
        if (std::abs(p.center[k] - q.center[k]) > hp + hq) return true;
    return false;
}

bool cube_contains(const Cube& outer, const Cube& inner) {
    double ho = outer.half_side(), hi = inner.half_side();
    for (int k = 0; k < outer.dim(); ++k)
        if (std::abs(outer.center[k] - inner.center[k]) > ho - hi + 1e-14 * ho)
            return false;
    return true;
}

bool cube_contains_point(const Cube& q, const Eigen::VectorXd& x) {
    double h = q.half_side();
    for (int k = 0; k < q.dim(); ++k)
        if (std::abs(q.center[k] - x[k]) > h) return false;
    return true;
}

double cube_distance(const Cube& q, const Eigen::VectorXd& x) {
    double h = q.half_side(), s2 = 0.0;
    for (int k = 0; k < q.dim(); ++k) {
        double e = std::abs(q.center[k] - x[k]) - h;
        if (e > 0) s2 += e * e;
    }
    return std::sqrt(s2);
}

} // namespace ptk
