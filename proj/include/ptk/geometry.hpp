#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace ptk {

struct Ball {
    Eigen::VectorXd center;
    double radius = 1.0;
    bool closed = true;
};

// Axis-aligned cube center + a*K, K = [-(2 sqrt d)^-1, (2 sqrt d)^-1]^d;
// the diagonal has length a.
struct Cube {
    Eigen::VectorXd center;
    double a = 1.0;
    int dim() const { return static_cast<int>(center.size()); }
    double half_side() const { return 0.5 * a / std::sqrt(double(dim())); }
};

enum class DomainKind { whole_space, ball, box, annulus };

struct Domain {
    DomainKind kind = DomainKind::whole_space;
    int d = 2;
    Eigen::VectorXd center;  // ball/box/annulus; empty means origin
    double R = 1.0;          // ball radius / box half-side
    double R1 = 0.0, R2 = 0.0;  // annulus
};

struct Exhaustion {
    Domain domain;
    std::vector<Ball> levels;  // V_n, strictly nested concentric balls
};

// closure(B(c,outer)) \ B(c,inner)
struct Shell {
    Eigen::VectorXd center;
    double inner = 0.0;
    double outer = 1.0;
};

Exhaustion concentric_exhaustion(const Domain& domain, int depth);

// Greedy net on the sphere |x - center| = radius: accepted points are
// > eps apart (so the closed eps/4 balls are disjoint) and the balls
// B(z, eps) cover the sphere (verified on an independent denser grid).
// Deterministic given seed. d = 2 or 3.
std::vector<Eigen::VectorXd> boundary_net(const Ball& sphere, double eps,
                                          std::uint64_t seed);

// Same greedy scheme over the solid annulus R1 <= |x - center| <= R2.
std::vector<Eigen::VectorXd> annulus_net(const Shell& shell, double eps,
                                         std::uint64_t seed);

// Maximal eps-packing of a finite point cloud (rows of pts): returns row
// indices whose points are pairwise > eps apart and within eps of every row.
std::vector<int> point_cloud_net(const Eigen::MatrixXd& pts, double eps);

// n^d children tiling Q in Q_{a/n} plus concentric kernel cubes in Q_r.
std::pair<std::vector<Cube>, std::vector<Cube>> cube_subdivide(const Cube& Q, int n,
                                                               double r);

std::vector<Shell> shell_partition(const Exhaustion& ex, const std::vector<int>& gaps);

bool cubes_disjoint(const Cube& p, const Cube& q);
bool cube_contains(const Cube& outer, const Cube& inner);
bool cube_contains_point(const Cube& q, const Eigen::VectorXd& x);
// distance from x to the solid cube (0 inside)
double cube_distance(const Cube& q, const Eigen::VectorXd& x);

} // namespace ptk
