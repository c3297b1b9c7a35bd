#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ptk/cantor.hpp"
#include "ptk/equilibrium.hpp"
#include "ptk/geometry.hpp"
#include "ptk/kernels.hpp"

namespace ptk {

struct Bubble {
    Eigen::VectorXd center;
    double radius = 0.0;
    int shell = 0;
};

enum class BubbleMethod { boundary_cover, kz_cut, riesz_shell };

struct BubbleConfig {
    std::vector<Bubble> bubbles;
    Domain domain;
    CapacityProfile profile;
    BubbleMethod method = BubbleMethod::boundary_cover;
    double budget = 0.0;                  // sum cap(r_z) h(r_z) when phi known
    std::vector<double> per_shell_budget;
    std::vector<double> shell_budget_cap;  // the per-shell allowance eta_n
};

// affine copies z + r_z * F of a base pattern inside the bubbles
struct PatternSet {
    bool base_is_ball = true;
    double ball_radius = 1.0;       // F = closed ball of this radius (< 1)
    std::vector<Cube> base_cubes;   // or F = union of cubes inside B(0,1)
    std::vector<std::pair<Eigen::VectorXd, double>> placements;  // (z, r_z)
};

// per-shell nets on the exhaustion boundaries with a common dyadic radius
// maximizing placed capacity under the budget sum_{z in Z_n} cap(r)h(r) < eta_n
BubbleConfig boundary_cover_config(
    const Domain& domain, const CapacityProfile& profile, const MeasureFunction& phi,
    double delta, const std::function<double(const Eigen::VectorXd&)>& psi,
    int depth, std::uint64_t seed);

struct KzResult {
    BubbleConfig config;
    double kappa_target = 0.0;
    double gamma = 0.0, tau = 0.0, R = 0.0, beta = 0.0;
    double a_const = 1.0;
    double mu_mass = 0.0;
    bool equilibrium_measure_for_R_phi = true;  // mu approximates R_phi's measure
    // micro-refined support and its partition: owner[i] = bubble index of the
    // cell L_z containing support point i
    Eigen::MatrixXd support_points;
    std::vector<double> support_weights;
    std::vector<int> owner;
};

// equilibrium-cutting construction: solve G mu = 1 on K, net + partition the
// support at scale beta, invert cap for the per-cell radii
KzResult kz_config(const Ball& K, const Ball& Kprime, const CapacityProfile& profile,
                   const MeasureFunction& phi, double eta, double a_const,
                   std::uint64_t seed, int base_resolution = 16,
                   long long max_support_points = 4000000);

// nets on spheres |x| = R_n (alpha > 1) or solid annuli (alpha <= 1)
BubbleConfig riesz_shell_config(const CapacityProfile& profile,
                                const std::vector<double>& radii, double delta_shell,
                                std::uint64_t seed);

PatternSet replace_with_pattern(const BubbleConfig& config,
                                const std::vector<Cube>& F_cubes);
PatternSet replace_with_pattern(const BubbleConfig& config, double ball_radius);

struct BudgetReport {
    double sum = 0.0;
    std::vector<double> per_shell;
    std::vector<double> divergence_partial;  // partial sums of g(|z|)/g(r_z)
};
BudgetReport budget_check(const BubbleConfig& config, const MeasureFunction& phi);

// direct O(N^2) checks of disjointness, containment, and radius decay
void assert_bubble_invariants(const BubbleConfig& config);

} // namespace ptk
