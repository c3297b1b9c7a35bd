#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ptk/equilibrium.hpp"
#include "ptk/geometry.hpp"
#include "ptk/kernels.hpp"

namespace ptk {

// One stage F_m: M disjoint cubes of scale a carrying the uniform probability
// measure mu_m. Large stages are stored factored (parent centers x kernel
// offsets) instead of as an explicit center list.
struct CantorLevel {
    int m = 1;
    int d = 2;
    double a = 0.0;
    long long M = 1;
    double mass_bound = 0.0;  // 2^{-(m-1)} c1
    Eigen::MatrixXd centers;  // explicit storage, M x d
    bool factored = false;
    Eigen::MatrixXd parents;  // factored: previous-level centers
    Eigen::MatrixXd offsets;  // factored: kernel offsets within a parent
    double parent_a = 0.0;    // factored: scale of the parent cubes

    long long parent_count() const { return factored ? parents.rows() : 0; }
    Eigen::VectorXd center_of(long long i) const;
};

struct StepCertificate {
    int m = 0;
    int d = 0;
    int n = 0;
    double r = 0.0;
    double check_i_max = 0.0, check_i_bound = 0.0;  // sampled |G nu_j - G mu_Qj|
    double h_r = 0.0, check_ii_bound = 0.0;
    double iii_lo = 0.0, iii_mid = 0.0, iii_hi = 0.0;  // 2c^2cap(a), n^d cap(r), 3c^2cap(a)
    double two_r = 0.0, a_over_n = 0.0;
    double covering_bound = 0.0, covering_threshold = 0.0;  // M n^d phi(r), 1/m
    bool holds() const;
};

struct CantorRun {
    CapacityProfile profile;
    double c1 = 0.0;
    double capq_min = 0.0, capq_max = 0.0;  // cap(a)*||G mu_aK||_inf over a sweep
    std::vector<CantorLevel> levels;        // F_1 .. F_{depth+1}
    std::vector<StepCertificate> certs;     // steps m = 1 .. depth
};

CantorLevel init_level(const CapacityProfile& profile);

// ||G mu_K1||_inf = G mu_K1(center), two quadrature depths cross-checked
double construction_c1(const CapacityProfile& profile);

// the potential-growth constant C = max{3, (1+2 sqrt d)^(d-alpha)}
double growth_constant(const CapacityProfile& profile);

// G mu_m(x): monopole far field per cube, quadrature nearby
double level_potential(const CantorLevel& level, const CapacityProfile& profile,
                       const Eigen::VectorXd& x, double tol = 1e-3);

// the mass-bound quantity (1/M) sup G mu_Q, evaluated at a cube center
double level_potential_sup(const CantorLevel& level, const CapacityProfile& profile);

StepCertificate select_step_params(const CantorLevel& level, const MeasureFunction& phi,
                                   const CapacityProfile& profile, double c1,
                                   bool lookahead = true, int n_max = 128,
                                   std::uint64_t seed = 1);

CantorLevel refine(const CantorLevel& level, const StepCertificate& cert);

struct CoverBound {
    int m;
    double bound;      // M n^d phi(r)
    double threshold;  // 1/m
};
std::vector<CoverBound> covering_certificate(const std::vector<StepCertificate>& certs,
                                             const MeasureFunction& phi);

struct GrowthSample {
    int m;
    double max_gap;  // max over samples of G mu_{m+1} - G mu_m - allowance
    double allowance;
    double sup_seen;  // max sampled G mu over both levels
};
std::vector<GrowthSample> potential_growth_check(const CantorRun& run, int n_points,
                                                 std::uint64_t seed = 2);

CantorRun run_cantor(const CapacityProfile& profile, const MeasureFunction& phi,
                     int depth, int n_max = 128, std::uint64_t seed = 1);

} // namespace ptk
