#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptk/champagne.hpp"
#include "ptk/geometry.hpp"
#include "ptk/kernels.hpp"
#include "ptk/rng.hpp"

namespace ptk {

struct HittingEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;
    long long n_samples = 0;
    std::uint64_t seed = 0;
    double truncation_bias_bound = 0.0;
    long long ties = 0;  // equidistant absorptions, counted as misses
    Eigen::VectorXd x;
    std::string target_id;
};

struct WalkParams {
    double eps_shell = 0.0;  // 0: 1e-6 * domain scale
    long long max_steps = 100000;
    double escape_radius = 100.0;  // stable walks
    std::uint64_t seed = 1;
};

// spatial index over a union of closed balls (and affine cube copies for
// patterns): per-shell hash grids with center-norm band bounds
class TargetIndex {
  public:
    TargetIndex() = default;
    explicit TargetIndex(const BubbleConfig& config);
    explicit TargetIndex(const PatternSet& pattern);

    // min(cap, distance from x to the target); negative means inside
    double distance(const Eigen::VectorXd& x, double cap) const;
    bool contains(const Eigen::VectorXd& x) const;
    bool empty() const { return balls_.empty() && cubes_.empty(); }
    // sum over balls of g(|x-z|)/g(r_z), capped at 1
    double escape_bound(const CapacityProfile& p, const Eigen::VectorXd& x) const;
    const std::string& id() const { return id_; }

  private:
    struct ShellGrid {
        double cell = 1.0, rmax = 0.0;
        double lo = 0.0, hi = 0.0;  // band of center norms
        bool sphere = false;        // centers concentric within a fraction of a cell
        double mid = 0.0, w = 0.0;  // sphere radius and center-norm half-spread
        std::vector<int> idx;       // ball indices in this shell
        std::unordered_map<std::uint64_t, std::vector<int>> cells;
    };
    void build(std::vector<std::pair<Eigen::VectorXd, double>> balls,
               std::vector<int> shells);
    double shell_distance(const ShellGrid& g, const Eigen::VectorXd& x,
                          double cap) const;

    std::vector<std::pair<Eigen::VectorXd, double>> balls_;
    std::vector<ShellGrid> grids_;
    std::vector<Cube> cubes_;
    std::string id_ = "target";
};

// walk-on-spheres for killed Brownian motion on domain \ target
HittingEstimate wos_brownian_hit(const Domain& domain, const TargetIndex& target,
                                 const Eigen::VectorXd& x, const WalkParams& params,
                                 long long N);
HittingEstimate wos_brownian_hit(const Domain& domain, const BubbleConfig& config,
                                 const Eigen::VectorXd& x, const WalkParams& params,
                                 long long N);

// exit position of the isotropic alpha-stable process from B(0,1) started at 0
// (radial inverse-CDF table, cached per (d, alpha))
Eigen::VectorXd stable_exit_sample(int d, double alpha, Rng& rng);

// exit-from-largest-ball iteration for the whole-space stable process
HittingEstimate stable_hit(const TargetIndex& target, const Eigen::VectorXd& x,
                           const CapacityProfile& profile, const WalkParams& params,
                           long long N);
HittingEstimate stable_hit(const BubbleConfig& config, const Eigen::VectorXd& x,
                           const WalkParams& params, long long N);

// independent estimator: Euler scheme on subordinated Brownian increments
HittingEstimate euler_stable_hit(const TargetIndex& target, const Eigen::VectorXd& x,
                                 const CapacityProfile& profile, double dt,
                                 const WalkParams& params, long long N);

struct ProbePlan {
    std::vector<Eigen::VectorXd> on_A;  // points of the reference unavoidable set
    std::vector<Eigen::VectorXd> free_points;
    WalkParams params;
};

struct UnavoidReport {
    std::vector<HittingEstimate> on_A, free_points;
    double kappa = 0.0;
    double min_lower = 0.0;  // min over on_A of p_hat - 3 stderr
    bool satisfied = false;
};

UnavoidReport verify_unavoidable(const TargetIndex& target,
                                 const CapacityProfile& profile,
                                 const Domain& domain, const ProbePlan& probes,
                                 double kappa, long long N);

// Monte Carlo estimate (minus 3 stderr) of the annulus reduced function
// R_1^{B(0,1) \ closed B(0,1/2)}(0); 1 for classical profiles
double estimate_annulus_constant(const CapacityProfile& profile, long long N = 100000,
                                 std::uint64_t seed = 1);

} // namespace ptk
