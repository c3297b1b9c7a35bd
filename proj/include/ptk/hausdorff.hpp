#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "ptk/cantor.hpp"
#include "ptk/kernels.hpp"

namespace ptk {

struct Cover {
    std::vector<std::pair<Eigen::VectorXd, double>> balls;
    double rho = 1.0;  // common radius bound, every radius < rho
};

// sum of phi over the cover radii: an upper bound on the rho-content
double covering_sum(const Cover& cover, const MeasureFunction& phi);

struct ContentPoint {
    double rho;    // 1/m
    double bound;  // M n^d phi(r) for the natural next-level cover
};

// decreasing sequence of certified content upper bounds along a run
std::vector<ContentPoint> content_upper_profile(const CantorRun& run,
                                                const MeasureFunction& phi);

std::string content_profile_csv(const std::vector<ContentPoint>& profile);

// (ball count, ball radius) of the natural cover after each certified step
std::vector<std::pair<long long, double>> natural_cover_counts(const CantorRun& run);

// least grid exponent gamma whose covering sums N_m r_m^gamma stay within a
// factor 2.5 of max(N_1 r_1^gamma, 1) across all levels; if no grid value
// qualifies, returns the largest one and clears *bounded
double dim_upper_fit(const std::vector<std::pair<long long, double>>& levels,
                     const std::vector<double>& grid, bool* bounded = nullptr);

std::vector<double> exponent_grid(double lo, double hi, double step = 0.05);

} // namespace ptk
