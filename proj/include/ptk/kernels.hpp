#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace ptk {

enum class Kind { classical, logarithmic, riesz, radial };

// Piecewise log-log-linear interpolation of a positive decreasing function
// given by user knots; extrapolates with the boundary slopes.
struct RadialTable {
    std::vector<double> log_r;
    std::vector<double> log_g;
    double eval(double r) const;
    bool empty() const { return log_r.empty(); }
};

// A kernel/capacity pairing: cap(r), the radial kernel profile g(r)
// with G(x,y) = g(|x-y|), and the comparison constants that the
// validators populate.
struct CapacityProfile {
    Kind kind = Kind::riesz;
    int d = 2;
    double alpha = 1.0;    // riesz only, 0 < alpha < min(d,2)
    double eta = 1.0;      // logarithmic comparison parameter
    double r0 = 1.0;       // upper radius of validity
    double c = 1.0;        // local comparison constant
    double C_G = 1.0;      // decay constant, populated by validate_decay
    double C_D = 1.0;      // doubling constant, populated by doubling_constant
    RadialTable g_table;   // radial only
    std::string name() const;
};

CapacityProfile make_classical(int d);
CapacityProfile make_logarithmic(double eta = 1.0, double r0_user = 1.0);
CapacityProfile make_riesz(int d, double alpha);
CapacityProfile make_radial(int d, const std::vector<std::pair<double, double>>& knots,
                            double r0 = 1.0);

double cap_eval(const CapacityProfile& p, double r);
// inverse of cap on (0, r0]; throws if y is out of range
double cap_inv(const CapacityProfile& p, double y);
// radial kernel profile g with G(x,y) = g(|x-y|)
double g_eval(const CapacityProfile& p, double r);
double kernel_eval(const CapacityProfile& p, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// empirical C_G: max over the grid of d*Int_0^r s^(d-1) g(s) ds / (r^d g(r));
// throws if the integral diverges near 0
double validate_decay(const CapacityProfile& p, const std::vector<double>& r_grid);
// empirical doubling constant: max of cap(r)/cap(r/2) over a log grid on (0, r0]
double doubling_constant(const CapacityProfile& p, int grid_points = 100);

struct MeasureFunction {
    std::function<double(double)> phi;
    std::string description;
};

// standard families used by the experiments
MeasureFunction phi_cap_over_log(const CapacityProfile& p);
MeasureFunction phi_cap_times_power(const CapacityProfile& p, double exponent);
MeasureFunction phi_power(double exponent);

double h_eval(const MeasureFunction& phi, const CapacityProfile& p, double t);

// geometric scan t_max, t_max/2, ... for the first t with h(t) < eta;
// throws if none is found above t_min
double h_scan(const MeasureFunction& phi, const CapacityProfile& p, double eta,
              double t_max, double t_min = 1e-12);

} // namespace ptk
