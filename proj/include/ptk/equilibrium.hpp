#pragma once

#include <Eigen/Dense>
#include <string>

#include "ptk/geometry.hpp"
#include "ptk/kernels.hpp"

namespace ptk {

struct DiscreteMeasure {
    Eigen::MatrixXd points;   // N x d, one point per row
    Eigen::VectorXd weights;  // N, nonnegative
    std::string label;
    double mass() const { return weights.size() ? weights.sum() : 0.0; }
    int size() const { return static_cast<int>(weights.size()); }
};

struct PotentialField {
    DiscreteMeasure measure;
    CapacityProfile profile;
};

// G mu (x) = sum_i w_i g(|x - p_i|); +inf on support points of positive weight
double potential_eval(const PotentialField& field, const Eigen::VectorXd& x);

// int_0^rho s^(d-1) g(s) ds (closed form where available)
double g_primitive(const CapacityProfile& p, double rho);

// potential of normalized Lebesgue measure on Q at x, relative accuracy tol
double cube_potential(const Cube& Q, const CapacityProfile& p,
                      const Eigen::VectorXd& x, double tol = 1e-3);

// nonnegative weights with G mu = 1 on the support (projected Gauss-Seidel
// on the collocation system, cell-averaged diagonal); throws if the final
// residual max_i |G mu(p_i) - 1| exceeds 0.05
DiscreteMeasure equilibrium_solve(const Eigen::MatrixXd& support,
                                  const CapacityProfile& p, double reg = 0.0,
                                  double* residual_out = nullptr);

// probability of hitting B(0,s) before exiting B(0,R), started at |x| = t;
// R = infinity for whole space (d >= 3 only)
double radial_hitting_closed_form(const CapacityProfile& p, double s, double R,
                                  double t);

// support cloud for B(0,r): sphere net for classical d=3 (equilibrium measure
// is the surface measure), graded solid mesh for riesz d=2 (interior density)
Eigen::MatrixXd ball_support(const CapacityProfile& p, double r, int resolution,
                             std::uint64_t seed = 1);

} // namespace ptk
