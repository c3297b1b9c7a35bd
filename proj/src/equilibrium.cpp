#include "ptk/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ptk/quadrature.hpp"
#include "ptk/rng.hpp"

namespace ptk {

double potential_eval(const PotentialField& field, const Eigen::VectorXd& x) {
    const auto& m = field.measure;
    double sum = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        if (m.weights[i] == 0.0) continue;
        double r = (m.points.row(i).transpose() - x).norm();
        if (r == 0.0) return std::numeric_limits<double>::infinity();
        sum += m.weights[i] * g_eval(field.profile, r);
    }
    return sum;
}

double g_primitive(const CapacityProfile& p, double rho) {
    switch (p.kind) {
    case Kind::classical:
        return 0.5 * rho * rho;
    case Kind::riesz:
        return std::pow(rho, p.alpha) / p.alpha;
    case Kind::logarithmic:
        return 0.5 * rho * rho * (std::log(1.0 / rho) + 0.5);
    default: {
        double out;
        if (!integrate([&](double s) { return std::pow(s, p.d - 1) * g_eval(p, s); },
                       rho * 1e-8, rho, out, 1e-8))
            throw std::runtime_error("g_primitive: quadrature failed");
        return out;
    }
    }
}

namespace {

double surface_const(int d) {
    return d == 1 ? 2.0 : d == 2 ? 2.0 * M_PI : 4.0 * M_PI;
}

// integral (not average) of g(|x-y|) over the cube, tensor Gauss rule
double gauss_cell(const CapacityProfile& p, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& center, double a, int n) {
    int d = static_cast<int>(center.size());
    std::vector<double> nodes, w;
    gauss_legendre(n, nodes, w);
    double h = 0.5 * a / std::sqrt(double(d));
    std::vector<int> idx(d, 0);
    Eigen::VectorXd y(d);
    double sum = 0.0;
    for (;;) {
        double wt = 1.0;
        for (int k = 0; k < d; ++k) {
            y[k] = center[k] + h * nodes[idx[k]];
            wt *= w[idx[k]] * h;
        }
        sum += wt * g_eval(p, (x - y).norm());
        int k = 0;
        while (k < d && ++idx[k] >= n) idx[k++] = 0;
        if (k == d) break;
    }
    return sum;
}

} // namespace

double cube_potential(const Cube& Q, const CapacityProfile& p,
                      const Eigen::VectorXd& x, double tol) {
    if (tol <= 0) throw std::invalid_argument("cube_potential: tol > 0");
    int d = Q.dim();
    double side = Q.a / std::sqrt(double(d));
    double vol = std::pow(side, d);
    double dist = cube_distance(Q, x);
    double rough =
        vol * std::max(std::abs(g_eval(p, std::max(dist, 0.25 * Q.a))), 1e-30);
    double budget = tol * rough;

    struct Cell {
        Eigen::VectorXd c;
        double a;
    };
    std::vector<Cell> stack{{Q.center, Q.a}};
    double total = 0.0;
    long cells = 0;
    while (!stack.empty()) {
        if (++cells > 400000)
            throw std::runtime_error("cube_potential: refinement budget exhausted");
        Cell cell = stack.back();
        stack.pop_back();
        double cvol = std::pow(cell.a / std::sqrt(double(d)), d);
        Cube cc{cell.c, cell.a};
        double dc = cube_distance(cc, x);
        if (dc <= 0.75 * cell.a) {
            // singular or near-singular: bound the cell by the ball integral
            double rho = 0.0;  // far-corner distance: cell fits in B(x, rho)
            double h = cc.half_side();
            for (int k = 0; k < d; ++k) {
                double e = std::abs(cell.c[k] - x[k]) + h;
                rho += e * e;
            }
            rho = std::sqrt(rho);
            double sbound = surface_const(d) * g_primitive(p, rho);
            if (sbound <= 0.1 * budget) {
                total += dc > 0.0
                             ? std::min(gauss_cell(p, x, cell.c, cell.a, 4), sbound)
                             : 0.5 * sbound;
                continue;
            }
        } else {
            double e2 = gauss_cell(p, x, cell.c, cell.a, 2);
            double e4 = gauss_cell(p, x, cell.c, cell.a, 4);
            // relative per-cell acceptance keeps the total relative error
            // near tol; the absolute floor handles sign changes of log g
            if (std::abs(e4 - e2) <=
                0.5 * tol * std::abs(e4) + 1e-3 * budget * (cvol / vol)) {
                total += e4;
                continue;
            }
        }
        double half = 0.5 * cell.a;
        double hs = 0.5 * cell.a / std::sqrt(double(d));
        std::vector<int> idx(d, 0);
        for (;;) {
            Eigen::VectorXd c = cell.c;
            for (int k = 0; k < d; ++k) c[k] += hs * (idx[k] - 0.5);
            stack.push_back({c, half});
            int k = 0;
            while (k < d && ++idx[k] >= 2) idx[k++] = 0;
            if (k == d) break;
        }
    }
    return total / vol;
}

DiscreteMeasure equilibrium_solve(const Eigen::MatrixXd& support,
                                  const CapacityProfile& p, double reg,
                                  double* residual_out) {
    const int n = static_cast<int>(support.rows());
    if (n < 2) throw std::invalid_argument("equilibrium_solve: need >= 2 points");
    if (reg < 0) throw std::invalid_argument("equilibrium_solve: reg >= 0");

    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd spacing(n);
    for (int i = 0; i < n; ++i) {
        double nn = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double r = (support.row(i) - support.row(j)).norm();
            A(i, j) = g_eval(p, r);
            nn = std::min(nn, r);
        }
        spacing[i] = nn;
    }
    for (int i = 0; i < n; ++i) {
        double rho = 0.5 * spacing[i];
        A(i, i) = p.d * g_primitive(p, rho) / std::pow(rho, p.d) + reg;
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd Aw = Eigen::VectorXd::Zero(n);
    double res = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < 10000; ++sweep) {
        for (int i = 0; i < n; ++i) {
            double wi = std::max(0.0, w[i] + (1.0 - Aw[i]) / A(i, i));
            double dw = wi - w[i];
            if (dw != 0.0) {
                Aw += dw * A.col(i);
                w[i] = wi;
            }
        }
        res = 0.0;
        for (int i = 0; i < n; ++i)
            if (w[i] > 0 || Aw[i] < 1.0) res = std::max(res, std::abs(Aw[i] - 1.0));
        if (res < 0.01) break;
    }
    if (residual_out) *residual_out = res;
    if (res > 0.05)
        throw std::runtime_error("equilibrium_solve: residual " + std::to_string(res) +
                                 " above 0.05");
    return {support, w, "equilibrium"};
}

double radial_hitting_closed_form(const CapacityProfile& p, double s, double R,
                                  double t) {
    if (!(0 < s && s <= t && t <= R))
        throw std::invalid_argument("radial_hitting_closed_form: need 0 < s <= t <= R");
    if (t == s) return 1.0;
    if (std::isinf(R)) {
        if (p.kind != Kind::classical || p.d < 3)
            throw std::invalid_argument(
                "radial_hitting_closed_form: whole space needs classical d >= 3");
        return std::pow(s / t, p.d - 2);
    }
    if (t == R) return 0.0;
    if (p.d == 2)
        return std::log(R / t) / std::log(R / s);
    return (std::pow(t, 2.0 - p.d) - std::pow(R, 2.0 - p.d)) /
           (std::pow(s, 2.0 - p.d) - std::pow(R, 2.0 - p.d));
}

Eigen::MatrixXd ball_support(const CapacityProfile& p, double r, int resolution,
                             std::uint64_t seed) {
    if (p.kind == Kind::classical && p.d == 3) {
        // sphere surface, Fibonacci lattice
        int n = resolution;
        Eigen::MatrixXd pts(n, 3);
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        Rng rng(seed, 17);
        double phase = rng.uniform() * 2.0 * M_PI;
        for (int i = 0; i < n; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / n;
            double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            double a = ga * i + phase;
            pts.row(i) << r * rho * std::cos(a), r * rho * std::sin(a), r * z;
        }
        return pts;
    }
    if ((p.kind == Kind::riesz || p.kind == Kind::logarithmic) && p.d == 2) {
        // graded polar mesh, denser toward the rim where the density peaks
        int K = resolution;
        std::vector<Eigen::Vector2d> pts;
        Rng rng(seed, 23);
        for (int k = 0; k < K; ++k) {
            double u = (k + 0.5) * 0.5 * M_PI / K;
            double s = r * std::sin(u);
            double dr = r * (0.5 * M_PI / K) * std::cos(u);
            int m = std::clamp(static_cast<int>(std::lround(2.0 * M_PI * s / dr)), 6,
                               8 * K);
            double phase = rng.uniform() * 2.0 * M_PI;
            for (int j = 0; j < m; ++j) {
                double a = phase + 2.0 * M_PI * j / m;
                pts.emplace_back(s * std::cos(a), s * std::sin(a));
            }
        }
        Eigen::MatrixXd out(pts.size(), 2);
        for (std::size_t i = 0; i < pts.size(); ++i) out.row(i) = pts[i];
        return out;
    }
    throw std::invalid_argument("ball_support: unsupported profile/dimension");
}

} // namespace ptk
