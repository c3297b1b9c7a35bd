#include "ptk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptk/quadrature.hpp"

namespace ptk {

double RadialTable::eval(double r) const {
    if (log_r.empty()) throw std::runtime_error("radial table not initialized");
    double lr = std::log(r);
    if (log_r.size() == 1) return std::exp(log_g[0]);
    std::size_t hi = std::upper_bound(log_r.begin(), log_r.end(), lr) - log_r.begin();
    if (hi == 0) hi = 1;
    if (hi >= log_r.size()) hi = log_r.size() - 1;
    std::size_t lo = hi - 1;
    double t = (lr - log_r[lo]) / (log_r[hi] - log_r[lo]);
    return std::exp(log_g[lo] + t * (log_g[hi] - log_g[lo]));
}

std::string CapacityProfile::name() const {
    switch (kind) {
    case Kind::classical: return "classical(d=" + std::to_string(d) + ")";
    case Kind::logarithmic: return "logarithmic";
    case Kind::riesz:
        return "riesz(d=" + std::to_string(d) + ",alpha=" + std::to_string(alpha) + ")";
    default: return "radial(d=" + std::to_string(d) + ")";
    }
}

CapacityProfile make_classical(int d) {
    if (d < 3) throw std::invalid_argument("classical profile needs d >= 3");
    CapacityProfile p;
    p.kind = Kind::classical;
    p.d = d;
    p.alpha = 2.0;
    p.c = 1.0;
    p.C_D = std::pow(2.0, d - 2);
    p.r0 = 1.0;
    return p;
}

CapacityProfile make_logarithmic(double eta, double r0_user) {
    if (eta <= 0) throw std::invalid_argument("eta must be positive");
    CapacityProfile p;
    p.kind = Kind::logarithmic;
    p.d = 2;
    p.alpha = 2.0;
    p.eta = eta;
    p.c = 1.0 + eta;
    p.r0 = std::min(r0_user, std::exp(-1.0 / eta));
    return p;
}

CapacityProfile make_riesz(int d, double alpha) {
    if (alpha <= 0 || alpha >= std::min(double(d), 2.0))
        throw std::invalid_argument("riesz needs 0 < alpha < min(d,2)");
    CapacityProfile p;
    p.kind = Kind::riesz;
    p.d = d;
    p.alpha = alpha;
    p.c = 1.0;
    p.C_D = std::pow(2.0, d - alpha);
    p.r0 = 1.0;
    return p;
}

CapacityProfile make_radial(int d, const std::vector<std::pair<double, double>>& knots,
                            double r0) {
    if (knots.size() < 2) throw std::invalid_argument("radial table needs >= 2 knots");
    CapacityProfile p;
    p.kind = Kind::radial;
    p.d = d;
    p.r0 = r0;
    double prev_g = std::numeric_limits<double>::infinity();
    for (auto& [r, g] : knots) {
        if (r <= 0 || g <= 0) throw std::invalid_argument("radial knots must be positive");
        if (!p.g_table.log_r.empty() && std::log(r) <= p.g_table.log_r.back())
            throw std::invalid_argument("radial knots must have increasing r");
        if (g >= prev_g) throw std::invalid_argument("radial g must be decreasing");
        prev_g = g;
        p.g_table.log_r.push_back(std::log(r));
        p.g_table.log_g.push_back(std::log(g));
    }
    return p;
}

double cap_eval(const CapacityProfile& p, double r) {
    if (r <= 0) throw std::invalid_argument("cap_eval: r must be positive");
    switch (p.kind) {
    case Kind::classical:
        return std::pow(r, p.d - 2);
    case Kind::logarithmic:
        if (r >= 1.0) throw std::invalid_argument("cap_eval: logarithmic needs r < 1");
        return 1.0 / std::log(1.0 / r);
    case Kind::riesz:
        return std::pow(r, p.d - p.alpha);
    default:
        return 1.0 / p.g_table.eval(r);
    }
}

double cap_inv(const CapacityProfile& p, double y) {
    if (y <= 0) throw std::invalid_argument("cap_inv: y must be positive");
    switch (p.kind) {
    case Kind::classical:
        return std::pow(y, 1.0 / (p.d - 2));
    case Kind::logarithmic:
        return std::exp(-1.0 / y);
    case Kind::riesz:
        return std::pow(y, 1.0 / (p.d - p.alpha));
    default: {
        double lo = std::exp(p.g_table.log_r.front()) * 1e-6;
        double hi = p.r0;
        if (cap_eval(p, hi) < y || cap_eval(p, lo) > y)
            throw std::invalid_argument("cap_inv: value out of table range");
        for (int it = 0; it < 200; ++it) {
            double mid = std::sqrt(lo * hi);
            (cap_eval(p, mid) < y ? lo : hi) = mid;
        }
        return std::sqrt(lo * hi);
    }
    }
}

double g_eval(const CapacityProfile& p, double r) {
    if (r <= 0) return std::numeric_limits<double>::infinity();
    switch (p.kind) {
    case Kind::classical:
        return std::pow(r, 2 - p.d);
    case Kind::logarithmic:
        return std::log(1.0 / r);
    case Kind::riesz:
        return std::pow(r, p.alpha - p.d);
    default:
        return p.g_table.eval(r);
    }
}

double kernel_eval(const CapacityProfile& p, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() != p.d)
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    return g_eval(p, (x - y).norm());
}

double validate_decay(const CapacityProfile& p, const std::vector<double>& r_grid) {
    if (p.kind != Kind::radial && p.kind != Kind::riesz && p.kind != Kind::classical)
        throw std::invalid_argument("validate_decay: radial-type profile required");
    double worst = 0.0;
    for (double r : r_grid) {
        if (r <= 0 || r > p.r0)
            throw std::invalid_argument("validate_decay: grid outside (0, r0]");
        // sum dyadic segments (r/2^(k+1), r/2^k); contributions of an
        // integrable singularity at 0 decay geometrically
        double total = 0.0;
        double prev = std::numeric_limits<double>::infinity();
        int flat = 0;
        bool converged = false;
        for (int k = 0; k < 4000; ++k) {
            double b = r * std::pow(0.5, k);
            double a = 0.5 * b;
            double seg;
            if (!integrate([&](double s) { return std::pow(s, p.d - 1) * g_eval(p, s); },
                           a, b, seg, 1e-10))
                throw std::runtime_error("validate_decay: quadrature failed");
            total += seg;
            if (seg < 1e-12 * total || b < 1e-280) { converged = true; break; }
            if (seg > 0.999 * prev) {
                if (++flat > 60)
                    throw std::runtime_error(
                        "validate_decay: integral of s^(d-1) g(s) diverges near 0");
            } else {
                flat = 0;
            }
            prev = seg;
        }
        if (!converged)
            throw std::runtime_error("validate_decay: integral did not converge");
        worst = std::max(worst, p.d * total / (std::pow(r, p.d) * g_eval(p, r)));
    }
    return worst;
}

double doubling_constant(const CapacityProfile& p, int grid_points) {
    double worst = 0.0;
    double lo = std::log(p.r0 * 1e-8), hi = std::log(p.r0);
    for (int i = 0; i < grid_points; ++i) {
        double r = std::exp(lo + (hi - lo) * (i + 0.5) / grid_points);
        worst = std::max(worst, cap_eval(p, r) / cap_eval(p, 0.5 * r));
    }
    return worst;
}

MeasureFunction phi_cap_over_log(const CapacityProfile& p) {
    CapacityProfile q = p;
    return {[q](double t) { return cap_eval(q, t) / std::log(1.0 / std::min(t, 0.999)); },
            "cap(t)/log(1/t)"};
}

MeasureFunction phi_cap_times_power(const CapacityProfile& p, double exponent) {
    CapacityProfile q = p;
    return {[q, exponent](double t) { return cap_eval(q, t) * std::pow(t, exponent); },
            "cap(t)*t^" + std::to_string(exponent)};
}

MeasureFunction phi_power(double exponent) {
    return {[exponent](double t) { return std::pow(t, exponent); },
            "t^" + std::to_string(exponent)};
}

double h_eval(const MeasureFunction& phi, const CapacityProfile& p, double t) {
    return phi.phi(t) / cap_eval(p, t);
}

double h_scan(const MeasureFunction& phi, const CapacityProfile& p, double eta,
              double t_max, double t_min) {
    if (eta <= 0) throw std::invalid_argument("h_scan: eta must be positive");
    for (double t = t_max; t > t_min; t *= 0.5)
        if (h_eval(phi, p, t) < eta) return t;
    throw std::runtime_error("h_scan: no t with h(t) < eta above the floor; "
                             "liminf h = 0 likely violated");
}

} // namespace ptk
