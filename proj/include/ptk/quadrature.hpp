#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ptk {

// Gauss-Kronrod 7-15 on [a,b]; err is a conservative error estimate.
template <class F>
double quad_g7k15(const F& f, double a, double b, double& err) {
    static const double nw[8][3] = {
        {0.000000000000000, 0.417959183673469, 0.209482141084728},
        {0.405845151377397, 0.381830050505119, 0.190350578064785},
        {0.741531185599394, 0.279705391489277, 0.140653259715525},
        {0.949107912342759, 0.129484966168870, 0.063092092629979},
        {0.207784955007898, 0.0,               0.204432940075298},
        {0.586087235467691, 0.0,               0.169004726639267},
        {0.864864423359769, 0.0,               0.104790010322250},
        {0.991455371120813, 0.0,               0.022935322010529}};

    const double x0 = 0.5 * (a + b);
    const double m = b - x0;

    double y0 = f(x0);
    double g7 = nw[0][1] * y0;
    double k15 = nw[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        double mx = m * nw[i][0];
        double yi = f(x0 + mx) + f(x0 - mx);
        g7 += nw[i][1] * yi;
        k15 += nw[i][2] * yi;
    }
    g7 *= m;
    k15 *= m;
    err = 200.0 * std::fabs(g7 - k15);
    err *= std::sqrt(err);
    return k15;
}

// Adaptive bisection driver. Returns false if the interval budget is
// exhausted before reaching the tolerance (e.g. non-integrable singularity).
template <class F>
bool integrate(const F& f, double a, double b, double& out,
               double rel_tol = 1e-9, double abs_tol = 1e-300,
               int max_intervals = 4000) {
    std::vector<std::pair<double, double>> stack;
    stack.reserve(64);
    stack.emplace_back(a, b);
    double sum = 0.0;
    int used = 1;
    while (!stack.empty()) {
        auto [ai, bi] = stack.back();
        stack.pop_back();
        double err;
        double s = quad_g7k15(f, ai, bi, err);
        if (err < rel_tol * std::fabs(s) || err < abs_tol ||
            bi - ai < 1e-15 * std::fabs(bi)) {
            sum += s;
            continue;
        }
        if (used + 2 > max_intervals) return false;
        double mid = 0.5 * (ai + bi);
        stack.emplace_back(ai, mid);
        stack.emplace_back(mid, bi);
        used += 2;
    }
    out = sum;
    return true;
}

// Nodes/weights of the n-point Gauss-Legendre rule on [-1,1], n <= 8.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    switch (n) {
    case 1:
        x = {0.0};
        w = {2.0};
        break;
    case 2:
        x = {-0.5773502691896257, 0.5773502691896257};
        w = {1.0, 1.0};
        break;
    case 3:
        x = {-0.7745966692414834, 0.0, 0.7745966692414834};
        w = {0.5555555555555556, 0.8888888888888888, 0.5555555555555556};
        break;
    case 4:
        x = {-0.8611363115940526, -0.3399810435848563,
             0.3399810435848563, 0.8611363115940526};
        w = {0.3478548451374538, 0.6521451548625461,
             0.6521451548625461, 0.3478548451374538};
        break;
    default:
        x = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
             -0.1834346424956498, 0.1834346424956498, 0.5255324099163290,
             0.7966664774136267, 0.9602898564975363};
        w = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
             0.2223810344533745, 0.1012285362903763};
        break;
    }
}

} // namespace ptk
