#include "ptk/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ptk {

double covering_sum(const Cover& cover, const MeasureFunction& phi) {
    double s = 0.0;
    for (const auto& [c, r] : cover.balls) {
        if (!(r > 0) || !(r < cover.rho))
            throw std::invalid_argument("covering_sum: radius outside (0, rho)");
        s += phi.phi(r);
    }
    return s;
}

std::vector<std::pair<long long, double>> natural_cover_counts(const CantorRun& run) {
    std::vector<std::pair<long long, double>> out;
    long long M = 1;
    for (const auto& c : run.certs) {
        // step m refines the M cubes of F_m into M n^d cubes of scale r; each
        // fits in a ball of radius r
        long long nd = 1;
        for (int k = 0; k < c.d; ++k) nd *= c.n;
        M *= nd;
        out.emplace_back(M, c.r);
    }
    return out;
}

std::vector<ContentPoint> content_upper_profile(const CantorRun& run,
                                                const MeasureFunction& phi) {
    std::vector<ContentPoint> out;
    auto covers = natural_cover_counts(run);
    for (std::size_t i = 0; i < covers.size(); ++i) {
        const auto& [N, r] = covers[i];
        out.push_back({1.0 / double(run.certs[i].m), double(N) * phi.phi(r)});
    }
    return out;
}

std::string content_profile_csv(const std::vector<ContentPoint>& profile) {
    std::ostringstream os;
    os.precision(17);
    os << "rho,bound\n";
    for (const auto& p : profile) os << p.rho << "," << p.bound << "\n";
    return os.str();
}

double dim_upper_fit(const std::vector<std::pair<long long, double>>& levels,
                     const std::vector<double>& grid, bool* bounded) {
    if (levels.size() < 3)
        throw std::invalid_argument("dim_upper_fit: need at least 3 levels");
    if (grid.empty()) throw std::invalid_argument("dim_upper_fit: empty grid");
    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());

    auto log_sum = [&](std::size_t i, double gamma) {
        return std::log(double(levels[i].first)) + gamma * std::log(levels[i].second);
    };
    for (double gamma : sorted) {
        double cap_log = std::log(2.5) + std::max(log_sum(0, gamma), 0.0);
        bool ok = true;
        for (std::size_t i = 1; i < levels.size() && ok; ++i)
            ok = log_sum(i, gamma) <= cap_log;
        if (ok) {
            if (bounded) *bounded = true;
            return gamma;
        }
    }
    if (bounded) *bounded = false;
    return sorted.back();
}

std::vector<double> exponent_grid(double lo, double hi, double step) {
    if (!(step > 0) || !(hi >= lo))
        throw std::invalid_argument("exponent_grid: bad range");
    std::vector<double> g;
    for (double x = lo; x <= hi + 0.5 * step; x += step) g.push_back(x);
    return g;
}

} // namespace ptk
