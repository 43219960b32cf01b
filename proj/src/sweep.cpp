#include "cma/sweep.hpp"

namespace cma {

ActiveSet ActiveSet::whole_domain(const GridDomain& d) {
    ActiveSet a;
    a.dom = &d;
    a.nodes = d.interior;
    a.colors = d.colors;
    a.num_colors = d.num_colors;
    return a;
}

ActiveSet ActiveSet::from_nodes(const GridDomain& d, std::vector<int32_t> nodes) {
    ActiveSet a;
    a.dom = &d;
    std::sort(nodes.begin(), nodes.end());
    a.nodes = std::move(nodes);
    a.num_colors = d.num_colors;
    for (int32_t idx : a.nodes) {
        auto c = d.coords(idx);
        int col = (c[0] + c[1]) & 1;
        if (d.n == 2) col |= ((c[2] + c[3]) & 1) << 1;
        a.colors[col].push_back(idx);
    }
    return a;
}

double solve_center_det(const Herm2& A0, double h2, double target) {
    // t = c / h^2; on the cone t <= lambda_min(A0) and det(A0 - t I) decreases in t
    const double lmin = A0.eig_min();
    if (target <= 0.0) return h2 * lmin;

    if (A0.n == 1) return h2 * (A0.a11 - target);  // linear map, exact

    const double q = std::norm(A0.a12);
    auto f = [&](double t) { return (A0.a11 - t) * (A0.a22 - t) - q - target; };
    auto fp = [&](double t) { return 2.0 * t - A0.a11 - A0.a22; };

    double hi = lmin;  // f(hi) = -target < 0
    double step = std::max({1.0, std::abs(lmin), std::sqrt(target)});
    double lo = hi - step;
    int guard = 0;
    while (f(lo) < 0.0) {
        step *= 2.0;
        lo = hi - step;
        if (++guard > 200)
            throw SolveError("bisection bracket failure: non-monotone configuration");
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 80; ++it) {
        const double ft = f(t);
        if (ft > 0.0)
            lo = t;
        else
            hi = t;
        if (hi - lo <= 1e-15 * (1.0 + std::abs(hi))) break;
        const double d = fp(t);
        double tn = (d != 0.0) ? t - ft / d : t;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) <= 1e-16 * (1.0 + std::abs(t))) {
            t = tn;
            break;
        }
        t = tn;
    }
    return h2 * t;
}

}  // namespace cma
