#include "cma/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "cma/kernels.hpp"
#include "cma/sweep.hpp"

namespace cma {

GridFunction relative_extremal(const std::vector<int32_t>& E, const DomainPtr& domain,
                               const CapacityOptions& opt) {
    const GridDomain& d = *domain;
    if (E.empty()) throw ConfigError("relative_extremal: empty set");
    for (int32_t p : E)
        if (!d.is_interior(p)) throw ConfigError("relative_extremal: E must be interior");

    std::vector<double> obstacle(d.size(), 0.0);
    for (int32_t p : E) obstacle[p] = -1.0;

    // start from the obstacle indicator, a supersolution; sweeps lower values
    GridFunction v(domain, 0.0);
    for (int32_t p : E) v[p] = -1.0;

    const double h2 = d.h * d.h;
    const Herm2 zero_g = Herm2{0.0, 0.0, cplx{0, 0}, d.n};
    auto update = [&](int64_t p, const double* uv) -> NodeTarget {
        const Herm2 A0 = hessian_off_center(d, zero_g, uv, p);
        const double t = std::max(-1.0, std::min(obstacle[p], h2 * A0.eig_min()));
        return NodeTarget{t, t};
    };

    SweepOptions so;
    so.omega = (opt.omega > 0) ? opt.omega : auto_omega(d);
    so.max_sweeps = opt.max_sweeps;
    so.threads = opt.threads;
    so.change_tol = (opt.tol > 0) ? opt.tol : 1e-9;

    ActiveSet act = ActiveSet::whole_domain(d);
    sweep_to_fixed_point(act, v.values(), update, so, nullptr, "relative_extremal");
    for (int32_t p : d.interior) v[p] = std::min(0.0, std::max(-1.0, v[p]));
    return v;
}

CapacityEstimate bt_capacity(const std::vector<int32_t>& E, const DomainPtr& domain,
                             const CapacityOptions& opt) {
    CapacityEstimate est;
    est.set_nodes = E;
    if (E.empty()) {
        est.extremal = GridFunction(domain, 0.0);
        est.value = 0.0;
        return est;
    }
    est.extremal = relative_extremal(E, domain, opt);
    HermitianMetricField zg = HermitianMetricField::zero(domain);
    MeasureField ma = ma_density(est.extremal, zg, 1e-7);
    est.value = ma.total_mass();
    return est;
}

E0Report check_E0_membership(const GridFunction& v, const GridDomain& domain, double tol_b) {
    E0Report r;
    if (tol_b <= 0) tol_b = 3.0 * domain.h * std::max(1.0, v.osc());
    DomainPtr dp = v.domain_ptr();
    HermitianMetricField zg = HermitianMetricField::zero(dp);
    const double cone_tol = 1e-6 + 1e-10 * v.osc() / (domain.h * domain.h);
    r.psh_ok = is_omega_psh(v, zg, cone_tol).ok;
    r.nonpositive_ok = true;
    for (int32_t p : domain.interior)
        if (v[p] > 1e-12) r.nonpositive_ok = false;
    for (int32_t p : domain.boundary)
        r.boundary_defect = std::max(r.boundary_defect, std::abs(v[p]));
    r.total_mass = ma_density(v, zg, 1e-7).total_mass();
    r.ok = r.psh_ok && r.nonpositive_ok && r.boundary_defect <= tol_b &&
           std::isfinite(r.total_mass);
    return r;
}

DominationReport check_local_domination(const MeasureField& mu, const GridDomain& domain,
                                        const std::vector<CoordinateBall>& cover) {
    DominationReport rep;
    rep.ok = true;
    const double coef = ma_coef(domain.n);
    double cell = 1.0;
    for (int a = 0; a < domain.real_dim(); ++a) cell *= domain.h;

    for (const auto& ball : cover) {
        DominationWitness w;
        w.ball = ball;
        double sup_dens = 0.0;
        std::vector<int32_t> inside;
        for (int32_t p : domain.interior) {
            const Point z = domain.point(p);
            double r2 = 0;
            for (int a = 0; a < 4; ++a) r2 += (z[a] - ball.center[a]) * (z[a] - ball.center[a]);
            if (r2 <= ball.radius * ball.radius) {
                inside.push_back(p);
                sup_dens = std::max(sup_dens, mu.density(p));
            }
        }
        const double A = std::pow(sup_dens / coef, 1.0 / domain.n);
        w.coefficient = A;
        w.ok = true;
        // v = A(|z-c|^2 - r^2) has (dd^c v)^n density coef * A^n >= sup density
        const double budget = coef * std::pow(A, domain.n);
        for (int32_t p : inside)
            if (mu.density(p) > budget * (1 + 1e-12)) {
                w.ok = false;
                w.detail = "density exceeds the quadratic witness";
            }
        for (const auto& [node, mass] : mu.atoms()) {
            const Point z = domain.point(node);
            double r2 = 0;
            for (int a = 0; a < 4; ++a) r2 += (z[a] - ball.center[a]) * (z[a] - ball.center[a]);
            if (r2 > ball.radius * ball.radius) continue;
            if (mass > budget * cell * (1 + 1e-12)) {  // cell-mass comparison
                w.ok = false;
                w.detail = "atom of mass " + std::to_string(mass) +
                           " exceeds the cell budget " + std::to_string(budget * cell);
            }
        }
        if (!w.ok) rep.ok = false;
        rep.witnesses.push_back(std::move(w));
    }
    return rep;
}

double hessian_energy(const GridFunction& u, const GridFunction& v, int k,
                      const HermitianMetricField& g, const GridDomain& domain) {
    if (k < 0 || k > domain.n) throw ConfigError("hessian_energy: k out of range");
    MeasureField mix = mixed_density(u, k, g);
    double cell = 1.0;
    for (int a = 0; a < domain.real_dim(); ++a) cell *= domain.h;
    std::vector<double> terms;
    terms.reserve(domain.interior.size());
    for (int32_t p : domain.interior) terms.push_back(std::abs(u[p] - v[p]) * mix.density(p));
    return cell * pairwise_sum(terms);
}

std::vector<double> capacity_convergence(const std::vector<GridFunction>& u_seq,
                                         const GridFunction& u, double eps,
                                         const DomainPtr& domain, const CapacityOptions& opt) {
    const GridDomain& d = *domain;
    // strict inequality with a guard band against grid chattering
    const double band = eps + 1e-9 * (u.osc() + 1.0);
    std::vector<double> out;
    for (const auto& uj : u_seq) {
        std::vector<int32_t> E;
        for (int32_t p : d.interior)
            if (std::abs(uj[p] - u[p]) > band) E.push_back(p);
        out.push_back(bt_capacity(E, domain, opt).value);
    }
    return out;
}

}  // namespace cma
