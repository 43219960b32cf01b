#include "cma/verify.hpp"

#include <algorithm>
#include <cmath>

#include "cma/kernels.hpp"

namespace cma {

ComparisonCertificate local_cp_certificate(const GridFunction& u, const GridFunction& v,
                                           double theta, const HermitianMetricField& g,
                                           const GridDomain& domain, double B, int num_levels) {
    ComparisonCertificate cert;
    cert.theta = theta;
    if (B < 0) B = metric_bound_B(g, domain);
    cert.B = B;

    // hypotheses: u >= v on the boundary, sup(v-u) > 0, omega + dd^c v >= theta omega
    const double scale = u.osc() + v.osc() + 1e-12;
    for (int32_t p : domain.boundary)
        if (u[p] < v[p] - 1e-10 * scale) {
            cert.hypothesis_note = "u < v at a boundary node";
            return cert;
        }
    double sup_vu = -std::numeric_limits<double>::infinity();
    for (int32_t p : domain.interior) sup_vu = std::max(sup_vu, v[p] - u[p]);
    if (!(sup_vu > 0)) {
        cert.hypothesis_note = "sup(v-u) <= 0; certificate trivially empty";
        return cert;
    }
    {
        const double cone_tol =
            1e-6 * (1.0 + g.lambda_max()) + 1e-10 * v.osc() / (domain.h * domain.h);
        const double* vv = v.values().data();
        for (int32_t p : domain.interior) {
            Herm2 A = hessian_at(domain, vv, p);
            const Herm2 gm = g.at(p);
            A.a11 += (1.0 - theta) * gm.a11;
            A.a22 += (1.0 - theta) * gm.a22;
            A.a12 += (1.0 - theta) * gm.a12;
            if (A.eig_min() < -cone_tol) {
                cert.hypothesis_note = "omega + dd^c v >= theta omega fails at node " +
                                       std::to_string(p);
                return cert;
            }
        }
    }
    cert.hypotheses_ok = true;
    cert.s0 = -sup_vu;
    const double thn = std::pow(theta, domain.n);
    cert.theta0 = (B > 0) ? std::min(thn / (16.0 * B), sup_vu) : sup_vu;

    MeasureField dv = ma_density(v, g);
    MeasureField du = ma_density(u, g);
    double cell = 1.0;
    for (int a = 0; a < domain.real_dim(); ++a) cell *= domain.h;

    const double inf_cn = std::numeric_limits<double>::infinity();
    cert.fitted_cn = 0.0;
    cert.all_pass = true;
    for (int i = 1; i <= num_levels; ++i) {
        ComparisonCertificate::Level lev;
        lev.s = cert.theta0 * double(i) / double(num_levels + 1);
        const double thresh = cert.s0 + lev.s;
        std::vector<double> mv, mu_;
        for (int32_t p : domain.interior)
            if (u[p] < v[p] + thresh) {
                mv.push_back(dv.density(p));
                mu_.push_back(du.density(p));
                ++lev.set_size;
            }
        for (int32_t p : domain.boundary)
            if (u[p] < v[p] + thresh) lev.boundary_clean = false;
        lev.mass_v = cell * pairwise_sum(mv);
        lev.mass_u = cell * pairwise_sum(mu_);

        if (lev.mass_v <= lev.mass_u * (1.0 + 1e-12) + 1e-300) {
            lev.required_cn = 0.0;
        } else if (B > 0 && lev.mass_u > 0) {
            lev.required_cn = (lev.mass_v / lev.mass_u - 1.0) * thn / (lev.s * B);
        } else {
            lev.required_cn = inf_cn;  // B = 0 demands the factor-1 inequality
        }
        if (lev.required_cn > 1e6) {
            cert.alarm = true;
            cert.all_pass = false;
        } else {
            cert.fitted_cn = std::max(cert.fitted_cn, lev.required_cn);
        }
        cert.levels.push_back(lev);
    }
    return cert;
}

ComparisonTestReport comparison_test(const DirichletProblem& small_measure,
                                     const DirichletProblem& large_measure,
                                     const SolverOptions& opt) {
    if (!small_measure.mu.leq(large_measure.mu, 1e-12))
        throw PreconditionError("comparison_test: mu <= nu violated");
    ComparisonTestReport rep;
    SolveReport r1, r2;
    rep.u_small = picard_solve(small_measure, opt, &r1);
    rep.u_large = picard_solve(large_measure, opt, &r2);
    const GridDomain& d = *small_measure.domain;
    rep.tol_cmp = resolve_tol_cmp(opt, small_measure.phi, d, rep.u_small.osc());
    for (int32_t p : d.interior)
        rep.max_violation = std::max(rep.max_violation, rep.u_large[p] - rep.u_small[p]);
    rep.pass = rep.max_violation <= rep.tol_cmp;
    return rep;
}

namespace {

// max over grid balls of the average of (w dmu) over the ball
double ball_average_gap(const GridDomain& d, const std::vector<double>& w,
                        const MeasureField& mu) {
    double worst = 0.0;
    for (double radius : {4.0 * d.h, 8.0 * d.h}) {
        const int span = int(radius / d.h) + 1;
        const size_t cstep = (d.n == 2) ? 2 : 1;
        for (size_t ci = 0; ci < d.interior.size(); ci += cstep) {
            const int32_t c = d.interior[ci];
            const auto cc = d.coords(c);
            double acc = 0.0;
            int64_t cnt = 0;
            for (int i3 = -((d.n == 2) ? span : 0); i3 <= ((d.n == 2) ? span : 0); ++i3)
                for (int i2 = -((d.n == 2) ? span : 0); i2 <= ((d.n == 2) ? span : 0); ++i2)
                    for (int i1 = -span; i1 <= span; ++i1)
                        for (int i0 = -span; i0 <= span; ++i0) {
                            const int j0 = cc[0] + i0, j1 = cc[1] + i1;
                            const int j2 = cc[2] + i2, j3 = cc[3] + i3;
                            if (j0 < 0 || j0 >= d.dims[0] || j1 < 0 || j1 >= d.dims[1]) continue;
                            if (j2 < 0 || j2 >= d.dims[2] || j3 < 0 || j3 >= d.dims[3]) continue;
                            const double r2 = double(i0) * i0 + double(i1) * i1 +
                                              double(i2) * i2 + double(i3) * i3;
                            if (r2 * d.h * d.h > radius * radius) continue;
                            const int64_t q = d.index(j0, j1, j2, j3);
                            if (!d.is_interior(q)) continue;
                            acc += w[q] * mu.density(q);
                            ++cnt;
                        }
            if (cnt > 0) worst = std::max(worst, std::abs(acc) / double(cnt));
        }
    }
    return worst;
}

}  // namespace

StabilityReport stability_test(const std::vector<GridFunction>& f_seq, const GridFunction& f_limit,
                               const MeasureField& mu_base, const BoundaryData& phi,
                               const HermitianMetricField& g, const DomainPtr& domain,
                               const SolverOptions& opt) {
    const GridDomain& d = *domain;
    for (const auto& f : f_seq)
        for (int32_t p : d.interior)
            if (f[p] < -1e-12 || f[p] > 1.0 + 1e-12)
                throw PreconditionError("stability_test: multipliers must lie in [0,1]");

    StabilityReport rep;
    MeasureField mu_lim(domain);
    for (int32_t p : d.interior) mu_lim.density(p) = f_limit[p] * mu_base.density(p);
    rep.limit_solution = solve_fixed_rhs(g, domain, mu_lim, phi, opt);

    for (const auto& fj : f_seq) {
        std::vector<double> wgap(d.size(), 0.0);
        MeasureField mu_j(domain);
        for (int32_t p : d.interior) {
            mu_j.density(p) = fj[p] * mu_base.density(p);
            wgap[p] = fj[p] - f_limit[p];
        }
        rep.weak_gap.push_back(ball_average_gap(d, wgap, mu_base));
        GridFunction uj = solve_fixed_rhs(g, domain, mu_j, phi, opt);
        rep.sup_diff.push_back(uj.sup_diff(rep.limit_solution));

        // weak gap of MA(u_j) against f dmu
        MeasureField ma_j = ma_density(uj, g);
        std::vector<double> md(d.size(), 0.0);
        MeasureField ones(domain, 1.0);
        for (int32_t p : d.interior) md[p] = ma_j.density(p) - mu_lim.density(p);
        rep.ma_weak_gap.push_back(ball_average_gap(d, md, ones));

        std::vector<double> energies;
        for (int k = 0; k <= d.n; ++k)
            energies.push_back(hessian_energy(uj, rep.limit_solution, k, g, d));
        rep.hessian_energies.push_back(energies);
        rep.solutions.push_back(std::move(uj));
    }

    rep.cauchy_ok = true;
    for (size_t j = 1; j < rep.sup_diff.size(); ++j)
        if (rep.sup_diff[j] > rep.sup_diff[j - 1] + 1e-9) rep.cauchy_ok = false;
    const double tol_ma = resolve_tol_ma(opt, mu_base.sup_density());
    rep.residual_ok = !rep.ma_weak_gap.empty() &&
                      rep.ma_weak_gap.back() <= tol_ma + 2.0 * rep.weak_gap.back();
    return rep;
}

EnergyTerms energy_terms(const GridFunction& u, const GridFunction& v, const GridFunction& rho,
                         const HermitianMetricField& g, const GridDomain& domain) {
    DomainPtr dp = u.domain_ptr();
    HermitianMetricField zg = HermitianMetricField::zero(dp);
    MeasureField rho_ma = ma_density(rho, zg, 1e-7);      // (dd^c rho)^2
    MeasureField u_ma = ma_density(u, g);                 // omega_u^2
    MeasureField u_mix = mixed_density(u, 1, g);          // omega_u wedge omega
    MeasureField vol = mixed_density(u, 0, g);            // omega^2

    double cell = 1.0;
    for (int a = 0; a < domain.real_dim(); ++a) cell *= domain.h;
    std::vector<double> t_lhs, t_i1, t_i2, t_mix;
    for (int32_t p : domain.interior) {
        const double hv = std::max(0.0, v[p] - u[p]);
        t_lhs.push_back(hv * hv * hv * rho_ma.density(p));
        t_i1.push_back(hv * u_ma.density(p));
        t_i2.push_back(hv * hv * vol.density(p));
        t_mix.push_back(hv * u_mix.density(p));
    }
    EnergyTerms t;
    t.lhs = cell * pairwise_sum(t_lhs);
    t.i1 = cell * pairwise_sum(t_i1);
    t.i2 = cell * pairwise_sum(t_i2);
    t.e_term = std::sqrt(std::max(0.0, cell * pairwise_sum(t_mix))) * std::sqrt(std::max(0.0, t.i2));
    return t;
}

EnergyReport energy_inequality_test(const GridFunction& u, const GridFunction& v,
                                    const GridFunction& rho, const HermitianMetricField& g,
                                    const GridDomain& domain, double C) {
    EnergyReport rep;
    rep.C = C;
    if (domain.n != 2) {
        rep.pre_note = "n = 2 only";
        return rep;
    }
    // u <= v, u = v on a 2-node collar at the boundary, -1 <= rho <= 0 psh
    const double scale = u.osc() + v.osc() + 1e-12;
    for (int32_t p : domain.interior)
        if (u[p] > v[p] + 1e-10 * scale) {
            rep.pre_note = "u <= v fails";
            return rep;
        }
    {
        std::vector<uint8_t> collar(domain.size(), 0);
        for (int32_t b : domain.boundary)
            for (int64_t off : domain.stencil_offsets) {
                const int64_t q = b + off;
                if (q >= 0 && q < int64_t(domain.size())) collar[q] = 1;
            }
        for (int32_t p : domain.interior) {
            if (!collar[p]) continue;
            bool near2 = std::abs(u[p] - v[p]) <= 1e-10 * scale;
            for (int64_t off : domain.stencil_offsets) {
                const int64_t q = p + off;
                if (q >= 0 && q < int64_t(domain.size()) && domain.is_interior(q))
                    near2 = near2 && std::abs(u[q] - v[q]) <= 1e-10 * scale;
            }
            if (!near2) {
                rep.pre_note = "u = v fails on the boundary collar";
                return rep;
            }
        }
    }
    for (int32_t p : domain.interior)
        if (rho[p] < -1.0 - 1e-9 || rho[p] > 1e-9) {
            rep.pre_note = "-1 <= rho <= 0 fails";
            return rep;
        }
    {
        DomainPtr dp = u.domain_ptr();
        HermitianMetricField zg = HermitianMetricField::zero(dp);
        const double cone_tol = 1e-6 + 1e-10 * rho.osc() / (domain.h * domain.h);
        if (!is_omega_psh(rho, zg, cone_tol).ok) {
            rep.pre_note = "rho is not psh";
            return rep;
        }
    }
    rep.pre_ok = true;
    rep.terms = energy_terms(u, v, rho, g, domain);
    const double rhs = 6.0 * rep.terms.i1 + C * rep.terms.i2 + C * rep.terms.e_term;
    rep.margin = rhs - rep.terms.lhs;
    rep.pass = rep.margin >= 0.0;
    return rep;
}

DirichletProblem manufactured_problem(const GridFunction& u_star, const RhsFunction& F,
                                      const HermitianMetricField& g, const DomainPtr& domain,
                                      double tol_F) {
    const GridDomain& d = *domain;
    MeasureField ma = ma_density(u_star, g);
    MeasureField mu(domain);
    for (int32_t p : d.interior) {
        const double dens = ma.density(p);
        const double f = F.evaluate(u_star[p], p);
        if (dens <= 0.0) {
            mu.density(p) = 0.0;  // 0/0 resolved to 0
        } else if (f < tol_F) {
            throw ConfigError("manufactured_problem: division instability, F < tol_F where "
                              "the density is positive");
        } else {
            mu.density(p) = dens / f;
        }
    }
    DirichletProblem problem;
    problem.domain = domain;
    problem.g = g;
    problem.mu = std::move(mu);
    problem.F = F;
    problem.phi = BoundaryData::from_grid(u_star);
    problem.subsolution = u_star;
    return problem;
}

}  // namespace cma
