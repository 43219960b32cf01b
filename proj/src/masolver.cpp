#include "cma/masolver.hpp"

#include <algorithm>
#include <cmath>

#include "cma/kernels.hpp"
#include "cma/sweep.hpp"

namespace cma {

// --------------------------------------------------------------------------
// RhsFunction

RhsFunction RhsFunction::constant(double value) {
    if (value < 0) throw ConfigError("F must be nonnegative");
    RhsFunction f;
    f.kind_ = Kind::Constant;
    f.c0_ = value;
    f.m_f_ = value;
    return f;
}

RhsFunction RhsFunction::exponential(double lambda, double t_cap) {
    if (lambda < 0) throw ConfigError("exponential F requires lambda >= 0 to be non-decreasing");
    RhsFunction f;
    f.kind_ = Kind::Exponential;
    f.lambda_ = lambda;
    f.t_cap_ = t_cap;
    f.m_f_ = std::exp(lambda * t_cap);
    return f;
}

RhsFunction RhsFunction::tabulated(std::vector<double> t_grid, std::vector<double> values,
                                   std::vector<double> node_scale) {
    if (t_grid.size() < 2 || t_grid.size() != values.size())
        throw ConfigError("tabulated F needs matching t grid and values");
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw ConfigError("tabulated t grid must increase");
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0) throw ConfigError("F must be nonnegative");
        if (i > 0 && values[i] < values[i - 1])
            throw ConfigError("tabulated F must be non-decreasing in t");
    }
    RhsFunction f;
    f.kind_ = Kind::Tabulated;
    f.t_grid_ = std::move(t_grid);
    f.values_ = std::move(values);
    f.node_scale_ = std::move(node_scale);
    double smax = 1.0;
    for (double s : f.node_scale_) smax = std::max(smax, s);
    f.m_f_ = f.values_.back() * smax;
    return f;
}

bool RhsFunction::is_zero() const { return m_f_ == 0.0; }

double RhsFunction::evaluate(double t, int64_t node) const {
    switch (kind_) {
        case Kind::Constant:
            return c0_;
        case Kind::Exponential:
            return std::exp(lambda_ * std::min(t, t_cap_));
        case Kind::Tabulated: {
            double v;
            if (t <= t_grid_.front())
                v = values_.front();
            else if (t >= t_grid_.back())
                v = values_.back();
            else {
                const auto it = std::upper_bound(t_grid_.begin(), t_grid_.end(), t);
                const size_t i = size_t(it - t_grid_.begin());
                const double w = (t - t_grid_[i - 1]) / (t_grid_[i] - t_grid_[i - 1]);
                v = values_[i - 1] + w * (values_[i] - values_[i - 1]);
            }
            if (!node_scale_.empty()) v *= node_scale_[node];
            return v;
        }
    }
    return 0.0;
}

double RhsFunction::derivative(double t, int64_t node) const {
    switch (kind_) {
        case Kind::Constant:
            return 0.0;
        case Kind::Exponential:
            return (t < t_cap_) ? lambda_ * std::exp(lambda_ * t) : 0.0;
        case Kind::Tabulated: {
            if (t <= t_grid_.front() || t >= t_grid_.back()) return 0.0;
            const auto it = std::upper_bound(t_grid_.begin(), t_grid_.end(), t);
            const size_t i = size_t(it - t_grid_.begin());
            double s = (values_[i] - values_[i - 1]) / (t_grid_[i] - t_grid_[i - 1]);
            if (!node_scale_.empty()) s *= node_scale_[node];
            return s;
        }
    }
    return 0.0;
}

void RhsFunction::validate(const GridDomain& domain, double t_lo, double t_hi) const {
    auto sample_nodes = [&](const std::vector<int32_t>& list) {
        std::vector<int64_t> out;
        const size_t step = std::max<size_t>(1, list.size() / 16);
        for (size_t i = 0; i < list.size(); i += step) out.push_back(list[i]);
        return out;
    };
    std::vector<int64_t> nodes = sample_nodes(domain.interior);
    for (int64_t b : sample_nodes(domain.boundary)) nodes.push_back(b);
    const int pairs = 128;
    for (int64_t node : nodes)
        for (int i = 0; i < pairs; ++i) {
            const double t1 = t_lo + (t_hi - t_lo) * i / double(pairs);
            const double t2 = t_lo + (t_hi - t_lo) * (i + 1) / double(pairs);
            const double f1 = evaluate(t1, node), f2 = evaluate(t2, node);
            if (f1 < 0 || f2 < 0 || f1 > m_f_ * (1 + 1e-12) || f2 > m_f_ * (1 + 1e-12))
                throw ConfigError("F out of [0, M_F] during validation");
            if (f1 > f2 + 1e-12 * (1.0 + m_f_))
                throw ConfigError("F is not non-decreasing in t");
        }
}

// --------------------------------------------------------------------------
// tolerances

double resolve_tol_fix(const SolverOptions& o, const BoundaryData& phi) {
    if (o.tol_fix > 0) return o.tol_fix;
    return 1e-6 * phi.osc() + 1e-10;
}

double resolve_tol_cmp(const SolverOptions& o, const BoundaryData& phi, const GridDomain& d,
                       double solution_scale) {
    if (o.tol_cmp > 0) return o.tol_cmp;
    const double scale = std::max({phi.osc(), solution_scale, 1e-12});
    return std::max(10.0 * resolve_tol_fix(o, phi), 5.0 * d.h * scale);
}

double resolve_tol_ma(const SolverOptions& o, double sup_density) {
    if (o.tol_ma > 0) return o.tol_ma;
    return 1e-4 * (sup_density + 1.0);
}

// --------------------------------------------------------------------------
// shared MA sweep core

namespace {

struct MaTarget {
    // effective density the per-node solve matches: fixed part nu_eff, plus
    // optionally F(center)*mu_eff in the semi-implicit mode
    std::vector<double> nu_eff;
    std::vector<double> mu_eff;
    const RhsFunction* F = nullptr;
    std::vector<int64_t> atom_nodes;
    double sup_density = 0.0;

    double density_at(double t, int64_t p) const {
        double v = nu_eff.empty() ? 0.0 : nu_eff[p];
        if (F) v += F->evaluate(t, p) * mu_eff[p];
        return v;
    }
};

MaTarget make_target_fixed(const MeasureField& nu, double atom_cap) {
    MaTarget t;
    const GridDomain& d = nu.domain();
    t.nu_eff.assign(d.size(), 0.0);
    for (int32_t idx : d.interior) t.nu_eff[idx] = nu.density(idx);
    const double cell = nu.cell_volume();
    for (const auto& [node, mass] : nu.atoms()) {
        double add = mass / cell;
        if (atom_cap > 0) add = std::min(add, atom_cap);
        t.nu_eff[node] += add;
        t.atom_nodes.push_back(node);
    }
    for (int32_t idx : d.interior) t.sup_density = std::max(t.sup_density, t.nu_eff[idx]);
    return t;
}

MaTarget make_target_rhs(const MeasureField& mu, const RhsFunction& F, double atom_cap) {
    MaTarget t;
    const GridDomain& d = mu.domain();
    t.mu_eff.assign(d.size(), 0.0);
    for (int32_t idx : d.interior) t.mu_eff[idx] = mu.density(idx);
    const double cell = mu.cell_volume();
    for (const auto& [node, mass] : mu.atoms()) {
        double add = mass / cell;
        if (atom_cap > 0) add = std::min(add, atom_cap);
        t.mu_eff[node] += add;
        t.atom_nodes.push_back(node);
    }
    t.F = &F;
    for (int32_t idx : d.interior)
        t.sup_density = std::max(t.sup_density, F.bound() * t.mu_eff[idx]);
    return t;
}

// center value solving coef*det(A0 - (c/h^2)I) = F(c) m + fixed, a monotone
// scalar equation (det decreases, F does not decrease)
double solve_center_semi_implicit(const Herm2& A0, double h2, double coef, const RhsFunction& F,
                                  int64_t node, double m, double fixed) {
    const double lmin = A0.eig_min();
    double hi = h2 * lmin;
    auto det_of = [&](double c) {
        const double t = c / h2;
        if (A0.n == 1) return A0.a11 - t;
        return (A0.a11 - t) * (A0.a22 - t) - std::norm(A0.a12);
    };
    auto psi = [&](double c) { return coef * det_of(c) - F.evaluate(c, node) * m - fixed; };
    if (psi(hi) >= 0.0) return hi;  // target density vanishes here; cone edge

    double step = std::max(1.0, std::abs(hi));
    double lo = hi - step;
    int guard = 0;
    while (psi(lo) < 0.0) {
        step *= 2.0;
        lo = hi - step;
        if (++guard > 200)
            throw SolveError("bisection bracket failure: non-monotone configuration");
    }
    auto dpsi = [&](double c) {
        const double t = c / h2;
        double dd = (A0.n == 1) ? -1.0 / h2 : -((A0.a11 - t) + (A0.a22 - t)) / h2;
        return coef * dd - F.derivative(c, node) * m;
    };
    double c = 0.5 * (lo + hi);
    for (int it = 0; it < 80; ++it) {
        const double pc = psi(c);
        if (pc > 0.0)
            lo = c;
        else
            hi = c;
        if (hi - lo <= 1e-14 * (1.0 + std::abs(hi))) break;
        const double dp = dpsi(c);
        double cn = (dp != 0.0) ? c - pc / dp : c;
        if (!(cn > lo && cn < hi)) cn = 0.5 * (lo + hi);
        if (std::abs(cn - c) <= 1e-16 * (1.0 + std::abs(c))) {
            c = cn;
            break;
        }
        c = cn;
    }
    return c;
}

struct MaSweepStats {
    int sweeps = 0;
    double last_change = 0.0;
    double last_residual = 0.0;
    bool converged = false;
};

MaSweepStats run_ma_sweeps(const ActiveSet& act, const GridDomain& d,
                           const HermitianMetricField& g, const MaTarget& target,
                           std::vector<double>& u, const SolverOptions& opt, double change_tol,
                           double residual_tol, int max_sweeps, bool throw_on_limit,
                           const char* what) {
    const double h2 = d.h * d.h;
    const double coef = ma_coef(d.n);

    std::vector<uint8_t> is_atom(d.size(), 0);
    for (int64_t a : target.atom_nodes) is_atom[a] = 1;

    auto update = [&](int64_t p, const double* uv) -> NodeTarget {
        const Herm2 A0 = hessian_off_center(d, g.at(p), uv, p);
        const double cap = h2 * A0.eig_min();
        double c;
        if (target.F) {
            const double fixed = target.nu_eff.empty() ? 0.0 : target.nu_eff[p];
            c = solve_center_semi_implicit(A0, h2, coef, *target.F, p, target.mu_eff[p], fixed);
        } else {
            c = solve_center_det(A0, h2, target.nu_eff[p] / coef);
        }
        return NodeTarget{c, cap};
    };

    auto residual = [&](const double* uv) {
        double r = 0.0;
        for (int32_t p : act.nodes) {
            if (is_atom[p]) continue;
            const double dens = ma_density_at(d, g.at(p), uv, p, 1e-8 * (g.lambda_max() + 1.0));
            r = std::max(r, std::abs(dens - target.density_at(uv[p], p)));
        }
        return r;
    };

    SweepOptions so;
    so.omega = (opt.omega > 0) ? opt.omega : auto_omega(d);
    so.max_sweeps = max_sweeps;
    so.threads = opt.threads;
    so.change_tol = change_tol;
    so.residual_tol = residual_tol;
    so.throw_on_limit = throw_on_limit;

    SweepResult sr = sweep_to_fixed_point(act, u, update, so, residual, what);
    return MaSweepStats{sr.sweeps, sr.last_change, sr.last_residual, sr.converged};
}

// recomputed from the returned function, not accumulated during iteration
void finalize_report(SolveReport* rep, const GridDomain& d, const HermitianMetricField& g,
                     const MaTarget& target, const GridFunction& u) {
    if (!rep) return;
    std::vector<uint8_t> is_atom(d.size(), 0);
    for (int64_t a : target.atom_nodes) is_atom[a] = 1;
    const double* uv = u.values().data();
    double cell = 1.0;
    for (int a = 0; a < d.real_dim(); ++a) cell *= d.h;

    double sup = 0.0;
    std::vector<double> lhs_terms, rhs_terms;
    lhs_terms.reserve(d.interior.size());
    rhs_terms.reserve(d.interior.size());
    for (int32_t p : d.interior) {
        const double dens = ma_density_at(d, g.at(p), uv, p, 1e-8 * (g.lambda_max() + 1.0));
        const double tgt = target.density_at(uv[p], p);
        if (!is_atom[p]) sup = std::max(sup, std::abs(dens - tgt));
        lhs_terms.push_back(dens);
        rhs_terms.push_back(tgt);
    }
    rep->ma_residual_sup = sup;
    rep->ma_residual_mass = std::abs(cell * (pairwise_sum(lhs_terms) - pairwise_sum(rhs_terms)));
}

}  // namespace

// --------------------------------------------------------------------------
// solvers

GridFunction solve_fixed_rhs(const HermitianMetricField& g, const DomainPtr& domain,
                             const MeasureField& nu, const BoundaryData& phi,
                             const SolverOptions& opt, SolveReport* rep,
                             const GridFunction* warm) {
    const GridDomain& d = *domain;
    if (phi.size() != d.boundary.size()) throw ConfigError("boundary data mismatch");
    if (!g.is_positive()) throw ConfigError("invalid metric: not positive definite");

    MaTarget target = make_target_fixed(nu, opt.atom_density_cap);
    const double tol_fix = resolve_tol_fix(opt, phi);
    const double tol_ma = resolve_tol_ma(opt, target.sup_density);

    GridFunction u = warm ? *warm : [&] {
        LinearOptions lo;
        lo.threads = opt.threads;
        return solve_trace_equation(g, domain, phi, lo);  // supersolution start
    }();
    phi.apply(d, u.values());

    ActiveSet act = ActiveSet::whole_domain(d);
    MaSweepStats st = run_ma_sweeps(act, d, g, target, u.values(), opt, 0.02 * tol_fix,
                                    0.25 * tol_ma, opt.max_sweeps, true, "solve_fixed_rhs");
    if (rep) {
        rep->iterations = 1;
        rep->total_sweeps = st.sweeps;
        rep->final_update = st.last_change;
        finalize_report(rep, d, g, target, u);
    }
    return u;
}

GridFunction solve_maximal(const HermitianMetricField& g, const DomainPtr& domain,
                           const BoundaryData& phi, const SolverOptions& opt, SolveReport* rep) {
    return solve_fixed_rhs(g, domain, MeasureField(domain), phi, opt, rep);
}

GridFunction picard_solve(const DirichletProblem& problem, const SolverOptions& opt,
                          SolveReport* rep) {
    const GridDomain& d = *problem.domain;
    const BoundaryData& phi = problem.phi;
    const bool mu_zero = problem.mu.sup_density() == 0.0 && problem.mu.atoms().empty();
    if (problem.F.is_zero() || mu_zero)  // degenerate input short-circuits
        return solve_maximal(problem.g, problem.domain, phi, opt, rep);

    const double tol_fix = resolve_tol_fix(opt, phi);
    MaTarget target = make_target_rhs(problem.mu, problem.F, opt.atom_density_cap);
    const double tol_ma = resolve_tol_ma(opt, target.sup_density);

    SolveReport rep0;
    GridFunction u = solve_maximal(problem.g, problem.domain, phi, opt, &rep0);
    const GridFunction h_max = u;

    ActiveSet act = ActiveSet::whole_domain(d);
    const double cell = problem.mu.cell_volume();
    const double tol_mono = 50.0 * tol_fix + 1e-9 * u.osc();

    GridFunction prev = u;
    std::vector<double> prevF(d.interior.size());
    for (size_t i = 0; i < d.interior.size(); ++i)
        prevF[i] = problem.F.evaluate(u[d.interior[i]], d.interior[i]);

    int stage = 0;
    bool converged = false;
    if (rep) *rep = SolveReport{};
    for (stage = 1; stage <= opt.max_stages && !converged; ++stage) {
        const int batch = 64 << std::min(stage, 6);
        MaSweepStats st = run_ma_sweeps(act, d, problem.g, target, u.values(), opt,
                                        0.02 * tol_fix, 0.25 * tol_ma, batch, false,
                                        "picard_solve");
        double delta = 0.0, mono = 0.0;
        for (int32_t p : d.interior) {
            delta = std::max(delta, std::abs(u[p] - prev[p]));
            mono = std::max(mono, u[p] - prev[p]);  // iterates should not increase
        }
        std::vector<double> l1_terms(d.interior.size());
        for (size_t i = 0; i < d.interior.size(); ++i) {
            const int64_t p = d.interior[i];
            const double f = problem.F.evaluate(u[p], p);
            l1_terms[i] = std::abs(f - prevF[i]) * target.mu_eff[p];
            prevF[i] = f;
        }
        if (rep) {
            rep->update_history.push_back(delta);
            rep->rhs_l1_history.push_back(cell * pairwise_sum(l1_terms));
            rep->total_sweeps += st.sweeps;
            rep->final_update = delta;
            if (mono > tol_mono) {
                rep->monotone_ok = false;
                rep->worst_monotone_defect = std::max(rep->worst_monotone_defect, mono);
            }
        }
        if (mono > 1e6 * tol_mono)
            throw SolveError("picard iterates increased far beyond tolerance");
        prev = u;
        converged = st.converged && delta <= tol_fix;
    }
    if (!converged)
        throw IterationLimitError("picard_solve: stage limit reached",
                                  rep ? rep->final_update : 0.0);
    if (rep) {
        rep->iterations = stage - 1;
        finalize_report(rep, d, problem.g, target, u);
        // sandwich v + h <= u <= h when a Cegrell witness is supplied
        if (problem.cegrell_witness) {
            const GridFunction& w = *problem.cegrell_witness;
            const double tol = resolve_tol_cmp(opt, phi, d, h_max.osc());
            int64_t viol = 0;
            for (int32_t p : d.interior) {
                if (u[p] < w[p] + h_max[p] - tol || u[p] > h_max[p] + tol) ++viol;
            }
            rep->sandwich_violations = viol;
        }
    }
    return u;
}

SubsolutionReport check_subsolution(const GridFunction& ubar, const DirichletProblem& problem,
                                    const SolverOptions& opt) {
    const GridDomain& d = *problem.domain;
    SubsolutionReport r;

    const double cone_tol = 1e-4 * (1.0 + problem.g.lambda_max()) +
                            1e-10 * ubar.osc() / (d.h * d.h);
    PshReport pr = is_omega_psh(ubar, problem.g, cone_tol);
    r.psh_ok = pr.ok;
    r.worst_cone_eig = pr.worst_eig;

    const double tol_b =
        (opt.tol_b > 0) ? opt.tol_b : 10.0 * d.h * std::max(1.0, ubar.osc());
    for (size_t k = 0; k < d.boundary.size(); ++k)
        r.worst_trace_defect =
            std::max(r.worst_trace_defect, std::abs(ubar[d.boundary[k]] - problem.phi[k]));
    r.trace_ok = r.worst_trace_defect <= tol_b;

    MaTarget target = make_target_rhs(problem.mu, problem.F, opt.atom_density_cap);
    const double tol_ma = resolve_tol_ma(opt, target.sup_density);
    MeasureField ma = ma_density(ubar, problem.g);
    std::vector<uint8_t> is_atom(d.size(), 0);
    for (int64_t a : target.atom_nodes) is_atom[a] = 1;
    for (int32_t p : d.interior) {
        if (is_atom[p]) continue;  // atom cells are judged by mass, not pointwise
        const double need = problem.F.evaluate(ubar[p], p) * target.mu_eff[p];
        r.worst_ma_defect = std::max(r.worst_ma_defect, need - ma.density(p));
    }
    r.ma_ok = r.worst_ma_defect <= tol_ma;
    r.ok = r.psh_ok && r.trace_ok && r.ma_ok;
    return r;
}

GridFunction perron_solve(const DirichletProblem& problem, const std::vector<CoordinateBall>& cover,
                          const SolverOptions& opt, SolveReport* rep) {
    const GridDomain& d = *problem.domain;
    if (!problem.subsolution)
        throw PreconditionError("perron_solve requires a subsolution");
    SubsolutionReport sub = check_subsolution(*problem.subsolution, problem, opt);
    if (!sub.ok)
        throw PreconditionError(
            "perron_solve: supplied function is not a subsolution (psh " +
            std::to_string(sub.psh_ok) + ", trace defect " +
            std::to_string(sub.worst_trace_defect) + ", MA defect " +
            std::to_string(sub.worst_ma_defect) + ")");

    // every interior node must be active in some ball
    {
        std::vector<uint8_t> cov(d.size(), 0);
        for (const auto& b : cover)
            for (int32_t p : ball_active_nodes(d, b)) cov[p] = 1;
        for (int32_t p : d.interior)
            if (!cov[p]) throw PreconditionError("ball cover does not cover all interior nodes");
    }

    const double tol_fix = resolve_tol_fix(opt, problem.phi);
    MaTarget target = make_target_rhs(problem.mu, problem.F, opt.atom_density_cap);
    const double tol_ma = resolve_tol_ma(opt, target.sup_density);

    GridFunction u = *problem.subsolution;
    problem.phi.apply(d, u.values());

    const double tol_decrease = 50.0 * tol_fix + 1e-9 * u.osc();
    if (rep) *rep = SolveReport{};
    int pass = 0;
    bool converged = false;
    for (pass = 1; pass <= 200 && !converged; ++pass) {
        double change = 0.0;
        for (const auto& ball : cover) {
            auto nodes = ball_active_nodes(d, ball);
            if (nodes.empty()) continue;
            ActiveSet act = ActiveSet::from_nodes(d, nodes);
            std::vector<double> local = u.values();
            MaSweepStats st = run_ma_sweeps(act, d, problem.g, target, local, opt,
                                            0.02 * tol_fix, 0.25 * tol_ma, opt.max_sweeps, true,
                                            "perron local lift");
            if (rep) rep->total_sweeps += st.sweeps;
            double drop = 0.0;
            for (int32_t p : nodes) {
                drop = std::max(drop, u[p] - local[p]);
                change = std::max(change, std::abs(local[p] - u[p]));
                u[p] = std::max(u[p], local[p]);  // replacement must not decrease u
            }
            if (drop > tol_decrease) {
                if (rep) rep->monotone_ok = false;
                if (drop > 1e6 * tol_decrease)
                    throw SolveError("perron lift decreased u: subsolution invalid or cone failure");
                if (rep) rep->worst_monotone_defect = std::max(rep->worst_monotone_defect, drop);
            }
        }
        if (rep) {
            rep->update_history.push_back(change);
            rep->final_update = change;
        }
        converged = change <= tol_fix;
    }
    if (!converged) throw IterationLimitError("perron_solve: pass limit reached", 0.0);
    if (rep) {
        rep->iterations = pass - 1;
        finalize_report(rep, d, problem.g, target, u);
    }
    return u;
}

GridFunction solve_exponential(double lambda, const MeasureField& mu, const BoundaryData& phi,
                               const HermitianMetricField& g, const DomainPtr& domain,
                               const SolverOptions& opt, SolveReport* rep,
                               const GridFunction* subsolution) {
    if (!(lambda > 0)) throw ConfigError("solve_exponential requires lambda > 0");
    const GridDomain& d = *domain;

    SolveReport hrep;
    GridFunction h = solve_maximal(g, domain, phi, opt, &hrep);
    double hmax = -std::numeric_limits<double>::infinity();
    for (int32_t p : d.interior) hmax = std::max(hmax, h[p]);
    hmax = std::max(hmax, phi.sup());

    DirichletProblem problem;
    problem.domain = domain;
    problem.g = g;
    problem.mu = mu;
    problem.F = RhsFunction::exponential(lambda, hmax + 1.0);
    problem.phi = phi;

    if (subsolution) {
        problem.subsolution = *subsolution;
    } else {
        if (d.kind != GridDomain::Kind::Ball)
            throw PreconditionError(
                "solve_exponential: no subsolution supplied and no global defining function "
                "on this domain");
        // large multiple of the defining function under the maximal function
        DefiningFunction df = standard_defining_function(domain);
        MaTarget target = make_target_rhs(mu, problem.F, opt.atom_density_cap);
        const double coef = ma_coef(d.n);
        const double A =
            std::pow(problem.F.bound() * (target.sup_density + 1e-12) / coef, 1.0 / d.n) + 1.0;
        GridFunction ubar = h;
        for (int32_t p : d.interior) ubar[p] += A * df.rho[p];
        for (int32_t p : d.boundary) ubar[p] += A * df.rho[p];
        problem.subsolution = ubar;
    }

    GridFunction up = picard_solve(problem, opt, rep);

    const double ball_r =
        (d.kind == GridDomain::Kind::Ball) ? 0.45 * d.radius : 0.8 * (d.r_out - d.r_in);
    auto cover = make_ball_cover(d, ball_r);
    SolveReport prep;
    GridFunction ue = perron_solve(problem, cover, opt, &prep);

    const double gap = up.sup_diff(ue);
    const double tol_cmp = resolve_tol_cmp(opt, phi, d, h.osc());
    if (rep) {
        rep->uniqueness_gap = gap;
        rep->uniqueness_ok = gap <= tol_cmp;
    }
    return up;
}

LambdaStudy lambda_limit_study(const MeasureField& mu, const BoundaryData& phi,
                               const HermitianMetricField& g, const DomainPtr& domain,
                               const std::vector<double>& lambda_sequence,
                               const GridFunction& subsolution, const SolverOptions& opt) {
    const GridDomain& d = *domain;
    for (size_t i = 1; i < lambda_sequence.size(); ++i)
        if (!(lambda_sequence[i] < lambda_sequence[i - 1]))
            throw ConfigError("lambda sequence must decrease");
    if (lambda_sequence.size() < 2) throw ConfigError("need at least two lambdas");

    // the subsolution must dominate mu: (omega + dd^c ubar)^n >= mu
    {
        DirichletProblem p0;
        p0.domain = domain;
        p0.g = g;
        p0.mu = mu;
        p0.F = RhsFunction::constant(1.0);
        p0.phi = phi;
        SubsolutionReport sr = check_subsolution(subsolution, p0, opt);
        if (!sr.ok) throw PreconditionError("lambda_limit_study: MA(subsolution) < mu");
    }

    double b = -std::numeric_limits<double>::infinity();
    for (int32_t p : d.interior) b = std::max(b, subsolution[p]);
    for (int32_t p : d.boundary) b = std::max(b, subsolution[p]);

    GridFunction sub_shifted = subsolution;
    sub_shifted += -b;
    GridFunction tmp(domain, 0.0);
    for (size_t k = 0; k < d.boundary.size(); ++k)
        tmp[d.boundary[k]] = phi[k] - b;
    BoundaryData phi_shifted = BoundaryData::from_grid(tmp);

    LambdaStudy out;
    out.b = b;
    out.lambdas = lambda_sequence;
    for (double lam : lambda_sequence) {
        SolveReport r;
        out.family.push_back(
            solve_exponential(lam, mu, phi_shifted, g, domain, opt, &r, &sub_shifted));
    }

    // the family increases in lambda (solutions are <= 0 after the shift)
    const double tol = resolve_tol_cmp(opt, phi_shifted, d, out.family.front().osc());
    for (size_t i = 1; i < out.family.size(); ++i) {
        for (int32_t p : d.interior) {
            const double defect = out.family[i][p] - out.family[i - 1][p] - tol;
            if (defect > 0) {
                out.monotone_in_lambda = false;
                out.worst_monotone_defect = std::max(out.worst_monotone_defect, defect);
            }
        }
    }

    // linear extrapolation in lambda from the two smallest members
    const size_t m = out.family.size();
    const double l1 = lambda_sequence[m - 1], l2 = lambda_sequence[m - 2];
    out.extrapolated = GridFunction(domain, 0.0);
    for (int32_t p : d.interior)
        out.extrapolated[p] =
            (l2 * out.family[m - 1][p] - l1 * out.family[m - 2][p]) / (l2 - l1);
    for (int32_t p : d.boundary) out.extrapolated[p] = out.family[m - 1][p];

    out.mu_solution = solve_fixed_rhs(g, domain, mu, phi_shifted, opt);
    double gap = 0.0;
    for (int32_t p : d.interior)
        gap = std::max(gap, std::abs(out.extrapolated[p] - out.mu_solution[p]));
    out.limit_gap = gap;
    return out;
}

}  // namespace cma
