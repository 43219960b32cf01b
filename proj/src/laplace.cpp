#include "cma/laplace.hpp"

#include <algorithm>
#include <cmath>

#include "cma/kernels.hpp"
#include "cma/rng.hpp"
#include "cma/sweep.hpp"

namespace cma {

namespace {

struct InverseMetric {
    std::vector<double> i11, i22, i12re, i12im;
    bool off_diag = false;
    int n = 1;

    explicit InverseMetric(const HermitianMetricField& g) {
        const GridDomain& d = g.domain();
        n = d.n;
        const int64_t total = d.size();
        i11.resize(total, 0.0);
        if (d.n == 2) {
            i22.resize(total, 0.0);
            i12re.resize(total, 0.0);
            i12im.resize(total, 0.0);
        }
        off_diag = g.has_off_diagonal();
        auto fill = [&](int64_t idx) {
            const Herm2 gi = g.at(idx).inverse();
            i11[idx] = gi.a11;
            if (d.n == 2) {
                i22[idx] = gi.a22;
                i12re[idx] = gi.a12.real();
                i12im[idx] = gi.a12.imag();
            }
        };
        for (int32_t idx : d.interior) fill(idx);
    }

    Herm2 at(int64_t idx) const {
        if (n == 1) return Herm2{i11[idx], 0.0, cplx{0, 0}, 1};
        return Herm2{i11[idx], i22[idx], cplx{i12re[idx], i12im[idx]}, 2};
    }
};

}  // namespace

GridFunction solve_linear(const HermitianMetricField& g, const DomainPtr& domain,
                          const BoundaryData& phi, double rhs, const LinearOptions& opt,
                          LinearInfo* info, const GridFunction* warm,
                          const std::vector<int32_t>* active) {
    const GridDomain& d = *domain;
    if (phi.size() != d.boundary.size())
        throw ConfigError("boundary data does not match the domain");
    if (!g.is_positive()) throw ConfigError("invalid metric: not positive definite");

    InverseMetric gi(g);
    const double h2 = d.h * d.h;
    const double inv4h2 = 1.0 / (4.0 * h2);

    GridFunction u;
    if (warm) {
        u = *warm;
    } else {
        double mean = 0.0;
        for (double v : phi.values()) mean += v;
        if (!phi.values().empty()) mean /= double(phi.size());
        u = GridFunction(domain, mean);
        phi.apply(d, u.values());
    }

    const int64_t s0 = d.stride[0], s1 = d.stride[1];
    const int64_t s2 = d.stride[2], s3 = d.stride[3];
    const bool mixed = (d.n == 2) && gi.off_diag;
    const bool two = (d.n == 2);

    auto lap_at = [&, s0, s1, s2, s3, inv4h2](int64_t p, const double* uv) {
        double L = gi.i11[p] *
                   (uv[p + s0] + uv[p - s0] + uv[p + s1] + uv[p - s1] - 4.0 * uv[p]) * inv4h2;
        if (two) {
            L += gi.i22[p] *
                 (uv[p + s2] + uv[p - s2] + uv[p + s3] + uv[p - s3] - 4.0 * uv[p]) * inv4h2;
            if (mixed) {
                const double m02 = mixed_diff(uv, p, s0, s2, inv4h2);
                const double m13 = mixed_diff(uv, p, s1, s3, inv4h2);
                const double m03 = mixed_diff(uv, p, s0, s3, inv4h2);
                const double m12 = mixed_diff(uv, p, s1, s2, inv4h2);
                const cplx H12 = 0.25 * cplx(m02 + m13, m03 - m12);
                L += 2.0 * std::real(cplx(gi.i12re[p], gi.i12im[p]) * std::conj(H12));
            }
        }
        return L;
    };

    auto update = [&](int64_t p, const double* uv) -> NodeTarget {
        const double trg = two ? gi.i11[p] + gi.i22[p] : gi.i11[p];
        // Delta_g is linear in the center value with slope -trg/h^2
        const double L0 = lap_at(p, uv) + uv[p] * trg / h2;
        const double c = (L0 - rhs) * h2 / trg;
        return NodeTarget{c, std::numeric_limits<double>::infinity()};
    };

    const double reff = 0.5 * d.dims[0] * d.h;
    const double scale = phi.osc() + std::abs(rhs) * reff * reff + 1e-12;
    // rounding floor: residuals of a converged field sit at eps * |data| / h^2
    const double data_mag =
        std::max(std::abs(phi.sup()), std::abs(phi.inf())) + std::abs(rhs) * reff * reff;
    const double eps_floor = 256.0 * std::numeric_limits<double>::epsilon() * (1.0 + data_mag);

    SweepOptions so;
    so.omega = (opt.omega > 0) ? opt.omega : auto_omega(d);
    so.max_sweeps = opt.max_sweeps;
    so.threads = opt.threads;
    so.change_tol = std::max(1e-3 * opt.tol_lin * scale, 0.25 * eps_floor);
    so.residual_tol = (opt.tol_lin * scale + eps_floor) / h2;

    auto residual = [&](const double* uv) {
        double r = 0.0;
        const auto& nodes = active ? *active : d.interior;
        for (int32_t p : nodes) r = std::max(r, std::abs(lap_at(p, uv) - rhs));
        return r;
    };

    ActiveSet act = active ? ActiveSet::from_nodes(d, *active) : ActiveSet::whole_domain(d);
    SweepResult sr = sweep_to_fixed_point(act, u.values(), update, so, residual, "solve_linear");
    if (info) {
        info->sweeps = sr.sweeps;
        info->residual = sr.last_residual;
    }
    return u;
}

GridFunction solve_trace_equation(const HermitianMetricField& g, const DomainPtr& domain,
                                  const BoundaryData& phi, const LinearOptions& opt,
                                  LinearInfo* info) {
    LinearInfo i1, i2;
    GridFunction u1 = solve_linear(g, domain, phi, 0.0, opt, &i1);
    GridFunction u2 =
        solve_linear(g, domain, BoundaryData::constant(domain, 0.0), -double(domain->n), opt, &i2);
    u1 += u2;
    if (info) {
        info->sweeps = i1.sweeps + i2.sweeps;
        info->residual = std::max(i1.residual, i2.residual);
    }
    return u1;
}

GridFunction perron_laplace(const HermitianMetricField& g, const DomainPtr& domain,
                            const BoundaryData& phi, const std::vector<CoordinateBall>& cover,
                            const GridFunction& start, const LinearOptions& opt, int* passes) {
    const GridDomain& d = *domain;
    GridFunction u = start;
    phi.apply(d, u.values());
    const double tol_pass = 10.0 * opt.tol_lin * (phi.osc() + 1e-12) + 1e-13;
    int pass = 0;
    for (; pass < 400; ++pass) {
        double change = 0.0;
        for (const auto& ball : cover) {
            auto nodes = ball_active_nodes(d, ball);
            if (nodes.empty()) continue;
            GridFunction lifted = solve_linear(g, domain, phi, 0.0, opt, nullptr, &u, &nodes);
            for (int32_t idx : nodes) {
                change = std::max(change, std::abs(lifted[idx] - u[idx]));
                u[idx] = std::max(u[idx], lifted[idx]);  // a lift never decreases a subsolution
            }
        }
        if (change <= tol_pass) break;
    }
    if (passes) *passes = pass + 1;
    return u;
}

namespace {

// local defining function rho = sgn (|z|^2 - r^2), negative inside the domain
// near the boundary component of xi
struct LocalRho {
    double sgn = 1.0;
    double r2 = 0.0;

    double operator()(const Point& p) const { return sgn * (norm2(p) - r2); }
    cplx dz(const Point& p, int j) const { return sgn * cplx(p[2 * j], -p[2 * j + 1]); }
};

LocalRho local_rho_at(const GridDomain& d, int64_t xi) {
    LocalRho rho;
    if (d.kind == GridDomain::Kind::Ball) {
        rho.r2 = d.radius * d.radius;
    } else {
        const double r = std::sqrt(norm2(d.point(xi)));
        if (r <= 0.5 * (d.r_in + d.r_out)) {
            rho.sgn = -1.0;  // inner component: rho = r_in^2 - |z|^2
            rho.r2 = d.r_in * d.r_in;
        } else {
            rho.r2 = d.r_out * d.r_out;
        }
    }
    return rho;
}

double grad_norm_sq_g(const LocalRho& rho, const Herm2& ginv, const Point& p, int n) {
    const cplx w1 = rho.dz(p, 0);
    if (n == 1) return ginv.a11 * std::norm(w1);
    const cplx w2 = rho.dz(p, 1);
    return ginv.a11 * std::norm(w1) + ginv.a22 * std::norm(w2) +
           2.0 * std::real(ginv.a12 * w2 * std::conj(w1));
}

double default_validity_radius(const GridDomain& d) {
    if (d.kind == GridDomain::Kind::Ball) return 0.5 * d.radius;
    return 0.7 * (d.r_out - d.r_in);
}

}  // namespace

BarrierContext make_barrier_context(const BoundaryData& phi, double alpha, double tau,
                                    const GridDomain& domain, const HermitianMetricField& g,
                                    double validity_radius) {
    if (!(0 < tau && tau <= alpha && alpha < 1))
        throw PreconditionError("barrier exponents must satisfy 0 < tau <= alpha < 1");
    BarrierContext ctx;
    ctx.validity_radius = validity_radius > 0 ? validity_radius : default_validity_radius(domain);

    // Hoelder-alpha norm of phi over projected boundary points
    const size_t nb = domain.boundary.size();
    size_t step = 1;
    while ((nb / step) * (nb / step) > 4000000) ++step;
    double c1 = 0.0;
    for (size_t i = 0; i < nb; i += step)
        for (size_t j = i + step; j < nb; j += step) {
            double d2 = 0;
            for (int a = 0; a < 4; ++a) {
                const double t = domain.boundary_proj[i][a] - domain.boundary_proj[j][a];
                d2 += t * t;
            }
            if (d2 < 1e-18) continue;
            c1 = std::max(c1, std::abs(phi[i] - phi[j]) / std::pow(std::sqrt(d2), alpha));
        }
    ctx.c1 = c1;

    ctx.eps0 = 1e-3 * std::sqrt(std::max(g.lambda_min(), 0.0));

    // doubling cap from the superharmonicity budget of the barrier computation
    const double c2 = 2.0 * (std::max(domain.radius, domain.r_out) + ctx.validity_radius);
    const double c3 = tau * (1.0 - tau) * std::pow(c2, tau - 2.0);
    const double eps_sq = std::max(ctx.eps0 * ctx.eps0, 1e-12);
    const double k_req = (c1 * alpha) / (c3 * std::pow(ctx.validity_radius, tau - alpha) * eps_sq);
    ctx.k_max = 64.0 * std::max(k_req, 1.0);
    return ctx;
}

BarrierResult hoelder_barrier(int64_t xi, const BoundaryData& phi, double alpha, double tau,
                              const DomainPtr& domain, const HermitianMetricField& g,
                              const BarrierContext* ctx_in) {
    const GridDomain& d = *domain;
    if (!d.is_boundary(xi)) throw PreconditionError("barrier base point must be a boundary node");
    BarrierContext ctx = ctx_in ? *ctx_in : make_barrier_context(phi, alpha, tau, d, g);

    const int32_t rank = d.boundary_rank(xi);
    const Point base = d.boundary_proj[rank];
    const double phi0 = phi[rank];
    const LocalRho rho = local_rho_at(d, xi);
    const double R = ctx.validity_radius;

    InverseMetric gi(g);

    std::vector<int32_t> checked;
    for (int32_t idx : d.interior) {
        const Point p = d.point(idx);
        double dist2 = 0;
        for (int a = 0; a < 4; ++a) dist2 += (p[a] - base[a]) * (p[a] - base[a]);
        if (dist2 > 0.25 * R * R) continue;
        // |rho|^tau is below stencil resolution within half a cell of the
        // surface; that ring is excluded from the superharmonicity check
        if (d.boundary_dist[idx] < 0.4 * d.h) continue;
        const double gn = grad_norm_sq_g(rho, gi.at(idx), p, d.n);
        if (gn < ctx.eps0 * ctx.eps0)
            throw BarrierError("gradient degeneracy |grad rho|_g < eps0 at node " +
                               std::to_string(idx));
        checked.push_back(idx);
    }

    auto barrier_values = [&](double k) {
        GridFunction v(domain, 0.0);
        auto val = [&](const Point& p, bool on_surface) {
            double rterm = 0.0;
            if (!on_surface) rterm = std::pow(std::max(-rho(p), 0.0), tau);
            double dist2 = 0;
            for (int a = 0; a < 4; ++a) dist2 += (p[a] - base[a]) * (p[a] - base[a]);
            return k * rterm + ctx.c1 * std::pow(dist2, 0.5 * alpha) + phi0;
        };
        for (int32_t idx : d.interior) v[idx] = val(d.point(idx), false);
        for (size_t b = 0; b < d.boundary.size(); ++b)
            v[d.boundary[b]] = val(d.boundary_proj[b], true);
        return v;
    };

    auto superharmonic = [&](const GridFunction& v, double k) {
        const double h2 = d.h * d.h;
        const double tol = 1e-11 * (1.0 + k + ctx.c1) * (1.0 + g.lambda_max()) / h2;
        for (int32_t idx : checked)
            if (trace_at(d, gi.at(idx), v.values().data(), idx) > tol) return false;
        return true;
    };

    double k = 0.0;
    GridFunction v = barrier_values(k);
    if (!superharmonic(v, k)) {
        k = 1.0;
        for (;;) {
            v = barrier_values(k);
            if (superharmonic(v, k)) break;
            k *= 2.0;
            if (k > ctx.k_max)
                throw BarrierError("doubling search exceeded the global k_max of " +
                                   std::to_string(ctx.k_max));
        }
    }

    BarrierResult out;
    out.spec.base_node = xi;
    out.spec.base_point = base;
    out.spec.alpha = alpha;
    out.spec.tau = tau;
    out.spec.k = k;
    out.spec.c1 = ctx.c1;
    out.spec.validity_radius = R;
    out.spec.checked_nodes = std::move(checked);
    out.v = std::move(v);
    return out;
}

GlobalBarrier global_barrier(const BoundaryData& phi, double alpha, const DomainPtr& domain,
                             const HermitianMetricField& g) {
    const GridDomain& d = *domain;
    const double tau = alpha;  // the global construction uses |rho|^alpha
    BarrierContext ctx = make_barrier_context(phi, alpha, tau, d, g);
    const double R = ctx.validity_radius;

    auto build_upper = [&](const BoundaryData& data) {
        GridFunction env(domain, std::numeric_limits<double>::infinity());
        const double k1_base = data.sup() + 1.0;
        double k_used = 0.0;
        for (size_t rk = 0; rk < d.boundary.size(); ++rk) {
            const int64_t xi = d.boundary[rk];
            BarrierResult br = hoelder_barrier(xi, data, alpha, tau, domain, g, &ctx);
            k_used = std::max(k_used, br.spec.k);
            const double phi0 = data[rk];
            const double k1 = k1_base - phi0;
            const double k2 =
                ctx.c1 > 0 ? std::max(1.0, k1 / (ctx.c1 * std::pow(0.5 * R, alpha))) : 1.0;
            auto truncate = [&](int64_t idx) {
                const double w = std::min(k1, k2 * (br.v[idx] - phi0)) + phi0;
                env[idx] = std::min(env[idx], w);
            };
            for (int32_t idx : d.interior) truncate(idx);
            for (int32_t idx : d.boundary) truncate(idx);
        }
        return std::pair<GridFunction, double>(std::move(env), k_used);
    };

    auto [upper, k_up] = build_upper(phi);

    // lower barrier: the mirrored construction applied to -phi
    GridFunction tmp(domain, 0.0);
    for (size_t k = 0; k < d.boundary.size(); ++k) tmp[d.boundary[k]] = -phi[k];
    auto [lower_neg, k_lo] = build_upper(BoundaryData::from_grid(tmp));
    GridFunction lower = lower_neg;
    lower *= -1.0;

    GlobalBarrier gb;
    gb.upper = std::move(upper);
    gb.lower = std::move(lower);
    gb.c1 = ctx.c1;
    gb.k_used = std::max(k_up, k_lo);
    return gb;
}

HoelderModulus hoelder_modulus(const GridFunction& u, double alpha, const GridDomain& d,
                               uint64_t seed) {
    std::vector<int32_t> all = d.interior;
    all.insert(all.end(), d.boundary.begin(), d.boundary.end());
    std::sort(all.begin(), all.end());
    const size_t N = all.size(), NB = d.boundary.size();

    auto dist = [&](int64_t a, int64_t b) {
        const Point pa = d.point(a), pb = d.point(b);
        double s = 0;
        for (int i = 0; i < 4; ++i) s += (pa[i] - pb[i]) * (pa[i] - pb[i]);
        return std::sqrt(s);
    };
    auto ratio = [&](int64_t a, int64_t b) {
        const double r = dist(a, b);
        if (r < 1e-14) return 0.0;
        return std::abs(u[a] - u[b]) / std::pow(r, alpha);
    };

    HoelderModulus out;
    if (N * (N - 1) / 2 <= 100000) {
        for (size_t i = 0; i < N; ++i)
            for (size_t j = i + 1; j < N; ++j)
                out.modulus = std::max(out.modulus, ratio(all[i], all[j]));
    } else {
        // stratified by dyadic distance
        Rng rng(seed * 0x9e3779b97f4a7c15ULL + 1);
        const double diam = d.dims[0] * d.h * 2.0;
        int K = 1;
        while (d.h * std::pow(2.0, K) < diam) ++K;
        for (int k = 0; k < K; ++k) {
            const double lo = d.h * std::pow(2.0, k), hi = 2.0 * lo;
            const int span = std::max(1, int(hi / d.h));
            int accepted = 0, attempts = 0;
            while (accepted < 4000 && attempts < 80000) {
                ++attempts;
                const int64_t a = all[rng.uniform_int(N)];
                auto c = d.coords(a);
                std::array<int, 4> c2 = c;
                for (int ax = 0; ax < d.real_dim(); ++ax)
                    c2[ax] = c[ax] + rng.uniform_range(-span, span);
                bool in = true;
                for (int ax = 0; ax < d.real_dim(); ++ax)
                    in = in && c2[ax] >= 0 && c2[ax] < d.dims[ax];
                if (!in) continue;
                const int64_t b = d.index(c2[0], c2[1], c2[2], c2[3]);
                if (d.node_class[b] == NodeClass::Exterior || b == a) continue;
                const double r = dist(a, b);
                if (r < lo || r >= hi) continue;
                ++accepted;
                out.modulus = std::max(out.modulus, ratio(a, b));
            }
        }
        // axis-aligned neighbor pairs catch the Lipschitz direction exactly
        for (int32_t a : d.interior)
            for (int ax = 0; ax < d.real_dim(); ++ax) {
                const int64_t b = a + d.stride[ax];
                if (d.node_class[b] != NodeClass::Exterior)
                    out.modulus = std::max(out.modulus, ratio(a, b));
            }
    }

    if (N * NB <= 100000) {
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < NB; ++j)
                out.boundary_modulus = std::max(out.boundary_modulus, ratio(all[i], d.boundary[j]));
    } else {
        Rng rng(seed * 0x9e3779b97f4a7c15ULL + 2);
        for (int s = 0; s < 50000; ++s) {
            const int64_t a = all[rng.uniform_int(N)];
            const int64_t b = d.boundary[rng.uniform_int(NB)];
            if (a == b) continue;
            out.boundary_modulus = std::max(out.boundary_modulus, ratio(a, b));
        }
    }
    return out;
}

}  // namespace cma
