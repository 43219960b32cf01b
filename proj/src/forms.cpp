#include "cma/forms.hpp"

#include <algorithm>
#include <cmath>

#include "cma/sweep.hpp"

namespace cma {

HermitianHessianField::HermitianHessianField(DomainPtr dom) : dom_(std::move(dom)) {
    const int64_t total = dom_->size();
    h11_.assign(total, 0.0);
    if (dom_->n == 2) {
        h22_.assign(total, 0.0);
        h12re_.assign(total, 0.0);
        h12im_.assign(total, 0.0);
    }
}

void HermitianHessianField::set(int64_t idx, const Herm2& m) {
    h11_[idx] = m.a11;
    if (dom_->n == 2) {
        h22_[idx] = m.a22;
        h12re_[idx] = m.a12.real();
        h12im_[idx] = m.a12.imag();
    }
}

HermitianHessianField ddc_hessian(const GridFunction& u, const GridDomain& domain) {
    HermitianHessianField H(u.domain_ptr());
    const double* uv = u.values().data();
    for (int32_t idx : domain.interior) H.set(idx, hessian_at(domain, uv, idx));
    return H;
}

double default_tol_cone(const HermitianMetricField& g, const GridFunction& u) {
    const double h2 = u.domain().h * u.domain().h;
    return 1e-8 * g.lambda_max() + 1e-12 * (u.osc() / h2 + 1.0);
}

MaDensityResult ma_density_flagged(const GridFunction& u, const HermitianMetricField& g,
                                   double tol_cone) {
    if (tol_cone < 0) tol_cone = default_tol_cone(g, u);
    const GridDomain& d = u.domain();
    MaDensityResult r{MeasureField(u.domain_ptr()), {}};
    const double* uv = u.values().data();
    for (int32_t idx : d.interior) {
        bool off = false;
        r.density.density(idx) = ma_density_at(d, g.at(idx), uv, idx, tol_cone, &off);
        if (off) r.off_cone_nodes.push_back(idx);
    }
    return r;
}

MeasureField ma_density(const GridFunction& u, const HermitianMetricField& g, double tol_cone) {
    return ma_density_flagged(u, g, tol_cone).density;
}

MeasureField mixed_density(const GridFunction& u, int k, const HermitianMetricField& g) {
    const GridDomain& d = u.domain();
    if (k < 0 || k > d.n) throw ConfigError("mixed_density: k out of range");
    if (k == d.n) return ma_density(u, g);
    MeasureField out(u.domain_ptr());
    const double* uv = u.values().data();
    for (int32_t idx : d.interior) {
        const Herm2 gm = g.at(idx);
        if (k == 0) {
            out.density(idx) = (d.n == 1) ? 2.0 * gm.a11 : 8.0 * gm.det();
        } else {  // n = 2, k = 1
            Herm2 A = hessian_at(d, uv, idx);
            A.a11 += gm.a11;
            A.a22 += gm.a22;
            A.a12 += gm.a12;
            out.density(idx) = mixed_pair_density(A, gm);
        }
    }
    return out;
}

PshReport is_omega_psh(const GridFunction& u, const HermitianMetricField& g, double tol) {
    const GridDomain& d = u.domain();
    PshReport rep;
    rep.worst_eig = std::numeric_limits<double>::infinity();
    const double* uv = u.values().data();
    for (int32_t idx : d.interior) {
        Herm2 A = hessian_at(d, uv, idx);
        const Herm2 gm = g.at(idx);
        A.a11 += gm.a11;
        A.a22 += gm.a22;
        A.a12 += gm.a12;
        const double lmin = A.eig_min();
        if (lmin < rep.worst_eig) {
            rep.worst_eig = lmin;
            rep.worst_node = idx;
        }
    }
    rep.ok = rep.worst_eig >= -tol;
    return rep;
}

double auto_omega(const GridDomain& d) {
    const double L = d.dims[0] * d.h;
    const double s = std::sin(3.14159265358979323846 * d.h / L);
    return std::min(1.95, 2.0 / (1.0 + s));
}

GridFunction psh_envelope(const GridFunction& u, const HermitianMetricField& g,
                          const EnvelopeOptions& opt) {
    const GridDomain& d = u.domain();
    const double tol = (opt.tol_env >= 0) ? opt.tol_env : 1e-8 * u.osc() + 1e-14;
    GridFunction v = u;
    const double h2 = d.h * d.h;
    const double* obstacle = u.values().data();

    auto update = [&, h2](int64_t idx, const double* uv) -> NodeTarget {
        const Herm2 A0 = hessian_off_center(d, g.at(idx), uv, idx);
        const double edge = h2 * A0.eig_min();
        const double t = std::min(obstacle[idx], edge);
        return NodeTarget{t, t};
    };

    SweepOptions so;
    so.omega = (opt.omega > 0) ? opt.omega : auto_omega(d);
    so.max_sweeps = opt.max_sweeps;
    so.threads = opt.threads;
    so.change_tol = tol;

    ActiveSet act = ActiveSet::whole_domain(d);
    sweep_to_fixed_point(act, v.values(), update, so, nullptr, "psh_envelope");
    return v;
}

DemaillyReport demailly_max_check(const GridFunction& v1, const GridFunction& v2,
                                  const HermitianMetricField& g, const GridDomain& domain,
                                  double partition_tol) {
    DemaillyReport rep;
    const double ptol = partition_tol;
    const double cone_tol =
        1e-4 * (1.0 + g.lambda_max()) + 1e-10 * (v1.osc() + v2.osc()) / (domain.h * domain.h);
    rep.precondition_ok =
        is_omega_psh(v1, g, cone_tol).ok && is_omega_psh(v2, g, cone_tol).ok;

    GridFunction w = max(v1, v2);
    MeasureField dw = ma_density(w, g);
    MeasureField d1 = ma_density(v1, g);
    MeasureField d2 = ma_density(v2, g);

    double cell = 1.0;
    for (int a = 0; a < domain.real_dim(); ++a) cell *= domain.h;

    auto side = [&](int64_t idx) {
        const double diff = v1[idx] - v2[idx];
        if (diff > ptol) return +1;
        if (diff < -ptol) return -1;
        return 0;
    };

    std::vector<double> mp, m1, mm, m2;
    double dens_cap = 0.0;
    for (int32_t idx : domain.interior) {
        const int s = side(idx);
        dens_cap = std::max({dens_cap, dw.density(idx), d1.density(idx), d2.density(idx)});
        bool near_interface = (s == 0);
        if (!near_interface)
            for (int64_t off : domain.stencil_offsets) {
                const int64_t nb = idx + off;
                if (domain.node_class[nb] == NodeClass::Exterior) continue;
                const double diff_nb = v1[nb] - v2[nb];
                if (std::abs(diff_nb) <= ptol || (diff_nb > 0) != (s > 0)) {
                    near_interface = true;
                    break;
                }
            }
        if (near_interface) ++rep.interface_nodes;
        if (s > 0) {
            mp.push_back(dw.density(idx));
            m1.push_back(d1.density(idx));
        } else if (s < 0) {
            mm.push_back(dw.density(idx));
            m2.push_back(d2.density(idx));
        }
    }
    rep.mass_max_plus = cell * pairwise_sum(mp);
    rep.mass_v1_plus = cell * pairwise_sum(m1);
    rep.mass_max_minus = cell * pairwise_sum(mm);
    rep.mass_v2_minus = cell * pairwise_sum(m2);
    rep.defect_allowance = dens_cap * cell * double(rep.interface_nodes) + 1e-12;
    rep.pass = rep.mass_max_plus >= rep.mass_v1_plus - rep.defect_allowance &&
               rep.mass_max_minus >= rep.mass_v2_minus - rep.defect_allowance;
    return rep;
}

}  // namespace cma
