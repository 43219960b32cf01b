#include "cma/metric.hpp"

#include <algorithm>
#include <cmath>

#include "cma/kernels.hpp"

namespace cma {

HermitianMetricField HermitianMetricField::from_function(
    DomainPtr dom, const std::function<double(const Point&)>& f) {
    HermitianMetricField g;
    g.dom_ = std::move(dom);
    const int64_t total = g.dom_->size();
    g.g11_.resize(total);
    for (int64_t idx = 0; idx < total; ++idx) g.g11_[idx] = f(g.dom_->point(idx));
    if (g.dom_->n == 2) {
        g.g22_ = g.g11_;
        g.g12re_.assign(total, 0.0);
        g.g12im_.assign(total, 0.0);
    }
    g.finish_bounds();
    return g;
}

HermitianMetricField HermitianMetricField::from_matrix_function(
    DomainPtr dom, const std::function<Herm2(const Point&)>& f) {
    HermitianMetricField g;
    g.dom_ = std::move(dom);
    const int64_t total = g.dom_->size();
    g.g11_.resize(total);
    if (g.dom_->n == 2) {
        g.g22_.resize(total);
        g.g12re_.resize(total);
        g.g12im_.resize(total);
    }
    for (int64_t idx = 0; idx < total; ++idx) {
        Herm2 m = f(g.dom_->point(idx));
        g.g11_[idx] = m.a11;
        if (g.dom_->n == 2) {
            g.g22_[idx] = m.a22;
            g.g12re_[idx] = m.a12.real();
            g.g12im_[idx] = m.a12.imag();
        }
    }
    g.finish_bounds();
    return g;
}

HermitianMetricField HermitianMetricField::zero(DomainPtr dom) {
    HermitianMetricField g;
    g.dom_ = std::move(dom);
    const int64_t total = g.dom_->size();
    g.g11_.assign(total, 0.0);
    if (g.dom_->n == 2) {
        g.g22_.assign(total, 0.0);
        g.g12re_.assign(total, 0.0);
        g.g12im_.assign(total, 0.0);
    }
    g.lmin_ = g.lmax_ = 0.0;
    return g;
}

void HermitianMetricField::finish_bounds() {
    lmin_ = std::numeric_limits<double>::infinity();
    lmax_ = -lmin_;
    auto visit = [&](int64_t idx) {
        const Herm2 m = at(idx);
        lmin_ = std::min(lmin_, m.eig_min());
        lmax_ = std::max(lmax_, m.eig_max());
        if (dom_->n == 2 && std::norm(m.a12) > 0) off_diag_ = true;
    };
    for (int32_t idx : dom_->interior) visit(idx);
    for (int32_t idx : dom_->boundary) visit(idx);
}

namespace {

// d^2 f / dz_l dzbar_m of a complex grid field, via the same centered stencils
// as the Hessian kernel
cplx dz_dzbar(const GridDomain& d, const std::vector<double>& fre, const std::vector<double>& fim,
              int64_t p, int l, int m) {
    const double inv4h2 = 1.0 / (4.0 * d.h * d.h);
    const int64_t sx_l = d.stride[2 * l], sy_l = d.stride[2 * l + 1];
    const int64_t sx_m = d.stride[2 * m], sy_m = d.stride[2 * m + 1];
    auto second = [&](const std::vector<double>& f, int64_t sa, int64_t sb) {
        if (sa == sb)
            return (f[p + sa] - 2.0 * f[p] + f[p - sa]) / (d.h * d.h);
        return mixed_diff(f.data(), p, sa, sb, inv4h2);
    };
    auto part = [&](const std::vector<double>& f) {
        const double xx = second(f, sx_l, sx_m);
        const double yy = second(f, sy_l, sy_m);
        const double xy = second(f, sx_l, sy_m);
        const double yx = second(f, sy_l, sx_m);
        return cplx(0.25 * (xx + yy), 0.25 * (xy - yx));
    };
    cplx r = part(fre);
    if (!fim.empty()) r += cplx(0, 1) * part(fim);
    return r;
}

}  // namespace

double metric_bound_B(const HermitianMetricField& g, const GridDomain& domain) {
    if (!g.is_positive() )
        throw ConfigError("invalid metric: not positive definite at some node");
    if (domain.n == 1) return 0.0;

    // dd^c omega = i d dbar (i g_{j kbar} dz_j dzbar_k); its top-degree density is
    //   4 [ (g22)_{,1 1bar} + (g11)_{,2 2bar} - (g21)_{,1 2bar} - (g12)_{,2 1bar} ]
    // and omega^2 has density 8 det g.
    std::vector<double> g21re = g.g12re();
    std::vector<double> g21im = g.g12im();
    for (double& v : g21im) v = -v;

    const std::vector<double> none;
    double B = 0.0;
    for (int32_t idx : domain.interior) {
        const cplx t11_of_g22 = dz_dzbar(domain, g.g22(), none, idx, 0, 0);
        const cplx t22_of_g11 = dz_dzbar(domain, g.g11(), none, idx, 1, 1);
        const cplx t12_of_g21 = dz_dzbar(domain, g21re, g21im, idx, 0, 1);
        const cplx t21_of_g12 = dz_dzbar(domain, g.g12re(), g.g12im(), idx, 1, 0);
        const double ddc = 4.0 * std::real(t11_of_g22 + t22_of_g11 - t12_of_g21 - t21_of_g12);
        const double vol = 8.0 * g.at(idx).det();
        B = std::max(B, std::abs(2.0 * domain.n * ddc) / vol);
    }
    // the d omega wedge d^c omega bound is a 6-form, identically 0 for n = 2
    return B;
}

DefiningFunction standard_defining_function(const DomainPtr& domain) {
    if (domain->kind != GridDomain::Kind::Ball)
        throw ConfigError(
            "standard_defining_function: unsupported domain; shells use per-component barriers");
    const double R2 = domain->radius * domain->radius;
    DefiningFunction df;
    df.rho = GridFunction::from_function(domain, [R2](const Point& p) { return norm2(p) - R2; });
    df.strict_psh_margin = 1.0;
    return df;
}

}  // namespace cma
