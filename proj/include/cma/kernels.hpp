#pragma once

#include <cmath>

#include "cma/grid.hpp"
#include "cma/linalg.hpp"

namespace cma {

// Per-node stencil kernels under the convention dd^c = i * d dbar:
//   H(u)_{j jbar} = (u_{x_j x_j} + u_{y_j y_j}) / 4
//   H(u)_{1 2bar} = [(u_{x1 x2} + u_{y1 y2}) + i (u_{x1 y2} - u_{y1 x2})] / 4
// with centered second differences and the 4-point cross stencil for the
// mixed terms; exact for real quadratic polynomials.
//
// The Monge-Ampere density of (omega_g + dd^c u)^n relative to Lebesgue is
// 2^n n! det(g + H(u)).

inline double ma_coef(int n) { return n == 1 ? 2.0 : 8.0; }

inline double mixed_diff(const double* u, int64_t p, int64_t sa, int64_t sb, double inv4h2) {
    return (u[p + sa + sb] - u[p + sa - sb] - u[p - sa + sb] + u[p - sa - sb]) * inv4h2;
}

// Complex Hessian at an interior node.
inline Herm2 hessian_at(const GridDomain& d, const double* u, int64_t p) {
    const double inv4h2 = 1.0 / (4.0 * d.h * d.h);
    Herm2 H;
    H.n = d.n;
    const int64_t s0 = d.stride[0], s1 = d.stride[1];
    H.a11 = (u[p + s0] + u[p - s0] + u[p + s1] + u[p - s1] - 4.0 * u[p]) * inv4h2;
    if (d.n == 2) {
        const int64_t s2 = d.stride[2], s3 = d.stride[3];
        H.a22 = (u[p + s2] + u[p - s2] + u[p + s3] + u[p - s3] - 4.0 * u[p]) * inv4h2;
        const double m02 = mixed_diff(u, p, s0, s2, inv4h2);
        const double m13 = mixed_diff(u, p, s1, s3, inv4h2);
        const double m03 = mixed_diff(u, p, s0, s3, inv4h2);
        const double m12 = mixed_diff(u, p, s1, s2, inv4h2);
        H.a12 = 0.25 * cplx(m02 + m13, m03 - m12);
    }
    return H;
}

// Hessian contributions that do not involve the center value: A0 = g + H_off,
// so that g + H(u) = A0 - (u(p)/h^2) * I.
inline Herm2 hessian_off_center(const GridDomain& d, const Herm2& g, const double* u, int64_t p) {
    const double inv4h2 = 1.0 / (4.0 * d.h * d.h);
    Herm2 A;
    A.n = d.n;
    const int64_t s0 = d.stride[0], s1 = d.stride[1];
    A.a11 = g.a11 + (u[p + s0] + u[p - s0] + u[p + s1] + u[p - s1]) * inv4h2;
    if (d.n == 2) {
        const int64_t s2 = d.stride[2], s3 = d.stride[3];
        A.a22 = g.a22 + (u[p + s2] + u[p - s2] + u[p + s3] + u[p - s3]) * inv4h2;
        const double m02 = mixed_diff(u, p, s0, s2, inv4h2);
        const double m13 = mixed_diff(u, p, s1, s3, inv4h2);
        const double m03 = mixed_diff(u, p, s0, s3, inv4h2);
        const double m12 = mixed_diff(u, p, s1, s2, inv4h2);
        A.a12 = g.a12 + 0.25 * cplx(m02 + m13, m03 - m12);
    }
    return A;
}

// trace(ginv * H(u)) at an interior node; the Laplace-Beltrami operator of g.
inline double trace_at(const GridDomain& d, const Herm2& ginv, const double* u, int64_t p) {
    const Herm2 H = hessian_at(d, u, p);
    if (d.n == 1) return ginv.a11 * H.a11;
    return ginv.a11 * H.a11 + ginv.a22 * H.a22 + 2.0 * std::real(ginv.a12 * std::conj(H.a12));
}

// Monge-Ampere density with cone clipping: the operator is the MA measure on
// the omega-psh cone only, so nodes with least eigenvalue below -tol_cone get
// density 0 and an off-cone flag.
inline double ma_density_at(const GridDomain& d, const Herm2& g, const double* u, int64_t p,
                            double tol_cone, bool* off_cone = nullptr) {
    Herm2 A = hessian_at(d, u, p);
    A.a11 += g.a11;
    A.a22 += g.a22;
    A.a12 += g.a12;
    A.n = d.n;
    const double lmin = A.eig_min();
    if (lmin < -tol_cone) {
        if (off_cone) *off_cone = true;
        return 0.0;
    }
    return ma_coef(d.n) * std::max(A.det(), 0.0);
}

}  // namespace cma
