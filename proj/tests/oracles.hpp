#pragma once

// Test-only oracles, independent of the library's solve paths: radial ODE
// reductions, quadrature, closed forms.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Simpson quadrature on [a,b]
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Radial reduction of the Monge-Ampere equation with g = identity on a ball.
//
// For u = f(t), t = |z|^2: the complex Hessian has eigenvalues f' + t f''
// (radial) and f' (multiplicity n-1), so
//   n = 1:  density = 2 (1 + f' + t f'')            = nu(t)
//   n = 2:  density = 8 (1 + f' + t f'')(1 + f')    = nu(t)
// and for n = 2, d/dt [ t^2 (1+f')^2 ] = t nu(t) / 4.
//
// Returns u(r) on the given radii, normalized so that u matches
// boundary_value at r = R (trace constant).
struct RadialSolution {
    std::vector<double> r;
    std::vector<double> u;
};

inline RadialSolution radial_ma_n2(const std::function<double(double)>& nu_of_t, double R,
                                   double boundary_value, int steps = 20000) {
    // integrate m(t) = t^2 (1+f')^2 from 0, then f' = -1 + sqrt(m)/t
    const double T = R * R;
    const double dt = T / steps;
    std::vector<double> fp(steps + 1);  // f'(t_i)
    double m = 0.0;
    fp[0] = -1.0 + std::sqrt(std::max(0.0, nu_of_t(0.0) / 8.0));  // limit: (1+f')^2 = nu/8 at 0
    for (int i = 1; i <= steps; ++i) {
        const double tm = (i - 0.5) * dt;
        m += dt * tm * nu_of_t(tm) / 4.0;
        const double t = i * dt;
        fp[i] = -1.0 + std::sqrt(std::max(0.0, m)) / t;
    }
    // integrate f from T inward with f(T) = boundary_value
    std::vector<double> f(steps + 1);
    f[steps] = boundary_value;
    for (int i = steps; i >= 1; --i) f[i - 1] = f[i] - 0.5 * (fp[i] + fp[i - 1]) * dt;
    RadialSolution out;
    for (int i = 0; i <= steps; i += steps / 200) {
        out.r.push_back(std::sqrt(i * dt));
        out.u.push_back(f[i]);
    }
    return out;
}

// n = 1 radial Poisson: density = 2 (1 + (u'' + u'/r)/4) = nu(r), i.e.
// Delta u = 2 nu - 4 with u(R) = boundary_value; (r u')' = r q.
inline RadialSolution radial_ma_n1(const std::function<double(double)>& nu_of_r, double R,
                                   double boundary_value, int steps = 20000) {
    const double dr = R / steps;
    std::vector<double> up(steps + 1, 0.0);
    double acc = 0.0;  // int_0^r s q(s) ds
    for (int i = 1; i <= steps; ++i) {
        const double rm = (i - 0.5) * dr;
        acc += dr * rm * (2.0 * nu_of_r(rm) - 4.0);
        up[i] = acc / (i * dr);
    }
    std::vector<double> u(steps + 1);
    u[steps] = boundary_value;
    for (int i = steps; i >= 1; --i) u[i - 1] = u[i] - 0.5 * (up[i] + up[i - 1]) * dr;
    RadialSolution out;
    for (int i = 0; i <= steps; i += steps / 200) {
        out.r.push_back(i * dr);
        out.u.push_back(u[i]);
    }
    return out;
}

inline double interp(const RadialSolution& s, double r) {
    if (r <= s.r.front()) return s.u.front();
    if (r >= s.r.back()) return s.u.back();
    size_t lo = 0, hi = s.r.size() - 1;
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        (s.r[mid] <= r ? lo : hi) = mid;
    }
    const double w = (r - s.r[lo]) / (s.r[hi] - s.r[lo]);
    return s.u[lo] + w * (s.u[hi] - s.u[lo]);
}

// closed form: relative extremal of the closed r-disc in the unit disc and
// the capacity pi / log(1/r) under the dd^c = i d dbar convention
inline double extremal_disc(double rho, double r) {
    if (rho <= r) return -1.0;
    return std::max(std::log(rho) / std::log(1.0 / r), -1.0);
}

inline double cap_disc(double r) { return 3.14159265358979323846 / std::log(1.0 / r); }

}  // namespace oracle
