#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cma {

using cplx = std::complex<double>;

// Hermitian matrix of size n x n with n <= 2.  For n = 1 only a11 is used.
struct Herm2 {
    double a11 = 0.0;
    double a22 = 0.0;
    cplx a12{0.0, 0.0};
    int n = 2;

    double trace() const { return n == 1 ? a11 : a11 + a22; }

    double det() const {
        if (n == 1) return a11;
        return a11 * a22 - std::norm(a12);
    }

    double eig_min() const {
        if (n == 1) return a11;
        const double t = a11 + a22;
        const double d = a11 - a22;
        return 0.5 * (t - std::sqrt(d * d + 4.0 * std::norm(a12)));
    }

    double eig_max() const {
        if (n == 1) return a11;
        const double t = a11 + a22;
        const double d = a11 - a22;
        return 0.5 * (t + std::sqrt(d * d + 4.0 * std::norm(a12)));
    }

    Herm2 inverse() const {
        if (n == 1) return Herm2{1.0 / a11, 0.0, cplx{0, 0}, 1};
        const double dd = det();
        return Herm2{a22 / dd, a11 / dd, -a12 / dd, 2};
    }

    Herm2 operator+(const Herm2& o) const { return Herm2{a11 + o.a11, a22 + o.a22, a12 + o.a12, n}; }
    Herm2 operator*(double t) const { return Herm2{t * a11, t * a22, t * a12, n}; }
};

inline Herm2 herm_identity(int n) { return Herm2{1.0, 1.0, cplx{0, 0}, n}; }

// Polarized determinant: D(A,A) = det A and for n = 2
// det(A+B) = det A + det B + 2 D(A,B).
inline double mixed_det(const Herm2& a, const Herm2& b) {
    if (a.n == 1) return 0.5 * (a.a11 + b.a11);  // unused degree bookkeeping; callers guard n
    return 0.5 * (a.a11 * b.a22 + a.a22 * b.a11 - 2.0 * std::real(a.a12 * std::conj(b.a12)));
}

// Deterministic pairwise summation; independent of thread count by construction.
inline double pairwise_sum(std::span<const double> x) {
    const std::size_t m = x.size();
    if (m <= 16) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = m / 2;
    return pairwise_sum(x.subspan(0, half)) + pairwise_sum(x.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(std::span<const double>(x.data(), x.size()));
}

}  // namespace cma
