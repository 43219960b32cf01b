#include "doctest.h"

#include <cmath>

#include "cma/forms.hpp"
#include "cma/grid.hpp"
#include "cma/rng.hpp"

using namespace cma;

TEST_SUITE_BEGIN("forms");

namespace {

GridFunction from_fn(const DomainPtr& d, const std::function<double(const Point&)>& f) {
    return GridFunction::from_function(d, f);
}

}  // namespace

TEST_CASE("ddc_hessian is exact on quadratics") {
    auto d = build_ball_domain(1.0, 0.25, 2);
    SUBCASE("|z|^2 gives the identity") {
        auto u = from_fn(d, [](const Point& p) { return norm2(p); });
        auto H = ddc_hessian(u, *d);
        for (int32_t idx : d->interior) {
            const Herm2 m = H.at(idx);
            CHECK(m.a11 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(m.a22 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(m.a12) < 1e-12);
        }
    }
    SUBCASE("pluriharmonic Re(z1^2) gives zero") {
        auto u = from_fn(d, [](const Point& p) { return p[0] * p[0] - p[1] * p[1]; });
        auto H = ddc_hessian(u, *d);
        for (int32_t idx : d->interior) {
            const Herm2 m = H.at(idx);
            CHECK(std::abs(m.a11) < 1e-12);
            CHECK(std::abs(m.a22) < 1e-12);
            CHECK(std::abs(m.a12) < 1e-12);
        }
    }
    SUBCASE("|z1|^2 |z2|^2: symbolic differentiation oracle") {
        // d^2/dz1 dzbar2 (z1 zbar1 z2 zbar2) = zbar1 z2; diagonal |z2|^2, |z1|^2
        auto u = from_fn(d, [](const Point& p) {
            return (p[0] * p[0] + p[1] * p[1]) * (p[2] * p[2] + p[3] * p[3]);
        });
        auto H = ddc_hessian(u, *d);
        for (int32_t idx : d->interior) {
            const Point p = d->point(idx);
            const cplx z1(p[0], p[1]), z2(p[2], p[3]);
            const Herm2 m = H.at(idx);
            CHECK(m.a11 == doctest::Approx(std::norm(z2)).epsilon(1e-10));
            CHECK(m.a22 == doctest::Approx(std::norm(z1)).epsilon(1e-10));
            CHECK(std::abs(m.a12 - std::conj(z1) * z2) < 1e-10);
        }
    }
}

TEST_CASE("ma_density constants under the dd^c = i d dbar convention") {
    SUBCASE("n=2: beta^2 = 8 dV and (2 beta)^2 = 32 dV") {
        auto d = build_ball_domain(1.0, 0.25, 2);
        auto g = HermitianMetricField::identity(d);
        auto u0 = GridFunction(d, 0.0);
        auto m0 = ma_density(u0, g);
        for (int32_t idx : d->interior) CHECK(m0.density(idx) == doctest::Approx(8.0));
        auto u1 = from_fn(d, [](const Point& p) { return norm2(p); });
        auto m1 = ma_density(u1, g);
        for (int32_t idx : d->interior) CHECK(m1.density(idx) == doctest::Approx(32.0));
    }
    SUBCASE("n=1: pluriharmonic gives density 2") {
        auto d = build_ball_domain(1.0, 0.1, 1);
        auto g = HermitianMetricField::identity(d);
        auto u = from_fn(d, [](const Point& p) { return p[0] * p[0] - p[1] * p[1]; });
        auto m = ma_density(u, g);
        for (int32_t idx : d->interior) CHECK(m.density(idx) == doctest::Approx(2.0));
    }
    SUBCASE("wedge-product oracle: polarization identity on random Hermitian pairs") {
        Rng rng(42);
        for (int trial = 0; trial < 200; ++trial) {
            Herm2 A{rng.uniform(-1, 3), rng.uniform(-1, 3),
                    cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)), 2};
            Herm2 B{rng.uniform(-1, 3), rng.uniform(-1, 3),
                    cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)), 2};
            const Herm2 S{A.a11 + B.a11, A.a22 + B.a22, A.a12 + B.a12, 2};
            // omega_A wedge omega_B density = 4(det(A+B) - det A - det B)
            CHECK(mixed_pair_density(A, B) ==
                  doctest::Approx(4.0 * (S.det() - A.det() - B.det())).epsilon(1e-12));
        }
    }
}

TEST_CASE("mixed_density") {
    auto d = build_ball_domain(1.0, 0.25, 2);
    auto g = HermitianMetricField::identity(d);
    auto u0 = GridFunction(d, 0.0);
    auto usq = from_fn(d, [](const Point& p) { return norm2(p); });

    CHECK_THROWS_AS(mixed_density(u0, 3, g), ConfigError);

    SUBCASE("k=0 is the metric volume, independent of u") {
        auto a = mixed_density(u0, 0, g);
        auto b = mixed_density(usq, 0, g);
        for (int32_t idx : d->interior) {
            CHECK(a.density(idx) == doctest::Approx(8.0));
            CHECK(b.density(idx) == doctest::Approx(8.0));
        }
    }
    SUBCASE("k=1 values") {
        auto a = mixed_density(u0, 1, g);
        auto b = mixed_density(usq, 1, g);
        for (int32_t idx : d->interior) {
            CHECK(a.density(idx) == doctest::Approx(8.0));
            CHECK(b.density(idx) == doctest::Approx(16.0));
        }
    }
    SUBCASE("k=n reduces to ma_density") {
        auto a = mixed_density(usq, 2, g);
        auto b = ma_density(usq, g);
        for (int32_t idx : d->interior)
            CHECK(a.density(idx) == doctest::Approx(b.density(idx)));
    }
}

TEST_CASE("ma_density of u plus a pluriharmonic quartic converges at second order") {
    // Re(z1^4) is pluriharmonic with nonzero fourth derivatives, so the
    // stencil error is genuinely O(h^2)
    auto plh = [](const Point& p) {
        const cplx z(p[0], p[1]);
        return std::real(z * z * z * z);
    };
    auto base = [](const Point& p) { return norm2(p); };
    double errs[2];
    int i = 0;
    for (double h : {0.1, 0.05}) {
        auto d = build_ball_domain(1.0, h, 1);
        auto g = HermitianMetricField::identity(d);
        auto u = from_fn(d, base);
        auto v = from_fn(d, [&](const Point& p) { return base(p) + plh(p); });
        auto mu = ma_density(u, g);
        auto mv = ma_density(v, g);
        double e = 0;
        for (int32_t idx : d->interior)
            e = std::max(e, std::abs(mu.density(idx) - mv.density(idx)));
        errs[i++] = e;
    }
    CHECK(errs[0] < 0.05);
    CHECK(errs[0] / errs[1] > 3.0);  // ~4 for second order
}

TEST_CASE("binomial expansion of the determinant (algebraic identity)") {
    auto d = build_ball_domain(1.0, 0.2, 2);
    auto u = from_fn(d, [](const Point& p) {
        return 0.4 * norm2(p) + 0.1 * (p[0] * p[0] + p[1] * p[1]);
    });
    auto w = from_fn(d, [](const Point& p) {
        return 0.3 * norm2(p) + 0.05 * p[0] * p[2];
    });
    auto g = HermitianMetricField::identity(d);
    const double* uv = u.values().data();
    const double* wv = w.values().data();
    for (int32_t p : d->interior) {
        Herm2 gw = hessian_at(*d, wv, p);
        const Herm2 gm = g.at(p);
        gw.a11 += gm.a11;
        gw.a22 += gm.a22;
        gw.a12 += gm.a12;  // g + H(w), the shifted metric
        Herm2 hu = hessian_at(*d, uv, p);
        Herm2 sum{gw.a11 + hu.a11, gw.a22 + hu.a22, gw.a12 + hu.a12, 2};
        const double lhs = 8.0 * sum.det();
        const double rhs = 8.0 * gw.det() + 2.0 * mixed_pair_density(hu, gw) + 8.0 * hu.det();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("pointwise monotonicity of ma_density in the Hessian") {
    auto d = build_ball_domain(1.0, 0.25, 2);
    auto g = HermitianMetricField::identity(d);
    auto u2 = from_fn(d, [](const Point& p) { return 0.3 * norm2(p); });
    auto u1 = from_fn(d, [](const Point& p) { return 0.5 * norm2(p); });  // H(u1) >= H(u2)
    auto m1 = ma_density(u1, g);
    auto m2 = ma_density(u2, g);
    for (int32_t idx : d->interior) CHECK(m1.density(idx) >= m2.density(idx) - 1e-12);
}

TEST_CASE("is_omega_psh") {
    auto d = build_ball_domain(1.0, 0.25, 2);
    auto g = HermitianMetricField::identity(d);
    CHECK(is_omega_psh(GridFunction(d, 0.0), g, 1e-10).ok);
    auto bad = from_fn(d, [](const Point& p) { return -2.0 * norm2(p); });
    auto rep = is_omega_psh(bad, g, 1e-10);
    CHECK(!rep.ok);
    CHECK(rep.worst_eig == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("off-cone nodes flagged with zero density") {
    auto d = build_ball_domain(1.0, 0.25, 2);
    auto g = HermitianMetricField::identity(d);
    auto bad = from_fn(d, [](const Point& p) { return -2.0 * norm2(p); });
    auto res = ma_density_flagged(bad, g);
    CHECK(res.off_cone_nodes.size() == d->interior.size());
    for (int32_t idx : d->interior) CHECK(res.density.density(idx) == 0.0);
}

TEST_CASE("psh_envelope") {
    auto d = build_ball_domain(1.0, 0.1, 1);
    auto g = HermitianMetricField::identity(d);

    SUBCASE("an omega-psh input is returned unchanged") {
        auto u = from_fn(d, [](const Point& p) { return 0.5 * norm2(p); });
        auto v = psh_envelope(u, g);
        CHECK(v.sup_diff(u) < 1e-7 * u.osc() + 1e-12);
    }
    SUBCASE("envelope is below the input and monotone") {
        Rng rng(7);
        auto u1 = from_fn(d, [&](const Point& p) { return std::min(p[0], 0.0); });
        auto u2 = u1;
        u2 += 0.25;
        auto v1 = psh_envelope(u1, g);
        auto v2 = psh_envelope(u2, g);
        for (int32_t idx : d->interior) {
            CHECK(v1[idx] <= u1[idx] + 1e-10);
            CHECK(v1[idx] <= v2[idx] + 1e-8);  // P(u1) <= P(u2) when u1 <= u2
        }
    }
    SUBCASE("subharmonic envelope: circle means convex in log r (1-D oracle)") {
        // pure psh cone emulated by a tiny metric
        auto geps = HermitianMetricField::from_function(d, [](const Point&) { return 1e-8; });
        auto u = from_fn(d, [](const Point& p) { return std::min(p[0], 0.0); });
        auto v = psh_envelope(u, geps);
        // means over lattice circles r, 1.3 r, 1.69 r: convexity in log r
        auto circle_mean = [&](double r) {
            double acc = 0;
            int cnt = 0;
            for (int32_t idx : d->interior) {
                const Point p = d->point(idx);
                const double rr = std::hypot(p[0], p[1]);
                if (std::abs(rr - r) < 0.6 * d->h) {
                    acc += v[idx];
                    ++cnt;
                }
            }
            REQUIRE(cnt > 0);
            return acc / cnt;
        };
        const double m1 = circle_mean(0.4), m2 = circle_mean(0.52), m3 = circle_mean(0.676);
        // equally spaced in log r: midpoint below the chord, up to O(h) slack
        CHECK(m2 <= 0.5 * (m1 + m3) + 2.0 * d->h * v.osc());
    }
}

TEST_CASE("demailly maximum inequality") {
    auto d = build_ball_domain(1.0, 0.2, 2);
    auto g = HermitianMetricField::identity(d);

    SUBCASE("equal inputs give equal masses") {
        auto v = from_fn(d, [](const Point& p) { return 0.5 * norm2(p); });
        auto rep = demailly_max_check(v, v, g, *d, 1e-9);
        CHECK(rep.pass);
        CHECK(rep.mass_max_plus == doctest::Approx(rep.mass_v1_plus));
        CHECK(rep.mass_max_minus == doctest::Approx(rep.mass_v2_minus));
    }
    SUBCASE("nested quadratics") {
        auto v1 = from_fn(d, [](const Point& p) { return norm2(p) - 1.0; });
        auto v2 = from_fn(d, [](const Point& p) { return 2.0 * (norm2(p) - 1.0); });
        auto rep = demailly_max_check(v1, v2, g, *d, 1e-9);
        CHECK(rep.precondition_ok);
        CHECK(rep.pass);
        // {v1 > v2} is the whole interior; max = v1 there with omega_{v1}^2 = (2 beta)^2
        CHECK(rep.mass_v1_plus > 0);
        CHECK(rep.mass_max_plus >= rep.mass_v1_plus - rep.defect_allowance);
    }
    SUBCASE("random smooth omega-psh pairs at two resolutions") {
        for (double h : {0.25, 0.2}) {
            auto dd = build_ball_domain(1.0, h, 2);
            auto gg = HermitianMetricField::identity(dd);
            Rng rng(11);
            for (int trial = 0; trial < 50; ++trial) {
                const double a1 = rng.uniform(-0.4, 1.0), a2 = rng.uniform(-0.4, 1.0);
                const double b1 = rng.uniform(-0.3, 0.3), b2 = rng.uniform(-0.3, 0.3);
                const double c1 = rng.uniform(-0.2, 0.2), c2 = rng.uniform(-0.2, 0.2);
                auto v1 = from_fn(dd, [&](const Point& p) {
                    return a1 * norm2(p) + b1 * (p[0] * p[0] - p[1] * p[1]) + c1 * p[0];
                });
                auto v2 = from_fn(dd, [&](const Point& p) {
                    return a2 * norm2(p) + b2 * (p[2] * p[2] - p[3] * p[3]) + c2 * p[2];
                });
                auto rep = demailly_max_check(v1, v2, gg, *dd, 1e-9);
                CHECK(rep.precondition_ok);
                CHECK(rep.pass);
            }
        }
    }
}

TEST_SUITE_END();
