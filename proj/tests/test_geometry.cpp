#include "doctest.h"

#include <cmath>
#include <deque>
#include <set>

#include "cma/grid.hpp"
#include "cma/metric.hpp"

using namespace cma;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("ball n=1 coarse: interior nodes are exactly the lattice points inside") {
    auto d = build_ball_domain(1.0, 0.5, 1);
    std::set<std::pair<int, int>> interior_pts;
    for (int32_t idx : d->interior) {
        const Point p = d->point(idx);
        CHECK(std::hypot(p[0], p[1]) < 1.0);
        interior_pts.insert({int(std::lround(p[0] / 0.5)), int(std::lround(p[1] / 0.5))});
    }
    // 9 lattice points with |z| < 1 at spacing 0.5
    CHECK(interior_pts.size() == 9);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) CHECK(interior_pts.count({i, j}) == 1);
}

TEST_CASE("ball n=1 fine: interior count matches the area estimate") {
    // brute-force lattice enumeration oracle
    const double h = 0.01;
    auto d = build_ball_domain(1.0, h, 1);
    const double ratio = double(d->interior.size()) / (M_PI / (h * h));
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
}

TEST_CASE("ball n=2: every interior node has its full stencil classified") {
    auto d = build_ball_domain(1.0, 0.3, 2);
    for (int32_t idx : d->interior) {
        int count = 0;
        for (int64_t off : d->stencil_offsets) {
            CHECK(d->node_class[idx + off] != NodeClass::Exterior);
            ++count;
        }
        CHECK(count == 24);  // 8 axis + 16 plane-diagonal neighbors
    }
}

TEST_CASE("boundary nodes lie within h of the surface") {
    for (auto d : {build_ball_domain(1.0, 0.1, 1), build_ball_domain(1.0, 0.25, 2)}) {
        for (size_t k = 0; k < d->boundary.size(); ++k) {
            const int32_t idx = d->boundary[k];
            CHECK(d->boundary_dist[idx] <= d->h * (1 + 1e-9));
            // projection sits on the analytic surface
            CHECK(std::abs(std::sqrt(norm2(d->boundary_proj[k])) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("shell n=1: two boundary components and exact boundary distances") {
    auto d = build_shell_domain(0.5, 1.0, 0.05, 1);
    CHECK(d->num_boundary_components == 2);
    for (int32_t idx : d->interior) {
        const double r = std::sqrt(norm2(d->point(idx)));
        const double expect = std::min(r - 0.5, 1.0 - r);
        CHECK(d->boundary_dist[idx] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("shell interior is connected (flood-fill oracle)") {
    auto check_connected = [](const DomainPtr& d) {
        // independent BFS over axis neighbors
        std::set<int64_t> interior(d->interior.begin(), d->interior.end());
        std::deque<int64_t> q{*interior.begin()};
        std::set<int64_t> seen{*interior.begin()};
        while (!q.empty()) {
            int64_t p = q.front();
            q.pop_front();
            for (int a = 0; a < d->real_dim(); ++a)
                for (int s : {-1, 1}) {
                    int64_t nb = p + s * d->stride[a];
                    if (interior.count(nb) && !seen.count(nb)) {
                        seen.insert(nb);
                        q.push_back(nb);
                    }
                }
        }
        CHECK(seen.size() == interior.size());
    };
    check_connected(build_shell_domain(0.5, 1.0, 0.2, 2));
    check_connected(build_shell_domain(0.5, 1.0, 0.05, 1));
}

TEST_CASE("coarse spacing raises a configuration error") {
    CHECK_THROWS_AS(build_ball_domain(1.0, 1.1, 1), ConfigError);
    CHECK_THROWS_AS(build_shell_domain(0.5, 1.0, 0.3, 1), ConfigError);
    CHECK_THROWS_AS(build_shell_domain(1.0, 0.5, 0.05, 1), ConfigError);
}

TEST_CASE("standard defining function on the ball") {
    auto d = build_ball_domain(1.0, 0.1, 1);
    DefiningFunction df = standard_defining_function(d);
    CHECK(df.strict_psh_margin == 1.0);

    // rho(0) = -1
    const int64_t center = d->index(d->dims[0] / 2, d->dims[1] / 2, 0, 0);
    CHECK(df.rho[center] == doctest::Approx(-1.0).epsilon(1e-14));

    for (int32_t idx : d->interior) CHECK(df.rho[idx] < 0.0);
    // |rho| <= 2h + h^2 at boundary nodes (lattice offset bound)
    for (int32_t idx : d->boundary)
        CHECK(std::abs(df.rho[idx]) <= 2 * d->h + d->h * d->h + 1e-12);
}

TEST_CASE("defining function is unsupported on shells") {
    auto d = build_shell_domain(0.5, 1.0, 0.05, 1);
    CHECK_THROWS_AS(standard_defining_function(d), ConfigError);
}

TEST_CASE("metric bound B") {
    SUBCASE("Kahler metric has B = 0") {
        auto d = build_ball_domain(1.0, 0.25, 2);
        auto g = HermitianMetricField::identity(d);
        CHECK(metric_bound_B(g, *d) == doctest::Approx(0.0));
        // scaling invariance in the Kahler case
        auto g3 = HermitianMetricField::from_function(d, [](const Point&) { return 3.0; });
        CHECK(metric_bound_B(g3, *d) == doctest::Approx(0.0));
    }
    SUBCASE("n=1 vanishes for degree reasons") {
        auto d = build_ball_domain(1.0, 0.1, 1);
        auto g = HermitianMetricField::from_function(d, [](const Point& p) {
            return std::exp(p[0]);
        });
        CHECK(metric_bound_B(g, *d) == 0.0);
    }
    SUBCASE("conformal e^{x1} metric: finite, correct, stable under refinement") {
        // analytic: dd^c omega density e^{x1}, omega^2 density 8 e^{2 x1};
        // B = max 4 e^{-x1} / 8 over the interior
        double prev = 0.0;
        for (double h : {0.1, 0.05}) {
            auto d = build_ball_domain(1.0, h, 2);
            auto g = HermitianMetricField::from_function(d, [](const Point& p) {
                return std::exp(p[0]);
            });
            const double B = metric_bound_B(g, *d);
            double xmin = 1e9;
            for (int32_t idx : d->interior) xmin = std::min(xmin, d->point(idx)[0]);
            CHECK(B == doctest::Approx(0.5 * std::exp(-xmin)).epsilon(0.02));
            if (prev > 0) {
                CHECK(B < prev * 1.10);  // finite-difference oracle at two resolutions
                CHECK(B > prev * 0.90);
            }
            prev = B;
        }
    }
    SUBCASE("non-positive metric is rejected") {
        auto d = build_ball_domain(1.0, 0.25, 2);
        auto g = HermitianMetricField::from_function(d, [](const Point& p) {
            return p[0];  // changes sign
        });
        CHECK_THROWS_AS(metric_bound_B(g, *d), ConfigError);
    }
}

TEST_SUITE_END();
