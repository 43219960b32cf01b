#pragma once

#include <cmath>
#include <vector>

#include "cma/grid.hpp"

namespace cma {

struct CoordinateBall {
    Point center;
    double radius = 0.0;
};

// Deterministic cover of the interior by coordinate balls: centers on a coarse
// sublattice, plus one ball per otherwise uncovered node.  A node counts as
// covered by a ball when its whole stencil fits inside it.
inline std::vector<CoordinateBall> make_ball_cover(const GridDomain& d, double radius) {
    const double reach = std::sqrt(2.0) * d.h;
    if (radius < 3.0 * reach) radius = 3.0 * reach;
    const double spacing = 0.45 * radius;
    const int step = std::max(1, int(spacing / d.h));

    std::vector<CoordinateBall> cover;
    const int di2 = d.dims[2], di3 = d.dims[3];
    for (int i3 = 0; i3 < di3; i3 += (d.n == 2 ? step : di3))
        for (int i2 = 0; i2 < di2; i2 += (d.n == 2 ? step : di2))
            for (int i1 = 0; i1 < d.dims[1]; i1 += step)
                for (int i0 = 0; i0 < d.dims[0]; i0 += step) {
                    const int64_t idx = d.index(i0, i1, i2, i3);
                    const Point c = d.point(idx);
                    if (d.signed_dist(c) < -d.h) cover.push_back({c, radius});
                }

    auto covered = [&](const Point& p) {
        for (const auto& b : cover) {
            double s = 0;
            for (int a = 0; a < 4; ++a) s += (p[a] - b.center[a]) * (p[a] - b.center[a]);
            if (std::sqrt(s) <= b.radius - reach) return true;
        }
        return false;
    };
    for (int32_t idx : d.interior) {
        const Point p = d.point(idx);
        if (!covered(p)) cover.push_back({p, radius});
    }
    return cover;
}

// Interior nodes whose stencil stays inside the ball (or ends on domain boundary).
inline std::vector<int32_t> ball_active_nodes(const GridDomain& d, const CoordinateBall& b) {
    const double reach = std::sqrt(2.0) * d.h;
    std::vector<int32_t> nodes;
    for (int32_t idx : d.interior) {
        const Point p = d.point(idx);
        double s = 0;
        for (int a = 0; a < 4; ++a) s += (p[a] - b.center[a]) * (p[a] - b.center[a]);
        if (std::sqrt(s) <= b.radius - reach) nodes.push_back(idx);
    }
    return nodes;
}

}  // namespace cma
