#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "cma/errors.hpp"

namespace cma {

enum class NodeClass : uint8_t { Interior = 0, Boundary = 1, Exterior = 2 };

// Point in R^{2n}; coordinates ordered (x1, y1, x2, y2), unused axes stay 0.
struct Point {
    std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};
    double& operator[](int i) { return x[i]; }
    double operator[](int i) const { return x[i]; }
};

inline double norm2(const Point& p) {
    return p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2] + p.x[3] * p.x[3];
}

// Uniform lattice discretization of a ball or spherical shell in C^n, n = 1, 2.
//
// Interior nodes carry the full centered stencil: the 4n axis neighbors plus,
// for n = 2, the 16 plane-diagonal neighbors used by the mixed second
// differences.  Nodes that would need a one-sided difference are classified
// as boundary instead and carry Dirichlet data evaluated at their projection
// onto the analytic boundary surface.  Every boundary node lies within h of
// the surface.
class GridDomain {
public:
    enum class Kind { Ball, Shell };

    int n = 1;        // complex dimension
    double h = 0.0;   // lattice spacing, same on all real axes
    Kind kind = Kind::Ball;
    double radius = 0.0;          // ball
    double r_in = 0.0, r_out = 0.0;  // shell

    std::array<int, 4> dims{1, 1, 1, 1};
    std::array<double, 4> lo{0, 0, 0, 0};
    std::array<int64_t, 4> stride{1, 1, 1, 1};

    std::vector<NodeClass> node_class;
    std::vector<double> boundary_dist;       // |signed distance to surface|, all nodes
    std::vector<int32_t> interior;           // flat indices, lexicographic order
    std::vector<int32_t> boundary;           // flat indices, lexicographic order
    std::vector<int32_t> boundary_component; // parallel to `boundary`
    std::vector<Point> boundary_proj;        // parallel to `boundary`
    int num_boundary_components = 0;

    // Interior nodes partitioned so that no two nodes of one color appear in
    // each other's stencil: 2 colors for n = 1, 4 for n = 2.
    std::array<std::vector<int32_t>, 4> colors;
    int num_colors = 0;

    std::vector<int64_t> stencil_offsets;  // flat-index offsets of the full stencil

    int real_dim() const { return 2 * n; }
    int64_t size() const { return int64_t(dims[0]) * dims[1] * dims[2] * dims[3]; }

    int64_t index(int i0, int i1, int i2, int i3) const {
        return i0 * stride[0] + i1 * stride[1] + i2 * stride[2] + i3 * stride[3];
    }

    std::array<int, 4> coords(int64_t idx) const {
        std::array<int, 4> c{0, 0, 0, 0};
        for (int a = 0; a < 4; ++a) {
            c[a] = int(idx % dims[a]);
            idx /= dims[a];
        }
        return c;
    }

    Point point(int64_t idx) const {
        auto c = coords(idx);
        Point p;
        for (int a = 0; a < real_dim(); ++a) p[a] = lo[a] + h * c[a];
        return p;
    }

    bool is_interior(int64_t idx) const { return node_class[idx] == NodeClass::Interior; }
    bool is_boundary(int64_t idx) const { return node_class[idx] == NodeClass::Boundary; }

    // Signed distance to the analytic surface, negative inside the domain.
    double signed_dist(const Point& p) const;
    Point project_to_boundary(const Point& p) const;

    // Position of a node in the `boundary` list, or -1.
    int32_t boundary_rank(int64_t idx) const { return boundary_rank_[idx]; }

    std::vector<int32_t> boundary_rank_;  // -1 for non-boundary nodes
};

using DomainPtr = std::shared_ptr<const GridDomain>;

DomainPtr build_ball_domain(double radius, double h, int n);
DomainPtr build_shell_domain(double r_in, double r_out, double h, int n);

}  // namespace cma
