#include "cma/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace cma {

double GridDomain::signed_dist(const Point& p) const {
    const double r = std::sqrt(norm2(p));
    if (kind == Kind::Ball) return r - radius;
    return std::max(r_in - r, r - r_out);
}

Point GridDomain::project_to_boundary(const Point& p) const {
    const double r = std::sqrt(norm2(p));
    double target = radius;
    if (kind == Kind::Shell) target = (r <= 0.5 * (r_in + r_out)) ? r_in : r_out;
    Point q = p;
    if (r < 1e-14) {  // degenerate center node; pick a point on the first axis
        q[0] = target;
        return q;
    }
    const double f = target / r;
    for (int a = 0; a < 4; ++a) q[a] = p[a] * f;
    return q;
}

namespace {

std::vector<int64_t> make_stencil_offsets(const GridDomain& d) {
    std::vector<int64_t> offs;
    for (int a = 0; a < d.real_dim(); ++a) {
        offs.push_back(d.stride[a]);
        offs.push_back(-d.stride[a]);
    }
    if (d.n == 2) {
        // plane diagonals pairing one axis of z1 with one axis of z2
        for (int a : {0, 1})
            for (int b : {2, 3})
                for (int sa : {-1, 1})
                    for (int sb : {-1, 1})
                        offs.push_back(sa * d.stride[a] + sb * d.stride[b]);
    }
    return offs;
}

void classify(GridDomain& d) {
    const int64_t total = d.size();
    d.node_class.assign(total, NodeClass::Exterior);
    d.boundary_dist.assign(total, 0.0);
    d.stencil_offsets = make_stencil_offsets(d);

    // Interior nodes keep a clearance of (sqrt(2)-1) h from the surface: the
    // diagonal stencil then stays inside the domain for n = 2, sub-cell
    // distances that the stencil cannot resolve never become unknowns, and
    // boundary carriers stay within h of the surface on both sides.
    const double margin = (std::sqrt(2.0) - 1.0) * d.h;
    const double btol = d.h * (1.0 + 1e-12);

    std::vector<double> sdist(total);
    const int di2 = (d.n == 2) ? d.dims[2] : 1;
    const int di3 = (d.n == 2) ? d.dims[3] : 1;
    for (int i3 = 0; i3 < di3; ++i3)
        for (int i2 = 0; i2 < di2; ++i2)
            for (int i1 = 0; i1 < d.dims[1]; ++i1)
                for (int i0 = 0; i0 < d.dims[0]; ++i0) {
                    const int64_t idx = d.index(i0, i1, i2, i3);
                    const double s = d.signed_dist(d.point(idx));
                    sdist[idx] = s;
                    d.boundary_dist[idx] = std::abs(s);
                    if (s < -margin) d.node_class[idx] = NodeClass::Interior;
                }

    // nodes on the outermost shells of the box can never be interior (no allocated stencil)
    auto on_rim = [&](int64_t idx) {
        auto c = d.coords(idx);
        for (int a = 0; a < d.real_dim(); ++a)
            if (c[a] < 2 || c[a] > d.dims[a] - 3) return true;
        return false;
    };

    std::vector<int64_t> interior_tmp;
    for (int64_t idx = 0; idx < total; ++idx)
        if (d.node_class[idx] == NodeClass::Interior) {
            if (on_rim(idx))
                d.node_class[idx] = NodeClass::Exterior;
            else
                interior_tmp.push_back(idx);
        }

    // keep the largest axis-connected interior component, demote the rest
    {
        std::vector<int32_t> comp(total, -1);
        int ncomp = 0;
        std::vector<int64_t> sizes;
        for (int64_t seed : interior_tmp) {
            if (comp[seed] >= 0) continue;
            int64_t cnt = 0;
            std::deque<int64_t> q{seed};
            comp[seed] = ncomp;
            while (!q.empty()) {
                int64_t p = q.front();
                q.pop_front();
                ++cnt;
                for (int a = 0; a < d.real_dim(); ++a)
                    for (int sgn : {-1, 1}) {
                        int64_t nb = p + sgn * d.stride[a];
                        if (d.node_class[nb] == NodeClass::Interior && comp[nb] < 0) {
                            comp[nb] = ncomp;
                            q.push_back(nb);
                        }
                    }
            }
            sizes.push_back(cnt);
            ++ncomp;
        }
        if (ncomp == 0) throw ConfigError("domain has no interior nodes; spacing too coarse");
        if (ncomp > 1)
            throw ConfigError("interior node set is disconnected; spacing too coarse");
    }

    // boundary carriers: non-interior nodes within h of the surface that sit
    // in the stencil of some interior node
    for (int64_t idx = 0; idx < total; ++idx) {
        if (d.node_class[idx] != NodeClass::Interior) continue;
        for (int64_t off : d.stencil_offsets) {
            const int64_t nb = idx + off;
            if (d.node_class[nb] == NodeClass::Exterior) {
                if (std::abs(sdist[nb]) <= btol)
                    d.node_class[nb] = NodeClass::Boundary;
                else
                    throw ConfigError("interior stencil reaches a node far from the surface");
            }
        }
    }

    d.interior.clear();
    d.boundary.clear();
    for (int64_t idx = 0; idx < total; ++idx) {
        if (d.node_class[idx] == NodeClass::Interior) d.interior.push_back(int32_t(idx));
        if (d.node_class[idx] == NodeClass::Boundary) d.boundary.push_back(int32_t(idx));
    }

    // per-axis interior extent check
    std::array<int, 4> imin{1 << 30, 1 << 30, 1 << 30, 1 << 30};
    std::array<int, 4> imax{-1, -1, -1, -1};
    for (int32_t idx : d.interior) {
        auto c = d.coords(idx);
        for (int a = 0; a < d.real_dim(); ++a) {
            imin[a] = std::min(imin[a], c[a]);
            imax[a] = std::max(imax[a], c[a]);
        }
    }
    for (int a = 0; a < d.real_dim(); ++a)
        if (imax[a] - imin[a] + 1 < 3)
            throw ConfigError("spacing too coarse: fewer than 3 interior nodes per axis");

    // projections and boundary rank
    d.boundary_rank_.assign(total, -1);
    d.boundary_proj.resize(d.boundary.size());
    for (size_t k = 0; k < d.boundary.size(); ++k) {
        d.boundary_rank_[d.boundary[k]] = int32_t(k);
        d.boundary_proj[k] = d.project_to_boundary(d.point(d.boundary[k]));
    }

    // boundary components via Chebyshev-1 adjacency among boundary nodes
    d.boundary_component.assign(d.boundary.size(), -1);
    {
        std::vector<int64_t> moore;
        const int dim = d.real_dim();
        std::array<int, 4> c{0, 0, 0, 0};
        auto rec = [&](auto&& self, int axis) -> void {
            if (axis == dim) {
                int64_t off = 0;
                bool zero = true;
                for (int a = 0; a < dim; ++a) {
                    off += c[a] * d.stride[a];
                    zero = zero && c[a] == 0;
                }
                if (!zero) moore.push_back(off);
                return;
            }
            for (int v : {-1, 0, 1}) {
                c[axis] = v;
                self(self, axis + 1);
            }
        };
        rec(rec, 0);

        int ncomp = 0;
        for (size_t k = 0; k < d.boundary.size(); ++k) {
            if (d.boundary_component[k] >= 0) continue;
            std::deque<int64_t> q{d.boundary[k]};
            d.boundary_component[k] = ncomp;
            while (!q.empty()) {
                int64_t p = q.front();
                q.pop_front();
                for (int64_t off : moore) {
                    int64_t nb = p + off;
                    if (nb < 0 || nb >= total) continue;
                    if (d.node_class[nb] != NodeClass::Boundary) continue;
                    int32_t rk = d.boundary_rank_[nb];
                    if (d.boundary_component[rk] < 0) {
                        d.boundary_component[rk] = ncomp;
                        q.push_back(nb);
                    }
                }
            }
            ++ncomp;
        }
        d.num_boundary_components = ncomp;
    }

    // coloring: (x1+y1) mod 2 for n=1; ((x1+y1) mod 2, (x2+y2) mod 2) for n=2
    d.num_colors = (d.n == 1) ? 2 : 4;
    for (auto& v : d.colors) v.clear();
    for (int32_t idx : d.interior) {
        auto c = d.coords(idx);
        int col = (c[0] + c[1]) & 1;
        if (d.n == 2) col |= ((c[2] + c[3]) & 1) << 1;
        d.colors[col].push_back(idx);
    }
}

DomainPtr finish(std::shared_ptr<GridDomain> d) {
    classify(*d);
    return d;
}

}  // namespace

DomainPtr build_ball_domain(double radius, double h, int n) {
    if (n != 1 && n != 2) throw ConfigError("complex dimension must be 1 or 2");
    if (!(radius > 0) || !(h > 0)) throw ConfigError("radius and spacing must be positive");
    auto d = std::make_shared<GridDomain>();
    d->n = n;
    d->h = h;
    d->kind = GridDomain::Kind::Ball;
    d->radius = radius;
    const int m = int(std::ceil(radius / h)) + 3;
    for (int a = 0; a < 2 * n; ++a) {
        d->dims[a] = 2 * m + 1;
        d->lo[a] = -m * h;
    }
    d->stride = {1, d->dims[0], int64_t(d->dims[0]) * d->dims[1],
                 int64_t(d->dims[0]) * d->dims[1] * d->dims[2]};
    return finish(d);
}

DomainPtr build_shell_domain(double r_in, double r_out, double h, int n) {
    if (n != 1 && n != 2) throw ConfigError("complex dimension must be 1 or 2");
    if (!(0 < r_in && r_in < r_out) || !(h > 0))
        throw ConfigError("shell radii must satisfy 0 < r_in < r_out");
    if (r_out - r_in < 2 * h)
        throw ConfigError("spacing too coarse for the shell thickness");
    auto d = std::make_shared<GridDomain>();
    d->n = n;
    d->h = h;
    d->kind = GridDomain::Kind::Shell;
    d->r_in = r_in;
    d->r_out = r_out;
    const int m = int(std::ceil(r_out / h)) + 3;
    for (int a = 0; a < 2 * n; ++a) {
        d->dims[a] = 2 * m + 1;
        d->lo[a] = -m * h;
    }
    d->stride = {1, d->dims[0], int64_t(d->dims[0]) * d->dims[1],
                 int64_t(d->dims[0]) * d->dims[1] * d->dims[2]};
    return finish(d);
}

}  // namespace cma
