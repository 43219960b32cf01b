#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "cma/errors.hpp"
#include "cma/grid.hpp"
#include "cma/linalg.hpp"

namespace cma {

// Subset of interior nodes a sweep acts on, partitioned into stencil-safe
// colors.  Within a color no node appears in another's stencil, so a color
// pass may run node-parallel with bitwise-deterministic results for any
// thread count.
struct ActiveSet {
    const GridDomain* dom = nullptr;
    std::vector<int32_t> nodes;
    std::array<std::vector<int32_t>, 4> colors;
    int num_colors = 0;

    static ActiveSet whole_domain(const GridDomain& d);
    static ActiveSet from_nodes(const GridDomain& d, std::vector<int32_t> nodes);
};

struct SweepOptions {
    double omega = 1.0;  // relaxation factor; updates are capped afterwards
    int max_sweeps = 2000000;
    int threads = 1;
    int check_every = 16;        // residual check cadence
    double change_tol = 0.0;     // stop when a sweep moves no node more than this
    double residual_tol = -1.0;  // checked via the residual callback when >= 0
    bool throw_on_limit = true;
};

struct SweepResult {
    int sweeps = 0;
    double last_change = 0.0;
    double last_residual = 0.0;
    bool converged = false;
};

// One node update: the relaxed value is min(old + omega*(target-old), cap).
struct NodeTarget {
    double target;
    double cap;
};

// Safeguarded bisection with Newton acceleration for the per-node scalar
// monotone map c -> det(A0 - (c/h^2) I) on the positive cone.  Returns the
// center value with det = target (target >= 0); for target == 0 this is the
// cone edge h^2 lambda_min(A0).
double solve_center_det(const Herm2& A0, double h2, double target);

template <class Update>
SweepResult sweep_to_fixed_point(const ActiveSet& act, std::vector<double>& u,
                                 const Update& update, const SweepOptions& opt,
                                 const std::function<double(const double*)>& residual = nullptr,
                                 const char* what = "sweep") {
    SweepResult res;
    double omega = opt.omega;
    double best_change = std::numeric_limits<double>::infinity();
    int worse_streak = 0;

    const size_t nslots = std::max<size_t>(1, size_t(opt.threads));
    std::vector<double> chg_max(nslots, 0.0);

    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        std::fill(chg_max.begin(), chg_max.end(), 0.0);
        for (int col = 0; col < act.num_colors; ++col) {
            const auto& nodes = act.colors[col];
            if (nodes.empty()) continue;
            if (opt.threads <= 1 || nodes.size() < 512) {
                double m = chg_max[0];
                double* uv = u.data();
                for (int32_t idx : nodes) {
                    const NodeTarget t = update(idx, uv);
                    const double oldv = uv[idx];
                    double nv = oldv + omega * (t.target - oldv);
                    if (nv > t.cap) nv = t.cap;
                    uv[idx] = nv;
                    const double c = std::abs(nv - oldv);
                    if (c > m) m = c;
                }
                chg_max[0] = m;
            } else {
                const size_t nt = nslots;
                std::vector<std::thread> pool;
                const size_t chunk = (nodes.size() + nt - 1) / nt;
                for (size_t t = 0; t < nt; ++t) {
                    const size_t b = t * chunk;
                    const size_t e = std::min(nodes.size(), b + chunk);
                    if (b >= e) break;
                    pool.emplace_back([&, b, e, t, omega] {
                        double m = chg_max[t];
                        double* uv = u.data();
                        for (size_t i = b; i < e; ++i) {
                            const int32_t idx = nodes[i];
                            const NodeTarget tt = update(idx, uv);
                            const double oldv = uv[idx];
                            double nv = oldv + omega * (tt.target - oldv);
                            if (nv > tt.cap) nv = tt.cap;
                            uv[idx] = nv;
                            const double c = std::abs(nv - oldv);
                            if (c > m) m = c;
                        }
                        chg_max[t] = m;
                    });
                }
                for (auto& th : pool) th.join();
            }
        }
        double change = 0.0;
        for (double m : chg_max) change = std::max(change, m);
        res.sweeps = sweep;
        res.last_change = change;

        // over-relaxation divergence guard
        if (change < best_change) {
            best_change = change;
            worse_streak = 0;
        } else if (++worse_streak > 60 && omega > 1.0) {
            omega = 1.0;
            worse_streak = 0;
        }

        const bool change_ok = change <= opt.change_tol;
        if (opt.residual_tol >= 0.0 && residual) {
            if (change_ok || sweep % opt.check_every == 0) {
                res.last_residual = residual(u.data());
                if (res.last_residual <= opt.residual_tol && change_ok) {
                    res.converged = true;
                    return res;
                }
            }
        } else if (change_ok) {
            res.converged = true;
            return res;
        }
    }
    if (residual) res.last_residual = residual(u.data());
    if (opt.throw_on_limit)
        throw IterationLimitError(std::string(what) + ": iteration limit reached",
                                  residual ? res.last_residual : res.last_change);
    return res;
}

}  // namespace cma
