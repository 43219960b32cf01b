#pragma once

#include <optional>
#include <vector>

#include "cma/cover.hpp"
#include "cma/field.hpp"
#include "cma/forms.hpp"
#include "cma/metric.hpp"

namespace cma {

struct LinearOptions {
    double tol_lin = 1e-8;
    int max_sweeps = 4000000;
    double omega = -1.0;  // auto
    int threads = 1;
};

struct LinearInfo {
    int sweeps = 0;
    double residual = 0.0;
};

// Delta_g u = tr(g^{-1} H(u)) = rhs at interior nodes, u = phi on the boundary.
GridFunction solve_linear(const HermitianMetricField& g, const DomainPtr& domain,
                          const BoundaryData& phi, double rhs, const LinearOptions& opt = {},
                          LinearInfo* info = nullptr, const GridFunction* warm = nullptr,
                          const std::vector<int32_t>* active = nullptr);

inline GridFunction solve_laplace(const HermitianMetricField& g, const DomainPtr& domain,
                                  const BoundaryData& phi, const LinearOptions& opt = {},
                                  LinearInfo* info = nullptr) {
    return solve_linear(g, domain, phi, 0.0, opt, info);
}

// (omega + dd^c u) wedge omega^{n-1} = 0 split as u1 + u2 with
// Delta_g u1 = 0, u1 = phi and Delta_g u2 = -n, u2 = 0.
GridFunction solve_trace_equation(const HermitianMetricField& g, const DomainPtr& domain,
                                  const BoundaryData& phi, const LinearOptions& opt = {},
                                  LinearInfo* info = nullptr);

// Perron iteration with harmonic lifts on a ball cover, from a subharmonic start.
GridFunction perron_laplace(const HermitianMetricField& g, const DomainPtr& domain,
                            const BoundaryData& phi, const std::vector<CoordinateBall>& cover,
                            const GridFunction& start, const LinearOptions& opt = {},
                            int* passes = nullptr);

struct BarrierSpec {
    int64_t base_node = -1;
    Point base_point;          // exact point on the analytic surface
    double alpha = 0.0, tau = 0.0;
    double k = 0.0, c1 = 0.0;  // barrier coefficient and Hoelder norm of phi
    double validity_radius = 0.0;
    std::vector<int32_t> checked_nodes;  // interior nodes of W = B(xi, R/2)
};

// Shared data for barriers at many base points: the Hoelder norm of phi and
// the global doubling cap, computed once.
struct BarrierContext {
    double c1 = 0.0;
    double k_max = 0.0;
    double validity_radius = 0.0;
    double eps0 = 0.0;  // gradient threshold actually enforced
};

BarrierContext make_barrier_context(const BoundaryData& phi, double alpha, double tau,
                                    const GridDomain& domain, const HermitianMetricField& g,
                                    double validity_radius = -1.0);

struct BarrierResult {
    BarrierSpec spec;
    GridFunction v;
};

// v(z) = k |rho|^tau + c1 |z - xi|^alpha + phi(xi), superharmonic for Delta_g
// near xi; k from a doubling search capped by the global k_max.
BarrierResult hoelder_barrier(int64_t xi, const BoundaryData& phi, double alpha, double tau,
                              const DomainPtr& domain, const HermitianMetricField& g,
                              const BarrierContext* ctx = nullptr);

struct GlobalBarrier {
    GridFunction upper;
    GridFunction lower;
    double c1 = 0.0;
    double k_used = 0.0;
};

GlobalBarrier global_barrier(const BoundaryData& phi, double alpha, const DomainPtr& domain,
                             const HermitianMetricField& g);

struct HoelderModulus {
    double modulus = 0.0;           // over sampled node pairs
    double boundary_modulus = 0.0;  // pairs (node, boundary node)
};

// max |u(x)-u(y)| / dist(x,y)^alpha; all pairs when few enough, otherwise
// stratified by dyadic distance with a seeded deterministic sampler.
HoelderModulus hoelder_modulus(const GridFunction& u, double alpha, const GridDomain& domain,
                               uint64_t seed = 12345);

}  // namespace cma
