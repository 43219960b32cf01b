#pragma once

#include <vector>

#include "cma/cover.hpp"
#include "cma/field.hpp"
#include "cma/forms.hpp"
#include "cma/metric.hpp"

namespace cma {

struct CapacityEstimate {
    std::vector<int32_t> set_nodes;  // E
    double value = 0.0;              // total MA mass of the extremal function
    GridFunction extremal;           // u_{E,Omega}
};

struct CapacityOptions {
    double tol = -1.0;  // envelope fixed-point tolerance, default 1e-9
    double omega = -1.0;
    int max_sweeps = 4000000;
    int threads = 1;
};

// Largest psh v <= 0 with v <= -1 on E (pure psh cone, g = 0); boundary 0.
GridFunction relative_extremal(const std::vector<int32_t>& E, const DomainPtr& domain,
                               const CapacityOptions& opt = {});

// cap(E, Omega) = total MA mass of the relative extremal function.
CapacityEstimate bt_capacity(const std::vector<int32_t>& E, const DomainPtr& domain,
                             const CapacityOptions& opt = {});

struct E0Report {
    bool ok = false;
    bool psh_ok = false;
    bool nonpositive_ok = false;
    double boundary_defect = 0.0;
    double total_mass = 0.0;
};

// Cegrell class E_0: bounded psh, zero boundary values, finite MA mass.
E0Report check_E0_membership(const GridFunction& v, const GridDomain& domain, double tol_b = -1.0);

struct DominationWitness {
    CoordinateBall ball;
    double coefficient = 0.0;  // A in v = A (|z - c|^2 - r^2)
    bool ok = false;
    std::string detail;
};

struct DominationReport {
    bool ok = false;
    std::vector<DominationWitness> witnesses;
};

// mu|_B <= (dd^c v)^n with v = A (|z-c|^2 - r^2), A from the ball's sup
// density; atoms are compared against their cell budget.
DominationReport check_local_domination(const MeasureField& mu, const GridDomain& domain,
                                        const std::vector<CoordinateBall>& cover);

// h^{2n} sum |u - v| * density(omega_u^k wedge omega^{n-k})
double hessian_energy(const GridFunction& u, const GridFunction& v, int k,
                      const HermitianMetricField& g, const GridDomain& domain);

// cap({|u_j - u| > eps}) for each member of the sequence
std::vector<double> capacity_convergence(const std::vector<GridFunction>& u_seq,
                                         const GridFunction& u, double eps,
                                         const DomainPtr& domain,
                                         const CapacityOptions& opt = {});

}  // namespace cma
