#pragma once

#include <string>
#include <vector>

#include "cma/capacity.hpp"
#include "cma/field.hpp"
#include "cma/forms.hpp"
#include "cma/masolver.hpp"
#include "cma/metric.hpp"

namespace cma {

// Quantitative local comparison certificate.  Probe levels s in
// (0, min(theta^n/(16 B), |s0|)); each level compares the mass of omega_v^n
// over U(s) = {u < v + s0 + s} against (1 + s B C_n / theta^n) times the mass
// of omega_u^n there, and the smallest workable C_n is fitted.
struct ComparisonCertificate {
    bool hypotheses_ok = false;
    std::string hypothesis_note;
    double theta = 0.0;
    double B = 0.0;
    double s0 = 0.0;      // -sup(v - u)
    double theta0 = 0.0;  // probe range bound

    struct Level {
        double s = 0.0;
        double mass_v = 0.0;
        double mass_u = 0.0;
        double required_cn = 0.0;  // minimal C_n for this level; inf -> alarm
        int64_t set_size = 0;
        bool boundary_clean = true;  // U(s) contains no boundary node
    };
    std::vector<Level> levels;
    double fitted_cn = 0.0;
    bool alarm = false;  // some level fails for every C_n <= 1e6
    bool all_pass = false;
};

ComparisonCertificate local_cp_certificate(const GridFunction& u, const GridFunction& v,
                                           double theta, const HermitianMetricField& g,
                                           const GridDomain& domain, double B = -1.0,
                                           int num_levels = 8);

struct ComparisonTestReport {
    bool pass = false;
    double max_violation = 0.0;  // max over nodes of (v - u), u the small-measure solution
    double tol_cmp = 0.0;
    GridFunction u_small;  // solution for mu
    GridFunction u_large;  // solution for nu
};

// Prop-style comparison: mu <= nu with shared phi and F implies u >= v.
ComparisonTestReport comparison_test(const DirichletProblem& small_measure,
                                     const DirichletProblem& large_measure,
                                     const SolverOptions& opt = {});

struct StabilityReport {
    std::vector<double> weak_gap;        // ball-average gap of f_j dmu vs f dmu
    std::vector<double> sup_diff;        // sup |u_j - u_limit|
    std::vector<double> ma_weak_gap;     // ball-average gap of MA(u_j) vs f dmu
    std::vector<std::vector<double>> hessian_energies;  // per j, k = 0..n
    bool cauchy_ok = false;
    bool residual_ok = false;
    std::vector<GridFunction> solutions;
    GridFunction limit_solution;
};

StabilityReport stability_test(const std::vector<GridFunction>& f_seq, const GridFunction& f_limit,
                               const MeasureField& mu_base, const BoundaryData& phi,
                               const HermitianMetricField& g, const DomainPtr& domain,
                               const SolverOptions& opt = {});

struct EnergyTerms {
    double lhs = 0.0;    // int (v-u)^3 (dd^c rho)^2
    double i1 = 0.0;     // int (v-u) omega_u^2
    double i2 = 0.0;     // int (v-u)^2 omega^2
    double e_term = 0.0; // sqrt(int (v-u) omega_u wedge omega) sqrt(i2)
};

EnergyTerms energy_terms(const GridFunction& u, const GridFunction& v, const GridFunction& rho,
                         const HermitianMetricField& g, const GridDomain& domain);

struct EnergyReport {
    EnergyTerms terms;
    double C = 0.0;
    double margin = 0.0;  // rhs - lhs with the frozen constant
    bool pre_ok = false;
    std::string pre_note;
    bool pass = false;
};

// lhs <= 6 i1 + C i2 + C e_term, n = 2 only; C is calibrated elsewhere and frozen.
EnergyReport energy_inequality_test(const GridFunction& u, const GridFunction& v,
                                    const GridFunction& rho, const HermitianMetricField& g,
                                    const GridDomain& domain, double C);

// mu = MA(u_star)/F(u_star, .) with trace and subsolution from u_star.
DirichletProblem manufactured_problem(const GridFunction& u_star, const RhsFunction& F,
                                      const HermitianMetricField& g, const DomainPtr& domain,
                                      double tol_F = 1e-12);

}  // namespace cma
