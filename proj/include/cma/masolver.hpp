#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cma/cover.hpp"
#include "cma/field.hpp"
#include "cma/forms.hpp"
#include "cma/laplace.hpp"
#include "cma/metric.hpp"

namespace cma {

// F(t,z): bounded, nonnegative, non-decreasing and continuous in t.
class RhsFunction {
public:
    enum class Kind { Constant, Exponential, Tabulated };

    static RhsFunction constant(double value);
    // F = e^{lambda t} for t <= t_cap, frozen above t_cap to stay bounded
    static RhsFunction exponential(double lambda, double t_cap);
    // piecewise-linear in t over a shared grid; optional per-node multiplier
    static RhsFunction tabulated(std::vector<double> t_grid, std::vector<double> values,
                                 std::vector<double> node_scale = {});

    Kind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    bool is_zero() const;
    double bound() const { return m_f_; }  // sup of F

    double evaluate(double t, int64_t node) const;
    double derivative(double t, int64_t node) const;  // in t; one-sided at grid knots

    // samples >= 100 t-pairs at interior and boundary nodes and checks
    // 0 <= F <= bound and monotonicity in t
    void validate(const GridDomain& domain, double t_lo, double t_hi) const;

private:
    Kind kind_ = Kind::Constant;
    double c0_ = 0.0;
    double lambda_ = 0.0, t_cap_ = 0.0;
    std::vector<double> t_grid_, values_, node_scale_;
    double m_f_ = 0.0;
};

struct DirichletProblem {
    DomainPtr domain;
    HermitianMetricField g;
    MeasureField mu;
    RhsFunction F;
    BoundaryData phi;
    std::optional<GridFunction> subsolution;      // \bar u with MA(\bar u) >= F(\bar u) mu
    std::optional<GridFunction> cegrell_witness;  // v in E_0 with (scaled) mu <= (dd^c v)^n
};

struct SolveReport {
    int iterations = 0;         // outer stages (picard) or ball passes (perron)
    double final_update = 0.0;  // sup-norm of the last update
    double ma_residual_mass = 0.0;
    double ma_residual_sup = 0.0;  // at atom-free nodes, recomputed from the returned function
    int64_t sandwich_violations = 0;
    int total_sweeps = 0;
    bool monotone_ok = true;
    double worst_monotone_defect = 0.0;
    std::vector<double> update_history;
    std::vector<double> rhs_l1_history;  // L1(d mu) change of F(u_k) between stages
    double uniqueness_gap = -1.0;        // picard vs perron, when cross-checked
    bool uniqueness_ok = true;
};

struct SolverOptions {
    double tol_fix = -1.0;   // default 1e-6 osc(phi) + 1e-10
    double tol_cmp = -1.0;   // default max(10 tol_fix, 5 h problem_scale)
    double tol_ma = -1.0;    // default 1e-4 (sup density + 1)
    double tol_b = -1.0;     // boundary trace tolerance, default 10 h max(1, osc)
    double omega = -1.0;     // relaxation, default auto from grid
    int max_sweeps = 4000000;
    int max_stages = 60;
    int threads = 1;
    double atom_density_cap = -1.0;  // optional cap on atom-induced densities
};

double resolve_tol_fix(const SolverOptions& o, const BoundaryData& phi);
double resolve_tol_cmp(const SolverOptions& o, const BoundaryData& phi, const GridDomain& d,
                       double solution_scale);
double resolve_tol_ma(const SolverOptions& o, double sup_density);

// (omega + dd^c h)^n = 0 with trace phi; the largest omega-psh function below phi.
GridFunction solve_maximal(const HermitianMetricField& g, const DomainPtr& domain,
                           const BoundaryData& phi, const SolverOptions& opt = {},
                           SolveReport* rep = nullptr);

// The map T: solves (omega + dd^c w)^n = nu with trace phi, nu a fixed measure.
GridFunction solve_fixed_rhs(const HermitianMetricField& g, const DomainPtr& domain,
                             const MeasureField& nu, const BoundaryData& phi,
                             const SolverOptions& opt = {}, SolveReport* rep = nullptr,
                             const GridFunction* warm = nullptr);

// Monotone iteration for (omega + dd^c u)^n = F(u,z) mu from the maximal
// function; the stage iterates are non-increasing.
GridFunction picard_solve(const DirichletProblem& problem, const SolverOptions& opt = {},
                          SolveReport* rep = nullptr);

// Perron envelope with local lifts on a ball cover; requires a subsolution.
GridFunction perron_solve(const DirichletProblem& problem,
                          const std::vector<CoordinateBall>& cover,
                          const SolverOptions& opt = {}, SolveReport* rep = nullptr);

struct SubsolutionReport {
    bool ok = false;
    bool psh_ok = false;
    bool trace_ok = false;
    bool ma_ok = false;
    double worst_trace_defect = 0.0;
    double worst_ma_defect = 0.0;
    double worst_cone_eig = 0.0;
};

SubsolutionReport check_subsolution(const GridFunction& ubar, const DirichletProblem& problem,
                                    const SolverOptions& opt = {});

// omega_u^n = e^{lambda u} mu; solves from the supersolution start (picard)
// and the subsolution start (perron) and cross-checks agreement.
GridFunction solve_exponential(double lambda, const MeasureField& mu, const BoundaryData& phi,
                               const HermitianMetricField& g, const DomainPtr& domain,
                               const SolverOptions& opt = {}, SolveReport* rep = nullptr,
                               const GridFunction* subsolution = nullptr);

struct LambdaStudy {
    std::vector<double> lambdas;
    std::vector<GridFunction> family;
    GridFunction extrapolated;   // linear extrapolation in lambda from the two smallest
    GridFunction mu_solution;    // solve_fixed_rhs(mu, phi - b)
    double b = 0.0;              // sup of the subsolution
    bool monotone_in_lambda = true;
    double worst_monotone_defect = 0.0;
    double limit_gap = 0.0;      // sup |extrapolated - mu_solution|
};

LambdaStudy lambda_limit_study(const MeasureField& mu, const BoundaryData& phi,
                               const HermitianMetricField& g, const DomainPtr& domain,
                               const std::vector<double>& lambda_sequence,
                               const GridFunction& subsolution, const SolverOptions& opt = {});

}  // namespace cma
