#pragma once

#include <optional>
#include <vector>

#include "cma/field.hpp"
#include "cma/grid.hpp"
#include "cma/kernels.hpp"
#include "cma/metric.hpp"

namespace cma {

// Mixed second differences d^2 u / dz_j dzbar_k at interior nodes.
class HermitianHessianField {
public:
    HermitianHessianField() = default;
    HermitianHessianField(DomainPtr dom);

    Herm2 at(int64_t idx) const {
        if (dom_->n == 1) return Herm2{h11_[idx], 0.0, cplx{0, 0}, 1};
        return Herm2{h11_[idx], h22_[idx], cplx{h12re_[idx], h12im_[idx]}, 2};
    }
    void set(int64_t idx, const Herm2& m);
    const GridDomain& domain() const { return *dom_; }

private:
    DomainPtr dom_;
    std::vector<double> h11_, h22_, h12re_, h12im_;
};

HermitianHessianField ddc_hessian(const GridFunction& u, const GridDomain& domain);

// default cone tolerance: 1e-8 lambda_max(g) plus a curvature-scaled floor
double default_tol_cone(const HermitianMetricField& g, const GridFunction& u);

struct MaDensityResult {
    MeasureField density;
    std::vector<int32_t> off_cone_nodes;
};

MaDensityResult ma_density_flagged(const GridFunction& u, const HermitianMetricField& g,
                                   double tol_cone = -1.0);
MeasureField ma_density(const GridFunction& u, const HermitianMetricField& g,
                        double tol_cone = -1.0);

// density of omega_u^k wedge omega^{n-k}; k = n routes through ma_density
MeasureField mixed_density(const GridFunction& u, int k, const HermitianMetricField& g);

// density of omega_A wedge omega_B from two Hermitian coefficient matrices (n = 2)
inline double mixed_pair_density(const Herm2& A, const Herm2& B) { return 8.0 * mixed_det(A, B); }

struct PshReport {
    bool ok = true;
    int64_t worst_node = -1;
    double worst_eig = 0.0;
};

PshReport is_omega_psh(const GridFunction& u, const HermitianMetricField& g, double tol);

struct EnvelopeOptions {
    double tol_env = -1.0;  // default 1e-8 osc(u)
    int max_sweeps = 4000000;
    double omega = -1.0;  // default: relaxed automatically from the grid
    int threads = 1;
};

// Largest omega-psh function below u, by sweeps that lower center values to
// the cone edge.  Boundary values are kept.
GridFunction psh_envelope(const GridFunction& u, const HermitianMetricField& g,
                          const EnvelopeOptions& opt = {});

struct DemaillyReport {
    double mass_max_plus = 0.0;   // MA mass of max(v1,v2) over {v1 > v2 + tol}
    double mass_v1_plus = 0.0;    // MA mass of v1 over the same set
    double mass_max_minus = 0.0;  // over {v1 < v2 - tol}
    double mass_v2_minus = 0.0;
    double defect_allowance = 0.0;  // O(h) interface budget
    int64_t interface_nodes = 0;
    bool precondition_ok = true;  // both inputs omega-psh at tolerance
    bool pass = false;
};

// Demailly maximum inequality over the partition level sets; pointwise
// densities are not comparable at the interface, mass over level sets is.
DemaillyReport demailly_max_check(const GridFunction& v1, const GridFunction& v2,
                                  const HermitianMetricField& g, const GridDomain& domain,
                                  double partition_tol);

double auto_omega(const GridDomain& d);

}  // namespace cma
