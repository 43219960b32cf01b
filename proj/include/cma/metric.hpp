#pragma once

#include <functional>
#include <vector>

#include "cma/field.hpp"
#include "cma/grid.hpp"
#include "cma/linalg.hpp"

namespace cma {

// Per-node positive Hermitian n x n matrix field, the background form omega.
class HermitianMetricField {
public:
    HermitianMetricField() = default;

    static HermitianMetricField identity(DomainPtr dom) {
        return from_function(std::move(dom), [](const Point&) { return 1.0; });
    }

    // g = f(z) * Id, f > 0
    static HermitianMetricField from_function(DomainPtr dom,
                                              const std::function<double(const Point&)>& f);

    static HermitianMetricField from_matrix_function(
        DomainPtr dom, const std::function<Herm2(const Point&)>& f);

    // the zero form; used for the pure plurisubharmonic cone in the capacity module
    static HermitianMetricField zero(DomainPtr dom);

    const GridDomain& domain() const { return *dom_; }
    DomainPtr domain_ptr() const { return dom_; }
    int n() const { return dom_->n; }

    Herm2 at(int64_t idx) const {
        if (dom_->n == 1) return Herm2{g11_[idx], 0.0, cplx{0, 0}, 1};
        return Herm2{g11_[idx], g22_[idx], cplx{g12re_[idx], g12im_[idx]}, 2};
    }

    double lambda_min() const { return lmin_; }
    double lambda_max() const { return lmax_; }
    bool is_positive() const { return lmin_ > 0.0; }
    bool has_off_diagonal() const { return off_diag_; }

    const std::vector<double>& g11() const { return g11_; }
    const std::vector<double>& g22() const { return g22_; }
    const std::vector<double>& g12re() const { return g12re_; }
    const std::vector<double>& g12im() const { return g12im_; }

private:
    void finish_bounds();

    DomainPtr dom_;
    std::vector<double> g11_, g22_, g12re_, g12im_;
    double lmin_ = 0.0, lmax_ = 0.0;
    bool off_diag_ = false;
};

// Smallest torsion constant B (exact max over interior nodes) such that the
// discrete versions of
//   -B omega^2 <= 2n dd^c omega <= B omega^2
//   -B omega^3 <= 4 n^2 d omega wedge d^c omega <= B omega^3
// hold, comparing top-degree coefficient fields.  For n = 1 both expressions
// vanish for degree reasons and B = 0; for n = 2 the second line is a 6-form
// on a 4-real-dimensional domain, hence identically 0.
double metric_bound_B(const HermitianMetricField& g, const GridDomain& domain);

struct DefiningFunction {
    GridFunction rho;
    double strict_psh_margin = 0.0;
};

// rho(z) = |z|^2 - R^2 for balls; shells have no global strictly psh defining
// function and signal the caller to use per-component barriers instead.
DefiningFunction standard_defining_function(const DomainPtr& domain);

}  // namespace cma
