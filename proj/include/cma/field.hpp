#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "cma/grid.hpp"
#include "cma/linalg.hpp"

namespace cma {

// Real scalar field on a grid domain; meaningful on interior and boundary nodes.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(DomainPtr dom, double fill = 0.0)
        : dom_(std::move(dom)), v_(dom_->size(), fill) {}

    static GridFunction from_function(DomainPtr dom, const std::function<double(const Point&)>& f) {
        GridFunction u(dom);
        for (int32_t idx : dom->interior) u.v_[idx] = f(dom->point(idx));
        for (int32_t idx : dom->boundary) u.v_[idx] = f(dom->point(idx));
        return u;
    }

    const GridDomain& domain() const { return *dom_; }
    DomainPtr domain_ptr() const { return dom_; }

    double operator[](int64_t idx) const { return v_[idx]; }
    double& operator[](int64_t idx) { return v_[idx]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double sup_norm() const {
        double m = 0.0;
        for (int32_t idx : dom_->interior) m = std::max(m, std::abs(v_[idx]));
        for (int32_t idx : dom_->boundary) m = std::max(m, std::abs(v_[idx]));
        return m;
    }

    double osc() const {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        auto upd = [&](int64_t idx) {
            lo = std::min(lo, v_[idx]);
            hi = std::max(hi, v_[idx]);
        };
        for (int32_t idx : dom_->interior) upd(idx);
        for (int32_t idx : dom_->boundary) upd(idx);
        return (hi > lo) ? hi - lo : 0.0;
    }

    double sup_diff(const GridFunction& o) const {
        double m = 0.0;
        for (int32_t idx : dom_->interior) m = std::max(m, std::abs(v_[idx] - o.v_[idx]));
        for (int32_t idx : dom_->boundary) m = std::max(m, std::abs(v_[idx] - o.v_[idx]));
        return m;
    }

    GridFunction& operator+=(const GridFunction& o) {
        for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    GridFunction& operator+=(double c) {
        for (double& x : v_) x += c;
        return *this;
    }
    GridFunction& operator*=(double c) {
        for (double& x : v_) x *= c;
        return *this;
    }

    friend GridFunction max(const GridFunction& a, const GridFunction& b) {
        GridFunction r = a;
        for (size_t i = 0; i < r.v_.size(); ++i) r.v_[i] = std::max(a.v_[i], b.v_[i]);
        return r;
    }

private:
    DomainPtr dom_;
    std::vector<double> v_;
};

// Discretized positive Radon measure: nonnegative density against Lebesgue
// plus optional node atoms.
class MeasureField {
public:
    MeasureField() = default;
    explicit MeasureField(DomainPtr dom, double density = 0.0)
        : dom_(std::move(dom)), density_(dom_->size(), 0.0) {
        for (int32_t idx : dom_->interior) density_[idx] = density;
    }

    static MeasureField from_function(DomainPtr dom, const std::function<double(const Point&)>& f) {
        MeasureField mu(dom);
        for (int32_t idx : dom->interior) mu.density_[idx] = f(dom->point(idx));
        return mu;
    }

    const GridDomain& domain() const { return *dom_; }
    DomainPtr domain_ptr() const { return dom_; }

    double density(int64_t idx) const { return density_[idx]; }
    double& density(int64_t idx) { return density_[idx]; }
    const std::vector<double>& densities() const { return density_; }

    void add_atom(int64_t node, double mass) {
        if (mass < 0) throw ConfigError("atom mass must be nonnegative");
        atoms_.emplace_back(node, mass);
    }
    const std::vector<std::pair<int64_t, double>>& atoms() const { return atoms_; }

    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dom_->real_dim(); ++a) v *= dom_->h;
        return v;
    }

    double total_mass() const {
        std::vector<double> terms;
        terms.reserve(dom_->interior.size());
        for (int32_t idx : dom_->interior) terms.push_back(density_[idx]);
        double m = cell_volume() * pairwise_sum(terms);
        for (const auto& [node, mass] : atoms_) m += mass;
        return m;
    }

    double sup_density() const {
        double m = 0.0;
        for (int32_t idx : dom_->interior) m = std::max(m, density_[idx]);
        return m;
    }

    // density plus atom mass spread over its cell; what the per-node solves see
    double effective_density(int64_t idx) const {
        double d = density_[idx];
        for (const auto& [node, mass] : atoms_)
            if (node == idx) d += mass / cell_volume();
        return d;
    }

    bool leq(const MeasureField& o, double tol = 0.0) const {
        for (int32_t idx : dom_->interior)
            if (effective_density(idx) > o.effective_density(idx) + tol) return false;
        return true;
    }

private:
    DomainPtr dom_;
    std::vector<double> density_;
    std::vector<std::pair<int64_t, double>> atoms_;
};

// Dirichlet data on the boundary node list.  Built from a callable it samples
// the exact projected boundary points, keeping the O(h) boundary error.
class BoundaryData {
public:
    BoundaryData() = default;

    static BoundaryData from_function(const DomainPtr& dom,
                                      const std::function<double(const Point&)>& f) {
        BoundaryData b;
        b.values_.reserve(dom->boundary.size());
        for (size_t k = 0; k < dom->boundary.size(); ++k) b.values_.push_back(f(dom->boundary_proj[k]));
        return b;
    }

    static BoundaryData from_grid(const GridFunction& u) {
        BoundaryData b;
        const auto& dom = u.domain();
        b.values_.reserve(dom.boundary.size());
        for (int32_t idx : dom.boundary) b.values_.push_back(u[idx]);
        return b;
    }

    static BoundaryData constant(const DomainPtr& dom, double c) {
        BoundaryData b;
        b.values_.assign(dom->boundary.size(), c);
        return b;
    }

    double operator[](size_t k) const { return values_[k]; }
    size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }

    double osc() const {
        if (values_.empty()) return 0.0;
        auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
        return *hi - *lo;
    }
    double sup() const {
        double m = -std::numeric_limits<double>::infinity();
        for (double v : values_) m = std::max(m, v);
        return m;
    }
    double inf() const {
        double m = std::numeric_limits<double>::infinity();
        for (double v : values_) m = std::min(m, v);
        return m;
    }

    // writes boundary values into a full-grid array
    void apply(const GridDomain& dom, std::vector<double>& u) const {
        for (size_t k = 0; k < dom.boundary.size(); ++k) u[dom.boundary[k]] = values_[k];
    }

private:
    std::vector<double> values_;
};

}  // namespace cma
