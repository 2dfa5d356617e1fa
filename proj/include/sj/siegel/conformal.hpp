#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sj/numerics/real.hpp"

namespace sj::siegel {

using Cplx = std::complex<double>;
using numerics::PrecisionReal;

struct PolygonCheck {
    bool simple = true;
    // winding number of the closed polygon around the base point
    int winding = 0;
    double signed_area = 0;
};

PolygonCheck check_polygon(const std::vector<Cplx>& v, Cplx base = 0);

// Conformal radius at `base` of the Jordan domain bounded by the closed curve
// through `boundary` (counterclockwise, no repeated points), by the zipper
// (geodesic) algorithm. The curve is read as the interpolating arcs the
// algorithm produces, which for dense samples agree with the polygon.
double zipper_radius(const std::vector<Cplx>& boundary, Cplx base = 0);

// A bounded Jordan domain, either a polygon or a parametrized curve.
class JordanDomain {
public:
    static JordanDomain polygon(std::vector<Cplx> vertices);
    static JordanDomain disk(double R, Cplx center = 0);
    // t -> gamma(t), t in [0, 1), counterclockwise
    static JordanDomain curve(std::function<Cplx(double)> gamma, std::string name);

    bool is_polygon() const { return !vertices_.empty(); }
    const std::vector<Cplx>& vertices() const { return vertices_; }
    const std::string& name() const { return name_; }

    // At least `min_points` boundary samples: polygon edges are subdivided
    // evenly (vertices always included), curves are sampled uniformly in t.
    std::vector<Cplx> boundary(std::size_t min_points) const;

private:
    std::vector<Cplx> vertices_;
    std::function<Cplx(double)> gamma_;
    std::string name_;
};

struct RadiusEstimate {
    PrecisionReal value;
    PrecisionReal certified_error;
    std::size_t level = 0;
    // certified_error <= requested tolerance
    bool certified = false;
    // pieces of the certificate
    double eps_n = 0;
    double mapping_error = 0;
    std::size_t points = 0;
};

// Refines the boundary by doubling until two successive zipper values agree
// within tol; the later one is returned with their difference as the error.
// The level field holds the number of doublings.
RadiusEstimate conformal_radius(const JordanDomain& d, double tol, Cplx base = 0,
                                std::size_t max_points = std::size_t{1} << 15);

// 0 < rU - rV <= 4 sqrt(rU) sqrt(eps)
bool perturb_bound_check(double rU, double rV, double eps);

}  // namespace sj::siegel
