#pragma once

#include <cstddef>
#include <vector>

#include "sj/cf/cf.hpp"
#include "sj/numerics/real.hpp"

namespace sj::circle {

using cf::CFNumber;
using numerics::PrecisionReal;

// f(z) = e^{2 pi i tau} z^2 (z - 3)/(1 - 3z) restricted to the unit circle,
// in turns. The lift is F(x) = tau + x - atan2(sin 2 pi x, 3 - cos 2 pi x)/pi,
// with a cubic critical point at x = 0.
class BlaschkeMap {
public:
    explicit BlaschkeMap(double tau);
    double tau() const { return tau_; }

    // F(x); continuous and increasing, F(x + 1) = F(x) + 1.
    double lift(double x) const;
    // F(x) mod 1 in [0, 1)
    double angle(double x) const;

private:
    double tau_;
};

// arg f(e^{2 pi i x}) / 2 pi mod 1
double blaschke_angle(const BlaschkeMap& m, double x);
// |f(e^{2 pi i x})|, which is 1 up to rounding
double blaschke_modulus(const BlaschkeMap& m, double x);

// Enclosure of the rotation number from iters iterates of 0. Rounding in the
// orbit is absorbed by reading the bounds as those of tau +/- 1e-15.
PrecisionReal rotation_number(const BlaschkeMap& m, std::size_t iters);

struct TauSolution {
    double tau = 0;
    // bisection bracket that still contains the solution
    double lo = 0;
    double hi = 1;
    std::size_t bisections = 0;
    // |rho(tau) - gamma| <= this bound
    double rho_error = 0;
};

// tau with |rho(f_tau) - gamma| < tol, by bisection on tau -> rho.
TauSolution solve_tau(const CFNumber& gamma, double tol, std::size_t max_bisections = 200);

struct Partition {
    std::size_t level = 0;
    // sorted angles of F^i(0) mod 1, i < q_{n+1}
    std::vector<double> points;
    // orbit index of each sorted point
    std::vector<std::size_t> orbit_index;

    // Lengths of the arcs between consecutive points, including the one
    // through 0.
    std::vector<double> lengths() const;
};

Partition dynamical_partition(const BlaschkeMap& m, const CFNumber& gamma, std::size_t n);

struct BEstimate {
    double B_hat = 0;
    // sqrt(B/(B+1)) for B_hat and for the inflated value
    double tau_hat = 0;
    double safety_factor = 2;
    double tau_safe = 0;
    // max adjacent ratio per supplied partition
    std::vector<double> per_level;
};

BEstimate estimate_B(const std::vector<Partition>& partitions, double safety_factor = 2);

}  // namespace sj::circle
