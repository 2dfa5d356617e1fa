#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "sj/cf/cf.hpp"
#include "sj/numerics/oracle.hpp"
#include "sj/numerics/real.hpp"
#include "sj/siegel/conformal.hpp"

namespace sj::siegel {

using cf::CFNumber;
using cf::Digit;

using numerics::precision_cap;

struct BallComplex {
    PrecisionReal re;
    PrecisionReal im;

    Cplx approx() const { return {re.to_double(), im.to_double()}; }
    // upper bound on the distance from approx() to any member
    double error() const;
    PrecisionReal abs2() const { return re * re + im * im; }
};

BallComplex operator+(const BallComplex& a, const BallComplex& b);
BallComplex operator-(const BallComplex& a, const BallComplex& b);
BallComplex operator*(const BallComplex& a, const BallComplex& b);

// P(z) = z^2 + lambda z, lambda = e^{2 pi i theta}
class QuadraticSiegel {
public:
    explicit QuadraticSiegel(CFNumber theta, std::size_t bits = 128);

    const CFNumber& theta() const { return theta_; }
    const BallComplex& lambda() const { return lambda_; }
    // -lambda/2
    BallComplex critical_point() const;
    std::size_t bits() const { return bits_; }
    BallComplex apply(const BallComplex& z) const;

private:
    CFNumber theta_;
    BallComplex lambda_;
    std::size_t bits_;
};

struct OrbitSet {
    std::size_t level = 0;
    // working precision that met the request
    std::size_t bits = 0;
    // P^i(c), i = 0..count
    std::vector<BallComplex> points;

    std::vector<Cplx> approx() const;
    double max_error() const;
    double min_modulus() const;
};

// Iterates of the critical point, recomputed with doubled working precision
// until every point is known to within 2^-bits. An orbit point certainly
// outside the closed 2-ball means the parameter is not a Siegel parameter;
// one that cannot be kept inside it is a precision failure.
OrbitSet critical_orbit(const QuadraticSiegel& s, std::size_t count, std::size_t bits);

// Orbit indices 0..count sorted by the fractional part of i*theta.
std::vector<std::size_t> angular_order(const CFNumber& theta, std::size_t count);

struct CarvedDomain {
    std::size_t level = 0;
    std::vector<Cplx> centers;
    // common radius 2 K tau^n of the excluded closed disks
    double radius = 0;
    // distance from 0 to the excluded set
    double inner_radius = 0;
    // grid used to mark the component containing 0
    double cell = 0;
    Cplx origin;
    std::size_t width = 0;
    std::vector<unsigned char> reachable;

    bool excluded(Cplx z) const;
    // z outside the excluded disks and joined to 0 through free grid cells
    bool contains(Cplx z) const;
    std::size_t component_cells() const;
};

// Component of C minus the disks B(c, radius) containing 0. Throws
// DomainError ("level too coarse") when 0 is covered.
CarvedDomain carve_points(const std::vector<Cplx>& centers, double radius, std::size_t level = 0);
CarvedDomain carve_domain(const CFNumber& gamma, std::size_t n, double K, double tau);

struct RadiusConfig {
    // Teichmuller constant of the surgery; doubled when the orbit decay
    // check fails
    double K = 10;
    // multiplier on the measured B before forming tau
    double safety = 2;
    // largest critical orbit used by a level (q_{n+2} + 1 points)
    std::size_t max_points = 3000;
    std::size_t min_level = 2;
    std::size_t bits = 64;
    // tolerance for the Blaschke parameter solve
    double tau_tol = 1e-10;
};

struct LevelRecord {
    std::size_t level = 0;
    double r = 0;
    double eps = 0;
    double mapping_error = 0;
    double certified_error = 0;
    std::size_t points = 0;
    bool self_intersecting = false;
};

struct RadiusRun {
    RadiusEstimate best;
    std::vector<LevelRecord> levels;
    double K = 0;
    bool K_doubled = false;
    double tau = 0;
    double B_hat = 0;
    double min_orbit_modulus = 0;
};

// Conformal radius of the Siegel disk of a noble theta: the orbit polygon
// through Omega_n at each level, with error 4 sqrt(eps_n) + eps_n plus the
// mapping error, eps_n = 2 K tau^n. When the point cap stops the levels
// before the tolerance is met the best estimate is returned uncertified.
RadiusRun siegel_radius_run(const CFNumber& gamma, double tol, const RadiusConfig& cfg = {});
RadiusEstimate siegel_radius(const CFNumber& gamma, double tol, const RadiusConfig& cfg = {});

// The orbit-polygon radius at the deepest level under the point cap, without
// the certificate. Used to screen candidates in the bump searches.
double radius_value(const CFNumber& gamma, std::size_t max_points = 3000);

struct PhiLogR {
    PrecisionReal value;
    double phi = 0;
    double log_r = 0;
    // true when both parts carry certified errors
    bool certified = false;
};

PhiLogR phi_logr(const CFNumber& gamma, double tol, const RadiusConfig& cfg = {});

struct RadiusBumpLimits {
    Digit max_N = 200;
    std::size_t max_m = 40;
    // total screened candidates
    std::size_t max_evaluations = 400;
};

struct RadiusBumpCandidate {
    std::size_t m = 0;
    Digit N = 0;
    double r = 0;
};

struct RadiusBumpResult {
    std::size_t m = 0;
    Digit N = 0;
    std::size_t position = 0;
    CFNumber beta;
    RadiusEstimate r_omega;
    RadiusEstimate r_beta;
    cf::PhiValue phi_omega;
    cf::PhiValue phi_beta;
    std::vector<RadiusBumpCandidate> log;
};

// m > m0 and N (at position n + m) with lo < r(beta) < hi and
// Phi(beta) > Phi(omega), screened with radius_value and confirmed by
// siegel_radius and yoccoz_phi. Pairs are visited along the diagonals of
// (m, N), skipping larger N for an m once its radius falls below lo.
RadiusBumpResult radius_bump_window(const std::vector<Digit>& prefix, std::size_t m0, double lo, double hi,
                                    const RadiusConfig& cfg = {}, const RadiusBumpLimits& limits = {});

// Window r(omega) - 2 eps < r(beta) < r(omega) - eps.
RadiusBumpResult radius_bump_search(const std::vector<Digit>& prefix, std::size_t m0, double eps,
                                    const RadiusConfig& cfg = {}, const RadiusBumpLimits& limits = {});

}  // namespace sj::siegel
