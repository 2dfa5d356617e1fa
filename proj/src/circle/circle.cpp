#include "sj/circle/circle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "sj/error.hpp"

namespace sj::circle {

using numerics::Dyadic;

namespace {

constexpr double kRoundingShift = 1e-15;

// Orbit of 0 kept as integer count plus fractional part, so the fractional
// part never loses absolute accuracy.
class LiftOrbit {
public:
    explicit LiftOrbit(const BlaschkeMap& m) : m_(m) {}
    void step() {
        const double y = m_.lift(frac_);
        const double f = std::floor(y);
        whole_ += static_cast<long long>(f);
        frac_ = y - f;
        if (frac_ >= 1.0) {
            frac_ -= 1.0;
            ++whole_;
        }
    }
    long long whole() const { return whole_; }
    double frac() const { return frac_; }

private:
    const BlaschkeMap& m_;
    long long whole_ = 0;
    double frac_ = 0;
};

}  // namespace

BlaschkeMap::BlaschkeMap(double tau) : tau_(tau) {
    if (!std::isfinite(tau)) throw DomainError("BlaschkeMap: tau must be finite");
}

double BlaschkeMap::lift(double x) const {
    const double t = 2 * M_PI * x;
    return tau_ + x - std::atan2(std::sin(t), 3 - std::cos(t)) / M_PI;
}

double BlaschkeMap::angle(double x) const {
    const double y = lift(x);
    const double f = y - std::floor(y);
    return f >= 1.0 ? 0.0 : f;
}

double blaschke_angle(const BlaschkeMap& m, double x) { return m.angle(x); }

double blaschke_modulus(const BlaschkeMap& m, double x) {
    using C = std::complex<double>;
    const C z = std::polar(1.0, 2 * M_PI * x);
    const C f = std::polar(1.0, 2 * M_PI * m.tau()) * z * z * (z - 3.0) / (1.0 - 3.0 * z);
    return std::abs(f);
}

PrecisionReal rotation_number(const BlaschkeMap& m, std::size_t iters) {
    if (iters < 1) throw DomainError("rotation_number: iters must be >= 1");
    // F^k(0) in [p, p+1) gives p/k <= rho <= (p+1)/k
    double lo = 0, hi = 1;
    if (m.tau() < 0 || m.tau() >= 1) {
        lo = std::floor(m.tau()) - 1;
        hi = std::floor(m.tau()) + 2;
    }
    LiftOrbit orbit(m);
    for (std::size_t k = 1; k <= iters; ++k) {
        orbit.step();
        const double d = static_cast<double>(k);
        // too close to an integer to trust the floor
        if (orbit.frac() < 1e-12 || orbit.frac() > 1 - 1e-12) {
            const auto p = static_cast<double>(orbit.whole());
            lo = std::max(lo, (p - 1) / d);
            hi = std::min(hi, (p + 1) / d);
            continue;
        }
        const auto p = static_cast<double>(orbit.whole());
        lo = std::max(lo, p / d);
        hi = std::min(hi, (p + 1) / d);
    }
    if (hi < lo) throw PrecisionExhausted("rotation_number: inconsistent bounds");
    // widen by one ulp-scale step for the divisions above
    const double w = 4e-16 * std::max(1.0, std::fabs(hi));
    return PrecisionReal::from_bounds(Dyadic::from_double(lo - w - kRoundingShift),
                                      Dyadic::from_double(hi + w + kRoundingShift));
}

namespace {

// +1 if rho(tau) > gamma is certain, -1 if rho(tau) < gamma, 0 when all
// checked convergents agree with gamma.
int compare_rho(const BlaschkeMap& m, const std::vector<cf::Convergent>& conv) {
    LiftOrbit orbit(m);
    std::size_t done = 0;
    for (std::size_t k = 1; k < conv.size(); ++k) {
        const auto q = static_cast<std::size_t>(conv[k].q.get_ui());
        while (done < q) {
            orbit.step();
            ++done;
        }
        const double p = conv[k].p.get_d();
        const double diff = (static_cast<double>(orbit.whole()) - p) + orbit.frac();
        // gamma - p_k/q_k is negative for odd k and positive for even k
        const int gamma_side = (k % 2 == 1) ? -1 : 1;
        if (std::fabs(diff) < 1e-11) continue;
        const int rho_side = diff > 0 ? 1 : -1;  // F^q(0) > p  =>  rho >= p/q
        if (rho_side == 1 && gamma_side == -1) return 1;
        if (rho_side == -1 && gamma_side == 1) return -1;
    }
    return 0;
}

}  // namespace

TauSolution solve_tau(const CFNumber& gamma, double tol, std::size_t max_bisections) {
    if (gamma.is_finite()) throw DomainError("solve_tau: gamma must be irrational");
    if (!(tol > 0)) throw DomainError("solve_tau: tol must be positive");
    // convergents until 1/(q_{K-1} q_K) < tol
    std::size_t K = 2;
    std::vector<cf::Convergent> conv;
    while (true) {
        conv = cf::convergents(gamma, K);
        const double qq = conv[K - 1].q.get_d() * conv[K].q.get_d();
        if (1.0 / qq < tol) break;
        if (conv[K].q > mpz_class(1) << 40) throw ResourceExhausted("solve_tau: tolerance needs too long orbits");
        ++K;
    }
    TauSolution s;
    s.lo = 0;
    s.hi = 1;
    for (std::size_t i = 0; i < max_bisections; ++i) {
        const double mid = 0.5 * (s.lo + s.hi);
        s.bisections = i + 1;
        const int c = compare_rho(BlaschkeMap(mid), conv);
        if (c == 0) {
            s.tau = mid;
            s.rho_error = 1.0 / (conv[K - 1].q.get_d() * conv[K].q.get_d());
            return s;
        }
        if (c > 0) {
            s.hi = mid;
        } else {
            s.lo = mid;
        }
    }
    throw ResourceExhausted("solve_tau: bisection cap reached");
}

std::vector<double> Partition::lengths() const {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i + 1 < points.size(); ++i) out[i] = points[i + 1] - points[i];
    if (!points.empty()) out.back() = 1.0 - points.back() + points.front();
    return out;
}

Partition dynamical_partition(const BlaschkeMap& m, const CFNumber& gamma, std::size_t n) {
    const auto conv = cf::convergents(gamma, n + 1);
    const auto count = static_cast<std::size_t>(conv[n + 1].q.get_ui());
    if (count > (std::size_t{1} << 28)) throw ResourceExhausted("dynamical_partition: level too deep");
    std::vector<std::pair<double, std::size_t>> pts;
    pts.reserve(count);
    LiftOrbit orbit(m);
    for (std::size_t i = 0; i < count; ++i) {
        pts.emplace_back(orbit.frac(), i);
        orbit.step();
    }
    std::sort(pts.begin(), pts.end());
    Partition p;
    p.level = n;
    for (const auto& [x, i] : pts) {
        p.points.push_back(x);
        p.orbit_index.push_back(i);
    }
    for (std::size_t i = 1; i < p.points.size(); ++i) {
        if (!(p.points[i] > p.points[i - 1])) throw PrecisionExhausted("dynamical_partition: coincident orbit points");
    }
    return p;
}

BEstimate estimate_B(const std::vector<Partition>& partitions, double safety_factor) {
    if (partitions.size() < 2) throw DomainError("estimate_B: needs at least two levels");
    if (!(safety_factor >= 1)) throw DomainError("estimate_B: safety factor must be >= 1");
    BEstimate e;
    e.safety_factor = safety_factor;
    for (const auto& p : partitions) {
        if (p.points.size() < 2) throw DomainError("estimate_B: degenerate partition");
        const auto len = p.lengths();
        double worst = 1;
        for (std::size_t i = 0; i < len.size(); ++i) {
            const double a = len[i];
            const double b = len[(i + 1) % len.size()];
            if (!(a > 0) || !(b > 0)) throw DomainError("estimate_B: zero-length interval");
            worst = std::max({worst, a / b, b / a});
        }
        e.per_level.push_back(worst);
        e.B_hat = std::max(e.B_hat, worst);
    }
    e.tau_hat = std::sqrt(e.B_hat / (e.B_hat + 1));
    const double Bs = e.B_hat * safety_factor;
    e.tau_safe = std::sqrt(Bs / (Bs + 1));
    return e;
}

}  // namespace sj::circle
