#include "sj/siegel/siegel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include "sj/circle/circle.hpp"
#include "sj/error.hpp"

namespace sj::siegel {

using numerics::Dyadic;

double BallComplex::error() const {
    const double a = re.rad_double(), b = im.rad_double();
    return std::hypot(a, b) * (1 + 1e-15);
}

BallComplex operator+(const BallComplex& a, const BallComplex& b) { return {a.re + b.re, a.im + b.im}; }
BallComplex operator-(const BallComplex& a, const BallComplex& b) { return {a.re - b.re, a.im - b.im}; }
BallComplex operator*(const BallComplex& a, const BallComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

QuadraticSiegel::QuadraticSiegel(CFNumber theta, std::size_t bits) : theta_(std::move(theta)), bits_(bits) {
    if (theta_.is_finite()) throw DomainError("QuadraticSiegel: theta must be irrational");
    if (bits < 32) throw DomainError("QuadraticSiegel: bits must be >= 32");
    const PrecisionReal t = cf::cf_value(theta_, bits + 8).with_precision(bits);
    lambda_ = {numerics::cos_turns(t), numerics::sin_turns(t)};
}

BallComplex QuadraticSiegel::critical_point() const { return {(-lambda_.re).scaled(-1), (-lambda_.im).scaled(-1)}; }

BallComplex QuadraticSiegel::apply(const BallComplex& z) const { return z * z + lambda_ * z; }

std::vector<Cplx> OrbitSet::approx() const {
    std::vector<Cplx> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.approx());
    return out;
}

double OrbitSet::max_error() const {
    double e = 0;
    for (const auto& p : points) e = std::max(e, p.error());
    return e;
}

double OrbitSet::min_modulus() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : points) m = std::min(m, std::abs(p.approx()) - p.error());
    return m;
}

OrbitSet critical_orbit(const QuadraticSiegel& s, std::size_t count, std::size_t bits) {
    if (count < 1) throw DomainError("critical_orbit: count must be >= 1");
    const std::size_t cap = precision_cap();
    const Dyadic target = numerics::pow2(-static_cast<std::int64_t>(bits));
    const Dyadic four(4);
    std::size_t work = std::max(s.bits(), bits + 32);
    while (true) {
        if (work > cap) throw PrecisionExhausted("critical_orbit: precision cap " + std::to_string(cap) + " bits exceeded");
        const QuadraticSiegel q(s.theta(), work);
        OrbitSet out;
        out.bits = work;
        out.points.reserve(count + 1);
        BallComplex z = q.critical_point();
        bool ok = true;
        for (std::size_t i = 0; i <= count; ++i) {
            const PrecisionReal a2 = z.abs2();
            if (a2.lower() > four) throw InvariantViolation("critical_orbit: orbit left the 2-ball at i = " + std::to_string(i));
            if (a2.upper() > four || z.re.rad() > target || z.im.rad() > target) {
                ok = false;
                break;
            }
            out.points.push_back(z);
            if (i < count) z = q.apply(z);
        }
        if (ok) return out;
        work *= 2;
    }
}

std::vector<std::size_t> angular_order(const CFNumber& theta, std::size_t count) {
    // theta as a 128-bit fixed point fraction; i * theta mod 1 is then the
    // wrapping product
    const PrecisionReal t = cf::cf_value(theta, 192);
    const Dyadic f = t.mid().round_fixed(128, numerics::Round::Nearest).shifted(128);
    mpz_class T = f.mantissa();
    if (f.exponent() > 0) T <<= static_cast<mp_bitcnt_t>(f.exponent());
    if (f.exponent() < 0) throw InvariantViolation("angular_order: fixed point conversion");
    const mpz_class lo_m = T & mpz_class("18446744073709551615");
    const mpz_class hi_m = T >> 64;
    using u128 = unsigned __int128;
    const u128 th = (static_cast<u128>(hi_m.get_ui()) << 64) | static_cast<u128>(lo_m.get_ui());
    std::vector<std::pair<u128, std::size_t>> keys(count + 1);
    for (std::size_t i = 0; i <= count; ++i) keys[i] = {th * static_cast<u128>(i), i};
    std::sort(keys.begin(), keys.end());
    std::vector<std::size_t> out;
    out.reserve(keys.size());
    for (const auto& k : keys) out.push_back(k.second);
    return out;
}

bool CarvedDomain::excluded(Cplx z) const {
    for (const Cplx& c : centers) {
        if (std::abs(z - c) <= radius) return true;
    }
    return false;
}

bool CarvedDomain::contains(Cplx z) const {
    if (excluded(z)) return false;
    const double fx = (z.real() - origin.real()) / cell, fy = (z.imag() - origin.imag()) / cell;
    if (fx < 0 || fy < 0) return false;
    const auto cx = static_cast<long>(fx), cy = static_cast<long>(fy);
    const auto w = static_cast<long>(width);
    for (long dx = -1; dx <= 1; ++dx) {
        for (long dy = -1; dy <= 1; ++dy) {
            const long x = cx + dx, y = cy + dy;
            if (x < 0 || y < 0 || x >= w || y >= w) continue;
            if (reachable[static_cast<std::size_t>(y * w + x)]) return true;
        }
    }
    return false;
}

std::size_t CarvedDomain::component_cells() const {
    return static_cast<std::size_t>(std::count(reachable.begin(), reachable.end(), 1));
}

CarvedDomain carve_points(const std::vector<Cplx>& centers, double radius, std::size_t level) {
    if (centers.empty()) throw DomainError("carve_points: no centers");
    if (!(radius > 0)) throw DomainError("carve_points: radius must be positive");
    CarvedDomain d;
    d.level = level;
    d.centers = centers;
    d.radius = radius;
    double inner = std::numeric_limits<double>::infinity();
    double ext = 0;
    for (const Cplx& c : centers) {
        inner = std::min(inner, std::abs(c));
        ext = std::max({ext, std::fabs(c.real()), std::fabs(c.imag())});
    }
    d.inner_radius = inner - radius;
    if (!(d.inner_radius > 0)) throw DomainError("carve_domain: level too coarse, 0 is covered by an excluded disk");

    const double half = ext + radius + 1e-12;
    constexpr std::size_t kMaxWidth = 4096;
    d.cell = std::max(std::min(radius / 2, d.inner_radius / 2), 2 * half / static_cast<double>(kMaxWidth));
    d.width = static_cast<std::size_t>(std::ceil(2 * half / d.cell)) + 2;
    d.origin = Cplx(-half - d.cell, -half - d.cell);
    const auto w = static_cast<long>(d.width);
    std::vector<unsigned char> blocked(d.width * d.width, 0);
    const double reach = radius + d.cell * M_SQRT1_2;
    for (const Cplx& c : centers) {
        const long x0 = static_cast<long>(std::floor((c.real() - reach - d.origin.real()) / d.cell));
        const long x1 = static_cast<long>(std::floor((c.real() + reach - d.origin.real()) / d.cell));
        const long y0 = static_cast<long>(std::floor((c.imag() - reach - d.origin.imag()) / d.cell));
        const long y1 = static_cast<long>(std::floor((c.imag() + reach - d.origin.imag()) / d.cell));
        for (long y = std::max(0L, y0); y <= std::min(w - 1, y1); ++y) {
            for (long x = std::max(0L, x0); x <= std::min(w - 1, x1); ++x) {
                const Cplx mid = d.origin + Cplx((static_cast<double>(x) + 0.5) * d.cell, (static_cast<double>(y) + 0.5) * d.cell);
                if (std::abs(mid - c) <= reach) blocked[static_cast<std::size_t>(y * w + x)] = 1;
            }
        }
    }
    const long sx = static_cast<long>((0 - d.origin.real()) / d.cell);
    const long sy = static_cast<long>((0 - d.origin.imag()) / d.cell);
    const auto start = static_cast<std::size_t>(sy * w + sx);
    if (blocked[start]) throw ResourceExhausted("carve_domain: grid too coarse to resolve the component of 0");
    d.reachable.assign(d.width * d.width, 0);
    std::deque<std::size_t> queue{start};
    d.reachable[start] = 1;
    while (!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop_front();
        const long x = static_cast<long>(k) % w, y = static_cast<long>(k) / w;
        const long nb[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (const auto& p : nb) {
            if (p[0] < 0 || p[1] < 0 || p[0] >= w || p[1] >= w) continue;
            const auto j = static_cast<std::size_t>(p[1] * w + p[0]);
            if (blocked[j] || d.reachable[j]) continue;
            d.reachable[j] = 1;
            queue.push_back(j);
        }
    }
    return d;
}

namespace {

std::size_t level_count(const std::vector<cf::Convergent>& conv, std::size_t n) {
    return static_cast<std::size_t>(conv[n + 2].q.get_ui());
}

// convergents far enough that q_{n+2} + 1 exceeds the cap for the last n
std::vector<cf::Convergent> convergents_to_cap(const CFNumber& gamma, std::size_t max_points, std::size_t& n_max) {
    std::size_t k = 8;
    while (true) {
        auto conv = cf::convergents(gamma, k);
        if (conv[k].q + 1 > max_points) {
            std::size_t n = 0;
            bool any = false;
            for (std::size_t j = 0; j + 2 <= k; ++j) {
                if (conv[j + 2].q + 1 <= max_points) {
                    n = j;
                    any = true;
                }
            }
            if (!any) throw ResourceExhausted("siegel_radius: point cap below the first level");
            n_max = n;
            return conv;
        }
        k *= 2;
    }
}

std::vector<Cplx> level_polygon(const std::vector<Cplx>& orbit, const std::vector<std::size_t>& order, std::size_t count) {
    std::vector<Cplx> out;
    out.reserve(count + 1);
    for (std::size_t i : order) {
        if (i <= count) out.push_back(orbit[i]);
    }
    return out;
}

std::vector<Cplx> subdivide(const std::vector<Cplx>& v) {
    std::vector<Cplx> out;
    out.reserve(2 * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
        out.push_back(0.5 * (v[i] + v[(i + 1) % v.size()]));
    }
    return out;
}

// max over b of the distance to the nearest point of a
double directed_distance(const std::vector<Cplx>& b, const std::vector<Cplx>& a) {
    double worst = 0;
    for (const Cplx& p : b) {
        double best = std::numeric_limits<double>::infinity();
        for (const Cplx& q : a) best = std::min(best, std::norm(p - q));
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

struct PolygonLevel {
    std::vector<Cplx> pts;
    bool ok = false;
};

PolygonLevel make_polygon(const std::vector<Cplx>& orbit, const std::vector<std::size_t>& order, std::size_t count) {
    PolygonLevel pl;
    pl.pts = level_polygon(orbit, order, count);
    const PolygonCheck pc = check_polygon(pl.pts, 0);
    if (!pc.simple || pc.winding == 0) return pl;
    if (pc.signed_area < 0) std::reverse(pl.pts.begin(), pl.pts.end());
    pl.ok = true;
    return pl;
}

double tau_for(const CFNumber& gamma, const RadiusConfig& cfg, double& B_hat) {
    const circle::TauSolution ts = circle::solve_tau(gamma, cfg.tau_tol);
    const circle::BlaschkeMap m(ts.tau);
    const auto conv = cf::convergents(gamma, 16);
    std::vector<circle::Partition> parts;
    for (std::size_t n = 1; n + 1 < conv.size(); ++n) {
        if (conv[n + 1].q > cfg.max_points && parts.size() >= 2) break;
        parts.push_back(circle::dynamical_partition(m, gamma, n));
    }
    const circle::BEstimate be = circle::estimate_B(parts, cfg.safety);
    B_hat = be.B_hat;
    return be.tau_safe;
}

void check_config(const RadiusConfig& cfg) {
    if (!(cfg.K > 0)) throw DomainError("radius config: K must be positive");
    if (!(cfg.safety >= 1)) throw DomainError("radius config: safety factor must be >= 1");
    if (cfg.max_points < 8) throw DomainError("radius config: max_points too small");
}

}  // namespace

CarvedDomain carve_domain(const CFNumber& gamma, std::size_t n, double K, double tau) {
    if (!(K > 0)) throw DomainError("carve_domain: K must be positive");
    if (!(tau > 0 && tau < 1)) throw DomainError("carve_domain: tau must lie in (0, 1)");
    const auto conv = cf::convergents(gamma, n + 2);
    const std::size_t count = level_count(conv, n);
    if (count > (std::size_t{1} << 22)) throw ResourceExhausted("carve_domain: level too deep");
    const OrbitSet orbit = critical_orbit(QuadraticSiegel(gamma), count, 64);
    return carve_points(orbit.approx(), 2 * K * std::pow(tau, static_cast<double>(n)), n);
}

RadiusRun siegel_radius_run(const CFNumber& gamma, double tol, const RadiusConfig& cfg) {
    if (!gamma.is_noble()) throw DomainError("siegel_radius: gamma must be noble");
    if (!(tol > 0)) throw DomainError("siegel_radius: tol must be positive");
    check_config(cfg);
    RadiusRun run;
    run.K = cfg.K;
    run.tau = tau_for(gamma, cfg, run.B_hat);

    std::size_t n_max = 0;
    const auto conv = convergents_to_cap(gamma, cfg.max_points, n_max);
    if (n_max < cfg.min_level) throw ResourceExhausted("siegel_radius: point cap below the minimum level");
    const std::size_t total = level_count(conv, n_max);
    const OrbitSet orbit = critical_orbit(QuadraticSiegel(gamma), total, cfg.bits);
    const std::vector<Cplx> pts = orbit.approx();
    const std::vector<std::size_t> order = angular_order(gamma, total);
    run.min_orbit_modulus = orbit.min_modulus();
    // orbit rounding moves the boundary by at most delta
    const double delta = orbit.max_error();
    const double orbit_term = 4 * std::sqrt(2 * delta) + delta;

    std::vector<std::vector<Cplx>> omega(n_max + 1);
    bool have_best = false;
    for (std::size_t n = cfg.min_level; n <= n_max; ++n) {
        const std::size_t count = level_count(conv, n);
        omega[n].assign(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(count + 1));
        // decay implied by dist_H(Omega_n, boundary) < K tau^n
        if (n >= cfg.min_level + 2) {
            const double dh = directed_distance(omega[n], omega[n - 2]);
            while (dh > run.K * (std::pow(run.tau, static_cast<double>(n - 2)) + std::pow(run.tau, static_cast<double>(n)))) {
                run.K *= 2;
                run.K_doubled = true;
            }
        }
        LevelRecord rec;
        rec.level = n;
        rec.points = count + 1;
        const PolygonLevel poly = make_polygon(pts, order, count);
        if (!poly.ok) {
            rec.self_intersecting = true;
            run.levels.push_back(rec);
            continue;
        }
        const double r_vertices = zipper_radius(poly.pts);
        const double r_fine = zipper_radius(subdivide(poly.pts));
        rec.r = r_fine;
        rec.mapping_error = std::fabs(r_fine - r_vertices);
        rec.eps = 2 * run.K * std::pow(run.tau, static_cast<double>(n));
        rec.certified_error = 4 * std::sqrt(rec.eps) + rec.eps + rec.mapping_error + orbit_term;
        run.levels.push_back(rec);

        RadiusEstimate& b = run.best;
        b.value = PrecisionReal::from_double(rec.r);
        b.certified_error = PrecisionReal::from_double(rec.certified_error);
        b.level = n;
        b.eps_n = rec.eps;
        b.mapping_error = rec.mapping_error;
        b.points = rec.points;
        b.certified = rec.certified_error <= tol;
        have_best = true;
        if (b.certified) break;
    }
    if (!have_best) throw PrecisionExhausted("siegel_radius: every level produced a self-intersecting polygon");
    return run;
}

RadiusEstimate siegel_radius(const CFNumber& gamma, double tol, const RadiusConfig& cfg) {
    return siegel_radius_run(gamma, tol, cfg).best;
}

double radius_value(const CFNumber& gamma, std::size_t max_points) {
    if (gamma.is_finite()) throw DomainError("radius_value: gamma must be irrational");
    std::size_t n_max = 0;
    const auto conv = convergents_to_cap(gamma, max_points, n_max);
    const double th = cf::cf_value(gamma, 64).to_double();
    const Cplx lam = std::polar(1.0, 2 * M_PI * th);
    // fall back two levels at a time past self-intersecting polygons
    for (std::size_t level = n_max; level >= 2; level -= 2) {
        const std::size_t count = level_count(conv, level);
        std::vector<Cplx> pts(count + 1);
        Cplx z = -lam / 2.0;
        for (std::size_t i = 0; i <= count; ++i) {
            pts[i] = z;
            z = z * z + lam * z;
        }
        const PolygonLevel poly = make_polygon(pts, angular_order(gamma, count), count);
        if (poly.ok) return zipper_radius(poly.pts);
        if (level < 4) break;
    }
    throw PrecisionExhausted("radius_value: no usable orbit polygon");
}

PhiLogR phi_logr(const CFNumber& gamma, double tol, const RadiusConfig& cfg) {
    if (!(tol > 0)) throw DomainError("phi_logr: tol must be positive");
    const cf::PhiValue phi = cf::yoccoz_phi(gamma, tol / 2);
    const RadiusRun run = siegel_radius_run(gamma, tol / 2, cfg);
    PhiLogR out;
    out.phi = phi.value();
    const double r = run.best.value.to_double();
    out.log_r = std::log(r);
    const double cert = run.best.certified_error.to_double();
    double log_err;
    if (run.best.certified && cert < r) {
        log_err = std::log(r / (r - cert));
        out.certified = true;
    } else {
        // the certificate does not bound log r; carry the mapping error only
        log_err = run.best.mapping_error / r;
        out.certified = false;
    }
    out.value = PrecisionReal::from_double(out.phi + out.log_r)
                    .inflated(Dyadic::from_double((phi.error() + log_err) * (1 + 1e-12) + 1e-15));
    return out;
}

RadiusBumpResult radius_bump_window(const std::vector<Digit>& prefix, std::size_t m0, double lo, double hi,
                                    const RadiusConfig& cfg, const RadiusBumpLimits& limits) {
    if (prefix.empty()) throw DomainError("radius_bump_window: prefix must be nonempty");
    if (!(lo < hi)) throw DomainError("radius_bump_window: empty window");
    const CFNumber omega = CFNumber::noble(prefix);
    const std::size_t n = prefix.size() - 1;
    RadiusBumpResult res;
    res.r_omega = siegel_radius(omega, 1e-9, cfg);
    res.phi_omega = cf::yoccoz_phi(omega, 1e-10);

    std::set<std::size_t> pruned;
    std::size_t evals = 0;
    const std::size_t m_span = limits.max_m > m0 ? limits.max_m - m0 : 0;
    const auto n_span = static_cast<std::size_t>(limits.max_N - 1);
    for (std::size_t s = 0; s < m_span + n_span; ++s) {
        bool any = false;
        for (std::size_t j = 0; j <= s; ++j) {
            const std::size_t m = m0 + 1 + j;
            const Digit N = 2 + static_cast<Digit>(s - j);
            if (m > limits.max_m || N > limits.max_N || pruned.count(m)) continue;
            any = true;
            if (evals >= limits.max_evaluations) {
                throw ResourceExhausted("radius_bump_search: evaluation cap reached after " + std::to_string(evals) +
                                        " candidates");
            }
            ++evals;
            const CFNumber beta = cf::digit_bump(omega, n + m, N);
            double r;
            try {
                r = radius_value(beta, cfg.max_points);
            } catch (const ResourceExhausted&) {
                pruned.insert(m);
                continue;
            }
            res.log.push_back({m, N, r});
            if (r <= lo) {
                pruned.insert(m);
                continue;
            }
            if (r >= hi) continue;
            const RadiusEstimate rb = siegel_radius(beta, 1e-9, cfg);
            const cf::PhiValue pb = cf::yoccoz_phi(beta, 1e-10);
            const double v = rb.value.to_double();
            if (v > lo && v < hi && numerics::certainly_less(res.phi_omega.enclosure(), pb.enclosure())) {
                res.m = m;
                res.N = N;
                res.position = n + m;
                res.beta = beta;
                res.r_beta = rb;
                res.phi_beta = pb;
                return res;
            }
        }
        if (!any && s > m_span) break;
    }
    throw ResourceExhausted("radius_bump_search: no pair found within limits after " + std::to_string(evals) +
                            " candidates");
}

RadiusBumpResult radius_bump_search(const std::vector<Digit>& prefix, std::size_t m0, double eps,
                                    const RadiusConfig& cfg, const RadiusBumpLimits& limits) {
    if (prefix.empty()) throw DomainError("radius_bump_search: prefix must be nonempty");
    if (!(eps > 0)) throw DomainError("radius_bump_search: eps must be positive");
    const double r = siegel_radius(CFNumber::noble(prefix), 1e-9, cfg).value.to_double();
    if (!(eps < r / 4)) throw DomainError("radius_bump_search: eps must be below r(omega)/4");
    return radius_bump_window(prefix, m0, r - 2 * eps, r - eps, cfg, limits);
}

}  // namespace sj::siegel
