#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "sj/circle/circle.hpp"
#include "sj/error.hpp"
#include "sj/siegel/siegel.hpp"

using namespace sj::siegel;
using sj::cf::CFNumber;

namespace {

// conformal radius of the square [-1,1]^2 at 0 from the Schwarz-Christoffel
// map: sqrt(2) / int_0^1 (1 - t^4)^(-1/2) dt, with t = 1 - u^2 removing the
// endpoint singularity
double square_oracle() {
    const int n = 4000;
    auto f = [](double u) {
        const double t = 1 - u * u;
        return 2 / std::sqrt((1 + t) * (1 + t * t));
    };
    double s = f(0) + f(1);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(static_cast<double>(i) / n);
    return std::sqrt(2.0) / (s / (3.0 * n));
}

struct EnvGuard {
    explicit EnvGuard(const char* v) { setenv("SIEGEL_PRECISION_CAP", v, 1); }
    ~EnvGuard() { unsetenv("SIEGEL_PRECISION_CAP"); }
};

}  // namespace

TEST_CASE("critical value is -lambda^2/4") {
    const QuadraticSiegel s(CFNumber::noble(), 128);
    const BallComplex c = s.critical_point();
    const BallComplex pc = s.apply(c);
    const BallComplex l2 = s.lambda() * s.lambda();
    CHECK(std::abs(pc.approx() + l2.approx() / 4.0) < 1e-30);
    CHECK(std::abs(std::abs(s.lambda().approx()) - 1) < 1e-15);
    CHECK(std::abs(c.approx() + s.lambda().approx() / 2.0) < 1e-16);
}

TEST_CASE("golden critical orbit stays in the 2-ball") {
    const CFNumber g = CFNumber::noble();
    const auto conv = sj::cf::convergents(g, 8);
    const std::size_t count = conv[8].q.get_ui();
    const OrbitSet o = critical_orbit(QuadraticSiegel(g), count, 64);
    REQUIRE(o.points.size() == count + 1);
    for (const auto& p : o.points) CHECK(p.abs2().upper() <= sj::numerics::Dyadic(4));
    CHECK(o.max_error() < std::ldexp(1.0, -64));
    CHECK(o.min_modulus() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("doubling the requested bits keeps the reported digits") {
    const CFNumber g = CFNumber::parse("[2,1;1*]");
    const OrbitSet a = critical_orbit(QuadraticSiegel(g), 200, 40);
    const OrbitSet b = critical_orbit(QuadraticSiegel(g), 200, 80);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(std::abs(a.points[i].approx() - b.points[i].approx()) < 1e-10);
    }
    CHECK_THROWS_AS(critical_orbit(QuadraticSiegel(g), 0, 64), sj::DomainError);
}

TEST_CASE("precision cap is enforced") {
    const EnvGuard guard("256");
    CHECK(precision_cap() == 256);
    CHECK_THROWS_AS(critical_orbit(QuadraticSiegel(CFNumber::noble()), 2000, 64), sj::PrecisionExhausted);
}

TEST_CASE("angular order sorts i*theta mod 1") {
    const CFNumber g = CFNumber::noble();
    const auto order = angular_order(g, 500);
    REQUIRE(order.size() == 501);
    CHECK(order.front() == 0);
    const long double th = (std::sqrt(5.0L) - 1) / 2;
    long double prev = -1;
    for (std::size_t i : order) {
        long double f = static_cast<long double>(i) * th;
        f -= std::floor(f);
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("conformal radius of disks") {
    const auto e = conformal_radius(JordanDomain::disk(1), 1e-7);
    CHECK(std::fabs(e.value.to_double() - 1) < 1e-6);
    CHECK(e.certified_error.to_double() <= 1e-7);
    for (double R : {0.25, 3.0, 10.0}) {
        const auto eR = conformal_radius(JordanDomain::disk(R), 1e-7 * R);
        CHECK(std::fabs(eR.value.to_double() - R) < 1e-6 * R);
    }
    // off-center base point: (R^2 - |a|^2)/R
    const Cplx a(0.4, -0.3);
    const auto ea = conformal_radius(JordanDomain::disk(2), 1e-7, a);
    CHECK(std::fabs(ea.value.to_double() - (4 - std::norm(a)) / 2) < 1e-6);
}

TEST_CASE("conformal radius of the square matches the Schwarz-Christoffel value") {
    const double oracle = square_oracle();
    CHECK(oracle == doctest::Approx(8 * std::sqrt(M_PI) / (std::tgamma(0.25) * std::tgamma(0.25))).epsilon(1e-9));
    const auto sq = JordanDomain::polygon({{1, -1}, {1, 1}, {-1, 1}, {-1, -1}});
    const auto e = conformal_radius(sq, 1e-5);
    CHECK(std::fabs(e.value.to_double() - oracle) < 1e-3);
    CHECK(std::fabs(e.value.to_double() - oracle) < 1e-5);
    // clockwise input gives the same value
    const auto cw = JordanDomain::polygon({{1, -1}, {-1, -1}, {-1, 1}, {1, 1}});
    CHECK(std::fabs(conformal_radius(cw, 1e-5).value.to_double() - oracle) < 1e-5);
}

TEST_CASE("conformal radius is monotone on nested domains") {
    const double sq = conformal_radius(JordanDomain::polygon({{0.7, -0.7}, {0.7, 0.7}, {-0.7, 0.7}, {-0.7, -0.7}}), 1e-6)
                          .value.to_double();
    const double disk = conformal_radius(JordanDomain::disk(1), 1e-6).value.to_double();
    const double inner = conformal_radius(JordanDomain::disk(0.7), 1e-6).value.to_double();
    CHECK(inner <= sq + 2e-6);
    CHECK(sq <= disk + 2e-6);
}

TEST_CASE("conformal radius rejects bad domains") {
    const auto bowtie = JordanDomain::polygon({{1, 1}, {-1, -1}, {1, -1}, {-1, 1}});
    CHECK_THROWS_AS(conformal_radius(bowtie, 1e-3), sj::DomainError);
    const auto away = JordanDomain::polygon({{2, 0}, {3, 0}, {3, 1}, {2, 1}});
    CHECK_THROWS_AS(conformal_radius(away, 1e-3), sj::DomainError);
    CHECK_THROWS_AS(JordanDomain::polygon({{0, 0}, {1, 0}}), sj::DomainError);
}

TEST_CASE("polygon checks") {
    const PolygonCheck ccw = check_polygon({{1, -1}, {1, 1}, {-1, 1}, {-1, -1}});
    CHECK(ccw.simple);
    CHECK(ccw.winding == 1);
    CHECK(ccw.signed_area == doctest::Approx(4));
    const PolygonCheck cw = check_polygon({{1, -1}, {-1, -1}, {-1, 1}, {1, 1}});
    CHECK(cw.winding == -1);
    CHECK_FALSE(check_polygon({{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}).simple);
}

TEST_CASE("perturbation bound") {
    for (double e : {1e-6, 1e-3, 0.1, 0.5, 0.9}) CHECK(perturb_bound_check(1, 1 - e, e));
    CHECK_FALSE(perturb_bound_check(1, 1.1, 0.1));
    CHECK_FALSE(perturb_bound_check(1, 1, 0.1));
    // difference too large for the given eps
    CHECK_FALSE(perturb_bound_check(1, 0.5, 1e-3));
}

TEST_CASE("carving a synthetic circle orbit") {
    std::vector<Cplx> pts;
    for (int i = 0; i < 400; ++i) pts.push_back(std::polar(1.0, 2 * M_PI * i / 400));
    const double R = 0.05;
    const CarvedDomain d = carve_points(pts, R);
    CHECK(d.inner_radius == doctest::Approx(1 - R).epsilon(1e-12));
    for (int k = 0; k < 64; ++k) {
        const double t = 2 * M_PI * k / 64;
        CHECK(d.contains(std::polar(0.93, t)));
        CHECK_FALSE(d.contains(std::polar(1.0, t)));
        CHECK_FALSE(d.contains(std::polar(1.2, t)));
        CHECK(d.excluded(std::polar(1.0, t)));
    }
    CHECK(d.component_cells() > 0);
    CHECK_THROWS_AS(carve_points(pts, 1.5), sj::DomainError);
}

TEST_CASE("carved disks shrink by tau per level") {
    const CFNumber g = CFNumber::noble();
    const double K = 0.01, tau = 0.9;
    const CarvedDomain a = carve_domain(g, 6, K, tau);
    const CarvedDomain b = carve_domain(g, 7, K, tau);
    CHECK(b.radius / a.radius == doctest::Approx(tau).epsilon(1e-12));
    CHECK(a.radius == doctest::Approx(2 * K * std::pow(tau, 6)).epsilon(1e-12));
    CHECK(a.contains(0));
    CHECK(a.component_cells() > 0);
    // with the paper's tau and K = 10 the level-6 disks have radius about 14,
    // far larger than the distance from 0 to the orbit
    const auto ts = sj::circle::solve_tau(g, 1e-10);
    const sj::circle::BlaschkeMap m(ts.tau);
    std::vector<sj::circle::Partition> ps;
    for (std::size_t n = 1; n <= 10; ++n) ps.push_back(sj::circle::dynamical_partition(m, g, n));
    const double tau_safe = sj::circle::estimate_B(ps).tau_safe;
    CHECK(2 * 10 * std::pow(tau_safe, 6) > 1);
    CHECK_THROWS_AS(carve_domain(g, 6, 10, tau_safe), sj::DomainError);
}

TEST_CASE("golden Siegel radius") {
    const CFNumber g = CFNumber::noble();
    const RadiusRun run = siegel_radius_run(g, 1e-3);
    const double r = run.best.value.to_double();
    CHECK(r < 2);
    CHECK(r > 0.3);
    CHECK_FALSE(run.best.certified);
    CHECK(run.min_orbit_modulus >= r / 4 - 1e-3);
    CHECK_FALSE(run.K_doubled);
    REQUIRE(run.levels.size() >= 10);
    for (std::size_t i = 1; i < run.levels.size(); ++i) {
        const auto& a = run.levels[i - 1];
        const auto& b = run.levels[i];
        CHECK(std::fabs(a.r - b.r) < a.certified_error + b.certified_error);
        CHECK(b.certified_error < a.certified_error);
        CHECK(b.eps / a.eps == doctest::Approx(run.tau).epsilon(1e-12));
    }
    // the deep levels agree far more closely than the certificate says
    const auto& last = run.levels.back();
    const auto& prev = run.levels[run.levels.size() - 2];
    CHECK(std::fabs(last.r - prev.r) < 1e-4);
    CHECK(std::fabs(radius_value(g) - r) < 1e-4);
}

TEST_CASE("Siegel radius of other noble numbers") {
    for (const char* lit : {"[2;1*]", "[1,3;1*]", "[5;1*]"}) {
        const CFNumber c = CFNumber::parse(lit);
        const RadiusRun run = siegel_radius_run(c, 1e-3);
        const double r = run.best.value.to_double();
        CHECK(r > 0);
        CHECK(r < 2);
        CHECK(run.min_orbit_modulus >= r / 4 - 1e-3);
    }
    CHECK_THROWS_AS(siegel_radius(CFNumber::all_twos(), 1e-3), sj::DomainError);
}

TEST_CASE("radius bump search") {
    const CFNumber g = CFNumber::noble();
    const double r = siegel_radius(g, 1e-3).value.to_double();
    const double eps = r / 8;
    const RadiusBumpResult res = radius_bump_search({1}, 0, eps);
    CHECK(res.m > 0);
    const double rb = siegel_radius(res.beta, 1e-3).value.to_double();
    CHECK(rb > r - 2 * eps);
    CHECK(rb < r - eps);
    const auto pb = sj::cf::yoccoz_phi(res.beta, 1e-10);
    const auto po = sj::cf::yoccoz_phi(g, 1e-10);
    CHECK(sj::numerics::certainly_less(po.enclosure(), pb.enclosure()));
    CHECK(res.beta == sj::cf::digit_bump(g, res.position, res.N));
    CHECK_THROWS_AS(radius_bump_search({1}, 0, r / 3), sj::DomainError);

    const RadiusBumpResult later = radius_bump_search({1}, 2, eps);
    CHECK(later.m > 2);
    CHECK(later.r_beta.value.to_double() < later.r_omega.value.to_double());
}

TEST_CASE("phi plus log r under a far bump") {
    const CFNumber g = CFNumber::noble();
    const PhiLogR base = phi_logr(g, 1e-3);
    CHECK(base.phi == doctest::Approx(std::log((1 + std::sqrt(5.0)) / 2) / (1 - (std::sqrt(5.0) - 1) / 2)).epsilon(1e-3));
    const PhiLogR moved = phi_logr(sj::cf::digit_bump(g, 12, 50), 1e-3);
    CHECK(std::fabs(moved.value.to_double() - base.value.to_double()) <= 0.1);
    CHECK(moved.phi > base.phi);
}
