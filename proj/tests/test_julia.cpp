#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "sj/error.hpp"
#include "sj/julia/julia.hpp"
#include "sj/siegel/siegel.hpp"

using namespace sj::julia;
using sj::numerics::Dyadic;
using sj::numerics::Point;

namespace {

using LCplx = std::complex<long double>;

const CFNumber& golden_cf() {
    static const CFNumber g = CFNumber::parse("[1;1*]");
    return g;
}

Oracle golden_oracle() { return sj::cf::cf_oracle(golden_cf()); }

// lambda for theta = (sqrt 5 - 1)/2, independent of the library
LCplx golden_lambda() {
    const long double theta = (std::sqrt(5.0L) - 1) / 2;
    const long double a = 2 * 3.14159265358979323846264338327950288L * theta;
    return {std::cos(a), std::sin(a)};
}

Point dyadic_point(double x, double y) {
    return {Dyadic(std::lround(std::ldexp(x, 40)), -40), Dyadic(std::lround(std::ldexp(y, 40)), -40)};
}

Cplx to_cplx(LCplx z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

// repelling fixed point and its preimages up to the given depth
std::vector<LCplx> fixed_point_tree(std::size_t depth) {
    const LCplx lam = golden_lambda();
    const LCplx beta = 1.0L - lam;
    std::vector<LCplx> all{beta, -lam - beta};
    std::vector<LCplx> level{-lam - beta};
    for (std::size_t d = 2; d <= depth; ++d) {
        std::vector<LCplx> next;
        for (const LCplx& z : level) {
            const LCplx s = std::sqrt(lam * lam + 4.0L * z);
            next.push_back((-lam + s) / 2.0L);
            next.push_back((-lam - s) / 2.0L);
        }
        all.insert(all.end(), next.begin(), next.end());
        level = next;
    }
    return all;
}

}  // namespace

TEST_CASE("band names and work meter") {
    CHECK(band_name(Band::Far) == "far");
    CHECK(band_name(Band::Near) == "near");
    CHECK(band_name(Band::InBetween) == "in-between");
    WorkMeter m(10);
    CHECK(m.charge(4));
    CHECK_FALSE(m.charge(7));
    CHECK(m.used() == 4);
    CHECK(m.charge(6));
    CHECK(m.remaining() == 0);
    CHECK_FALSE(m.charge(1));
}

TEST_CASE("parameter error bound holds") {
    const LCplx lam = golden_lambda();
    for (std::size_t bits : {4, 10, 30, 50}) {
        const Oracle o = golden_oracle();
        WorkMeter m(1000);
        const Parameter p = read_parameter(o, bits, m);
        CHECK(m.used() == bits);
        CHECK(std::abs(LCplx(p.lambda) - lam) <= p.lambda_error);
        CHECK(p.lambda_error < 7 * std::ldexp(1.0, -static_cast<int>(bits)) + 2e-15);
    }
    const Oracle o = golden_oracle();
    WorkMeter small(5);
    CHECK_THROWS_AS(read_parameter(o, 10, small), sj::ResourceExhausted);
    CHECK(small.used() == 0);
    CHECK_THROWS_AS(read_parameter(o, 0, small), sj::DomainError);
    CHECK_THROWS_AS(read_parameter(o, 51, small), sj::DomainError);
}

TEST_CASE("repelling fixed point is fixed and repelling") {
    const Parameter p = exact_parameter(golden_cf());
    const Cplx b = repelling_fixed_point(p);
    CHECK(std::abs(b * b + p.lambda * b - b) < 1e-14);
    CHECK(std::abs(2.0 * b + p.lambda) > 1);
    CHECK(b.real() == doctest::Approx(1.7375).epsilon(1e-4));
    CHECK(b.imag() == doctest::Approx(0.6755).epsilon(1e-3));
}

TEST_CASE("backward orbit matches an independent preimage tree") {
    const Parameter p = exact_parameter(golden_cf());
    WorkMeter m(1 << 20);
    const JuliaPoints jp = backward_orbit(p, 6, 1e-6, m);
    const auto ref = fixed_point_tree(6);
    REQUIRE(jp.points.size() == ref.size());
    CHECK(ref.size() == 64);
    for (const LCplx& z : ref) {
        double best = 1;
        for (const Cplx& w : jp.points) best = std::min(best, std::abs(to_cplx(z) - w));
        CHECK(best < 1e-12);
    }
    for (double e : jp.errors) CHECK(e < 1e-12);
    CHECK_THROWS_AS(backward_orbit(p, 21, 1e-6, m), sj::DomainError);
}

TEST_CASE("julia points map forward onto stored points") {
    const Parameter p = exact_parameter(golden_cf());
    WorkMeter m(std::uint64_t{1} << 30);
    const double delta = 1.0 / 64;
    const JuliaPoints jp = julia_points(p, {16, 4096, delta / 8, delta / 4, 8}, m);
    REQUIRE(jp.points.size() > 1000);
    const Cplx crit = -p.lambda / 2.0;
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> pick(0, jp.points.size() - 1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t i = pick(rng);
        const Cplx w = jp.points[i];
        CHECK(std::abs(w) <= 2);
        CHECK(jp.errors[i] <= delta / 8);
        if (std::abs(w - crit) < 1e-12 || std::abs(w - repelling_fixed_point(p)) < 1e-12) continue;
        // the parent was stored unless its cell was already taken
        const Cplx image = w * w + p.lambda * w;
        double best = 1;
        for (const Cplx& u : jp.points) best = std::min(best, std::abs(u - image));
        CHECK(best < delta / 4 * std::sqrt(2.0) + 1e-9);
    }
    // the distance bound is an upper bound on the distance to the set
    for (int t = 0; t < 50; ++t) {
        const Cplx z = jp.points[pick(rng)] + Cplx(0.003, -0.002);
        double best = 1;
        for (std::size_t i = 0; i < jp.points.size(); ++i) best = std::min(best, std::abs(z - jp.points[i]) + jp.errors[i]);
        CHECK(jp.distance_bound(z, delta) == doctest::Approx(best));
    }
}

TEST_CASE("points beyond the escape radius are far") {
    const Oracle o = golden_oracle();
    for (std::size_t n = 1; n <= 12; ++n) {
        for (const auto& d : {dyadic_point(3.5, 0), dyadic_point(-2.2, 2.4), dyadic_point(0, -3.01)}) {
            const MembershipVerdict v = classify_point(o, d, n, 1);
            CHECK_FALSE(v.timeout);
            CHECK(v.bit == 0);
            CHECK(v.band == Band::Far);
        }
    }
}

TEST_CASE("the repelling fixed point is classified 1") {
    const Cplx b = to_cplx(1.0L - golden_lambda());
    for (std::size_t n = 3; n <= 8; ++n) {
        const Oracle o = golden_oracle();
        const MembershipVerdict v = classify_point(o, dyadic_point(b.real(), b.imag()), n, std::uint64_t{1} << 30);
        CHECK_FALSE(v.timeout);
        CHECK(v.bit == 1);
        CHECK(v.band == Band::Near);
    }
}

TEST_CASE("the Siegel center is classified 0 below r/8") {
    const double r = sj::siegel::radius_value(golden_cf());
    std::size_t n = 1;
    while (std::ldexp(1.0, -static_cast<int>(n)) >= r / 8) ++n;
    for (std::size_t k = n; k <= n + 1; ++k) {
        const Oracle o = golden_oracle();
        const MembershipVerdict v = classify_point(o, dyadic_point(0, 0), k, std::uint64_t{1} << 32);
        CHECK_FALSE(v.timeout);
        CHECK(v.bit == 0);
        // the Koebe disk of radius r/4 keeps J away, but the interior is
        // not certified, so the answer comes from the in-between band
        CHECK(v.band != Band::Near);
    }
}

TEST_CASE("verdicts near certified Julia points are 1") {
    const auto tree = fixed_point_tree(7);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<std::size_t> pick(0, tree.size() - 1);
    const std::size_t n = 6;
    const double delta = std::ldexp(1.0, -static_cast<int>(n));
    for (int t = 0; t < 30; ++t) {
        const Cplx q = to_cplx(tree[pick(rng)]);
        const Cplx d = q + std::polar(0.98 * delta * u(rng), 2 * M_PI * u(rng));
        const Oracle o = golden_oracle();
        const MembershipVerdict v = classify_point(o, dyadic_point(d.real(), d.imag()), n, std::uint64_t{1} << 32);
        REQUIRE_FALSE(v.timeout);
        CHECK(v.bit == 1);
    }
}

TEST_CASE("verdicts with a certified exterior bound are 0") {
    const Parameter exact = exact_parameter(golden_cf());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.3, 2.3);
    int far_seen = 0;
    for (int t = 0; t < 120; ++t) {
        const Cplx z(u(rng), u(rng));
        const std::size_t n = 3 + static_cast<std::size_t>(t % 4);
        const double delta = std::ldexp(1.0, -static_cast<int>(n));
        const Point d = dyadic_point(z.real(), z.imag());
        const Cplx zd(d.x.to_double(), d.y.to_double());
        const double bound = exterior_distance_bound(exact, zd, 4096);
        if (bound <= 2 * delta * 1.05) continue;
        ++far_seen;
        const Oracle o = golden_oracle();
        const MembershipVerdict v = classify_point(o, d, n, std::uint64_t{1} << 32);
        REQUIRE_FALSE(v.timeout);
        CHECK(v.bit == 0);
    }
    CHECK(far_seen > 20);
}

TEST_CASE("far verdicts are consistent across n") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.1, 2.1);
    int far_seen = 0;
    for (int t = 0; t < 200 && far_seen < 25; ++t) {
        const Point d = dyadic_point(u(rng), u(rng));
        const std::size_t n = 4 + static_cast<std::size_t>(t % 3);
        const Oracle o = golden_oracle();
        const MembershipVerdict v = classify_point(o, d, n, std::uint64_t{1} << 32);
        if (v.band != Band::Far || std::abs(Cplx(d.x.to_double(), d.y.to_double())) > 2) continue;
        ++far_seen;
        const Oracle o2 = golden_oracle();
        const MembershipVerdict coarser = classify_point(o2, d, n - 1, std::uint64_t{1} << 32);
        CHECK(coarser.bit == 0);
        const MembershipVerdict finer = classify_point(o2, d, n + 1, std::uint64_t{1} << 32);
        CHECK(finer.band == Band::Far);
    }
    CHECK(far_seen >= 10);
}

TEST_CASE("budget exhaustion gives a timeout verdict") {
    const Oracle o = golden_oracle();
    const MembershipVerdict v = classify_point(o, dyadic_point(0.1, 0.1), 6, 20);
    CHECK(v.timeout);
    CHECK(v.budget_used <= 20);
    const MembershipVerdict w = classify_point(o, dyadic_point(0.1, 0.1), 6, 5000);
    CHECK(w.timeout);
    CHECK(w.budget_used <= 5000);
    CHECK_THROWS_AS(classify_point(o, dyadic_point(0, 0), 6, 0), sj::DomainError);
}

TEST_CASE("exterior distance bound") {
    const sj::numerics::PrecisionReal b = exterior_distance_bound(golden_cf(), Cplx(10, 0), 100);
    CHECK(b.to_double() >= 8);
    CHECK(exterior_distance_bound(golden_cf(), Cplx(0, -10), 100).to_double() >= 8);
    const Parameter p = exact_parameter(golden_cf());
    CHECK(exterior_distance_bound(p, repelling_fixed_point(p), 100000) == 0);
    CHECK(exterior_distance_bound(p, Cplx(0, 0), 100000) == 0);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-2, 2);
    int escaping = 0;
    for (int t = 0; t < 200; ++t) {
        const Cplx z(u(rng), u(rng));
        double prev = 0;
        for (std::uint64_t it : {1, 4, 16, 64, 256, 1024}) {
            const double v = exterior_distance_bound(p, z, it);
            CHECK(v >= prev);
            prev = v;
        }
        if (prev > 0) ++escaping;
    }
    CHECK(escaping > 50);
}

TEST_CASE("render covers the fixed point and stays in the ball") {
    const std::size_t m = 5;
    const Oracle o = golden_oracle();
    const Rendering r = render(o, m, std::uint64_t{1} << 40);
    REQUIRE_FALSE(r.stats.incomplete);
    CHECK(r.m == m);
    CHECK(r.theta == o.description());
    REQUIRE(!r.balls.empty());
    CHECK(r.stats.bit_one == r.balls.size());
    CHECK(r.stats.far + r.stats.near + r.stats.in_between == r.stats.pixels);
    CHECK(r.stats.oracle_reads > 0);
    CHECK(r.stats.work_used <= r.stats.budget);
    const Cplx b = to_cplx(1.0L - golden_lambda());
    const double radius = std::ldexp(1.0, -static_cast<int>(m));
    bool covered = false;
    for (const auto& ball : r.balls.balls()) {
        const Cplx c(ball.center.x.to_double(), ball.center.y.to_double());
        CHECK(ball.radius == sj::numerics::pow2(-static_cast<std::int64_t>(m)));
        CHECK(std::abs(c) + radius <= 2 + radius);
        // centers on the 2^-(m+1) grid
        const double gx = std::ldexp(c.real(), static_cast<int>(m) + 1);
        const double gy = std::ldexp(c.imag(), static_cast<int>(m) + 1);
        CHECK(gx == std::round(gx));
        CHECK(gy == std::round(gy));
        covered |= std::abs(c - b) <= radius;
    }
    CHECK(covered);
}

TEST_CASE("render is deterministic") {
    const Oracle o1 = golden_oracle();
    const Oracle o2 = golden_oracle();
    const Rendering a = render(o1, 5, std::uint64_t{1} << 40);
    const Rendering b = render(o2, 5, std::uint64_t{1} << 40);
    CHECK(a.balls == b.balls);
    CHECK(a.balls.serialize() == b.balls.serialize());
    CHECK(a.stats.work_used == b.stats.work_used);
    CHECK(to_pgm(a) == to_pgm(b));
    CHECK(sj::numerics::hausdorff_distance(a.balls, b.balls, 1.0 / 128).to_double() <= 1.0 / 128);
}

TEST_CASE("renders refine consistently") {
    std::vector<Rendering> rs;
    for (std::size_t m = 3; m <= 6; ++m) {
        const Oracle o = golden_oracle();
        rs.push_back(render(o, m, std::uint64_t{1} << 40));
        REQUIRE_FALSE(rs.back().stats.incomplete);
    }
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
        const std::size_t m = rs[i].m;
        const double bound = 3 * std::ldexp(1.0, -static_cast<int>(m));
        const auto d = sj::numerics::hausdorff_distance(rs[i].balls, rs[i + 1].balls, bound / 8);
        CHECK(d.upper().to_double() <= bound);
    }
}

TEST_CASE("render under a small budget is flagged incomplete") {
    const Oracle o = golden_oracle();
    const Rendering r = render(o, 5, 100000);
    CHECK(r.stats.incomplete);
    CHECK(r.stats.work_used <= 100000);
    const Rendering none = render(o, 5, 10);
    CHECK(none.stats.incomplete);
    CHECK(none.balls.empty());
    CHECK_THROWS_AS(render(o, 0, 100), sj::DomainError);
}

TEST_CASE("pgm raster") {
    const Oracle o = golden_oracle();
    const Rendering r = render(o, 3, std::uint64_t{1} << 40);
    const std::string pgm = to_pgm(r);
    const std::string header = "P5\n" + std::to_string(r.width) + " " + std::to_string(r.width) + "\n255\n";
    REQUIRE(pgm.size() == header.size() + r.width * r.width);
    CHECK(pgm.substr(0, header.size()) == header);
    std::size_t black = 0;
    for (std::size_t i = header.size(); i < pgm.size(); ++i) black += pgm[i] == '\0';
    CHECK(black == r.balls.size());
}
