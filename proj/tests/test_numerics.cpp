#include <cmath>
#include <random>
#include <thread>

#include <gmpxx.h>

#include "doctest.h"
#include "sj/error.hpp"
#include "sj/numerics/ball_union.hpp"
#include "sj/numerics/dyadic.hpp"
#include "sj/numerics/oracle.hpp"
#include "sj/numerics/real.hpp"

using namespace sj::numerics;

namespace {

mpq_class to_q(const Dyadic& d) {
    mpq_class q(d.mantissa());
    if (d.exponent() >= 0) {
        mpz_class s;
        mpz_mul_2exp(s.get_mpz_t(), mpz_class(1).get_mpz_t(), static_cast<mp_bitcnt_t>(d.exponent()));
        q *= s;
    } else {
        mpz_class s;
        mpz_mul_2exp(s.get_mpz_t(), mpz_class(1).get_mpz_t(), static_cast<mp_bitcnt_t>(-d.exponent()));
        q /= s;
    }
    q.canonicalize();
    return q;
}

mpq_class pow2q(long k) { return to_q(pow2(k)); }

}  // namespace

TEST_CASE("dyadic canonical form and exact arithmetic") {
    Dyadic a(12);
    CHECK(a.mantissa() == 3);
    CHECK(a.exponent() == 2);
    CHECK(Dyadic().to_string() == "0*2^0");
    const Dyadic b = Dyadic::parse("3*2^-3");
    CHECK(b.to_double() == 0.375);
    CHECK(to_q(a * b) == mpq_class(9, 2));
    CHECK(to_q(a - b) == mpq_class(93, 8));
    CHECK(b < a);
    CHECK(Dyadic::parse("-5") == Dyadic(-5));
    CHECK_THROWS_AS(Dyadic::parse("3*2^"), sj::DomainError);
    CHECK_THROWS_AS(Dyadic::parse("x"), sj::DomainError);
}

TEST_CASE("dyadic serialization round trips") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 500; ++t) {
        mpz_class m(std::to_string(static_cast<long long>(rng() >> 1)));
        m *= mpz_class(std::to_string(rng() >> 3));
        if (rng() & 1) m = -m;
        const auto e = static_cast<std::int64_t>(rng() % 400) - 200;
        const Dyadic d(m, e);
        const Dyadic r = Dyadic::parse(d.to_string());
        CHECK(r == d);
        CHECK(r.to_string() == d.to_string());
    }
}

TEST_CASE("rounding modes") {
    const Dyadic x = Dyadic::parse("7*2^-3");  // 0.875
    CHECK(x.round_fixed(1, Round::Down) == Dyadic::parse("1*2^-1"));
    CHECK(x.round_fixed(1, Round::Up) == Dyadic(1));
    CHECK(x.round_fixed(2, Round::Nearest) == Dyadic(1));  // tie goes up
    const Dyadic f = Dyadic::from_rational(1, 3, 10, Round::Nearest);
    CHECK(abs(to_q(f) - mpq_class(1, 3)) <= pow2q(-11));
}

TEST_CASE("ball arithmetic encloses exact results") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int t = 0; t < 200; ++t) {
        const double a = u(rng), b = u(rng);
        const PrecisionReal x = PrecisionReal::from_double(a, 40);
        const PrecisionReal y = PrecisionReal::from_double(b, 40);
        const mpq_class qa = to_q(Dyadic::from_double(a));
        const mpq_class qb = to_q(Dyadic::from_double(b));
        auto inside = [](const PrecisionReal& r, const mpq_class& v) {
            return to_q(r.lower()) <= v && v <= to_q(r.upper());
        };
        CHECK(inside(x + y, qa + qb));
        CHECK(inside(x * y, qa * qb));
        CHECK(inside(x - y, qa - qb));
        if (std::fabs(b) > 1e-3) CHECK(inside(x / y, qa / qb));
    }
    const PrecisionReal two(2);
    const PrecisionReal s = sqrt(two.with_precision(128));
    CHECK(s.rad_double() < 1e-30);
    CHECK(to_q(s.lower() * s.lower()) <= 2);
    CHECK(to_q(s.upper() * s.upper()) >= 2);
    const PrecisionReal l = log(PrecisionReal(Dyadic(1)));
    CHECK(l.contains(Dyadic()));
    CHECK_THROWS_AS(log(PrecisionReal(Dyadic(-1))), sj::DomainError);
    CHECK_THROWS_AS(reciprocal(PrecisionReal(Dyadic())), sj::DomainError);
    const PrecisionReal q = PrecisionReal::from_double(0.25);
    CHECK(sin_turns(q).contains(Dyadic(1)));
    CHECK(cos_turns(q).lower().to_double() < 1e-15);
}

TEST_CASE("oracle for an exact dyadic returns it") {
    Oracle o = Oracle::exact(Dyadic::parse("3*2^-3"));
    for (std::size_t n : {0u, 1u, 2u, 5u, 30u, 200u}) CHECK(o.query(n) == Dyadic::parse("3*2^-3"));
    CHECK(o.reads() == 6);
    CHECK(*o.max_read() == 200);
}

TEST_CASE("oracle for 1/3") {
    // 1/4 is within 2^-2 of 1/3
    CHECK(abs(mpq_class(1, 3) - mpq_class(1, 4)) < pow2q(-2));
    Oracle o = Oracle::rational(1, 3);
    for (std::size_t n = 0; n < 80; ++n) {
        const Dyadic d = o.query(n);
        CHECK(abs(to_q(d) - mpq_class(1, 3)) < pow2q(-static_cast<long>(n)));
    }
    const auto log = o.read_log();
    CHECK(log.size() == 80);
    CHECK(log[17] == 17);
    CHECK(valid_answer([](std::size_t b) { return PrecisionReal::rational(1, 3, b); }, 2, Dyadic::parse("1*2^-2")));
}

TEST_CASE("oracle determinism, replay and shared log") {
    Oracle o = Oracle::rational(2, 7);
    Oracle copy = o;
    const Dyadic a = o.query(20);
    CHECK(copy.reads() == 1);
    CHECK(o.with_fresh_log().query(20) == a);
    std::map<std::size_t, Dyadic> rec{{3, Dyadic::parse("1*2^-2")}};
    Oracle r = Oracle::replay(rec, o);
    CHECK(r.query(3) == Dyadic::parse("1*2^-2"));
    CHECK(r.query(20) == a);
    CHECK(r.reads() == 2);
    CHECK(o.reads() == 1);
}

TEST_CASE("oracle log is safe under concurrent queries") {
    Oracle o = Oracle::rational(5, 11);
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t) {
        ts.emplace_back([o, t] {
            for (int i = 0; i < 50; ++i) o.query(static_cast<std::size_t>(t * 50 + i));
        });
    }
    for (auto& t : ts) t.join();
    CHECK(o.reads() == 200);
}

TEST_CASE("oracle from an approximator") {
    auto sqrt2 = [](std::size_t b) { return sqrt(PrecisionReal(Dyadic(2), Dyadic(), b + 8)); };
    Oracle o = Oracle::from_approximator("sqrt2", sqrt2);
    for (std::size_t n = 0; n < 120; n += 7) {
        const Dyadic d = o.query(n);
        CHECK(valid_answer(sqrt2, n, d));
        // nearest multiple of 2^-(n+2)
        CHECK(d.exponent() >= -static_cast<std::int64_t>(n) - 2);
    }
}

TEST_CASE("ball union serialization") {
    BallUnion u;
    u.add({{Dyadic::parse("3*2^-4"), Dyadic(-1)}, Dyadic::parse("1*2^-6")});
    u.add({{Dyadic(), Dyadic::parse("5*2^-2")}, Dyadic()});
    const std::string s = u.serialize();
    CHECK(s == "3*2^-4 -1*2^0 1*2^-6\n0*2^0 5*2^-2 0*2^0\n");
    CHECK(BallUnion::parse(s) == u);
    CHECK(BallUnion::parse(s).serialize() == s);
    CHECK_THROWS_AS(BallUnion::parse("1 2\n"), sj::DomainError);
    CHECK_THROWS_AS(u.add({{Dyadic(), Dyadic()}, Dyadic(-1)}), sj::DomainError);
}

TEST_CASE("hausdorff distance examples") {
    const Ball unit{{Dyadic(), Dyadic()}, Dyadic(1)};
    const Ball half{{Dyadic(), Dyadic()}, Dyadic::parse("1*2^-1")};
    const double tol = 1e-3;
    const PrecisionReal same = hausdorff_distance(BallUnion({unit}), BallUnion({unit}), tol);
    CHECK(same.contains(Dyadic()));
    CHECK(same.upper().to_double() <= tol + 1e-9);
    const PrecisionReal pts = hausdorff_distance(from_points({{Dyadic(), Dyadic()}}), from_points({{Dyadic(1), Dyadic()}}));
    CHECK(pts.contains(Dyadic(1)));
    const PrecisionReal nested = hausdorff_distance(BallUnion({unit}), BallUnion({half}), tol);
    CHECK(nested.contains(Dyadic::parse("1*2^-1")));
    CHECK(nested.rad_double() <= tol);
    CHECK_THROWS_AS(hausdorff_distance(BallUnion(), BallUnion({unit})), sj::DomainError);
}

TEST_CASE("hausdorff distance sees a gap inside the other set") {
    // a small disk in the hole of a ring of disks: boundaries alone would not show it
    BallUnion ring;
    for (int k = 0; k < 64; ++k) {
        const double t = 2 * M_PI * k / 64;
        ring.add({{Dyadic::from_double(std::cos(t)), Dyadic::from_double(std::sin(t))}, Dyadic::parse("1*2^-3")});
    }
    BallUnion with_center = ring;
    with_center.add({{Dyadic(), Dyadic()}, Dyadic::parse("1*2^-4")});
    const PrecisionReal d = hausdorff_distance(ring, with_center, 1e-3);
    // the center is 7/8 from the ring
    CHECK(d.lower().to_double() > 0.8);
    CHECK(d.upper().to_double() < 0.9);
}

TEST_CASE("hausdorff distance is symmetric and satisfies the triangle inequality") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    auto random_union = [&] {
        BallUnion b;
        for (int i = 0; i < 5; ++i) {
            b.add({{Dyadic::from_double(u(rng)), Dyadic::from_double(u(rng))}, Dyadic::from_double(0.2 * std::fabs(u(rng)))});
        }
        return b;
    };
    for (int t = 0; t < 10; ++t) {
        const BallUnion a = random_union(), b = random_union(), c = random_union();
        const double tol = 2e-3;
        const PrecisionReal ab = hausdorff_distance(a, b, tol), ba = hausdorff_distance(b, a, tol);
        const PrecisionReal bc = hausdorff_distance(b, c, tol), ac = hausdorff_distance(a, c, tol);
        CHECK(std::fabs(ab.to_double() - ba.to_double()) <= 2 * tol);
        CHECK(ac.to_double() <= ab.to_double() + bc.to_double() + 2 * 3 * tol);
    }
}

TEST_CASE("koebe inscribed bound") {
    CHECK(koebe_inscribed_bound(PrecisionReal(1)).mid() == Dyadic::parse("1*2^-2"));
    CHECK(koebe_inscribed_bound(PrecisionReal(0)).mid() == Dyadic());
    CHECK(koebe_inscribed_bound(PrecisionReal(2)).mid() == Dyadic::parse("1*2^-1"));
    CHECK_THROWS_AS(koebe_inscribed_bound(PrecisionReal(-1)), sj::DomainError);
}
