#include "sj/numerics/real.hpp"

#include <algorithm>
#include <cmath>

#include "sj/error.hpp"

namespace sj::numerics {

namespace {

constexpr std::size_t kRadiusBits = 30;

// RAII wrapper so every early exit releases the MPFR limbs.
class Mpfr {
public:
    explicit Mpfr(std::size_t prec) { mpfr_init2(v_, static_cast<mpfr_prec_t>(std::max<std::size_t>(prec, 2))); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
    mpfr_ptr get() { return v_; }

private:
    mpfr_t v_;
};

mpfr_rnd_t to_rnd(Round r) {
    switch (r) {
        case Round::Down: return MPFR_RNDD;
        case Round::Up: return MPFR_RNDU;
        default: return MPFR_RNDN;
    }
}

using UnaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

Dyadic apply(UnaryFn fn, const Dyadic& x, std::size_t prec, Round mode) {
    Mpfr in(std::max<std::size_t>(x.bit_length(), 2));
    x.to_mpfr(in.get());
    Mpfr out(prec);
    fn(out.get(), in.get(), to_rnd(mode));
    return Dyadic::from_mpfr(out.get());
}

PrecisionReal monotone(const PrecisionReal& x, UnaryFn fn, bool increasing) {
    const std::size_t p = x.precision() + 8;
    const Dyadic lo = x.lower();
    const Dyadic hi = x.upper();
    Dyadic a, b;
    if (increasing) {
        a = apply(fn, lo, p, Round::Down);
        b = apply(fn, hi, p, Round::Up);
    } else {
        a = apply(fn, hi, p, Round::Down);
        b = apply(fn, lo, p, Round::Up);
    }
    return PrecisionReal::from_bounds(a, b, x.precision());
}

}  // namespace

PrecisionReal::PrecisionReal(long v) : mid_(v) {}

PrecisionReal::PrecisionReal(Dyadic mid, Dyadic rad, std::size_t precision)
    : mid_(std::move(mid)), rad_(std::move(rad)), prec_(precision) {
    if (rad_.sign() < 0) throw DomainError("PrecisionReal: negative radius");
    settle();
}

PrecisionReal PrecisionReal::from_double(double v, std::size_t precision) {
    return PrecisionReal(Dyadic::from_double(v), Dyadic(), precision);
}

PrecisionReal PrecisionReal::from_bounds(const Dyadic& lo, const Dyadic& hi, std::size_t precision) {
    if (hi < lo) throw DomainError("PrecisionReal::from_bounds: hi < lo");
    // (lo + hi)/2 and (hi - lo)/2 are exact dyadics
    return PrecisionReal((lo + hi).shifted(-1), (hi - lo).shifted(-1), precision);
}

PrecisionReal PrecisionReal::rational(const mpz_class& p, const mpz_class& q, std::size_t precision) {
    if (q == 0) throw DomainError("PrecisionReal::rational: zero denominator");
    // absolute accuracy 2^-(precision+4), more for small magnitudes
    const auto pb = static_cast<std::int64_t>(mpz_sizeinbase(p.get_mpz_t(), 2));
    const auto qb = static_cast<std::int64_t>(mpz_sizeinbase(q.get_mpz_t(), 2));
    const std::int64_t frac = static_cast<std::int64_t>(precision) + 4 + std::max<std::int64_t>(0, qb - pb);
    const Dyadic lo = Dyadic::from_rational(p, q, frac, Round::Down);
    const Dyadic hi = Dyadic::from_rational(p, q, frac, Round::Up);
    return from_bounds(lo, hi, precision);
}

PrecisionReal PrecisionReal::pi(std::size_t precision) {
    Mpfr lo(precision + 8);
    Mpfr hi(precision + 8);
    mpfr_const_pi(lo.get(), MPFR_RNDD);
    mpfr_const_pi(hi.get(), MPFR_RNDU);
    return from_bounds(Dyadic::from_mpfr(lo.get()), Dyadic::from_mpfr(hi.get()), precision);
}

PrecisionReal PrecisionReal::with_precision(std::size_t bits) const {
    PrecisionReal r = *this;
    r.prec_ = bits;
    r.settle();
    return r;
}

void PrecisionReal::settle() {
    if (mid_.bit_length() > prec_) {
        const Dyadic rounded = mid_.round_relative(prec_, Round::Nearest);
        rad_ += (mid_ - rounded).abs();
        mid_ = rounded;
    }
    rad_ = rad_.round_relative(kRadiusBits, Round::Up);
}

double PrecisionReal::rad_double() const {
    // round the radius up when it does not fit a double exactly
    const double d = rad_.to_double();
    return std::nextafter(d, INFINITY);
}

PrecisionReal operator+(const PrecisionReal& a, const PrecisionReal& b) {
    return PrecisionReal(a.mid_ + b.mid_, a.rad_ + b.rad_, std::max(a.prec_, b.prec_));
}

PrecisionReal operator-(const PrecisionReal& a, const PrecisionReal& b) {
    return PrecisionReal(a.mid_ - b.mid_, a.rad_ + b.rad_, std::max(a.prec_, b.prec_));
}

PrecisionReal operator*(const PrecisionReal& a, const PrecisionReal& b) {
    Dyadic rad = a.mid_.abs() * b.rad_ + b.mid_.abs() * a.rad_ + a.rad_ * b.rad_;
    return PrecisionReal(a.mid_ * b.mid_, rad.round_relative(kRadiusBits, Round::Up), std::max(a.prec_, b.prec_));
}

PrecisionReal operator/(const PrecisionReal& a, const PrecisionReal& b) {
    return a * reciprocal(b.with_precision(std::max(a.prec_, b.prec_)));
}

PrecisionReal PrecisionReal::scaled(std::int64_t k) const {
    return PrecisionReal(mid_.shifted(k), rad_.shifted(k), prec_);
}

PrecisionReal PrecisionReal::abs() const {
    if (lower().sign() >= 0) return *this;
    if (upper().sign() <= 0) return -*this;
    return from_bounds(Dyadic(), max(lower().abs(), upper().abs()), prec_);
}

PrecisionReal PrecisionReal::inflated(const Dyadic& extra) const {
    if (extra.sign() < 0) throw DomainError("PrecisionReal::inflated: negative amount");
    return PrecisionReal(mid_, rad_ + extra, prec_);
}

std::string PrecisionReal::to_string(int digits) const {
    return mid_.to_decimal(digits) + " +/- " + rad_.to_decimal(3);
}

bool certainly_less(const PrecisionReal& a, const PrecisionReal& b) { return a.upper() < b.lower(); }

PrecisionReal hull(const PrecisionReal& a, const PrecisionReal& b) {
    return PrecisionReal::from_bounds(min(a.lower(), b.lower()), max(a.upper(), b.upper()),
                                      std::max(a.precision(), b.precision()));
}

PrecisionReal sqrt(const PrecisionReal& x) {
    if (x.certainly_negative()) throw DomainError("sqrt of a negative ball");
    PrecisionReal clipped = x;
    if (x.lower().sign() < 0) clipped = PrecisionReal::from_bounds(Dyadic(), x.upper(), x.precision());
    return monotone(clipped, mpfr_sqrt, true);
}

PrecisionReal log(const PrecisionReal& x) {
    if (!x.certainly_positive()) throw DomainError("log of a ball that is not certainly positive");
    return monotone(x, mpfr_log, true);
}

PrecisionReal exp(const PrecisionReal& x) { return monotone(x, mpfr_exp, true); }

PrecisionReal reciprocal(const PrecisionReal& x) {
    if (!x.certainly_positive() && !x.certainly_negative()) {
        throw DomainError("reciprocal of a ball containing zero");
    }
    auto inv = [](mpfr_ptr out, mpfr_srcptr in, mpfr_rnd_t rnd) { return mpfr_ui_div(out, 1, in, rnd); };
    return monotone(x, inv, false);
}

namespace {

PrecisionReal trig_turns(const PrecisionReal& x, bool use_sin) {
    const std::size_t p = x.precision();
    // fractional part of the midpoint, exact
    const Dyadic m = x.mid();
    const Dyadic f = m - m.round_fixed(0, Round::Down);
    Mpfr t(p + 16);
    Mpfr in(std::max<std::size_t>(f.bit_length(), 2));
    f.to_mpfr(in.get());
    mpfr_const_pi(t.get(), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), in.get(), MPFR_RNDN);
    mpfr_mul_2ui(t.get(), t.get(), 1, MPFR_RNDN);
    Mpfr out(p + 16);
    if (use_sin) {
        mpfr_sin(out.get(), t.get(), MPFR_RNDN);
    } else {
        mpfr_cos(out.get(), t.get(), MPFR_RNDN);
    }
    // |t error| <= 2pi * 2^-(p+14), |output rounding| <= 2^-(p+16); Lipschitz 2pi in turns
    Dyadic err = pow2(-static_cast<std::int64_t>(p) - 10) + Dyadic(7) * x.rad();
    PrecisionReal r(Dyadic::from_mpfr(out.get()), err, p);
    // clamp to [-1, 1]
    if (r.upper() > Dyadic(1) || r.lower() < Dyadic(-1)) {
        r = PrecisionReal::from_bounds(max(r.lower(), Dyadic(-1)), min(r.upper(), Dyadic(1)), p);
    }
    return r;
}

}  // namespace

PrecisionReal sin_turns(const PrecisionReal& x) { return trig_turns(x, true); }
PrecisionReal cos_turns(const PrecisionReal& x) { return trig_turns(x, false); }

PrecisionReal min(const PrecisionReal& a, const PrecisionReal& b) {
    return PrecisionReal::from_bounds(min(a.lower(), b.lower()), min(a.upper(), b.upper()),
                                      std::max(a.precision(), b.precision()));
}

PrecisionReal max(const PrecisionReal& a, const PrecisionReal& b) {
    return PrecisionReal::from_bounds(max(a.lower(), b.lower()), max(a.upper(), b.upper()),
                                      std::max(a.precision(), b.precision()));
}

}  // namespace sj::numerics
