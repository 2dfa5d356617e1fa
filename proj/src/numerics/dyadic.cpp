#include "sj/numerics/dyadic.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "sj/error.hpp"

namespace sj::numerics {

Dyadic::Dyadic(long v) : m_(v), e_(0) { normalize(); }

Dyadic::Dyadic(mpz_class mantissa, std::int64_t exponent) : m_(std::move(mantissa)), e_(exponent) {
    normalize();
}

void Dyadic::normalize() {
    if (m_ == 0) {
        e_ = 0;
        return;
    }
    const auto tz = mpz_scan1(m_.get_mpz_t(), 0);
    if (tz > 0) {
        mpz_fdiv_q_2exp(m_.get_mpz_t(), m_.get_mpz_t(), tz);
        e_ += static_cast<std::int64_t>(tz);
    }
}

Dyadic Dyadic::from_double(double v) {
    if (!std::isfinite(v)) throw DomainError("Dyadic::from_double: non-finite value");
    if (v == 0.0) return {};
    int exp = 0;
    const double frac = std::frexp(v, &exp);
    // frac * 2^53 is an exact integer
    const auto scaled = static_cast<std::int64_t>(std::ldexp(frac, 53));
    mpz_class m;
    mpz_set_si(m.get_mpz_t(), scaled);
    return Dyadic(m, static_cast<std::int64_t>(exp) - 53);
}

Dyadic Dyadic::from_mpfr(const mpfr_t v) {
    if (!mpfr_number_p(v)) throw DomainError("Dyadic::from_mpfr: non-finite value");
    if (mpfr_zero_p(v)) return {};
    mpz_class m;
    const mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v);
    return Dyadic(m, static_cast<std::int64_t>(e));
}

Dyadic Dyadic::parse(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    std::string mant_text;
    std::int64_t e = 0;
    const auto star = text.find('*');
    if (star == std::string_view::npos) {
        mant_text = std::string(text);
    } else {
        mant_text = std::string(trim(text.substr(0, star)));
        auto rest = trim(text.substr(star + 1));
        if (rest.size() < 3 || rest.substr(0, 2) != "2^") {
            throw DomainError("Dyadic::parse: expected 'm*2^e', got '" + std::string(text) + "'");
        }
        try {
            std::size_t used = 0;
            const std::string exp_text(rest.substr(2));
            e = std::stoll(exp_text, &used);
            if (used != exp_text.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw DomainError("Dyadic::parse: bad exponent in '" + std::string(text) + "'");
        }
    }
    mpz_class m;
    if (mant_text.empty() || m.set_str(mant_text, 10) != 0) {
        throw DomainError("Dyadic::parse: bad mantissa in '" + std::string(text) + "'");
    }
    return Dyadic(m, e);
}

Dyadic Dyadic::from_rational(const mpz_class& p, const mpz_class& q, std::int64_t frac_bits, Round mode) {
    if (q == 0) throw DomainError("Dyadic::from_rational: zero denominator");
    mpz_class num = p;
    mpz_class den = q;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (frac_bits >= 0) {
        mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(frac_bits));
    } else {
        mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-frac_bits));
    }
    mpz_class quo;
    switch (mode) {
        case Round::Down: mpz_fdiv_q(quo.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t()); break;
        case Round::Up: mpz_cdiv_q(quo.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t()); break;
        case Round::Nearest: {
            // floor((2 num + den) / (2 den)); ties go up
            mpz_class twice = 2 * num + den;
            mpz_class d2 = 2 * den;
            mpz_fdiv_q(quo.get_mpz_t(), twice.get_mpz_t(), d2.get_mpz_t());
            break;
        }
    }
    return Dyadic(quo, -frac_bits);
}

std::size_t Dyadic::bit_length() const {
    if (m_ == 0) return 0;
    return mpz_sizeinbase(m_.get_mpz_t(), 2);
}

namespace {

// Align both mantissas to the smaller exponent.
void align(const Dyadic& a, const Dyadic& b, mpz_class& ma, mpz_class& mb, std::int64_t& e) {
    e = std::min(a.exponent(), b.exponent());
    ma = a.mantissa();
    mb = b.mantissa();
    if (a.exponent() > e) mpz_mul_2exp(ma.get_mpz_t(), ma.get_mpz_t(), static_cast<mp_bitcnt_t>(a.exponent() - e));
    if (b.exponent() > e) mpz_mul_2exp(mb.get_mpz_t(), mb.get_mpz_t(), static_cast<mp_bitcnt_t>(b.exponent() - e));
}

}  // namespace

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    mpz_class ma, mb;
    std::int64_t e = 0;
    align(a, b, ma, mb, e);
    return Dyadic(ma + mb, e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return Dyadic(a.m_ * b.m_, a.e_ + b.e_);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const int sa = a.sign();
    const int sb = b.sign();
    if (sa != sb) return sa <=> sb;
    if (sa == 0) return std::strong_ordering::equal;
    mpz_class ma, mb;
    std::int64_t e = 0;
    align(a, b, ma, mb, e);
    const int c = cmp(ma, mb);
    return c <=> 0;
}

Dyadic Dyadic::shifted(std::int64_t k) const {
    if (is_zero()) return {};
    return Dyadic(m_, e_ + k);
}

Dyadic Dyadic::round_fixed(std::int64_t frac_bits, Round mode) const {
    if (is_zero() || e_ >= -frac_bits) return *this;
    const auto drop = static_cast<mp_bitcnt_t>(-frac_bits - e_);
    mpz_class q;
    switch (mode) {
        case Round::Down: mpz_fdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), drop); break;
        case Round::Up: mpz_cdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), drop); break;
        case Round::Nearest: {
            // mantissa is odd, so an exact tie only occurs when drop == 1
            mpz_class t = m_;
            mpz_class half;
            mpz_ui_pow_ui(half.get_mpz_t(), 2, drop - 1);
            t += half;
            mpz_fdiv_q_2exp(q.get_mpz_t(), t.get_mpz_t(), drop);
            break;
        }
    }
    return Dyadic(q, -frac_bits);
}

Dyadic Dyadic::round_relative(std::size_t bits, Round mode) const {
    const std::size_t len = bit_length();
    if (len <= bits) return *this;
    const auto frac_bits = -(e_ + static_cast<std::int64_t>(len - bits));
    return round_fixed(frac_bits, mode);
}

double Dyadic::to_double() const {
    if (is_zero()) return 0.0;
    long exp = 0;
    const double d = mpz_get_d_2exp(&exp, m_.get_mpz_t());
    return std::ldexp(d, static_cast<int>(exp + e_));
}

void Dyadic::to_mpfr(mpfr_t v) const {
    const auto need = static_cast<mpfr_prec_t>(std::max<std::size_t>(bit_length(), 2));
    if (mpfr_get_prec(v) < need) mpfr_prec_round(v, need, MPFR_RNDN);
    mpfr_set_z_2exp(v, m_.get_mpz_t(), static_cast<mpfr_exp_t>(e_), MPFR_RNDN);
}

std::string Dyadic::to_string() const {
    if (is_zero()) return "0*2^0";
    return m_.get_str(10) + "*2^" + std::to_string(e_);
}

std::string Dyadic::to_decimal(int digits) const {
    mpfr_t v;
    mpfr_init2(v, 64);
    to_mpfr(v);
    std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v);
    mpfr_clear(v);
    return {buf.data()};
}

std::int64_t Dyadic::exponent_msb() const {
    if (is_zero()) throw DomainError("Dyadic::exponent_msb of zero");
    return e_ + static_cast<std::int64_t>(bit_length()) - 1;
}

}  // namespace sj::numerics
