#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

namespace sj::numerics {

enum class Round { Nearest, Down, Up };

// Exact dyadic rational mantissa * 2^exponent.
// Canonical form: mantissa odd, or mantissa zero with exponent zero.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long v);  // NOLINT(google-explicit-constructor)
    Dyadic(mpz_class mantissa, std::int64_t exponent);

    static Dyadic from_double(double v);
    static Dyadic from_mpfr(const mpfr_t v);
    // Parses the bit-exact form produced by to_string(): "m*2^e" (or a
    // plain integer "m").
    static Dyadic parse(std::string_view text);
    // p/q rounded to a multiple of 2^-frac_bits.
    static Dyadic from_rational(const mpz_class& p, const mpz_class& q, std::int64_t frac_bits,
                                Round mode);

    const mpz_class& mantissa() const { return m_; }
    std::int64_t exponent() const { return e_; }
    bool is_zero() const { return m_ == 0; }
    int sign() const { return sgn(m_); }
    // Number of significant bits of the mantissa.
    std::size_t bit_length() const;

    Dyadic operator-() const { return Dyadic(-m_, e_); }
    friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
    Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

    friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.e_ == b.e_ && a.m_ == b.m_; }
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

    Dyadic abs() const { return Dyadic(::abs(m_), e_); }
    // this * 2^k, exact.
    Dyadic shifted(std::int64_t k) const;
    // Nearest/floor/ceil multiple of 2^-frac_bits.
    Dyadic round_fixed(std::int64_t frac_bits, Round mode) const;
    // Keep at most `bits` significant bits.
    Dyadic round_relative(std::size_t bits, Round mode) const;

    double to_double() const;
    // Exact copy into v; v's precision is raised if needed.
    void to_mpfr(mpfr_t v) const;
    std::string to_string() const;
    std::string to_decimal(int digits) const;

    // floor(log2|x|) for nonzero x.
    std::int64_t exponent_msb() const;

private:
    void normalize();

    mpz_class m_{0};
    std::int64_t e_ = 0;
};

inline Dyadic pow2(std::int64_t k) { return Dyadic(mpz_class(1), k); }
inline const Dyadic& min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
inline const Dyadic& max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

}  // namespace sj::numerics
