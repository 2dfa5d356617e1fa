#pragma once

#include <cstddef>
#include <string>

#include "sj/numerics/dyadic.hpp"

namespace sj::numerics {

inline constexpr std::size_t kDefaultPrecision = 64;

// Midpoint-radius ball [mid - rad, mid + rad] with outward rounding.
// Every operation returns a ball containing all results of the operation
// applied to members of the operand balls. `precision` is the number of
// mantissa bits kept in the midpoint; binary operations use the larger of
// the two operand precisions.
class PrecisionReal {
public:
    PrecisionReal() = default;
    PrecisionReal(long v);  // NOLINT(google-explicit-constructor)
    explicit PrecisionReal(Dyadic mid, Dyadic rad = {}, std::size_t precision = kDefaultPrecision);

    static PrecisionReal from_double(double v, std::size_t precision = kDefaultPrecision);
    static PrecisionReal from_bounds(const Dyadic& lo, const Dyadic& hi,
                                     std::size_t precision = kDefaultPrecision);
    static PrecisionReal rational(const mpz_class& p, const mpz_class& q,
                                  std::size_t precision = kDefaultPrecision);
    static PrecisionReal pi(std::size_t precision = kDefaultPrecision);

    const Dyadic& mid() const { return mid_; }
    const Dyadic& rad() const { return rad_; }
    std::size_t precision() const { return prec_; }
    PrecisionReal with_precision(std::size_t bits) const;

    Dyadic lower() const { return mid_ - rad_; }
    Dyadic upper() const { return mid_ + rad_; }
    double to_double() const { return mid_.to_double(); }
    double rad_double() const;

    bool contains(const Dyadic& x) const { return lower() <= x && x <= upper(); }
    bool contains(const PrecisionReal& o) const { return lower() <= o.lower() && o.upper() <= upper(); }
    bool certainly_positive() const { return lower().sign() > 0; }
    bool certainly_negative() const { return upper().sign() < 0; }

    PrecisionReal operator-() const { return PrecisionReal(-mid_, rad_, prec_); }
    friend PrecisionReal operator+(const PrecisionReal& a, const PrecisionReal& b);
    friend PrecisionReal operator-(const PrecisionReal& a, const PrecisionReal& b);
    friend PrecisionReal operator*(const PrecisionReal& a, const PrecisionReal& b);
    friend PrecisionReal operator/(const PrecisionReal& a, const PrecisionReal& b);
    PrecisionReal& operator+=(const PrecisionReal& o) { return *this = *this + o; }
    PrecisionReal& operator-=(const PrecisionReal& o) { return *this = *this - o; }
    PrecisionReal& operator*=(const PrecisionReal& o) { return *this = *this * o; }
    PrecisionReal& operator/=(const PrecisionReal& o) { return *this = *this / o; }

    // Exact scaling by 2^k.
    PrecisionReal scaled(std::int64_t k) const;
    PrecisionReal abs() const;
    // Widen the radius by a nonnegative amount.
    PrecisionReal inflated(const Dyadic& extra) const;

    std::string to_string(int digits = 17) const;

private:
    friend class RealOps;
    // Round the midpoint to prec_ bits and fold the rounding error in.
    void settle();

    Dyadic mid_;
    Dyadic rad_;
    std::size_t prec_ = kDefaultPrecision;
};

// a.upper() < b.lower()
bool certainly_less(const PrecisionReal& a, const PrecisionReal& b);
PrecisionReal hull(const PrecisionReal& a, const PrecisionReal& b);

PrecisionReal sqrt(const PrecisionReal& x);
PrecisionReal log(const PrecisionReal& x);
PrecisionReal exp(const PrecisionReal& x);
PrecisionReal reciprocal(const PrecisionReal& x);
// sin(2 pi x) and cos(2 pi x): the argument is in turns.
PrecisionReal sin_turns(const PrecisionReal& x);
PrecisionReal cos_turns(const PrecisionReal& x);
PrecisionReal min(const PrecisionReal& a, const PrecisionReal& b);
PrecisionReal max(const PrecisionReal& a, const PrecisionReal& b);

}  // namespace sj::numerics
