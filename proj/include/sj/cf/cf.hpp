#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sj/numerics/oracle.hpp"
#include "sj/numerics/real.hpp"

namespace sj::cf {

using numerics::PrecisionReal;
using Digit = std::uint64_t;

inline constexpr Digit kMaxDigit = (Digit{1} << 63) - 1;

enum class TailKind { Noble, AllTwos, Periodic, ExplicitFinite };

// theta = [a_0, a_1, ...] = 1/(a_0 + 1/(a_1 + ...)): a finite prefix followed
// by a symbolic tail. Digits are indexed from 0.
class CFNumber {
public:
    CFNumber() = default;
    CFNumber(std::vector<Digit> prefix, TailKind tail, std::vector<Digit> block = {});

    static CFNumber noble(std::vector<Digit> prefix = {});
    static CFNumber all_twos(std::vector<Digit> prefix = {});
    static CFNumber periodic(std::vector<Digit> prefix, std::vector<Digit> block);
    static CFNumber finite(std::vector<Digit> digits);

    // "[a0,a1,...,ak;tail]" with tail one of 1*, 2*, (b1,...,bj)*, end.
    static CFNumber parse(const std::string& literal);
    std::string to_literal() const;

    const std::vector<Digit>& prefix() const { return prefix_; }
    TailKind tail() const { return tail_; }
    // Repeating block of the tail; {1} for Noble and {2} for AllTwos.
    const std::vector<Digit>& block() const { return block_; }
    bool is_finite() const { return tail_ == TailKind::ExplicitFinite; }
    bool is_noble() const;

    // Digit a_i; for a finite number i must be < prefix().size().
    Digit digit(std::size_t i) const;
    // Number of digits for a finite number; throws otherwise.
    std::size_t length() const;
    Digit max_tail_digit() const;

    // [a_k, a_{k+1}, ...]
    CFNumber shifted(std::size_t k) const;

    friend bool operator==(const CFNumber& a, const CFNumber& b) = default;

private:
    std::vector<Digit> prefix_;
    TailKind tail_ = TailKind::Noble;
    std::vector<Digit> block_{1};
};

struct Convergent {
    mpz_class p;
    mpz_class q;
    std::size_t index = 0;
};

// One-sided bound summary for Φ or the Brjuno sum: the true value lies in
// [partial_sum.lower(), partial_sum.upper() + tail_bound.upper()].
struct PhiValue {
    PrecisionReal partial_sum;
    PrecisionReal tail_bound;
    std::size_t terms_used = 0;

    PrecisionReal enclosure() const;
    double value() const;
    // Half-width of enclosure().
    double error() const;
};

// (√5 - 1)/2
PrecisionReal golden(std::size_t bits);

// Purely periodic value with the given repeating block.
PrecisionReal periodic_value(const std::vector<Digit>& block, std::size_t bits);

PrecisionReal cf_value(const CFNumber& c, std::size_t bits);
// Oracle for the value of c, described by its literal.
numerics::Oracle cf_oracle(const CFNumber& c);

// (p_k, q_k) for k = 0..n with p_0/q_0 = 0/1 and p_k/q_k = [a_0..a_{k-1}].
std::vector<Convergent> convergents(const CFNumber& c, std::size_t n);

// theta_1 = theta, theta_{k+1} = {1/theta_k}; returns theta_1..theta_n.
std::vector<PrecisionReal> gauss_orbit(const CFNumber& c, std::size_t n);

PrecisionReal alpha(const CFNumber& c, std::size_t i, std::size_t bits = 64);
// alpha_0 .. alpha_{count-1}, each with radius <= 2^-bits.
std::vector<PrecisionReal> alphas(const CFNumber& c, std::size_t count, std::size_t bits);

// Φ term alpha_0...alpha_{i-1} log(1/alpha_i) for i = 0..count-1.
std::vector<PrecisionReal> phi_terms(const CFNumber& c, std::size_t count, std::size_t bits);

PhiValue brjuno_B(const CFNumber& c, std::size_t terms);
PhiValue yoccoz_phi(const CFNumber& c, double tol);

// Φ = Φ^- + Φ^1 where Φ^1 is the single term at index pos.
struct PhiSplit {
    PhiValue total;
    PhiValue minus;
    PrecisionReal one;
};
PhiSplit phi_split(const CFNumber& c, std::size_t pos, double tol);

// Noble c with the digit at pos (>= prefix length) replaced by N.
CFNumber digit_bump(const CFNumber& c, std::size_t pos, Digit N);

// The four inequalities comparing beta^N, beta^{N+1}, beta^1 for the noble
// base through `prefix` (= a_0..a_n) with N at position n+m. A part whose
// index range excludes i is reported as nullopt.
std::array<std::optional<bool>, 4> check_4lems(const std::vector<Digit>& prefix, std::size_t m, Digit N,
                                               std::size_t i);

struct BumpLimits {
    Digit max_N = 1000000000;
    std::size_t max_m = 10000;
};

struct BumpStep {
    Digit N;
    PhiValue phi;
};

struct PhiBumpResult {
    std::size_t m = 0;
    Digit N = 0;
    std::size_t position = 0;
    CFNumber beta;
    PhiValue phi_beta;
    PhiValue phi_omega;
    // Φ(beta^N) for N = 1..N at the chosen m
    std::vector<BumpStep> trace;
};

// Finds m >= m_min and N with Φ(ω) + eps < Φ(β) < Φ(ω) + 2 eps, N at
// position n + m, by incrementing N from 1.
PhiBumpResult phi_bump_search(const std::vector<Digit>& prefix, double eps, std::size_t m_min = 1,
                              const BumpLimits& limits = {});

struct TailSafety {
    std::size_t m0 = 0;
    // bounds at m0 from the two halves of the argument
    double head_bound = 0;
    double tail_bound = 0;
};

// m0 such that any tail placed after m >= m0 ones keeps Φ > Φ(ω) - eps.
TailSafety tail_safety(const std::vector<Digit>& prefix, double eps);
std::size_t tail_safety_m0(const std::vector<Digit>& prefix, double eps);

// Bits needed to carry a tolerance: ceil(-log2 tol) + extra.
std::size_t bits_for(double tol, std::size_t extra = 16);

}  // namespace sj::cf
