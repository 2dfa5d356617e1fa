#include "sj/cf/cf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sj/error.hpp"
#include "sj/numerics/oracle.hpp"

namespace sj::cf {

using numerics::Dyadic;
using numerics::pow2;

namespace {

void check_digit(Digit d) {
    if (d < 1 || d > kMaxDigit) throw DomainError("CF digit out of range [1, 2^63-1]: " + std::to_string(d));
}

PrecisionReal digit_real(Digit d, std::size_t bits) {
    return PrecisionReal(Dyadic(static_cast<long>(d)), Dyadic(), bits);
}

bool within(const PrecisionReal& x, std::size_t bits) {
    return x.rad() <= pow2(-static_cast<std::int64_t>(bits));
}

std::vector<Digit> rotate_block(const std::vector<Digit>& block, std::size_t k) {
    std::vector<Digit> out(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) out[i] = block[(i + k) % block.size()];
    return out;
}

}  // namespace

std::size_t bits_for(double tol, std::size_t extra) {
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    const auto b = static_cast<std::size_t>(std::max(0.0, std::ceil(-std::log2(tol)))) + extra;
    return std::max<std::size_t>(b, 64);
}

// ---------------------------------------------------------------- CFNumber

CFNumber::CFNumber(std::vector<Digit> prefix, TailKind tail, std::vector<Digit> block)
    : prefix_(std::move(prefix)), tail_(tail), block_(std::move(block)) {
    for (Digit d : prefix_) check_digit(d);
    switch (tail_) {
        case TailKind::Noble: block_ = {1}; break;
        case TailKind::AllTwos: block_ = {2}; break;
        case TailKind::Periodic:
            if (block_.empty()) throw DomainError("periodic tail needs a nonempty block");
            for (Digit d : block_) check_digit(d);
            break;
        case TailKind::ExplicitFinite:
            block_.clear();
            if (prefix_.empty()) throw DomainError("finite continued fraction needs at least one digit");
            break;
    }
}

CFNumber CFNumber::noble(std::vector<Digit> prefix) { return {std::move(prefix), TailKind::Noble}; }
CFNumber CFNumber::all_twos(std::vector<Digit> prefix) { return {std::move(prefix), TailKind::AllTwos}; }
CFNumber CFNumber::periodic(std::vector<Digit> prefix, std::vector<Digit> block) {
    return {std::move(prefix), TailKind::Periodic, std::move(block)};
}
CFNumber CFNumber::finite(std::vector<Digit> digits) { return {std::move(digits), TailKind::ExplicitFinite}; }

namespace {

std::vector<Digit> parse_digits(const std::string& text, const std::string& literal) {
    std::vector<Digit> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos || item.size() > 19) {
            throw DomainError("bad digit '" + item + "' in CF literal " + literal);
        }
        const unsigned long long v = std::stoull(item);
        check_digit(v);
        out.push_back(v);
    }
    if (text.back() == ',') throw DomainError("trailing comma in CF literal " + literal);
    return out;
}

}  // namespace

CFNumber CFNumber::parse(const std::string& literal) {
    std::string s;
    for (char ch : literal) {
        if (ch != ' ' && ch != '\t') s.push_back(ch);
    }
    if (s.size() < 3 || s.front() != '[' || s.back() != ']') {
        throw DomainError("CF literal must look like [a0,...,ak;tail]: " + literal);
    }
    s = s.substr(1, s.size() - 2);
    const auto semi = s.find(';');
    if (semi == std::string::npos || s.find(';', semi + 1) != std::string::npos) {
        throw DomainError("CF literal needs exactly one ';': " + literal);
    }
    auto prefix = parse_digits(s.substr(0, semi), literal);
    const std::string tail = s.substr(semi + 1);
    if (tail == "1*") return noble(std::move(prefix));
    if (tail == "2*") return all_twos(std::move(prefix));
    if (tail == "end") return finite(std::move(prefix));
    if (tail.size() >= 4 && tail.front() == '(' && tail.substr(tail.size() - 2) == ")*") {
        auto block = parse_digits(tail.substr(1, tail.size() - 3), literal);
        return periodic(std::move(prefix), std::move(block));
    }
    throw DomainError("unknown CF tail '" + tail + "' in " + literal);
}

std::string CFNumber::to_literal() const {
    std::string out = "[";
    for (std::size_t i = 0; i < prefix_.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(prefix_[i]);
    }
    out += ";";
    switch (tail_) {
        case TailKind::Noble: out += "1*"; break;
        case TailKind::AllTwos: out += "2*"; break;
        case TailKind::ExplicitFinite: out += "end"; break;
        case TailKind::Periodic:
            out += "(";
            for (std::size_t i = 0; i < block_.size(); ++i) {
                if (i) out += ",";
                out += std::to_string(block_[i]);
            }
            out += ")*";
            break;
    }
    return out + "]";
}

bool CFNumber::is_noble() const {
    if (tail_ == TailKind::Noble) return true;
    return tail_ == TailKind::Periodic && std::all_of(block_.begin(), block_.end(), [](Digit d) { return d == 1; });
}

Digit CFNumber::digit(std::size_t i) const {
    if (i < prefix_.size()) return prefix_[i];
    if (is_finite()) throw DomainError("digit index past the end of a finite continued fraction");
    return block_[(i - prefix_.size()) % block_.size()];
}

std::size_t CFNumber::length() const {
    if (!is_finite()) throw DomainError("length of an infinite continued fraction");
    return prefix_.size();
}

Digit CFNumber::max_tail_digit() const {
    if (is_finite()) return 0;
    return *std::max_element(block_.begin(), block_.end());
}

CFNumber CFNumber::shifted(std::size_t k) const {
    if (k <= prefix_.size()) {
        if (is_finite() && k == prefix_.size()) throw DomainError("shift consumes every digit");
        CFNumber out = *this;
        out.prefix_.erase(out.prefix_.begin(), out.prefix_.begin() + static_cast<std::ptrdiff_t>(k));
        return out;
    }
    if (is_finite()) throw DomainError("shift past the end of a finite continued fraction");
    CFNumber out = *this;
    out.prefix_.clear();
    out.block_ = rotate_block(block_, (k - prefix_.size()) % block_.size());
    return out;
}

// ---------------------------------------------------------------- values

PrecisionReal PhiValue::enclosure() const {
    return PrecisionReal::from_bounds(partial_sum.lower(), partial_sum.upper() + tail_bound.upper(),
                                      partial_sum.precision());
}

double PhiValue::value() const { return enclosure().to_double(); }

double PhiValue::error() const { return enclosure().rad_double(); }

PrecisionReal golden(std::size_t bits) { return periodic_value({1}, bits); }

PrecisionReal periodic_value(const std::vector<Digit>& block, std::size_t bits) {
    if (block.empty()) throw DomainError("periodic_value: empty block");
    // t = (P_j + t P_{j-1}) / (Q_j + t Q_{j-1})  =>  A t^2 + B t - C = 0
    mpz_class p_prev = 1, p = 0, q_prev = 0, q = 1;
    for (Digit d : block) {
        check_digit(d);
        const mpz_class dd(std::to_string(d));
        mpz_class pn = dd * p + p_prev;
        mpz_class qn = dd * q + q_prev;
        p_prev = p;
        p = pn;
        q_prev = q;
        q = qn;
    }
    const mpz_class A = q_prev, B = q - p_prev, C = p;
    std::size_t prec = bits + 16;
    const std::size_t cap = std::max(numerics::precision_cap(), bits + 64);
    while (true) {
        auto R = [&](const mpz_class& z) { return PrecisionReal(Dyadic(z, 0), Dyadic(), prec); };
        const PrecisionReal disc = R(B) * R(B) + R(A) * R(C).scaled(2);
        // 2C / (B + sqrt(B^2 + 4AC)) avoids cancellation
        const PrecisionReal t = R(C).scaled(1) / (R(B) + sqrt(disc));
        if (within(t, bits)) return t;
        if (prec >= cap) throw PrecisionExhausted("periodic_value: precision cap reached");
        prec = std::min(prec * 2, cap);
    }
}

std::vector<PrecisionReal> alphas(const CFNumber& c, std::size_t count, std::size_t bits) {
    if (count == 0) return {};
    const std::size_t L = c.prefix().size();
    if (c.is_finite() && count > L) throw DomainError("alphas: index past the end of a finite continued fraction");
    const std::size_t K = c.is_finite() ? L : std::max(count, L);
    std::size_t prec = bits + 12 + static_cast<std::size_t>(std::log2(static_cast<double>(K) + 2));
    const std::size_t cap = std::max(numerics::precision_cap(), bits + 64);
    while (true) {
        // backward recursion alpha_i = 1/(a_i + alpha_{i+1}) contracts errors
        std::vector<PrecisionReal> a(K + 1);
        a[K] = c.is_finite() ? PrecisionReal(Dyadic(), Dyadic(), prec) : periodic_value(c.shifted(K).block(), prec);
        for (std::size_t i = K; i-- > 0;) a[i] = reciprocal(digit_real(c.digit(i), prec) + a[i + 1]);
        a.resize(count);
        if (std::all_of(a.begin(), a.end(), [&](const PrecisionReal& x) { return within(x, bits); })) return a;
        if (prec >= cap) throw PrecisionExhausted("alphas: precision cap reached");
        prec = std::min(prec * 2, cap);
    }
}

PrecisionReal alpha(const CFNumber& c, std::size_t i, std::size_t bits) {
    return alphas(c.shifted(std::min(i, c.prefix().size())), i - std::min(i, c.prefix().size()) + 1, bits).back();
}

PrecisionReal cf_value(const CFNumber& c, std::size_t bits) {
    if (bits < 1) throw DomainError("cf_value: bits must be >= 1");
    if (c.is_finite()) {
        const auto conv = convergents(c, c.length());
        return PrecisionReal::rational(conv.back().p, conv.back().q, bits + 8);
    }
    return alphas(c, 1, bits).front();
}

numerics::Oracle cf_oracle(const CFNumber& c) {
    return numerics::Oracle::from_approximator(c.to_literal(), [c](std::size_t bits) { return cf_value(c, bits); });
}

std::vector<Convergent> convergents(const CFNumber& c, std::size_t n) {
    if (n < 1) throw DomainError("convergents: n must be >= 1");
    if (c.is_finite()) n = std::min(n, c.length());
    std::vector<Convergent> out;
    out.reserve(n + 1);
    mpz_class p_prev = 1, p = 0, q_prev = 0, q = 1;
    out.push_back({p, q, 0});
    for (std::size_t k = 0; k < n; ++k) {
        const mpz_class d(std::to_string(c.digit(k)));
        mpz_class pn = d * p + p_prev;
        mpz_class qn = d * q + q_prev;
        p_prev = p;
        p = pn;
        q_prev = q;
        q = qn;
        out.push_back({p, q, k + 1});
    }
    return out;
}

std::vector<PrecisionReal> gauss_orbit(const CFNumber& c, std::size_t n) {
    if (c.is_finite()) throw DomainError("gauss_orbit: theta must be irrational");
    std::size_t prec = 64;
    const std::size_t cap = numerics::precision_cap();
    const Dyadic limit = pow2(-4);
    while (true) {
        std::vector<PrecisionReal> out;
        out.reserve(n);
        PrecisionReal t = cf_value(c, prec);
        bool ok = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (t.rad() > limit) {
                ok = false;
                break;
            }
            out.push_back(t);
            // {1/t} = 1/t - a_k; the digit is known symbolically
            t = reciprocal(t) - digit_real(c.digit(k), prec);
            if (t.upper().sign() < 0 || t.lower() > Dyadic(1)) {
                throw InvariantViolation("gauss_orbit: digit shift disagrees with the enclosure");
            }
        }
        // keep the last reported point well inside the limit for a stable result
        if (ok && (out.empty() || out.back().rad() <= pow2(-32))) return out;
        if (prec >= cap) throw PrecisionExhausted("gauss_orbit: error radius exceeded 2^-4 at the precision cap");
        prec = std::min(prec * 2, cap);
    }
}

std::vector<PrecisionReal> phi_terms(const CFNumber& c, std::size_t count, std::size_t bits) {
    const auto a = alphas(c, count, bits + 8);
    std::vector<PrecisionReal> out;
    out.reserve(count);
    PrecisionReal prod(Dyadic(1), Dyadic(), bits + 8);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(prod * -log(a[i]));
        prod = prod * a[i];
    }
    return out;
}

namespace {

// C = sum_{j >= 0} 2^{-(j-1)/2} restricted to j >= 1, plus the empty product
PrecisionReal product_series_constant(std::size_t bits) {
    const PrecisionReal one(Dyadic(1), Dyadic(), bits);
    const PrecisionReal r = sqrt(one.scaled(-1));
    return one + reciprocal(one - r);
}

// Upper bound on log(1/alpha_n) for every n past the prefix.
PrecisionReal tail_log_cap(const CFNumber& c, std::size_t bits) {
    PrecisionReal best(Dyadic(), Dyadic(), bits);
    const auto& block = c.block();
    for (std::size_t k = 0; k < block.size(); ++k) {
        const PrecisionReal v = -log(periodic_value(rotate_block(block, k), bits));
        best = max(best, v);
    }
    return best;
}

struct PhiSum {
    PhiValue value;
    std::vector<PrecisionReal> terms;
};

PhiSum phi_sum(const CFNumber& c, double tol, std::size_t min_terms) {
    if (c.is_finite()) throw DomainError("Φ is undefined for rational theta (finite continued fraction)");
    if (!(tol > 0)) throw DomainError("yoccoz_phi: tol must be positive");
    const std::size_t L = c.prefix().size();
    std::size_t bits = bits_for(tol, 12);
    std::size_t K = std::max({L + 1, min_terms, std::size_t{32}});
    const Dyadic half_tol = Dyadic::from_double(tol / 2);
    const Dyadic quarter_tol = Dyadic::from_double(tol / 4);
    const std::size_t cap = numerics::precision_cap();
    while (true) {
        const auto a = alphas(c, K, bits + 8);
        std::vector<PrecisionReal> terms;
        terms.reserve(K);
        PrecisionReal prod(Dyadic(1), Dyadic(), bits + 8);
        PrecisionReal sum(Dyadic(), Dyadic(), bits + 8);
        for (std::size_t i = 0; i < K; ++i) {
            terms.push_back(prod * -log(a[i]));
            sum += terms.back();
            prod = prod * a[i];
        }
        // sum_{n >= K} P_n log(1/alpha_n) <= P_K * cap * sum_j 2^{-(j-1)/2}
        const PrecisionReal tail = prod * tail_log_cap(c, bits + 8) * product_series_constant(bits + 8);
        const bool tail_ok = tail.upper() <= half_tol;
        const bool rad_ok = sum.rad() <= quarter_tol;
        if (tail_ok && rad_ok) {
            return {PhiValue{sum, PrecisionReal::from_bounds(Dyadic(), tail.upper(), bits + 8), K}, std::move(terms)};
        }
        if (!tail_ok) {
            if (K > 4000000) throw ResourceExhausted("yoccoz_phi: too many terms");
            K = K + K / 2;
        }
        if (!rad_ok) {
            if (bits >= cap) throw PrecisionExhausted("yoccoz_phi: precision cap reached");
            bits = std::min(bits + 32, cap);
        }
    }
}

}  // namespace

PhiValue yoccoz_phi(const CFNumber& c, double tol) { return phi_sum(c, tol, 0).value; }

PhiSplit phi_split(const CFNumber& c, std::size_t pos, double tol) {
    PhiSum s = phi_sum(c, tol, pos + 1);
    PhiSplit out;
    out.total = s.value;
    out.one = s.terms[pos];
    PrecisionReal minus(Dyadic(), Dyadic(), s.value.partial_sum.precision());
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
        if (i != pos) minus += s.terms[i];
    }
    out.minus = PhiValue{minus, s.value.tail_bound, s.value.terms_used};
    return out;
}

PhiValue brjuno_B(const CFNumber& c, std::size_t terms) {
    if (c.is_finite()) throw DomainError("Brjuno sum is undefined for rational theta");
    if (terms < 1) throw DomainError("brjuno_B: terms must be >= 1");
    const std::size_t bits = 96;
    // q_0 .. q_{T+1} where T >= terms and q_T >= 3
    std::vector<mpz_class> q{1};
    mpz_class q_prev = 0;
    auto extend = [&] {
        const std::size_t k = q.size() - 1;
        const mpz_class d(std::to_string(c.digit(k)));
        mpz_class next = d * q.back() + q_prev;
        q_prev = q.back();
        q.push_back(next);
    };
    while (q.size() < terms + 2) extend();
    auto R = [&](const mpz_class& z) { return PrecisionReal(Dyadic(z, 0), Dyadic(), bits); };
    auto term = [&](std::size_t n) { return log(R(q[n + 1])) / R(q[n]); };
    PrecisionReal sum(Dyadic(), Dyadic(), bits);
    for (std::size_t n = 0; n < terms; ++n) sum += term(n);
    // exact terms until q_T >= 3, then the Fibonacci growth bound
    PrecisionReal tail(Dyadic(), Dyadic(), bits);
    std::size_t T = terms;
    while (q[T] < 3) {
        tail += term(T);
        ++T;
        while (q.size() < T + 2) extend();
    }
    Digit D = c.max_tail_digit();
    for (std::size_t i = T; i < c.prefix().size(); ++i) D = std::max(D, c.digit(i));
    // log(q_{n+1})/q_n <= (log q_n + log(D+1))/q_n, decreasing in q_n, and
    // q_{T+j} >= phi^{j-1} q_T; summing the series gives
    // (phi/q_T) (phi log phi + phi^2 (log q_T + log(D+1)))
    const PrecisionReal one(Dyadic(1), Dyadic(), bits);
    const PrecisionReal phi = reciprocal(golden(bits));
    const PrecisionReal cst = log(digit_real(D, bits) + one);
    const PrecisionReal bound =
        phi / R(q[T]) * (phi * log(phi) + phi * phi * (log(R(q[T])) + cst));
    tail += bound;
    return PhiValue{sum, PrecisionReal::from_bounds(Dyadic(), tail.upper(), bits), terms};
}

// ---------------------------------------------------------------- surgery

CFNumber digit_bump(const CFNumber& c, std::size_t pos, Digit N) {
    if (!c.is_noble()) throw DomainError("digit_bump: base must be noble");
    check_digit(N);
    const std::size_t L = c.prefix().size();
    if (pos < L) throw DomainError("digit_bump: position " + std::to_string(pos) + " lies inside the prefix");
    std::vector<Digit> p = c.prefix();
    p.resize(pos, 1);
    p.push_back(N);
    return CFNumber::noble(std::move(p));
}

namespace {

CFNumber bumped(const std::vector<Digit>& prefix, std::size_t pos, Digit N) {
    return digit_bump(CFNumber::noble(prefix), pos, N);
}

// true iff |x| < bound is certified, false iff |x| >= bound is certified
std::optional<bool> decide_less(const PrecisionReal& x, const PrecisionReal& bound) {
    const PrecisionReal ax = x.abs();
    if (ax.upper() < bound.lower()) return true;
    if (ax.lower() >= bound.upper()) return false;
    return std::nullopt;
}

}  // namespace

std::array<std::optional<bool>, 4> check_4lems(const std::vector<Digit>& prefix, std::size_t m, Digit N,
                                               std::size_t i) {
    if (prefix.empty()) throw DomainError("check_4lems: prefix must be nonempty");
    if (m < 1) throw DomainError("check_4lems: m must be >= 1");
    if (N < 1 || N >= kMaxDigit) throw DomainError("check_4lems: N out of range");
    const std::size_t n = prefix.size() - 1;
    const std::size_t pos = n + m;
    if (i > pos) throw DomainError("check_4lems: index i beyond n+m");
    const CFNumber bN = bumped(prefix, pos, N);
    const CFNumber bN1 = bumped(prefix, pos, N + 1);
    const CFNumber b1 = CFNumber::noble(prefix);
    std::array<std::optional<bool>, 4> out;
    for (std::size_t bits = 96;; bits *= 2) {
        const PrecisionReal aN = alpha(bN, i, bits);
        const PrecisionReal aN1 = alpha(bN1, i, bits);
        const PrecisionReal a1 = alpha(b1, i, bits);
        const PrecisionReal one(Dyadic(1), Dyadic(), bits);
        const PrecisionReal scale = one.scaled(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(pos));
        std::array<std::optional<bool>, 4> r;
        r[0] = decide_less(log(aN / aN1), scale / digit_real(N, bits));
        if (i < pos) {
            r[1] = decide_less(log(aN / a1), scale);
            r[2] = decide_less(log(log(aN) / log(aN1)), scale.scaled(1));
        }
        if (i + 1 < pos) r[3] = decide_less(log(log(aN) / log(a1)), scale.scaled(1));
        bool settled = true;
        for (int k = 0; k < 4; ++k) {
            const bool applicable = k == 0 || (k < 3 ? i < pos : i + 1 < pos);
            if (applicable && !r[k]) settled = false;
        }
        if (settled || bits >= 2048) {
            for (int k = 0; k < 4; ++k) {
                const bool applicable = k == 0 || (k < 3 ? i < pos : i + 1 < pos);
                // an undecided comparison counts as a failure
                if (applicable) out[k] = r[k].value_or(false);
            }
            return out;
        }
    }
}

PhiBumpResult phi_bump_search(const std::vector<Digit>& prefix, double eps, std::size_t m_min,
                              const BumpLimits& limits) {
    if (!(eps > 0)) throw DomainError("phi_bump_search: eps must be positive");
    if (prefix.empty()) throw DomainError("phi_bump_search: prefix must be nonempty");
    const std::size_t n = prefix.size() - 1;
    const double tol = eps / 10;
    const CFNumber omega = CFNumber::noble(prefix);
    const PhiValue phi_omega = yoccoz_phi(omega, tol);
    const Dyadic e = Dyadic::from_double(eps);
    const Dyadic lower_target = phi_omega.enclosure().upper() + e;
    const Dyadic upper_target = phi_omega.enclosure().lower() + e + e;
    auto phi_at = [&](std::size_t pos, Digit N) { return yoccoz_phi(bumped(prefix, pos, N), tol); };
    // certified Φ(b) - Φ(a) < eps
    auto step_ok = [&](const PhiValue& a, const PhiValue& b) {
        return b.enclosure().upper() - a.enclosure().lower() < e;
    };
    for (std::size_t m = std::max<std::size_t>(m_min, 1); m <= limits.max_m; ++m) {
        const std::size_t pos = n + m;
        // the first step is the largest; skip m that fail it outright
        if (!step_ok(phi_at(pos, 1), phi_at(pos, 2))) continue;
        std::vector<BumpStep> trace;
        trace.push_back({1, phi_at(pos, 1)});
        bool restart = false;
        for (Digit N = 2; N <= limits.max_N; ++N) {
            PhiValue cur = phi_at(pos, N);
            if (!step_ok(trace.back().phi, cur)) {
                restart = true;
                break;
            }
            trace.push_back({N, cur});
            if (cur.enclosure().lower() > lower_target) {
                if (!(cur.enclosure().upper() < upper_target)) {
                    restart = true;
                    break;
                }
                PhiBumpResult res;
                res.m = m;
                res.N = N;
                res.position = pos;
                res.beta = bumped(prefix, pos, N);
                res.phi_beta = cur;
                res.phi_omega = phi_omega;
                res.trace = std::move(trace);
                return res;
            }
        }
        if (!restart) throw ResourceExhausted("phi_bump_search: N cap reached");
    }
    throw ResourceExhausted("phi_bump_search: m cap reached");
}

namespace {

// sup over tails of sum_{i < pos} |term_i(beta^I) - term_i(omega)|, and the
// omega tail sum_{i >= pos} term_i(omega).
std::pair<double, double> safety_bounds(const std::vector<Digit>& prefix, std::size_t pos) {
    const std::size_t bits = 128;
    const CFNumber omega = CFNumber::noble(prefix);
    const auto aw = alphas(omega, pos + 1, bits);
    // alpha_j as a function of x = alpha_pos in [0, 1] is monotone; evaluate both ends
    auto chain = [&](const PrecisionReal& x) {
        std::vector<PrecisionReal> a(pos + 1);
        a[pos] = x;
        for (std::size_t j = pos; j-- > 0;) a[j] = reciprocal(digit_real(omega.digit(j), bits) + a[j + 1]);
        return a;
    };
    const auto a0 = chain(PrecisionReal(Dyadic(), Dyadic(), bits));
    const auto a1 = chain(PrecisionReal(Dyadic(1), Dyadic(), bits));
    PrecisionReal head(Dyadic(), Dyadic(), bits);
    PrecisionReal plo(Dyadic(1), Dyadic(), bits), phi_(Dyadic(1), Dyadic(), bits), pw(Dyadic(1), Dyadic(), bits);
    for (std::size_t i = 0; i < pos; ++i) {
        const PrecisionReal lo = min(a0[i], a1[i]);
        const PrecisionReal hi = max(a0[i], a1[i]);
        const PrecisionReal tw = pw * -log(aw[i]);
        // log(1/alpha) at alpha = 1 is 0; keep the ball nonnegative
        const PrecisionReal t_lo = plo * max(PrecisionReal(Dyadic(), Dyadic(), bits), -log(hi));
        const PrecisionReal t_hi = phi_ * -log(lo);
        head += max(t_hi - tw, tw - t_lo);
        plo = plo * lo;
        phi_ = phi_ * hi;
        pw = pw * aw[i];
    }
    // every omega digit from pos on is 1: tail = P_pos log(1/g)/(1-g)
    const PrecisionReal g = golden(bits);
    const PrecisionReal one(Dyadic(1), Dyadic(), bits);
    const PrecisionReal tail = pw * -log(g) / (one - g);
    return {head.upper().to_double(), tail.upper().to_double()};
}

}  // namespace

TailSafety tail_safety(const std::vector<Digit>& prefix, double eps) {
    if (!(eps > 0)) throw DomainError("tail_safety_m0: eps must be positive");
    if (prefix.empty()) throw DomainError("tail_safety_m0: prefix must be nonempty");
    const std::size_t n = prefix.size() - 1;
    const std::size_t window = 32;
    std::vector<std::pair<double, double>> cache;
    auto bounds = [&](std::size_t m) {
        while (cache.size() < m + 1) cache.push_back(safety_bounds(prefix, n + cache.size()));
        return cache[m];
    };
    auto good = [&](std::size_t m) {
        const auto [h, t] = bounds(m);
        return h < eps / 2 && t < eps / 2;
    };
    for (std::size_t m = 1; m < 100000; ++m) {
        bool all = true;
        for (std::size_t k = m; k <= m + window; ++k) {
            if (!good(k)) {
                all = false;
                m = k;  // no m' <= k can start a good window
                break;
            }
        }
        if (all) {
            const auto [h, t] = bounds(m);
            return {m, h, t};
        }
    }
    throw ResourceExhausted("tail_safety_m0: no m0 found");
}

std::size_t tail_safety_m0(const std::vector<Digit>& prefix, double eps) { return tail_safety(prefix, eps).m0; }

}  // namespace sj::cf
