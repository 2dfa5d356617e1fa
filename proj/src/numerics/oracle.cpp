#include "sj/numerics/oracle.hpp"

#include <algorithm>
#include <cstdlib>

#include "sj/error.hpp"

namespace sj::numerics {

std::size_t precision_cap() {
    const char* env = std::getenv("SIEGEL_PRECISION_CAP");
    if (env == nullptr || *env == '\0') return 4096;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v < 64) throw DomainError("SIEGEL_PRECISION_CAP must be an integer >= 64");
    return v;
}

Dyadic round_to_grid(const Oracle::Approximator& approx, std::size_t n, std::size_t cap_bits) {
    const auto frac = static_cast<std::int64_t>(n) + 2;
    std::size_t bits = n + 16;
    PrecisionReal enc = approx(bits);
    while (true) {
        const Dyadic lo = enc.lower().round_fixed(frac, Round::Nearest);
        const Dyadic hi = enc.upper().round_fixed(frac, Round::Nearest);
        if (lo == hi) return lo;
        if (bits >= cap_bits) {
            // a tie the enclosure cannot resolve; either neighbour is within 2^-(n+3) + 2^-bits
            return enc.mid().round_fixed(frac, Round::Nearest);
        }
        bits = std::min(bits * 2, cap_bits);
        enc = approx(bits);
    }
}

bool valid_answer(const Oracle::Approximator& approx, std::size_t n, const Dyadic& d) {
    const PrecisionReal x = approx(n + 40);
    const Dyadic bound = pow2(-static_cast<std::int64_t>(n));
    const Dyadic worst = max((x.upper() - d).abs(), (x.lower() - d).abs());
    return worst < bound;
}

Oracle Oracle::from_approximator(std::string description, Approximator approx) {
    auto core = std::make_shared<Core>();
    core->description = std::move(description);
    core->approx = approx;
    core->answer = [approx](std::size_t n) { return round_to_grid(approx, n, std::max(precision_cap(), n + 64)); };
    return Oracle(core);
}

Oracle Oracle::exact(const Dyadic& x) {
    auto core = std::make_shared<Core>();
    core->description = "dyadic " + x.to_string();
    core->approx = [x](std::size_t) { return PrecisionReal(x, Dyadic(), std::max<std::size_t>(x.bit_length(), 64)); };
    // a dyadic is its own best approximation
    core->answer = [x](std::size_t) { return x; };
    return Oracle(core);
}

Oracle Oracle::rational(const mpz_class& p, const mpz_class& q) {
    auto core = std::make_shared<Core>();
    core->description = "rational " + p.get_str() + "/" + q.get_str();
    core->approx = [p, q](std::size_t bits) {
        return PrecisionReal::rational(p, q, bits + 8);
    };
    core->answer = [p, q](std::size_t n) {
        return Dyadic::from_rational(p, q, static_cast<std::int64_t>(n) + 2, Round::Nearest);
    };
    return Oracle(core);
}

Oracle Oracle::replay(std::map<std::size_t, Dyadic> recorded, const Oracle& fallback) {
    auto core = std::make_shared<Core>();
    core->description = "replay of " + std::to_string(recorded.size()) + " answers over " + fallback.description();
    core->approx = fallback.core_->approx;
    auto fb = fallback.core_;
    core->answer = [rec = std::move(recorded), fb](std::size_t n) {
        if (auto it = rec.find(n); it != rec.end()) return it->second;
        return fb->answer(n);
    };
    return Oracle(core);
}

Dyadic Oracle::query(std::size_t n) const {
    Dyadic d = core_->answer(n);
    std::lock_guard lock(log_->mu);
    log_->reads.push_back(n);
    log_->answers.emplace(n, d);
    return d;
}

std::vector<std::size_t> Oracle::read_log() const {
    std::lock_guard lock(log_->mu);
    return log_->reads;
}

std::size_t Oracle::reads() const {
    std::lock_guard lock(log_->mu);
    return log_->reads.size();
}

std::optional<std::size_t> Oracle::max_read() const {
    std::lock_guard lock(log_->mu);
    if (log_->reads.empty()) return std::nullopt;
    return *std::max_element(log_->reads.begin(), log_->reads.end());
}

std::map<std::size_t, Dyadic> Oracle::transcript() const {
    std::lock_guard lock(log_->mu);
    return log_->answers;
}

Oracle Oracle::with_fresh_log() const { return Oracle(core_); }

PrecisionReal Oracle::enclosure(std::size_t bits) const { return core_->approx(bits); }

}  // namespace sj::numerics
