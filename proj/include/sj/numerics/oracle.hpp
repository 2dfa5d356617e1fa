#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sj/numerics/dyadic.hpp"
#include "sj/numerics/real.hpp"

namespace sj::numerics {

// Query access to dyadic approximations of a real x: query(n) returns d with
// |x - d| < 2^-n. Answers are deterministic: the nearest multiple of
// 2^-(n+2) (so the error is at most 2^-(n+3)), unless the oracle replays a
// recorded transcript. Every query is appended to the read log; copies of an
// Oracle share one log.
class Oracle {
public:
    // Enclosure of x whose radius is at most 2^-bits.
    using Approximator = std::function<PrecisionReal(std::size_t bits)>;

    static Oracle from_approximator(std::string description, Approximator approx);
    static Oracle exact(const Dyadic& x);
    static Oracle rational(const mpz_class& p, const mpz_class& q);
    // Answers recorded[n] when present, otherwise defers to `fallback`. The
    // caller is responsible for checking the recorded answers are valid for
    // the real the fallback represents (see valid_for()).
    static Oracle replay(std::map<std::size_t, Dyadic> recorded, const Oracle& fallback);

    Dyadic query(std::size_t n) const;

    std::vector<std::size_t> read_log() const;
    std::size_t reads() const;
    // Largest n queried so far, if any.
    std::optional<std::size_t> max_read() const;
    // Queried positions with the answers given.
    std::map<std::size_t, Dyadic> transcript() const;
    // Same answers, empty log.
    Oracle with_fresh_log() const;

    const std::string& description() const { return core_->description; }
    // Enclosure of the represented real at >= bits of accuracy.
    PrecisionReal enclosure(std::size_t bits) const;

private:
    struct Core {
        std::string description;
        std::function<Dyadic(std::size_t)> answer;
        Approximator approx;
    };
    struct Log {
        mutable std::mutex mu;
        std::vector<std::size_t> reads;
        std::map<std::size_t, Dyadic> answers;
    };

    Oracle(std::shared_ptr<const Core> core) : core_(std::move(core)), log_(std::make_shared<Log>()) {}

    std::shared_ptr<const Core> core_;
    std::shared_ptr<Log> log_;
};

// Correctly rounded multiple of 2^-(n+2) nearest to the real enclosed by
// successive calls to approx, refining up to cap_bits.
Dyadic round_to_grid(const Oracle::Approximator& approx, std::size_t n, std::size_t cap_bits);

// True iff |x - d| < 2^-n is certified for the real supplied by approx.
bool valid_answer(const Oracle::Approximator& approx, std::size_t n, const Dyadic& d);

// Mantissa-bit cap for adaptive precision loops; the SIEGEL_PRECISION_CAP
// environment variable overrides the default of 4096.
std::size_t precision_cap();

}  // namespace sj::numerics
