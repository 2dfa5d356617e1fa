#include "sj/cli/suites.hpp"

#include <chrono>
#include <random>
#include <sstream>

#include "sj/cf/cf.hpp"
#include "sj/error.hpp"

namespace sj::cli {

using cf::CFNumber;
using cf::Digit;

namespace {

using Clock = std::chrono::steady_clock;

std::string digits_text(const std::vector<Digit>& d) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
    os << ']';
    return os.str();
}

void note(SuiteResult& r, const std::string& line) {
    ++r.failures;
    if (r.failed.size() < 20) r.failed.push_back(line);
}

}  // namespace

nlohmann::json SuiteResult::to_json() const {
    return {{"suite", name}, {"instances", instances}, {"failures", failures},
            {"failed", failed}, {"seconds", seconds}, {"ok", ok()}};
}

SuiteResult suite_4lems(std::uint64_t seed, std::size_t count) {
    SuiteResult r;
    r.name = "4lems";
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<Digit> p(1 + rng() % 6);
        for (auto& d : p) d = 1 + rng() % 20;
        const std::size_t m = 1 + rng() % 20;
        const Digit N = 1 + rng() % 10000;
        const std::size_t pos = p.size() - 1 + m;
        const std::size_t i = rng() % (pos + 1);
        const auto res = cf::check_4lems(p, m, N, i);
        ++r.instances;
        for (std::size_t k = 0; k < 4; ++k) {
            if (res[k].has_value() && !*res[k]) {
                note(r, "prefix " + digits_text(p) + " m " + std::to_string(m) + " N " + std::to_string(N) + " i " +
                            std::to_string(i) + " part " + std::to_string(k + 1));
            }
        }
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

SuiteResult suite_smlchg(std::uint64_t) {
    SuiteResult r;
    r.name = "smlchg";
    const auto t0 = Clock::now();
    for (const std::vector<Digit>& p : {std::vector<Digit>{1}, std::vector<Digit>{1, 2, 3}}) {
        for (const double eps : {0.5, 0.1}) {
            ++r.instances;
            const std::string tag = digits_text(p) + " eps " + std::to_string(eps);
            try {
                const cf::PhiBumpResult b = cf::phi_bump_search(p, eps);
                const cf::PhiValue w = cf::yoccoz_phi(CFNumber::noble(p), eps / 10);
                const cf::PhiValue v = cf::yoccoz_phi(b.beta, eps / 10);
                const double wl = w.enclosure().lower().to_double(), wu = w.enclosure().upper().to_double();
                const double vl = v.enclosure().lower().to_double(), vu = v.enclosure().upper().to_double();
                if (!(vl > wu + eps && vu < wl + 2 * eps)) note(r, tag + ": window not confirmed");
                for (std::size_t k = 1; k < b.trace.size(); ++k) {
                    if (!(b.trace[k].phi.value() - b.trace[k - 1].phi.value() < eps)) {
                        note(r, tag + ": step " + std::to_string(k) + " exceeds eps");
                        break;
                    }
                }
            } catch (const std::exception& e) {
                note(r, tag + ": " + e.what());
            }
        }
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

SuiteResult suite_notdeclem(std::uint64_t seed, std::size_t count) {
    SuiteResult r;
    r.name = "notdeclem";
    const auto t0 = Clock::now();
    const double eps = 1.0;
    const std::vector<Digit> prefix{1};
    const std::size_t m0 = cf::tail_safety_m0(prefix, eps);
    const double base = cf::yoccoz_phi(CFNumber::noble(prefix), 1e-8).value();
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<Digit> p = prefix;
        p.insert(p.end(), m0, 1);
        const std::size_t len = 1 + rng() % 8;
        // alternate huge single digits, small digit runs and mixed magnitudes
        for (std::size_t k = 0; k < len; ++k) {
            switch (t % 3) {
                case 0: p.push_back(1 + rng() % 1000000000ull); break;
                case 1: p.push_back(1 + rng() % 3); break;
                default: p.push_back(rng() % 2 ? 1 + rng() % 1000000ull : 1); break;
            }
        }
        const CFNumber beta = t % 2 ? CFNumber::noble(p) : CFNumber::all_twos(p);
        ++r.instances;
        const cf::PhiValue v = cf::yoccoz_phi(beta, 1e-8);
        if (!(v.enclosure().lower().to_double() > base - eps)) note(r, beta.to_literal());
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

std::vector<std::string> suite_names() { return {"lemmas", "4lems", "smlchg", "notdeclem"}; }

std::vector<SuiteResult> run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "lemmas") return {suite_4lems(seed), suite_smlchg(seed), suite_notdeclem(seed)};
    if (name == "4lems") return {suite_4lems(seed)};
    if (name == "smlchg") return {suite_smlchg(seed)};
    if (name == "notdeclem") return {suite_notdeclem(seed)};
    throw DomainError("unknown suite '" + name + "'");
}

}  // namespace sj::cli
