#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace sj::cli {

struct SuiteResult {
    std::string name;
    std::size_t instances = 0;
    std::size_t failures = 0;
    // one line per failed instance, capped
    std::vector<std::string> failed;
    double seconds = 0;

    bool ok() const { return failures == 0 && instances > 0; }
    nlohmann::json to_json() const;
};

// Random (prefix, m, N, i) instances of the four beta^N / beta^{N+1} /
// beta^1 comparisons.
SuiteResult suite_4lems(std::uint64_t seed, std::size_t count = 1000);
// phi_bump_search on [1] and [1,2,3] with eps 0.5 and 0.1, each result
// rechecked at eps/10, with the one-step increase below eps along the trace.
SuiteResult suite_smlchg(std::uint64_t seed);
// Seeded tails placed after tail_safety_m0 ones behind [1] keep
// Phi > Phi(omega) - eps, eps = 1.
SuiteResult suite_notdeclem(std::uint64_t seed, std::size_t count = 50);

// "lemmas" runs all three; "4lems", "smlchg" and "notdeclem" run one.
std::vector<SuiteResult> run_suite(const std::string& name, std::uint64_t seed);
std::vector<std::string> suite_names();

}  // namespace sj::cli
