#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sj/cf/cf.hpp"
#include "sj/error.hpp"
#include "sj/numerics/ball_union.hpp"
#include "sj/numerics/oracle.hpp"
#include "sj/siegel/siegel.hpp"

namespace sj::adversary {

using cf::CFNumber;
using cf::Digit;
using numerics::BallUnion;
using numerics::Dyadic;
using numerics::Oracle;
using json = nlohmann::json;

// A strategy spent more work than it was given.
class Disqualified : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunResult {
    // empty on timeout
    std::optional<BallUnion> output;
    std::uint64_t work_used = 0;
};

class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    virtual json params() const { return json::object(); }
    // Renders J at precision 2^-m from the oracle in at most T work units.
    virtual RunResult run(const Oracle& theta, std::size_t m, std::uint64_t T) const = 0;
};

// Gives up at once.
std::unique_ptr<Strategy> always_timeout();
// One ball about 0 of radius 2^-e, no reads.
std::unique_ptr<Strategy> constant_output(int e = 10);
// Reads `bits` bits, completes the continued-fraction prefix they certify
// with a tail of ones and draws the critical orbit of that noble parameter,
// as far as the budget allows, with balls bridging neighbours.
std::unique_ptr<Strategy> honest_bounded_renderer(std::size_t bits = 4);
// julia::render at precision m under the budget.
std::unique_ptr<Strategy> julia_renderer();

// Builds a roster entry from {"name": ..., "params": {...}}, or a bare name.
std::unique_ptr<Strategy> make_strategy(const json& spec);
json strategy_spec(const Strategy& s);
std::vector<std::string> strategy_names();

// Strictly increasing h, as a table h(0), h(1), ... or c * k^p.
class HardnessSchedule {
public:
    static HardnessSchedule power(double coefficient, double exponent);
    static HardnessSchedule table(std::vector<std::uint64_t> values);
    // "k^2", "3*k^2", a JSON table or {"coefficient": c, "exponent": p}
    static HardnessSchedule parse(const json& spec);

    std::uint64_t operator()(std::uint64_t k) const;
    json to_json() const;

private:
    std::vector<std::uint64_t> table_;
    double coefficient_ = 1;
    double exponent_ = 2;
};

// 2 ceil(-log2 ell) + 1
std::size_t precision_index(double ell);

struct Outcome {
    RunResult result;
    std::string strategy;
    std::map<std::size_t, Dyadic> transcript;
    std::vector<std::size_t> read_log;
    std::size_t max_read = 0;
    // digits 0..m0-1 of gamma fix every answer given
    std::size_t m0 = 0;
};

// Smallest m whose cylinder about gamma (digits 0..m-1 fixed) has diameter
// below 2^-n - 2^-(n+3), so every answer the oracle gave at precision n is
// valid for any number in it.
std::size_t cylinder_depth(const CFNumber& gamma, std::size_t n);

Outcome simulate_budgeted(const Strategy& s, const CFNumber& gamma, std::size_t m, std::uint64_t T);

// Conformal radius about 0 of the complement component of S containing 0,
// through the boundary of a grid flood fill; 0 when 0 is covered, empty
// when the component is unbounded.
std::optional<double> complement_radius(const BallUnion& S, std::size_t grid = 1024);

struct ConstructionConfig {
    siegel::RadiusConfig radius;
    double radius_tol = 1e-6;
    double phi_tol = 1e-9;
    // max_m counts positions after the current prefix
    siegel::RadiusBumpLimits bump{Digit{1} << 20, 40, 200};
};

struct AdversaryState {
    std::vector<Digit> prefix;
    double l = 0;
    double r = 0;
    double ell = 0;
    double phi = 0;
    double phi_floor = 0;
    std::size_t step = 0;
    json certificate_log = json::array();

    CFNumber gamma() const { return CFNumber::noble(prefix); }
};

AdversaryState init_state(const ConstructionConfig& cfg = {});

// One step of the induction against s. Records a certificate entry.
AdversaryState induction_step(const AdversaryState& st, const Strategy& s, const HardnessSchedule& h,
                              const ConstructionConfig& cfg = {});

struct TimelineRow {
    std::size_t step = 0;
    std::string kase;
    double l = 0;
    double r = 0;
    double ell = 0;
    double phi = 0;
    std::uint64_t work_used = 0;
};

struct Construction {
    CFNumber gamma;
    AdversaryState state;
    json certificate;
    std::vector<TimelineRow> timeline;
};

Construction run_construction(const std::vector<std::unique_ptr<Strategy>>& roster, std::size_t steps,
                              const HardnessSchedule& h, const ConstructionConfig& cfg = {});

std::string timeline_csv(const std::vector<TimelineRow>& rows);

struct Verification {
    bool ok = true;
    std::vector<std::string> failures;
};

// Recomputes every recorded radius, Phi value and inequality.
Verification verify_certificate(const json& cert);

}  // namespace sj::adversary
