#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sj/cf/cf.hpp"
#include "sj/numerics/ball_union.hpp"
#include "sj/numerics/oracle.hpp"

namespace sj::julia {

using Cplx = std::complex<double>;
using cf::CFNumber;
using numerics::Oracle;
using numerics::PrecisionReal;

// Points with |z| > 3 escape: |P(z)| >= |z|(|z| - 1) >= 2|z|.
inline constexpr double kEscapeRadius = 3;

enum class Band { Far, Near, InBetween };
std::string band_name(Band b);

struct MembershipVerdict {
    // 0 or 1; meaningless when timeout is set
    int bit = 0;
    Band band = Band::InBetween;
    bool timeout = false;
    std::uint64_t budget_used = 0;
};

// Work units: one per map iteration (forward, inverse or disk step) and one
// per oracle digit read.
class WorkMeter {
public:
    explicit WorkMeter(std::uint64_t budget) : budget_(budget) {}
    // false (and nothing charged) when k units would exceed the budget
    bool charge(std::uint64_t k);
    std::uint64_t used() const { return used_; }
    std::uint64_t remaining() const { return budget_ - used_; }
    std::uint64_t budget() const { return budget_; }

private:
    std::uint64_t budget_;
    std::uint64_t used_ = 0;
};

// lambda = e^{2 pi i theta} in double precision with a bound on its error,
// from one oracle query.
struct Parameter {
    Cplx lambda;
    double lambda_error = 0;
    std::size_t bits_read = 0;
};

// Bits of theta read by classify_point and render: all a double holds.
inline constexpr std::size_t kParameterBits = 50;

// Charges `bits` units; throws ResourceExhausted when they are not available.
Parameter read_parameter(const Oracle& theta, std::size_t bits, WorkMeter& meter);
Parameter exact_parameter(const CFNumber& theta);

// The repelling fixed point 1 - lambda.
Cplx repelling_fixed_point(const Parameter& p);

// Iterated preimages of the repelling fixed point, all in J, with error
// bounds. Points whose error exceeds max_error are dropped.
struct JuliaPoints {
    std::vector<Cplx> points;
    std::vector<double> errors;
    // (cell, point) pairs sorted by cell
    double cell = 0;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> index;

    void build_index(double pitch);

    // certified upper bound on dist(z, J) from the stored points, or
    // +infinity when no point lies within `reach`
    double distance_bound(Cplx z, double reach) const;
};

struct JuliaPointConfig {
    // levels of preimages
    std::size_t depth = 10;
    // steps of the backward critical chain; 0 leaves it out
    std::size_t chain_length = 0;
    double max_error = 1e-3;
    // one point per cell of this pitch; 0 keeps every point
    double spacing = 0;
    // levels kept in full regardless of spacing
    std::size_t exact_depth = 10;
};

// Preimage tree seeded by the repelling fixed point and, when chain_length
// is set, by the backward orbit of the critical point along the Siegel disk
// boundary. The critical point is in J only for irrational theta.
JuliaPoints julia_points(const Parameter& p, const JuliaPointConfig& cfg, WorkMeter& meter);
// the tree of the repelling fixed point alone
JuliaPoints backward_orbit(const Parameter& p, std::size_t depth, double max_error, WorkMeter& meter);

// Largest delta on the ladder 2^-j such that the whole disk B(z, delta)
// provably escapes within iters steps, or the containment bound |z| - 2;
// a certified lower bound on dist(z, J). Zero when neither applies.
PrecisionReal exterior_distance_bound(const CFNumber& theta, Cplx z, std::size_t iters);
double exterior_distance_bound(const Parameter& p, Cplx z, std::uint64_t iters, WorkMeter* meter = nullptr);

struct ClassifyConfig {
    // iterations per sample point; 0 means 2^(n+8)
    std::uint64_t point_iterations = 0;
    // preimage tree for the near band; 0 means 2n + 8 levels and a critical
    // chain of 2^(n+8) steps, thinned to one point per 2^-(n+2) cell
    std::size_t preimage_depth = 0;
    std::size_t chain_length = 0;
};

// bit 0 when dist(d, J) > 2 * 2^-n is certified (far), bit 1 when
// dist(d, J) < 2^-n is certified (near), otherwise in-between with bit 1
// iff the corners d +/- 2^-(n+1) (1 +/- i) and d itself straddle the escape
// boundary within the iteration cap.
MembershipVerdict classify_point(const Oracle& theta, const numerics::Point& d, std::size_t n, std::uint64_t budget,
                                 const ClassifyConfig& cfg = {});

struct RenderStats {
    std::uint64_t work_used = 0;
    std::uint64_t budget = 0;
    std::size_t oracle_reads = 0;
    std::size_t max_oracle_position = 0;
    // lattice points inside the 3-ball
    std::uint64_t pixels = 0;
    std::uint64_t bit_one = 0;
    std::uint64_t far = 0;
    std::uint64_t near = 0;
    std::uint64_t in_between = 0;
    std::uint64_t filled_interior = 0;
    std::size_t julia_points = 0;
    bool incomplete = false;
    double seconds = 0;
};

struct Rendering {
    numerics::BallUnion balls;
    std::size_t m = 0;
    std::string theta;
    RenderStats stats;
    // lattice raster of bits, row-major from the top-left, width x width,
    // covering [-half, half]^2
    std::size_t width = 0;
    double half = 0;
    std::vector<unsigned char> raster;
};

struct RenderConfig {
    // 0 means 2^(m+8)
    std::uint64_t point_iterations = 0;
    // as in ClassifyConfig with n = m
    std::size_t preimage_depth = 0;
    std::size_t chain_length = 0;
};

// Classifies the lattice of pitch 2^-(m+1) inside the 3-ball with n = m and
// emits a ball of radius 2^-m at each bit-1 point, in lattice order.
Rendering render(const Oracle& theta, std::size_t m, std::uint64_t budget, const RenderConfig& cfg = {});

// P5 raster, bit-1 points black.
std::string to_pgm(const Rendering& r);

}  // namespace sj::julia
