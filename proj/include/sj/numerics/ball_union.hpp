#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sj/numerics/dyadic.hpp"
#include "sj/numerics/real.hpp"

namespace sj::numerics {

struct Point {
    Dyadic x;
    Dyadic y;
};

struct Ball {
    Point center;
    Dyadic radius;  // >= 0; radius 0 is a single point
};

// Finite union of closed dyadic balls, kept in insertion order.
class BallUnion {
public:
    BallUnion() = default;
    explicit BallUnion(std::vector<Ball> balls);

    void add(Ball b);
    const std::vector<Ball>& balls() const { return balls_; }
    std::size_t size() const { return balls_.size(); }
    bool empty() const { return balls_.empty(); }

    // One "cx cy r" line per ball, each field as m*2^e. Reading skips
    // lines starting with '#'.
    std::string serialize() const;
    static BallUnion parse(const std::string& text);
    void write(std::ostream& os) const;
    static BallUnion read(std::istream& is);

    friend bool operator==(const BallUnion& a, const BallUnion& b);

private:
    std::vector<Ball> balls_;
};

BallUnion from_points(const std::vector<Point>& pts);

// Hausdorff distance between the sets covered by a and b. The sets are
// sampled (full disks, not only boundaries) on a lattice of spacing close to
// tol; the returned ball contains the true distance and has radius <= tol.
PrecisionReal hausdorff_distance(const BallUnion& a, const BallUnion& b, double tol = 1e-3);

// r/4, the Koebe lower bound for the inscribed radius about the marked point.
PrecisionReal koebe_inscribed_bound(const PrecisionReal& r);

}  // namespace sj::numerics
