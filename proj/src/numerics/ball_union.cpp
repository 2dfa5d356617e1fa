#include "sj/numerics/ball_union.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "sj/error.hpp"

namespace sj::numerics {

BallUnion::BallUnion(std::vector<Ball> balls) : balls_(std::move(balls)) {
    for (const auto& b : balls_) {
        if (b.radius.sign() < 0) throw DomainError("BallUnion: negative radius");
    }
}

void BallUnion::add(Ball b) {
    if (b.radius.sign() < 0) throw DomainError("BallUnion: negative radius");
    balls_.push_back(std::move(b));
}

std::string BallUnion::serialize() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

void BallUnion::write(std::ostream& os) const {
    for (const auto& b : balls_) {
        os << b.center.x.to_string() << ' ' << b.center.y.to_string() << ' ' << b.radius.to_string() << '\n';
    }
}

BallUnion BallUnion::parse(const std::string& text) {
    std::istringstream is(text);
    return read(is);
}

BallUnion BallUnion::read(std::istream& is) {
    BallUnion u;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string cx, cy, r, extra;
        if (!(ls >> cx >> cy >> r) || (ls >> extra)) {
            throw DomainError("BallUnion: line " + std::to_string(lineno) + " is not 'cx cy r'");
        }
        u.add(Ball{{Dyadic::parse(cx), Dyadic::parse(cy)}, Dyadic::parse(r)});
    }
    return u;
}

bool operator==(const BallUnion& a, const BallUnion& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Ball& p = a.balls_[i];
        const Ball& q = b.balls_[i];
        if (p.center.x != q.center.x || p.center.y != q.center.y || p.radius != q.radius) return false;
    }
    return true;
}

BallUnion from_points(const std::vector<Point>& pts) {
    BallUnion u;
    for (const auto& p : pts) u.add(Ball{p, Dyadic()});
    return u;
}

namespace {

struct Disk {
    double x, y, r;
};

std::vector<Disk> to_disks(const BallUnion& u) {
    std::vector<Disk> out;
    out.reserve(u.size());
    for (const auto& b : u.balls()) out.push_back({b.center.x.to_double(), b.center.y.to_double(), b.radius.to_double()});
    return out;
}

// Uniform grid over disk centers for nearest-disk queries.
class DiskIndex {
public:
    explicit DiskIndex(const std::vector<Disk>& disks) : disks_(disks) {
        double minx = std::numeric_limits<double>::infinity(), miny = minx;
        double maxx = -minx, maxy = -minx;
        for (const auto& d : disks_) {
            minx = std::min(minx, d.x);
            maxx = std::max(maxx, d.x);
            miny = std::min(miny, d.y);
            maxy = std::max(maxy, d.y);
            rmax_ = std::max(rmax_, d.r);
        }
        const double span = std::max({maxx - minx, maxy - miny, 1e-9});
        cell_ = std::max({span / std::max(1.0, std::sqrt(static_cast<double>(disks_.size()))), 2 * rmax_, 1e-9});
        ox_ = minx;
        oy_ = miny;
        for (std::size_t i = 0; i < disks_.size(); ++i) {
            cells_[key(cx(disks_[i].x), cy(disks_[i].y))].push_back(i);
        }
        nx_ = cx(maxx);
        ny_ = cy(maxy);
    }

    // min over disks of max(0, |p - c| - r)
    double distance(double px, double py) const {
        const long ix = cx(px);
        const long iy = cy(py);
        double best = std::numeric_limits<double>::infinity();
        const long reach = std::max({std::labs(ix) + 1, std::labs(iy) + 1, std::labs(nx_ - ix) + 1,
                                     std::labs(ny_ - iy) + 1});
        // rings that miss the occupied box are empty
        const long start = std::max({0L, -ix, ix - nx_, -iy, iy - ny_});
        for (long ring = start; ring <= reach; ++ring) {
            // large rings cost more than a scan of all disks
            if (8 * ring > static_cast<long>(cells_.size()) + 8) return brute(px, py);
            // disks in this ring are at least (ring - 1) cells away
            const double lower = (static_cast<double>(ring) - 1.0) * cell_ - rmax_;
            if (best <= lower) break;
            auto visit = [&](long gx, long gy) {
                auto it = cells_.find(key(gx, gy));
                if (it == cells_.end()) return;
                for (std::size_t i : it->second) {
                    const Disk& d = disks_[i];
                    best = std::min(best, std::hypot(px - d.x, py - d.y) - d.r);
                }
            };
            if (ring == 0) {
                visit(ix, iy);
            } else {
                for (long d = -ring; d <= ring; ++d) {
                    visit(ix + d, iy - ring);
                    visit(ix + d, iy + ring);
                }
                for (long d = -ring + 1; d <= ring - 1; ++d) {
                    visit(ix - ring, iy + d);
                    visit(ix + ring, iy + d);
                }
            }
            if (best <= 0) return 0;
        }
        return std::max(0.0, best);
    }

private:
    double brute(double px, double py) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& d : disks_) best = std::min(best, std::hypot(px - d.x, py - d.y) - d.r);
        return std::max(0.0, best);
    }
    long cx(double x) const { return static_cast<long>(std::floor((x - ox_) / cell_)); }
    long cy(double y) const { return static_cast<long>(std::floor((y - oy_) / cell_)); }
    static long long key(long a, long b) { return (static_cast<long long>(a) << 32) ^ static_cast<long long>(b & 0xffffffffL); }

    const std::vector<Disk>& disks_;
    std::unordered_map<long long, std::vector<std::size_t>> cells_;
    double cell_ = 1, ox_ = 0, oy_ = 0, rmax_ = 0;
    long nx_ = 0, ny_ = 0;
};

// Samples covering every disk of `from` within `cover`, where `cover` is
// zero when all disks are points.
template <typename Fn>
void sample_disks(const std::vector<Disk>& from, double s, Fn&& visit) {
    for (const auto& d : from) {
        visit(d.x, d.y);
        if (d.r <= 0) continue;
        // interior lattice aligned to the center
        const long k = static_cast<long>(std::floor(d.r / s));
        for (long i = -k; i <= k; ++i) {
            for (long j = -k; j <= k; ++j) {
                const double x = static_cast<double>(i) * s;
                const double y = static_cast<double>(j) * s;
                if (x * x + y * y <= d.r * d.r) visit(d.x + x, d.y + y);
            }
        }
        // boundary at arc spacing <= s
        const auto nb = static_cast<long>(std::ceil(2 * M_PI * d.r / s)) + 4;
        for (long i = 0; i < nb; ++i) {
            const double t = 2 * M_PI * static_cast<double>(i) / static_cast<double>(nb);
            visit(d.x + d.r * std::cos(t), d.y + d.r * std::sin(t));
        }
    }
}

double directed(const std::vector<Disk>& from, const std::vector<Disk>& to, double s) {
    DiskIndex index(to);
    double worst = 0;
    sample_disks(from, s, [&](double x, double y) { worst = std::max(worst, index.distance(x, y)); });
    return worst;
}

}  // namespace

PrecisionReal hausdorff_distance(const BallUnion& a, const BallUnion& b, double tol) {
    if (a.empty() || b.empty()) throw DomainError("hausdorff_distance: empty input");
    if (!(tol > 0)) throw DomainError("hausdorff_distance: tolerance must be positive");
    const auto da = to_disks(a);
    const auto db = to_disks(b);
    const double s = tol / 1.25;
    auto all_points = [](const std::vector<Disk>& v) {
        return std::all_of(v.begin(), v.end(), [](const Disk& d) { return d.r <= 0; });
    };
    // A point p of a disk lies within s/sqrt2 of a lattice sample, or within
    // s/sqrt2 of the boundary and then within s/sqrt2 + s/2 of a boundary sample.
    const double cover = 1.25 * s;  // == tol
    const double dab = directed(da, db, s);
    const double dba = directed(db, da, s);
    const double ca = all_points(da) ? 0.0 : cover;
    const double cb = all_points(db) ? 0.0 : cover;
    double lo = std::max(dab, dba);
    double hi = std::max(dab + ca, dba + cb);
    // floating point slack on top of the sampling gap
    double scale = 1;
    for (const auto& d : da) scale = std::max({scale, std::fabs(d.x), std::fabs(d.y), d.r});
    for (const auto& d : db) scale = std::max({scale, std::fabs(d.x), std::fabs(d.y), d.r});
    const double slack = 1e-12 * scale;
    lo = std::max(0.0, lo - slack);
    hi += slack;
    return PrecisionReal::from_bounds(Dyadic::from_double(lo), Dyadic::from_double(hi));
}

PrecisionReal koebe_inscribed_bound(const PrecisionReal& r) {
    if (r.certainly_negative()) throw DomainError("koebe_inscribed_bound: negative radius");
    PrecisionReal v = r;
    if (r.lower().sign() < 0) v = PrecisionReal::from_bounds(Dyadic(), r.upper(), r.precision());
    return v.scaled(-2);
}

}  // namespace sj::numerics
