#include "sj/julia/julia.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "sj/error.hpp"

namespace sj::julia {

using numerics::Dyadic;

std::string band_name(Band b) {
    switch (b) {
        case Band::Far:
            return "far";
        case Band::Near:
            return "near";
        case Band::InBetween:
            return "in-between";
    }
    return "?";
}

bool WorkMeter::charge(std::uint64_t k) {
    if (k > budget_ - used_) return false;
    used_ += k;
    return true;
}

Parameter read_parameter(const Oracle& theta, std::size_t bits, WorkMeter& meter) {
    if (bits < 1 || bits > 50) throw DomainError("read_parameter: bits must lie in [1, 50]");
    if (!meter.charge(bits)) throw ResourceExhausted("read_parameter: budget exhausted");
    const Dyadic t = theta.query(bits);
    Parameter p;
    p.lambda = std::polar(1.0, 2 * M_PI * t.to_double());
    // query error, conversion to double, and the polar evaluation
    p.lambda_error = 2 * M_PI * (std::ldexp(1.0, -static_cast<int>(bits)) + 0x1p-52) + 1e-15;
    p.bits_read = bits;
    return p;
}

Parameter exact_parameter(const CFNumber& theta) {
    Parameter p;
    p.lambda = std::polar(1.0, 2 * M_PI * cf::cf_value(theta, 64).to_double());
    p.lambda_error = 2 * M_PI * 0x1p-52 + 1e-15;
    p.bits_read = 64;
    return p;
}

Cplx repelling_fixed_point(const Parameter& p) { return 1.0 - p.lambda; }

namespace {

// Iterates the disk B(c, rho) under every P_lambda' with |lambda' - lambda|
// within the parameter error. True when all of it lies outside the escape
// radius within `iters` steps.
bool disk_escapes(const Parameter& p, Cplx c, double rho, std::uint64_t iters, WorkMeter* meter) {
    const double el = p.lambda_error;
    for (std::uint64_t k = 0;; ++k) {
        const double ac = std::abs(c);
        if (ac - rho * (1 + 1e-12) > kEscapeRadius) return true;
        if (k >= iters || rho > 16) return false;
        if (meter != nullptr && !meter->charge(1)) return false;
        double nr = rho * (2 * ac + rho + 1 + el) + el * (ac + rho);
        // rounding in the center update
        nr += 8e-16 * (ac * ac + ac + 1);
        rho = nr * (1 + 1e-12);
        c = c * c + p.lambda * c;
    }
}

struct Escape {
    bool escaped = false;
    bool exhausted = false;
};

Escape point_escape(const Cplx& lambda, Cplx z, std::uint64_t cap, WorkMeter& meter) {
    constexpr double r2 = kEscapeRadius * kEscapeRadius;
    const double lr = lambda.real(), li = lambda.imag();
    double x = z.real(), y = z.imag();
    const std::uint64_t limit = std::min(cap, meter.remaining());
    std::uint64_t k = 0;
    while (x * x + y * y <= r2) {
        if (k >= limit) {
            meter.charge(k);
            return {false, limit < cap};
        }
        const double nx = x * x - y * y + lr * x - li * y;
        y = 2 * x * y + lr * y + li * x;
        x = nx;
        ++k;
    }
    meter.charge(k);
    return {true, false};
}

// Four orbits interleaved; same per-orbit arithmetic as point_escape. The
// caller guarantees the budget covers every orbit running to the cap.
void escape_batch(const Cplx& lambda, const Cplx* zs, std::size_t count, std::uint64_t cap, bool* escaped,
                  std::uint64_t& used) {
    constexpr double r2 = kEscapeRadius * kEscapeRadius;
    const double lr = lambda.real(), li = lambda.imag();
    double x[4], y[4];
    std::uint64_t k[4] = {0, 0, 0, 0};
    bool live[4] = {false, false, false, false};
    for (std::size_t l = 0; l < count; ++l) {
        x[l] = zs[l].real();
        y[l] = zs[l].imag();
        live[l] = true;
        escaped[l] = false;
    }
    std::size_t alive = count;
    while (alive > 0) {
        for (std::size_t l = 0; l < 4; ++l) {
            if (!live[l]) continue;
            if (x[l] * x[l] + y[l] * y[l] > r2) {
                escaped[l] = true;
                live[l] = false;
                --alive;
                continue;
            }
            if (k[l] >= cap) {
                live[l] = false;
                --alive;
                continue;
            }
            const double nx = x[l] * x[l] - y[l] * y[l] + lr * x[l] - li * y[l];
            y[l] = 2 * x[l] * y[l] + lr * y[l] + li * x[l];
            x[l] = nx;
            ++k[l];
        }
    }
    for (std::size_t l = 0; l < count; ++l) used += k[l];
}

JuliaPointConfig near_config(std::size_t n, std::size_t depth, std::size_t chain) {
    const double delta = std::ldexp(1.0, -static_cast<int>(n));
    JuliaPointConfig c;
    c.depth = depth ? depth : std::min<std::size_t>(2 * n + 8, 64);
    c.chain_length = chain ? chain : std::size_t{1} << std::min<std::size_t>(n + 8, 22);
    c.max_error = delta / 8;
    c.spacing = delta / 4;
    return c;
}

std::uint64_t default_iterations(std::size_t n) { return std::uint64_t{1} << std::min<std::size_t>(n + 8, 40); }

}  // namespace

namespace {

std::uint64_t cell_key(long x, long y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) | static_cast<std::uint32_t>(y);
}

}  // namespace

void JuliaPoints::build_index(double pitch) {
    cell = pitch;
    index.clear();
    index.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto x = static_cast<long>(std::floor(points[i].real() / cell));
        const auto y = static_cast<long>(std::floor(points[i].imag() / cell));
        index.emplace_back(cell_key(x, y), static_cast<std::uint32_t>(i));
    }
    std::sort(index.begin(), index.end());
}

double JuliaPoints::distance_bound(Cplx z, double reach) const {
    if (index.empty() || cell <= 0) return std::numeric_limits<double>::infinity();
    const auto span = static_cast<long>(std::ceil(reach / cell));
    const auto cx = static_cast<long>(std::floor(z.real() / cell));
    const auto cy = static_cast<long>(std::floor(z.imag() / cell));
    double best = std::numeric_limits<double>::infinity();
    for (long x = cx - span; x <= cx + span; ++x) {
        for (long y = cy - span; y <= cy + span; ++y) {
            const std::uint64_t k = cell_key(x, y);
            auto it = std::lower_bound(index.begin(), index.end(), std::pair<std::uint64_t, std::uint32_t>{k, 0});
            for (; it != index.end() && it->first == k; ++it) {
                best = std::min(best, std::abs(z - points[it->second]) + errors[it->second]);
            }
        }
    }
    return best;
}

namespace {

struct CellKey {
    long x, y;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        return std::hash<long>()(k.x) * 0x9e3779b97f4a7c15ULL ^ std::hash<long>()(k.y);
    }
};

}  // namespace

JuliaPoints julia_points(const Parameter& p, const JuliaPointConfig& cfg, WorkMeter& meter) {
    if (cfg.depth > 64) throw DomainError("julia_points: depth above 64");
    if (cfg.spacing == 0 && cfg.depth > 20) throw DomainError("julia_points: depth above 20 needs a spacing");
    JuliaPoints jp;
    const double el = p.lambda_error;
    const Cplx lam = p.lambda;
    std::unordered_map<CellKey, int, CellHash> occupied;
    auto add = [&](Cplx w, double e, bool keep) {
        if (cfg.spacing > 0) {
            const CellKey k{static_cast<long>(std::floor(w.real() / cfg.spacing)),
                            static_cast<long>(std::floor(w.imag() / cfg.spacing))};
            if (!occupied.emplace(k, 0).second && !keep) return false;
        }
        jp.points.push_back(w);
        jp.errors.push_back(e);
        return true;
    };
    // Preimages of z. With s = sqrt(lambda^2 + 4z) and a perturbation h of
    // s^2, |h| <= |s|^2 / 4, the matching root moves by at most
    // |h| / (|s| (1 + sqrt(1 - |h|/|s|^2))).
    auto inverse = [&](Cplx z, double ez, Cplx& w0, Cplx& w1, double& e) {
        const Cplx s = std::sqrt(lam * lam + 4.0 * z);
        const double as = std::abs(s);
        const double h = 4 * ez + el * (2 + el) + 2e-15 * (1 + 4 * std::abs(z));
        const double t = h / (as * as);
        if (!(t <= 0.25)) return false;
        e = el / 2 + h / (2 * as * (1 + std::sqrt(1 - t))) + 4e-16 * (2 + as);
        w0 = (-lam + s) / 2.0;
        w1 = (-lam - s) / 2.0;
        return e <= cfg.max_error;
    };
    struct Node {
        Cplx z;
        double e;
        // part of the fixed point's tree within exact_depth
        bool exact;
    };
    std::vector<Node> frontier;
    const Cplx beta = repelling_fixed_point(p);
    add(beta, el + 1e-15, true);
    if (cfg.depth >= 1 && meter.charge(1)) {
        // the other preimage of beta is -lambda - beta = -1
        const Cplx m1 = -lam - beta;
        if (add(m1, 2 * el + 2e-15, true)) frontier.push_back({m1, 2 * el + 2e-15, true});
    }
    // The critical point lies in J for every irrational rotation number.
    // Walking back along the inverse branch closer to 0 than to -lambda
    // keeps the chain near the boundary of the Siegel disk.
    if (cfg.chain_length > 0) {
        Cplx z = -lam / 2.0;
        double ez = el / 2 + 1e-16;
        if (add(z, ez, false)) frontier.push_back({z, ez, false});
        for (std::size_t k = 0; k < cfg.chain_length; ++k) {
            if (!meter.charge(1)) break;
            Cplx w0, w1;
            double e;
            if (!inverse(z, ez, w0, w1, e)) break;
            z = std::abs(w0) <= std::abs(w0 + lam) ? w0 : w1;
            ez = e;
            if (add(z, ez, false)) frontier.push_back({z, ez, false});
        }
    }
    for (std::size_t d = 2; d <= cfg.depth && !frontier.empty(); ++d) {
        std::vector<Node> next;
        next.reserve(frontier.size() * 2);
        for (const auto& [z, ez, exact] : frontier) {
            if (!meter.charge(2)) {
                frontier.clear();
                next.clear();
                break;
            }
            Cplx w0, w1;
            double e;
            if (!inverse(z, ez, w0, w1, e)) continue;
            const bool keep = exact && d <= cfg.exact_depth;
            for (const Cplx w : {w0, w1}) {
                if (add(w, e, keep)) next.push_back({w, e, keep});
            }
        }
        frontier = std::move(next);
    }
    jp.build_index(std::max(cfg.max_error * 8, 1e-6));
    return jp;
}

JuliaPoints backward_orbit(const Parameter& p, std::size_t depth, double max_error, WorkMeter& meter) {
    if (depth > 20) throw DomainError("backward_orbit: depth above 20");
    return julia_points(p, {depth, 0, max_error, 0, depth}, meter);
}

double exterior_distance_bound(const Parameter& p, Cplx z, std::uint64_t iters, WorkMeter* meter) {
    const double best = std::max(0.0, (std::abs(z) - 2) * (1 - 1e-15));
    // escaping disks are nested, so bisect on the exponent
    int lo = -60, hi = 4;
    if (!disk_escapes(p, z, std::ldexp(1.0, lo), iters, meter)) return best;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (disk_escapes(p, z, std::ldexp(1.0, mid), iters, meter)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::max(best, std::ldexp(1.0, lo));
}

PrecisionReal exterior_distance_bound(const CFNumber& theta, Cplx z, std::size_t iters) {
    const auto x = PrecisionReal::from_double(z.real()), y = PrecisionReal::from_double(z.imag());
    Dyadic best = (numerics::sqrt(x * x + y * y) - PrecisionReal(2)).lower();
    const Dyadic disk = PrecisionReal::from_double(exterior_distance_bound(exact_parameter(theta), z, iters)).mid();
    if (best < disk) best = disk;
    if (best.sign() < 0) best = Dyadic(0);
    return PrecisionReal(best);
}

MembershipVerdict classify_point(const Oracle& theta, const numerics::Point& d, std::size_t n, std::uint64_t budget,
                                 const ClassifyConfig& cfg) {
    if (budget < 1) throw DomainError("classify_point: budget must be >= 1");
    if (n > 40) throw DomainError("classify_point: n above 40 exceeds double precision");
    WorkMeter meter(budget);
    MembershipVerdict v;
    auto timeout = [&] {
        v.timeout = true;
        v.budget_used = meter.used();
        return v;
    };
    const Cplx z(d.x.to_double(), d.y.to_double());
    const double delta = std::ldexp(1.0, -static_cast<int>(n));
    auto finish = [&](int bit, Band band) {
        v.bit = bit;
        v.band = band;
        v.budget_used = meter.used();
        return v;
    };
    if (std::abs(z) - 2 > 2 * delta * (1 + 1e-12) + 1e-15) return finish(0, Band::Far);

    Parameter p;
    try {
        p = read_parameter(theta, kParameterBits, meter);
    } catch (const ResourceExhausted&) {
        return timeout();
    }
    const std::uint64_t cap = cfg.point_iterations ? cfg.point_iterations : default_iterations(n);
    if (disk_escapes(p, z, 2 * delta * (1 + 1e-12), cap, &meter)) return finish(0, Band::Far);
    if (meter.remaining() == 0) return timeout();

    const std::uint64_t before = meter.used();
    const JuliaPoints jp = julia_points(p, near_config(n, cfg.preimage_depth, cfg.chain_length), meter);
    if (meter.remaining() == 0 && meter.used() > before) return timeout();
    if (jp.distance_bound(z, delta) < delta) return finish(1, Band::Near);

    bool any_in = false, any_out = false;
    const double c = delta / 2;
    for (const Cplx s : {z, z + Cplx(c, c), z + Cplx(c, -c), z + Cplx(-c, c), z + Cplx(-c, -c)}) {
        const Escape e = point_escape(p.lambda, s, cap, meter);
        if (e.exhausted) return timeout();
        (e.escaped ? any_out : any_in) = true;
    }
    // dist(d, J) > 2^-n already allows 0
    if (any_in && any_out && !disk_escapes(p, z, delta * (1 + 1e-12), cap, &meter)) return finish(1, Band::InBetween);
    if (meter.remaining() == 0) return timeout();
    return finish(0, Band::InBetween);
}

namespace {

enum : unsigned char { kUnknown = 0, kEscaped = 1, kInside = 2, kFilled = 3 };

struct Lattice {
    long L = 0;  // indices -L..L
    std::size_t W = 0;
    double h = 0;
    std::vector<unsigned char> status;
    std::vector<unsigned char> far;

    std::size_t idx(long i, long j) const { return static_cast<std::size_t>((j + L) * static_cast<long>(W) + (i + L)); }
    Cplx point(long i, long j) const { return {static_cast<double>(i) * h, static_cast<double>(j) * h}; }
};

class Renderer {
public:
    Renderer(const Parameter& p, Lattice& lat, std::uint64_t cap, double delta, WorkMeter& meter)
        : p_(p), lat_(lat), cap_(cap), delta_(delta), meter_(meter) {}

    bool exhausted() const { return exhausted_; }

    void run() {
        struct Rect {
            long x0, y0, x1, y1;
        };
        std::vector<Rect> stack{{-lat_.L, -lat_.L, lat_.L, lat_.L}};
        while (!stack.empty() && !exhausted_) {
            const Rect r = stack.back();
            stack.pop_back();
            const long nx = r.x1 - r.x0 + 1, ny = r.y1 - r.y0 + 1;
            if (nx * ny <= 16) {
                pending_.clear();
                for (long j = r.y0; j <= r.y1; ++j) {
                    for (long i = r.x0; i <= r.x1; ++i) pending_.emplace_back(i, j);
                }
                eval_all();
                continue;
            }
            const Cplx c = 0.5 * (lat_.point(r.x0, r.y0) + lat_.point(r.x1, r.y1));
            const double rad = 0.5 * std::abs(lat_.point(r.x1, r.y1) - lat_.point(r.x0, r.y0)) + 2 * delta_;
            if (disk_escapes(p_, c, rad, cap_, &meter_)) {
                for (long j = r.y0; j <= r.y1; ++j) {
                    for (long i = r.x0; i <= r.x1; ++i) {
                        const std::size_t k = lat_.idx(i, j);
                        lat_.status[k] = kEscaped;
                        lat_.far[k] = 1;
                    }
                }
                continue;
            }
            if (meter_.remaining() == 0) {
                exhausted_ = true;
                break;
            }
            // boundary of the rectangle
            pending_.clear();
            for (long i = r.x0; i <= r.x1; ++i) {
                pending_.emplace_back(i, r.y0);
                pending_.emplace_back(i, r.y1);
            }
            for (long j = r.y0 + 1; j < r.y1; ++j) {
                pending_.emplace_back(r.x0, j);
                pending_.emplace_back(r.x1, j);
            }
            eval_all();
            bool all_inside = true;
            for (const auto& [i, j] : pending_) all_inside &= inside(lat_.status[lat_.idx(i, j)]);
            if (exhausted_) break;
            if (all_inside) {
                // K is full: a closed curve inside K bounds a region inside K
                for (long j = r.y0 + 1; j < r.y1; ++j) {
                    for (long i = r.x0 + 1; i < r.x1; ++i) {
                        unsigned char& s = lat_.status[lat_.idx(i, j)];
                        if (s == kUnknown) {
                            s = kFilled;
                            ++filled_;
                        }
                    }
                }
                continue;
            }
            const long xm = (r.x0 + r.x1) / 2, ym = (r.y0 + r.y1) / 2;
            // pushed in reverse so the lower-left quadrant runs first
            stack.push_back({xm, ym, r.x1, r.y1});
            stack.push_back({r.x0, ym, xm, r.y1});
            stack.push_back({xm, r.y0, r.x1, ym});
            stack.push_back({r.x0, r.y0, xm, ym});
        }
    }

    std::uint64_t filled() const { return filled_; }

private:
    static bool inside(unsigned char s) { return s == kInside || s == kFilled; }

    void eval_all() {
        std::size_t t = 0;
        while (t < pending_.size() && !exhausted_) {
            std::pair<long, long> ij[4];
            Cplx zs[4];
            std::size_t count = 0;
            for (; t < pending_.size() && count < 4; ++t) {
                const auto [i, j] = pending_[t];
                if (lat_.status[lat_.idx(i, j)] != kUnknown) continue;
                ij[count] = {i, j};
                zs[count++] = lat_.point(i, j);
            }
            if (count == 0) break;
            if (meter_.remaining() / 4 < cap_) {
                for (std::size_t l = 0; l < count; ++l) eval(ij[l].first, ij[l].second);
                continue;
            }
            bool esc[4];
            std::uint64_t used = 0;
            escape_batch(p_.lambda, zs, count, cap_, esc, used);
            meter_.charge(used);
            for (std::size_t l = 0; l < count; ++l) lat_.status[lat_.idx(ij[l].first, ij[l].second)] = esc[l] ? kEscaped : kInside;
        }
    }

    unsigned char eval(long i, long j) {
        unsigned char& s = lat_.status[lat_.idx(i, j)];
        if (s != kUnknown || exhausted_) return s;
        const Escape e = point_escape(p_.lambda, lat_.point(i, j), cap_, meter_);
        if (e.exhausted) {
            exhausted_ = true;
            return s;
        }
        s = e.escaped ? kEscaped : kInside;
        return s;
    }

    const Parameter& p_;
    Lattice& lat_;
    std::uint64_t cap_;
    double delta_;
    WorkMeter& meter_;
    bool exhausted_ = false;
    std::uint64_t filled_ = 0;
    std::vector<std::pair<long, long>> pending_;
};

}  // namespace

Rendering render(const Oracle& theta, std::size_t m, std::uint64_t budget, const RenderConfig& cfg) {
    if (m < 1) throw DomainError("render: m must be >= 1");
    if (m > 14) throw DomainError("render: m above 14 is out of range for the lattice");
    const auto t0 = std::chrono::steady_clock::now();
    WorkMeter meter(budget);
    Rendering out;
    out.m = m;
    out.theta = theta.description();
    out.stats.budget = budget;
    const int mi = static_cast<int>(m);
    const double delta = std::ldexp(1.0, -mi);
    const double h = std::ldexp(1.0, -(mi + 1));

    Lattice lat;
    lat.h = h;
    lat.L = static_cast<long>(std::ceil((2 + 2 * delta) / h));
    lat.W = static_cast<std::size_t>(2 * lat.L + 1);
    lat.status.assign(lat.W * lat.W, kUnknown);
    lat.far.assign(lat.W * lat.W, 0);
    out.width = lat.W;
    out.half = static_cast<double>(lat.L) * h;

    // lattice points of the 3-ball outside the box are far by containment
    const auto R3 = static_cast<long>(std::floor(kEscapeRadius / h));
    std::uint64_t outside_box = 0, in_ball = 0;
    for (long j = -R3; j <= R3; ++j) {
        const double y = static_cast<double>(j) * h;
        const auto xr = static_cast<long>(std::floor(std::sqrt(std::max(0.0, 9 - y * y)) / h));
        in_ball += static_cast<std::uint64_t>(2 * xr + 1);
        if (std::labs(j) > lat.L) {
            outside_box += static_cast<std::uint64_t>(2 * xr + 1);
        } else if (xr > lat.L) {
            outside_box += static_cast<std::uint64_t>(2 * (xr - lat.L));
        }
    }
    out.stats.pixels = in_ball;
    out.stats.far = outside_box;

    Parameter p;
    bool have_param = true;
    try {
        p = read_parameter(theta, kParameterBits, meter);
    } catch (const ResourceExhausted&) {
        have_param = false;
    }
    out.raster.assign(lat.W * lat.W, 0);
    if (!have_param) {
        out.stats.incomplete = true;
        out.stats.work_used = meter.used();
        return out;
    }
    const std::uint64_t cap = cfg.point_iterations ? cfg.point_iterations : default_iterations(m);
    const JuliaPoints jp = julia_points(p, near_config(m, cfg.preimage_depth, cfg.chain_length), meter);
    out.stats.julia_points = jp.points.size();

    Renderer rd(p, lat, cap, delta, meter);
    rd.run();
    out.stats.filled_interior = rd.filled();
    bool incomplete = rd.exhausted();

    const Dyadic radius = numerics::pow2(-mi);
    for (long j = lat.L; j >= -lat.L && !incomplete; --j) {
        for (long i = -lat.L; i <= lat.L; ++i) {
            const Cplx z = lat.point(i, j);
            if (std::norm(z) > 9) continue;
            const std::size_t k = lat.idx(i, j);
            int bit = 0;
            Band band = Band::InBetween;
            if (lat.far[k] || std::abs(z) - 2 > 2 * delta * (1 + 1e-12) + 1e-15) {
                band = Band::Far;
            } else if (jp.distance_bound(z, delta) < delta) {
                band = Band::Near;
                bit = 1;
            } else {
                const unsigned char s = lat.status[k];
                if (s == kEscaped && disk_escapes(p, z, 2 * delta * (1 + 1e-12), cap, &meter)) {
                    band = Band::Far;
                } else {
                    const bool self_in = s == kInside || s == kFilled;
                    bool mixed = false;
                    for (const auto& [di, dj] : {std::pair{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
                        const long a = i + di, b = j + dj;
                        bool nin = false;
                        if (std::labs(a) <= lat.L && std::labs(b) <= lat.L) {
                            const unsigned char t = lat.status[lat.idx(a, b)];
                            nin = t == kInside || t == kFilled;
                        }
                        mixed |= nin != self_in;
                    }
                    bit = (mixed && std::abs(z) <= 2) ? 1 : 0;
                    if (bit && s == kEscaped && disk_escapes(p, z, delta * (1 + 1e-12), cap, &meter)) bit = 0;
                }
                if (meter.remaining() == 0) incomplete = true;
            }
            switch (band) {
                case Band::Far:
                    ++out.stats.far;
                    break;
                case Band::Near:
                    ++out.stats.near;
                    break;
                case Band::InBetween:
                    ++out.stats.in_between;
                    break;
            }
            if (bit) {
                ++out.stats.bit_one;
                out.raster[static_cast<std::size_t>(lat.L - j) * lat.W + static_cast<std::size_t>(i + lat.L)] = 1;
                out.balls.add({{Dyadic(i, -(mi + 1)), Dyadic(j, -(mi + 1))}, radius});
            }
        }
    }
    out.stats.incomplete = incomplete;
    out.stats.work_used = meter.used();
    out.stats.oracle_reads = theta.reads();
    out.stats.max_oracle_position = theta.max_read().value_or(0);
    out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::string to_pgm(const Rendering& r) {
    std::string out = "P5\n" + std::to_string(r.width) + " " + std::to_string(r.width) + "\n255\n";
    out.reserve(out.size() + r.raster.size());
    for (unsigned char b : r.raster) out.push_back(static_cast<char>(b ? 0 : 255));
    return out;
}

}  // namespace sj::julia
