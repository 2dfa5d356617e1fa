#include "sj/adversary/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <regex>
#include <sstream>

#include "sj/julia/julia.hpp"
#include "sj/siegel/conformal.hpp"

namespace sj::adversary {

namespace {

using Cplx = std::complex<double>;

Dyadic round_dyadic(double v, int frac_bits, numerics::Round mode) {
    return Dyadic::from_double(v).round_fixed(frac_bits, mode);
}

class AlwaysTimeout : public Strategy {
public:
    std::string name() const override { return "always-timeout"; }
    RunResult run(const Oracle&, std::size_t, std::uint64_t) const override { return {}; }
};

class ConstantOutput : public Strategy {
public:
    explicit ConstantOutput(int e) : e_(e) {
        if (e < 0 || e > 60) throw DomainError("constant-output: exponent must be in [0, 60]");
    }
    std::string name() const override { return "constant-output"; }
    json params() const override { return {{"e", e_}}; }
    RunResult run(const Oracle&, std::size_t, std::uint64_t T) const override {
        if (T < 1) return {};
        BallUnion S;
        S.add({{Dyadic(0), Dyadic(0)}, numerics::pow2(-e_)});
        return {S, 1};
    }

private:
    int e_;
};

// Common continued-fraction digits of every number in [lo, hi], 0 < lo.
std::vector<Digit> common_prefix(mpq_class lo, mpq_class hi, std::size_t max_digits) {
    std::vector<Digit> out;
    while (out.size() < max_digits) {
        if (sgn(lo) <= 0 || hi >= 1) break;
        const mpq_class ilo = 1 / hi, ihi = 1 / lo;
        const mpz_class a = ilo.get_num() / ilo.get_den();
        const mpz_class b = ihi.get_num() / ihi.get_den();
        // an endpoint 1/a would have two expansions
        if (a != b || a * ilo.get_den() == ilo.get_num() || !a.fits_ulong_p()) break;
        out.push_back(a.get_ui());
        lo = ilo - mpq_class(a);
        hi = ihi - mpq_class(a);
    }
    return out;
}

class HonestBounded : public Strategy {
public:
    explicit HonestBounded(std::size_t bits) : bits_(bits) {
        if (bits < 1 || bits > 60) throw DomainError("honest-bounded-renderer: bits must be in [1, 60]");
    }
    std::string name() const override { return "honest-bounded-renderer"; }
    json params() const override { return {{"bits", bits_}}; }

    RunResult run(const Oracle& theta, std::size_t, std::uint64_t T) const override {
        std::uint64_t used = bits_;
        if (used + 2 > T) return {};
        const Dyadic d = theta.query(bits_);
        mpz_class num = d.mantissa(), den = 1;
        if (d.exponent() >= 0) num <<= static_cast<mp_bitcnt_t>(d.exponent());
        else den <<= static_cast<mp_bitcnt_t>(-d.exponent());
        const mpq_class w(mpz_class(1), mpz_class(1) << static_cast<mp_bitcnt_t>(bits_));
        mpq_class c(num, den);
        c.canonicalize();
        const std::size_t room = static_cast<std::size_t>(std::min<std::uint64_t>(T - used - 2, 64));
        const std::vector<Digit> prefix = common_prefix(c - w, c + w, room);
        used += prefix.size();

        const CFNumber omega = CFNumber::noble(prefix);
        const double t = cf::cf_value(omega, 64).to_double();
        const Cplx lambda = std::polar(1.0, 2 * M_PI * t);
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(T - used - 1, 1u << 20));
        std::vector<Cplx> orbit{-lambda / 2.0};
        for (std::size_t i = 0; i < count; ++i) {
            const Cplx z = orbit.back();
            orbit.push_back(z * z + lambda * z);
        }
        used += count + 1;

        const std::vector<std::size_t> order = siegel::angular_order(omega, count);
        double gap = 0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            gap = std::max(gap, std::abs(orbit[order[k]] - orbit[order[(k + 1) % order.size()]]));
        }
        const Dyadic rad = round_dyadic(0.55 * gap + std::ldexp(1.0, -20), 30, numerics::Round::Up);
        BallUnion S;
        for (const Cplx& z : orbit) {
            S.add({{round_dyadic(z.real(), 30, numerics::Round::Nearest),
                    round_dyadic(z.imag(), 30, numerics::Round::Nearest)},
                   rad});
        }
        return {S, used};
    }

private:
    std::size_t bits_;
};

class JuliaRenderer : public Strategy {
public:
    std::string name() const override { return "julia-renderer"; }
    RunResult run(const Oracle& theta, std::size_t m, std::uint64_t T) const override {
        if (m < 1 || m > 14) return {};
        julia::Rendering r = julia::render(theta, m, T);
        if (r.stats.incomplete) return {};
        return {std::move(r.balls), r.stats.work_used};
    }
};

}  // namespace

std::unique_ptr<Strategy> always_timeout() { return std::make_unique<AlwaysTimeout>(); }
std::unique_ptr<Strategy> constant_output(int e) { return std::make_unique<ConstantOutput>(e); }
std::unique_ptr<Strategy> honest_bounded_renderer(std::size_t bits) { return std::make_unique<HonestBounded>(bits); }
std::unique_ptr<Strategy> julia_renderer() { return std::make_unique<JuliaRenderer>(); }

std::vector<std::string> strategy_names() {
    return {"always-timeout", "constant-output", "honest-bounded-renderer", "julia-renderer"};
}

std::unique_ptr<Strategy> make_strategy(const json& spec) {
    std::string name;
    json params = json::object();
    if (spec.is_string()) {
        name = spec.get<std::string>();
    } else if (spec.is_object() && spec.contains("name")) {
        name = spec.at("name").get<std::string>();
        if (spec.contains("params")) params = spec.at("params");
    } else {
        throw DomainError("strategy: expected a name or {\"name\": ..., \"params\": ...}");
    }
    if (name == "always-timeout") return always_timeout();
    if (name == "constant-output") return constant_output(params.value("e", 10));
    if (name == "honest-bounded-renderer") return honest_bounded_renderer(params.value("bits", std::size_t{4}));
    if (name == "julia-renderer") return julia_renderer();
    throw DomainError("strategy: unknown name '" + name + "'");
}

json strategy_spec(const Strategy& s) { return {{"name", s.name()}, {"params", s.params()}}; }

HardnessSchedule HardnessSchedule::power(double coefficient, double exponent) {
    // floor(c k^p) is strictly increasing once c >= 1 and p >= 1
    if (!(coefficient >= 1) || !(exponent >= 1) || exponent > 8)
        throw DomainError("hardness schedule: need coefficient >= 1 and 1 <= exponent <= 8");
    HardnessSchedule h;
    h.coefficient_ = coefficient;
    h.exponent_ = exponent;
    return h;
}

HardnessSchedule HardnessSchedule::table(std::vector<std::uint64_t> values) {
    if (values.empty()) throw DomainError("hardness schedule: empty table");
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] <= values[i - 1]) throw DomainError("hardness schedule: table must be strictly increasing");
    }
    HardnessSchedule h;
    h.table_ = std::move(values);
    return h;
}

HardnessSchedule HardnessSchedule::parse(const json& spec) {
    if (spec.is_array()) return table(spec.get<std::vector<std::uint64_t>>());
    if (spec.is_object()) {
        if (spec.contains("table")) return table(spec.at("table").get<std::vector<std::uint64_t>>());
        return power(spec.value("coefficient", 1.0), spec.value("exponent", 2.0));
    }
    if (!spec.is_string()) throw DomainError("hardness schedule: expected a table or an expression");
    const std::string s = spec.get<std::string>();
    static const std::regex re(R"(^\s*(?:([0-9]+(?:\.[0-9]+)?)\s*\*\s*)?k\s*(?:\^\s*([0-9]+(?:\.[0-9]+)?))?\s*$)");
    std::smatch mt;
    if (!std::regex_match(s, mt, re)) throw DomainError("hardness schedule: cannot parse '" + s + "'");
    const double c = mt[1].matched ? std::stod(mt[1].str()) : 1.0;
    const double p = mt[2].matched ? std::stod(mt[2].str()) : 1.0;
    return power(c, p);
}

std::uint64_t HardnessSchedule::operator()(std::uint64_t k) const {
    if (!table_.empty()) {
        if (k >= table_.size()) throw DomainError("hardness schedule: k = " + std::to_string(k) + " beyond the table");
        return table_[k];
    }
    const long double v = static_cast<long double>(coefficient_) *
                          std::pow(static_cast<long double>(k), static_cast<long double>(exponent_));
    if (v >= 1.8e19L) throw DomainError("hardness schedule: value overflows");
    return static_cast<std::uint64_t>(std::floor(v + 1e-9L));
}

json HardnessSchedule::to_json() const {
    if (!table_.empty()) return {{"table", table_}};
    return {{"coefficient", coefficient_}, {"exponent", exponent_}};
}

std::size_t precision_index(double ell) {
    if (!(ell > 0) || !(ell < 1)) throw DomainError("precision_index: ell must be in (0, 1)");
    return 2 * static_cast<std::size_t>(std::ceil(-std::log2(ell))) + 1;
}

std::size_t cylinder_depth(const CFNumber& gamma, std::size_t n) {
    // width of the depth-m cylinder is 1/(q_m (q_m + q_{m-1})); need
    // 7 q_m (q_m + q_{m-1}) > 8 * 2^n
    const mpz_class target = mpz_class(8) << static_cast<mp_bitcnt_t>(n);
    mpz_class q_prev = 0, q = 1;
    for (std::size_t m = 0;; ++m) {
        if (7 * q * (q + q_prev) > target) return m;
        if (gamma.is_finite() && m >= gamma.length())
            throw DomainError("cylinder_depth: finite expansion is too short");
        const mpz_class next = mpz_class(std::to_string(gamma.digit(m))) * q + q_prev;
        q_prev = q;
        q = next;
    }
}

Outcome simulate_budgeted(const Strategy& s, const CFNumber& gamma, std::size_t m, std::uint64_t T) {
    if (T < 1) throw DomainError("simulate_budgeted: T must be positive");
    const Oracle theta = cf::cf_oracle(gamma);
    Outcome out;
    out.strategy = s.name();
    out.result = s.run(theta, m, T);
    if (out.result.work_used > T) {
        throw Disqualified(s.name() + " used " + std::to_string(out.result.work_used) + " work units of " +
                           std::to_string(T));
    }
    out.transcript = theta.transcript();
    out.read_log = theta.read_log();
    if (const auto mx = theta.max_read()) {
        out.max_read = *mx;
        out.m0 = cylinder_depth(gamma, *mx);
    }
    return out;
}

namespace {

struct Disk {
    Cplx c;
    double r;
};

// Douglas-Peucker on an open chain a[i..j], marking kept vertices.
void simplify_chain(const std::vector<Cplx>& a, std::size_t i, std::size_t j, double tol, std::vector<char>& keep) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{i, j}};
    while (!stack.empty()) {
        const auto [s, e] = stack.back();
        stack.pop_back();
        if (e <= s + 1) continue;
        const Cplx d = a[e % a.size()] - a[s];
        const double len = std::abs(d);
        double best = -1;
        std::size_t at = s;
        for (std::size_t k = s + 1; k < e; ++k) {
            const Cplx v = a[k] - a[s];
            const double dist = len > 0 ? std::fabs((std::conj(d) * v).imag()) / len : std::abs(v);
            if (dist > best) {
                best = dist;
                at = k;
            }
        }
        if (best > tol) {
            keep[at] = 1;
            stack.push_back({s, at});
            stack.push_back({at, e});
        }
    }
}

std::vector<Cplx> simplify_closed(const std::vector<Cplx>& a, double tol) {
    if (a.size() < 8) return a;
    std::size_t far = 0;
    for (std::size_t k = 1; k < a.size(); ++k) {
        if (std::abs(a[k] - a[0]) > std::abs(a[far] - a[0])) far = k;
    }
    std::vector<char> keep(a.size(), 0);
    keep[0] = keep[far] = 1;
    simplify_chain(a, 0, far, tol, keep);
    simplify_chain(a, far, a.size(), tol, keep);
    std::vector<Cplx> out;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (keep[k]) out.push_back(a[k]);
    }
    return out;
}

struct Traced {
    std::vector<Cplx> polygon;
    double pitch = 0;
    bool unbounded = false;
    bool covered = false;
};

Traced trace_component(const std::vector<Disk>& disks, double R, std::size_t W) {
    Traced t;
    const double h = 2 * R / static_cast<double>(W);
    t.pitch = h;
    const long Wl = static_cast<long>(W);
    auto cell_x = [&](long i) { return -R + static_cast<double>(i) * h; };
    std::vector<unsigned char> blocked(W * W, 0);
    for (const Disk& d : disks) {
        const long i0 = std::max(0L, static_cast<long>(std::floor((d.c.real() - d.r + R) / h)));
        const long i1 = std::min(Wl - 1, static_cast<long>(std::floor((d.c.real() + d.r + R) / h)));
        const long j0 = std::max(0L, static_cast<long>(std::floor((d.c.imag() - d.r + R) / h)));
        const long j1 = std::min(Wl - 1, static_cast<long>(std::floor((d.c.imag() + d.r + R) / h)));
        for (long j = j0; j <= j1; ++j) {
            for (long i = i0; i <= i1; ++i) {
                // nearest point of the cell to the center
                const double x = std::clamp(d.c.real(), cell_x(i), cell_x(i + 1));
                const double y = std::clamp(d.c.imag(), cell_x(j), cell_x(j + 1));
                if (std::hypot(x - d.c.real(), y - d.c.imag()) <= d.r) blocked[j * W + i] = 1;
            }
        }
    }
    const long oi = static_cast<long>(std::floor(R / h)), oj = oi;
    if (blocked[oj * W + oi]) {
        t.covered = true;
        return t;
    }
    // 4-connected fill from the origin cell
    std::vector<unsigned char> in(W * W, 0);
    std::vector<long> stack{oj * Wl + oi};
    in[oj * W + oi] = 1;
    while (!stack.empty()) {
        const long k = stack.back();
        stack.pop_back();
        const long i = k % Wl, j = k / Wl;
        if (i == 0 || j == 0 || i == Wl - 1 || j == Wl - 1) {
            t.unbounded = true;
            return t;
        }
        for (const long nb : {k - 1, k + 1, k - Wl, k + Wl}) {
            if (!in[nb] && !blocked[nb]) {
                in[nb] = 1;
                stack.push_back(nb);
            }
        }
    }
    // fill holes: everything not reachable from the border through cells
    // outside the component
    std::vector<unsigned char> outside(W * W, 0);
    for (long k = 0; k < Wl; ++k) {
        for (const long c : {k, (Wl - 1) * Wl + k, k * Wl, k * Wl + Wl - 1}) {
            if (!outside[c]) {
                outside[c] = 1;
                stack.push_back(c);
            }
        }
    }
    while (!stack.empty()) {
        const long k = stack.back();
        stack.pop_back();
        const long i = k % Wl, j = k / Wl;
        const long nbs[4] = {i > 0 ? k - 1 : -1, i < Wl - 1 ? k + 1 : -1, j > 0 ? k - Wl : -1,
                             j < Wl - 1 ? k + Wl : -1};
        for (const long nb : nbs) {
            if (nb >= 0 && !outside[nb] && !in[nb]) {
                outside[nb] = 1;
                stack.push_back(nb);
            }
        }
    }
    auto inside = [&](long i, long j) {
        return i >= 0 && j >= 0 && i < Wl && j < Wl && !outside[j * W + static_cast<std::size_t>(i)];
    };
    // Trace the boundary counterclockwise (interior on the left) along
    // cell edges. Vertices are grid corners; directions 0 E, 1 N, 2 W, 3 S.
    // At a corner shared by two diagonal interior cells turn left, so the
    // component is read as 4-connected.
    long si = oi;
    while (inside(si + 1, oj)) ++si;
    // right edge of cell (si, oj) going north: from corner (si+1, oj)
    const long sx = si + 1, sy = oj;
    long x = sx, y = sy;
    int dir = 1;
    const long dx[4] = {1, 0, -1, 0}, dy[4] = {0, 1, 0, -1};
    // the cell to the left of an edge leaving corner (x, y) in direction d
    auto left_cell = [&](long cx, long cy, int d) -> std::pair<long, long> {
        switch (d) {
            case 0: return {cx, cy};
            case 1: return {cx - 1, cy};
            case 2: return {cx - 1, cy - 1};
            default: return {cx, cy - 1};
        }
    };
    auto right_cell = [&](long cx, long cy, int d) -> std::pair<long, long> {
        switch (d) {
            case 0: return {cx, cy - 1};
            case 1: return {cx, cy};
            case 2: return {cx - 1, cy};
            default: return {cx - 1, cy - 1};
        }
    };
    auto is_boundary_edge = [&](long cx, long cy, int d) {
        const auto [li, lj] = left_cell(cx, cy, d);
        const auto [ri, rj] = right_cell(cx, cy, d);
        return inside(li, lj) && !inside(ri, rj);
    };
    const std::size_t limit = 8 * W * W;
    for (std::size_t steps = 0; steps < limit; ++steps) {
        const double mx = -R + (static_cast<double>(x) + 0.5 * static_cast<double>(dx[dir])) * h;
        const double my = -R + (static_cast<double>(y) + 0.5 * static_cast<double>(dy[dir])) * h;
        t.polygon.emplace_back(mx, my);
        x += dx[dir];
        y += dy[dir];
        // left turn first, then straight, then right
        int nd = -1;
        for (const int turn : {1, 0, 3}) {
            const int d = (dir + turn) % 4;
            if (is_boundary_edge(x, y, d)) {
                nd = d;
                break;
            }
        }
        if (nd < 0) throw InvariantViolation("complement_radius: boundary trace lost");
        dir = nd;
        if (x == sx && y == sy && dir == 1) return t;
    }
    throw InvariantViolation("complement_radius: boundary trace did not close");
}

}  // namespace

std::optional<double> complement_radius(const BallUnion& S, std::size_t grid) {
    if (grid < 16) throw DomainError("complement_radius: grid too small");
    std::vector<Disk> disks;
    double R = 0, min_r = std::numeric_limits<double>::infinity();
    for (const auto& b : S.balls()) {
        const Disk d{{b.center.x.to_double(), b.center.y.to_double()}, b.radius.to_double()};
        if (std::abs(d.c) <= d.r) return 0.0;
        R = std::max(R, std::abs(d.c) + d.r);
        if (d.r > 0) min_r = std::min(min_r, d.r);
        disks.push_back(d);
    }
    if (disks.empty()) return std::nullopt;
    R = R * 1.05 + 1e-9;
    // at least `grid` cells a side, two per smallest radius, at most 4 grid
    const auto fine = static_cast<std::size_t>(std::min(4.0 * static_cast<double>(grid), std::ceil(4 * R / min_r)));
    for (std::size_t W = std::max(grid, fine); W <= 4 * grid; W *= 2) {
        Traced t = trace_component(disks, R, W);
        if (t.unbounded) return std::nullopt;
        if (t.covered) continue;
        std::vector<Cplx> poly = simplify_closed(t.polygon, t.pitch / 4);
        try {
            return siegel::conformal_radius(siegel::JordanDomain::polygon(poly), 1e-4, 0, 1 << 15).value.to_double();
        } catch (const DomainError&) {
            return siegel::conformal_radius(siegel::JordanDomain::polygon(t.polygon), 1e-4, 0, 1 << 16)
                .value.to_double();
        }
    }
    // the cell about 0 stays blocked: the component is below grid scale
    return 0.0;
}

namespace {

json radius_config_json(const siegel::RadiusConfig& c) {
    return {{"K", c.K},           {"safety", c.safety}, {"max_points", c.max_points},
            {"min_level", c.min_level}, {"bits", c.bits},     {"tau_tol", c.tau_tol}};
}

siegel::RadiusConfig radius_config_from(const json& j) {
    siegel::RadiusConfig c;
    c.K = j.at("K").get<double>();
    c.safety = j.at("safety").get<double>();
    c.max_points = j.at("max_points").get<std::size_t>();
    c.min_level = j.at("min_level").get<std::size_t>();
    c.bits = j.at("bits").get<std::size_t>();
    c.tau_tol = j.at("tau_tol").get<double>();
    return c;
}

json config_json(const ConstructionConfig& c) {
    return {{"radius", radius_config_json(c.radius)},
            {"radius_tol", c.radius_tol},
            {"phi_tol", c.phi_tol},
            {"bump", {{"max_N", c.bump.max_N}, {"max_m", c.bump.max_m}, {"max_evaluations", c.bump.max_evaluations}}}};
}

ConstructionConfig config_from(const json& j) {
    ConstructionConfig c;
    c.radius = radius_config_from(j.at("radius"));
    c.radius_tol = j.at("radius_tol").get<double>();
    c.phi_tol = j.at("phi_tol").get<double>();
    const json& b = j.at("bump");
    c.bump.max_N = b.at("max_N").get<Digit>();
    c.bump.max_m = b.at("max_m").get<std::size_t>();
    c.bump.max_evaluations = b.at("max_evaluations").get<std::size_t>();
    return c;
}

double radius_of(const CFNumber& g, const ConstructionConfig& cfg) {
    return siegel::siegel_radius(g, cfg.radius_tol, cfg.radius).value.to_double();
}

double phi_of(const CFNumber& g, const ConstructionConfig& cfg) { return cf::yoccoz_phi(g, cfg.phi_tol).value(); }

std::vector<Digit> digits_of(const CFNumber& g, std::size_t n) {
    std::vector<Digit> d;
    for (std::size_t i = 0; i < n; ++i) d.push_back(g.digit(i));
    return d;
}

bool is_prefix(const std::vector<Digit>& a, const std::vector<Digit>& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

json transcript_json(const std::map<std::size_t, Dyadic>& t) {
    json out = json::array();
    for (const auto& [n, d] : t) out.push_back({{"n", n}, {"answer", d.to_string()}});
    return out;
}

std::map<std::size_t, Dyadic> transcript_from(const json& j) {
    std::map<std::size_t, Dyadic> t;
    for (const auto& e : j) t[e.at("n").get<std::size_t>()] = Dyadic::parse(e.at("answer").get<std::string>());
    return t;
}

std::string output_text(const RunResult& r) { return r.output ? r.output->serialize() : std::string(); }

// Answers valid for gamma, and the same run again on the recorded answers
// with gamma behind them.
struct Fooling {
    bool answers_valid = true;
    bool replay_identical = true;
    bool fresh_identical = true;
};

Fooling check_fooling(const Strategy& s, const Outcome& out, const CFNumber& gamma, std::size_t m, std::uint64_t T) {
    Fooling f;
    const auto approx = [&gamma](std::size_t bits) { return cf::cf_value(gamma, bits); };
    for (const auto& [n, d] : out.transcript) {
        if (!numerics::valid_answer(approx, n, d)) f.answers_valid = false;
    }
    const Oracle replay = Oracle::replay(out.transcript, cf::cf_oracle(gamma));
    const RunResult again = s.run(replay, m, T);
    f.replay_identical = again.work_used == out.result.work_used && output_text(again) == output_text(out.result) &&
                         again.output.has_value() == out.result.output.has_value() &&
                         replay.read_log() == out.read_log;
    const Oracle fresh = cf::cf_oracle(gamma);
    const RunResult other = s.run(fresh, m, T);
    f.fresh_identical = other.work_used == out.result.work_used && output_text(other) == output_text(out.result) &&
                        other.output.has_value() == out.result.output.has_value() && fresh.read_log() == out.read_log;
    return f;
}

struct WindowBump {
    std::size_t position = 0;
    Digit N = 0;
    CFNumber beta;
    double r = 0;
    std::size_t evaluations = 0;
};

// A digit N >= 2 at the first position after `core` (or later) with
// lo < r(beta) < hi and Phi(beta) > Phi(omega). At a fixed position r(beta)
// decreases with N, so N is found by doubling and bisection on the screened
// radius and then confirmed.
WindowBump bump_into_window(const std::vector<Digit>& core, double lo, double hi, const ConstructionConfig& cfg) {
    if (!(lo < hi)) throw DomainError("bump_into_window: empty window");
    const CFNumber omega = CFNumber::noble(core);
    const cf::PhiValue phi_omega = cf::yoccoz_phi(omega, cfg.phi_tol);
    WindowBump w;
    auto screened = [&](std::size_t pos, Digit N) -> double {
        if (w.evaluations >= cfg.bump.max_evaluations)
            throw ResourceExhausted("bump_into_window: evaluation cap reached");
        ++w.evaluations;
        try {
            return siegel::radius_value(cf::digit_bump(omega, pos, N), cfg.radius.max_points);
        } catch (const ResourceExhausted&) {
            return -1;
        }
    };
    auto confirm = [&](std::size_t pos, Digit N) {
        const CFNumber beta = cf::digit_bump(omega, pos, N);
        const double r = radius_of(beta, cfg);
        if (!(r > lo && r < hi)) return false;
        if (!numerics::certainly_less(phi_omega.enclosure(), cf::yoccoz_phi(beta, cfg.phi_tol).enclosure()))
            return false;
        w.position = pos;
        w.N = N;
        w.beta = beta;
        w.r = r;
        return true;
    };
    for (std::size_t m = 1; m <= cfg.bump.max_m; ++m) {
        const std::size_t pos = core.size() - 1 + m;
        Digit a = 2;
        double ra = screened(pos, a);
        if (ra < 0) break;
        // too strong already; a deeper digit moves r less
        if (ra <= lo) continue;
        if (ra < hi) {
            if (confirm(pos, a)) return w;
            continue;
        }
        Digit b = a;
        double rb = ra;
        while (rb >= hi && b < cfg.bump.max_N) {
            a = b;
            b = std::min<Digit>(2 * b, cfg.bump.max_N);
            rb = screened(pos, b);
            if (rb < 0) break;
        }
        // even max_N does not reach the window here, nor deeper
        if (rb >= hi) break;
        while (rb <= lo && b - a > 1) {
            const Digit c = a + (b - a) / 2;
            const double rc = screened(pos, c);
            if (rc < 0) break;
            if (rc >= hi) a = c;
            else {
                b = c;
                rb = rc;
            }
        }
        if (rb > lo && rb < hi && confirm(pos, b)) return w;
    }
    throw ResourceExhausted("bump_into_window: no digit bump lands in the window");
}

// distance from x to [a, b]
double gap_to(double x, double a, double b) { return x < a ? a - x : (x > b ? x - b : 0.0); }

}  // namespace

AdversaryState init_state(const ConstructionConfig& cfg) {
    AdversaryState st;
    st.prefix = {1};
    st.r = radius_of(st.gamma(), cfg);
    if (!(st.r < 2)) throw InvariantViolation("init_state: r(gamma_0) >= 2");
    st.l = st.r / 2;
    st.ell = st.r - st.l;
    st.phi = phi_of(st.gamma(), cfg);
    st.phi_floor = st.phi;
    return st;
}

AdversaryState induction_step(const AdversaryState& st, const Strategy& s, const HardnessSchedule& h,
                              const ConstructionConfig& cfg) {
    const CFNumber gamma = st.gamma();
    const double ell = st.ell / 20;
    const std::size_t m = precision_index(ell);
    const std::uint64_t T = h(m);
    const Outcome out = simulate_budgeted(s, gamma, m, T);

    json e;
    e["step"] = st.step + 1;
    e["strategy"] = strategy_spec(s);
    e["m"] = m;
    e["T"] = T;
    e["work_used"] = out.result.work_used;
    e["timeout"] = !out.result.output.has_value();
    e["reads"] = out.read_log;
    e["transcript"] = transcript_json(out.transcript);
    e["max_read"] = out.max_read;
    e["m0"] = out.m0;
    e["output"] = output_text(out.result);
    e["prefix_before"] = st.prefix;
    e["gamma_before"] = gamma.to_literal();
    e["l_before"] = st.l;
    e["r_before"] = st.r;
    e["ell_before"] = st.ell;
    e["phi_before"] = st.phi;
    e["ell"] = ell;
    e["precision_half_ell_sq"] = ell * ell / 2;
    e["precision_ell_sq"] = ell * ell;

    std::string kase = "1";
    std::optional<double> rS;
    if (out.result.output) {
        rS = complement_radius(*out.result.output);
        if (!rS) {
            e["improper"] = true;
        } else if (st.r - ell > *rS + 8 * ell) {
            kase = "2a";
        } else if (st.l + 2 * ell < *rS - 8 * ell) {
            kase = "2b";
        } else {
            throw InvariantViolation("induction_step: neither subcase holds for r(S) = " + std::to_string(*rS));
        }
    }
    e["case"] = kase;
    e["r_S"] = rS ? json(*rS) : json(nullptr);

    const std::size_t base_len = std::max(st.prefix.size(), out.m0);
    std::vector<Digit> core = digits_of(gamma, base_len);
    double r1 = st.r;
    if (kase == "2b") {
        const double lo = st.l + ell, hi = std::min(*rS - 8 * ell, st.r);
        const WindowBump b = bump_into_window(core, lo, hi, cfg);
        core = digits_of(b.beta, b.position + 1);
        r1 = b.r;
        e["bump"] = {{"position", b.position}, {"N", b.N}, {"window", {lo, hi}}, {"evaluations", b.evaluations}};
    }
    const double eps = std::ldexp(1.0, -static_cast<int>(st.step));
    const cf::TailSafety ts = cf::tail_safety(core, eps);
    e["tail_eps"] = eps;
    e["tail_m0"] = ts.m0;
    e["core"] = core;

    AdversaryState next;
    next.prefix = core;
    next.prefix.insert(next.prefix.end(), ts.m0, 1);
    next.r = r1;
    next.l = r1 - ell;
    next.ell = ell;
    next.phi_floor = st.phi;
    next.phi = kase == "2b" ? phi_of(next.gamma(), cfg) : st.phi;
    next.step = st.step + 1;

    const Fooling f = check_fooling(s, out, next.gamma(), m, T);
    e["fooling"] = {{"answers_valid", f.answers_valid},
                    {"replay_identical", f.replay_identical},
                    {"fresh_identical", f.fresh_identical}};
    if (rS) e["separation"] = gap_to(*rS, next.l, next.r);

    e["prefix_after"] = next.prefix;
    e["gamma_after"] = next.gamma().to_literal();
    e["l"] = next.l;
    e["r"] = next.r;
    e["phi"] = next.phi;
    e["phi_slack"] = next.phi - st.phi;

    next.certificate_log = st.certificate_log;
    next.certificate_log.push_back(e);
    return next;
}

Construction run_construction(const std::vector<std::unique_ptr<Strategy>>& roster, std::size_t steps,
                              const HardnessSchedule& h, const ConstructionConfig& cfg) {
    if (steps > roster.size()) throw DomainError("run_construction: more steps than roster entries");
    Construction c;
    AdversaryState st = init_state(cfg);
    c.timeline.push_back({0, "init", st.l, st.r, st.ell, st.phi, 0});
    json initial = {{"prefix", st.prefix}, {"gamma", st.gamma().to_literal()}, {"r", st.r},
                    {"l", st.l},           {"ell", st.ell},                    {"phi", st.phi}};
    json roster_json = json::array();
    for (const auto& s : roster) roster_json.push_back(strategy_spec(*s));

    auto assemble = [&](const AdversaryState& s) {
        json limit = json::array();
        // Phi + log r of each gamma_i against the recorded parts
        std::vector<std::pair<std::vector<Digit>, double>> seq{{initial["prefix"].get<std::vector<Digit>>(),
                                                                initial["r"].get<double>()}};
        for (const auto& e : s.certificate_log)
            seq.push_back({e["prefix_after"].get<std::vector<Digit>>(), e["r"].get<double>()});
        for (std::size_t i = 0; i < seq.size(); ++i) {
            const siegel::PhiLogR pl = siegel::phi_logr(CFNumber::noble(seq[i].first), cfg.radius_tol, cfg.radius);
            limit.push_back({{"step", i}, {"phi_plus_log_r", pl.value.to_double()},
                             {"error", pl.value.rad_double()}, {"log_r", std::log(seq[i].second)}});
        }
        return json{{"version", SJ_VERSION},
                    {"config", config_json(cfg)},
                    {"h", h.to_json()},
                    {"roster", roster_json},
                    {"steps_requested", steps},
                    {"initial", initial},
                    {"steps", s.certificate_log},
                    {"phi_log_r", limit},
                    {"final", {{"prefix", s.prefix}, {"gamma", s.gamma().to_literal()}, {"l", s.l}, {"r", s.r},
                               {"ell", s.ell}, {"phi", s.phi}}}};
    };

    for (std::size_t i = 0; i < steps; ++i) {
        st = induction_step(st, *roster[i], h, cfg);
        const json& e = st.certificate_log.back();
        c.timeline.push_back({st.step, e["case"].get<std::string>(), st.l, st.r, st.ell, st.phi,
                              e["work_used"].get<std::uint64_t>()});
    }
    c.state = st;
    c.gamma = st.gamma();
    c.certificate = assemble(st);
    return c;
}

std::string timeline_csv(const std::vector<TimelineRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "step,case,l,r,ell,phi,work_used\n";
    for (const auto& r : rows) {
        os << r.step << ',' << r.kase << ',' << r.l << ',' << r.r << ',' << r.ell << ',' << r.phi << ','
           << r.work_used << '\n';
    }
    return os.str();
}

Verification verify_certificate(const json& cert) {
    Verification v;
    auto fail = [&](const std::string& what) {
        v.ok = false;
        v.failures.push_back(what);
    };
    auto near = [](double a, double b, double tol) { return std::fabs(a - b) <= tol; };
    try {
        ConstructionConfig cfg = config_from(cert.at("config"));
        ConstructionConfig fresh = cfg;
        fresh.radius.bits = cfg.radius.bits + 16;
        const HardnessSchedule h = HardnessSchedule::parse(cert.at("h"));
        const double rtol = 1e-7, ptol = 1e-8;

        const json& init = cert.at("initial");
        auto prefix = init.at("prefix").get<std::vector<Digit>>();
        if (prefix != std::vector<Digit>{1}) fail("initial: prefix is not [1]");
        double r = init.at("r").get<double>(), l = init.at("l").get<double>(), ell = init.at("ell").get<double>();
        double phi = init.at("phi").get<double>();
        if (!near(r, radius_of(CFNumber::noble(prefix), fresh), rtol)) fail("initial: r does not recompute");
        if (!(r < 2)) fail("initial: r >= 2");
        if (l != r / 2 || ell != r - l) fail("initial: l or ell");
        if (!near(phi, phi_of(CFNumber::noble(prefix), cfg), ptol)) fail("initial: phi does not recompute");

        std::size_t last_m = 0;
        std::size_t i = 0;
        for (const json& e : cert.at("steps")) {
            const std::string tag = "step " + std::to_string(i + 1) + ": ";
            const auto before = e.at("prefix_before").get<std::vector<Digit>>();
            if (before != prefix) fail(tag + "prefix_before does not continue the chain");
            if (e.at("r_before").get<double>() != r || e.at("l_before").get<double>() != l ||
                e.at("ell_before").get<double>() != ell || e.at("phi_before").get<double>() != phi)
                fail(tag + "state before does not continue the chain");
            const CFNumber gamma = CFNumber::noble(prefix);
            const double ell1 = e.at("ell").get<double>();
            if (ell1 != ell / 20) fail(tag + "ell is not ell/20");
            const std::size_t m = e.at("m").get<std::size_t>();
            if (m != precision_index(ell1)) fail(tag + "m");
            if (m <= last_m) fail(tag + "precision index not increasing");
            last_m = m;
            const std::uint64_t T = e.at("T").get<std::uint64_t>();
            if (T != h(m)) fail(tag + "T is not h(m)");
            if (e.at("precision_half_ell_sq").get<double>() != ell1 * ell1 / 2 ||
                e.at("precision_ell_sq").get<double>() != ell1 * ell1)
                fail(tag + "precisions");

            const auto s = make_strategy(e.at("strategy"));
            const Outcome out = simulate_budgeted(*s, gamma, m, T);
            if (out.result.work_used != e.at("work_used").get<std::uint64_t>() || out.result.work_used > T)
                fail(tag + "work");
            if (out.result.output.has_value() == e.at("timeout").get<bool>()) fail(tag + "timeout flag");
            if (output_text(out.result) != e.at("output").get<std::string>()) fail(tag + "output");
            if (out.read_log != e.at("reads").get<std::vector<std::size_t>>()) fail(tag + "read log");
            if (out.transcript != transcript_from(e.at("transcript"))) fail(tag + "transcript");
            if (out.m0 != e.at("m0").get<std::size_t>()) fail(tag + "m0");

            const std::string kase = e.at("case").get<std::string>();
            std::optional<double> rS;
            if (out.result.output) rS = complement_radius(*out.result.output);
            const bool has_rs = !e.at("r_S").is_null();
            if (has_rs != rS.has_value() || (rS && !near(*rS, e.at("r_S").get<double>(), 1e-9)))
                fail(tag + "r(S) does not recompute");
            std::string expect = "1";
            if (rS) {
                if (r - ell1 > *rS + 8 * ell1) expect = "2a";
                else if (l + 2 * ell1 < *rS - 8 * ell1) expect = "2b";
                else expect = "none";
            }
            if (kase != expect) fail(tag + "case " + kase + " but the inequalities give " + expect);

            const auto core = e.at("core").get<std::vector<Digit>>();
            const auto after = e.at("prefix_after").get<std::vector<Digit>>();
            const double r1 = e.at("r").get<double>(), l1 = e.at("l").get<double>();
            const double phi1 = e.at("phi").get<double>();
            const CFNumber gamma1 = CFNumber::noble(after);
            if (!is_prefix(prefix, after)) fail(tag + "prefix not extended");
            for (std::size_t k = 0; k < out.m0; ++k) {
                if (gamma1.digit(k) != gamma.digit(k)) fail(tag + "gamma changed inside the read cylinder");
            }
            if (!is_prefix(core, after) || !std::all_of(after.begin() + static_cast<long>(core.size()), after.end(),
                                                        [](Digit d) { return d == 1; }))
                fail(tag + "prefix is not core followed by ones");
            if (l1 != r1 - ell1) fail(tag + "l is not r - ell");
            if (!(l1 >= l && r1 <= r)) fail(tag + "intervals not nested");
            if (!near(r1, radius_of(gamma1, fresh), rtol)) fail(tag + "r does not recompute");
            if (!near(phi1, phi_of(gamma1, cfg), ptol)) fail(tag + "phi does not recompute");
            if (kase == "2b") {
                const json& b = e.at("bump");
                const std::size_t pos = b.at("position").get<std::size_t>();
                const double lo = b.at("window")[0].get<double>(), hi = b.at("window")[1].get<double>();
                if (pos < std::max(prefix.size(), out.m0) || core.size() != pos + 1) fail(tag + "bump position");
                if (lo != l + ell1 || hi != std::min(*rS - 8 * ell1, r)) fail(tag + "bump window");
                if (!(r1 > lo && r1 < hi)) fail(tag + "r outside the bump window");
                if (!(r1 < *rS - 8 * ell1))
                    fail(tag + "interval meets the r(S) band");
                if (!numerics::certainly_less(cf::yoccoz_phi(gamma, cfg.phi_tol).enclosure(),
                                              cf::yoccoz_phi(gamma1, cfg.phi_tol).enclosure()))
                    fail(tag + "Phi did not increase");
            } else {
                if (core != digits_of(gamma, std::max(prefix.size(), out.m0))) fail(tag + "core");
                if (r1 != r || phi1 != phi) fail(tag + "r or phi changed without a bump");
            }
            if (kase == "2a" && !(gap_to(*rS, l1, r1) > 8 * ell1)) fail(tag + "interval meets the r(S) band");
            if (rS && !(e.at("separation").get<double>() > ell1)) fail(tag + "separation below ell");

            const double eps = std::ldexp(1.0, -static_cast<int>(i));
            if (e.at("tail_eps").get<double>() != eps) fail(tag + "tail eps");
            const std::size_t tm0 = cf::tail_safety_m0(core, eps);
            if (after.size() - core.size() < tm0 || e.at("tail_m0").get<std::size_t>() != tm0)
                fail(tag + "too few ones after the core");
            if (phi1 - phi < -ptol) fail(tag + "Phi decreased");

            const Fooling f = check_fooling(*s, out, gamma1, m, T);
            if (!f.answers_valid) fail(tag + "recorded answers invalid for the new gamma");
            if (!f.replay_identical) fail(tag + "replay differs");
            const json& rf = e.at("fooling");
            if (rf.at("answers_valid").get<bool>() != f.answers_valid ||
                rf.at("replay_identical").get<bool>() != f.replay_identical ||
                rf.at("fresh_identical").get<bool>() != f.fresh_identical)
                fail(tag + "recorded fooling flags");

            prefix = after;
            r = r1;
            l = l1;
            ell = ell1;
            phi = phi1;
            ++i;
        }
        const json& fin = cert.at("final");
        if (fin.at("prefix").get<std::vector<Digit>>() != prefix || fin.at("r").get<double>() != r ||
            fin.at("l").get<double>() != l || fin.at("ell").get<double>() != ell)
            fail("final state does not match the last step");
    } catch (const nlohmann::json::exception& ex) {
        fail(std::string("malformed certificate: ") + ex.what());
    }
    return v;
}

}  // namespace sj::adversary
