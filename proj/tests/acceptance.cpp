// One line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sj/adversary/adversary.hpp"
#include "sj/cf/cf.hpp"
#include "sj/circle/circle.hpp"
#include "sj/cli/suites.hpp"
#include "sj/julia/julia.hpp"
#include "sj/siegel/siegel.hpp"

using namespace sj;
using cf::CFNumber;
using cf::Digit;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double value(const CFNumber& c) { return cf::cf_value(c, 80).to_double(); }

// same quadrature as the unit tests' square oracle:
// sqrt(2) / int_0^1 (1 - t^4)^(-1/2) dt with t = 1 - u^2
double square_oracle() {
    const int n = 4000;
    auto f = [](double u) {
        const double t = 1 - u * u;
        return 2 / std::sqrt((1 + t) * (1 + t * t));
    };
    double s = f(0) + f(1);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(static_cast<double>(i) / n);
    return std::sqrt(2.0) / (s / (3.0 * n));
}

Check phi_closed_forms() {
    Check c;
    const double g = (std::sqrt(5.0) - 1) / 2, s = std::sqrt(2.0) - 1;
    const std::pair<const char*, double> cases[] = {{"[1;1*]", std::log(1 / g) / (1 - g)},
                                                     {"[2;2*]", std::log(1 / s) / (2 - std::sqrt(2.0))}};
    for (const auto& [lit, want] : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        const double v = cf::yoccoz_phi(CFNumber::parse(lit), 1e-10).value();
        const double dt = seconds_since(t0);
        c.expect(std::fabs(v - want) < 1e-8, std::string(lit) + " value");
        c.expect(dt < 1, std::string(lit) + " took over 1 s");
    }
    return c;
}

Check suite(const char* name, std::uint64_t seed, double limit) {
    Check c;
    const auto r = cli::run_suite(name, seed).front();
    c.expect(r.ok(), r.failed.empty() ? "no instances" : r.failed.front());
    c.expect(r.seconds < limit, "time limit");
    if (c.ok) c.detail = std::to_string(r.instances) + " instances";
    return c;
}

Check circle_dynamics() {
    Check c;
    for (const char* lit : {"[1;1*]", "[2;2*]", "[1,2;(1,2)*]"}) {
        const CFNumber g = CFNumber::parse(lit);
        const auto s = circle::solve_tau(g, 1e-8);
        const auto rho = circle::rotation_number(circle::BlaschkeMap(s.tau), 100000);
        c.expect(std::fabs(rho.to_double() - value(g)) < 1e-6, std::string(lit) + " rotation number");
        c.expect(rho.rad_double() < 1e-6, std::string(lit) + " rotation enclosure");

        const circle::BlaschkeMap f(s.tau);
        const auto conv = cf::convergents(g, 12);
        std::vector<circle::Partition> ps;
        for (std::size_t n = 1; n <= 10; ++n) {
            ps.push_back(circle::dynamical_partition(f, g, n));
            c.expect(ps.back().points.size() == conv[n + 1].q.get_ui(), std::string(lit) + " partition count");
        }
        const auto e = circle::estimate_B(ps);
        // no growth trend: levels 7..10 peak within 25% of levels 3..6
        // (blocks of even length, so period-two tails compare like with like)
        const auto& v = e.per_level;
        c.expect(std::isfinite(e.B_hat) && e.B_hat < 20, std::string(lit) + " B_hat");
        const double early = *std::max_element(v.begin() + 2, v.begin() + 6);
        const double late = *std::max_element(v.begin() + 6, v.end());
        c.expect(late < 1.25 * early, std::string(lit) + " B_hat grows");
    }
    return c;
}

Check conformal_radius() {
    Check c;
    const double unit = siegel::conformal_radius(siegel::JordanDomain::disk(1), 1e-8).value.to_double();
    c.expect(std::fabs(unit - 1) < 1e-6, "unit disk");
    for (const double R : {0.25, 3.0, 10.0}) {
        const double v = siegel::conformal_radius(siegel::JordanDomain::disk(R), 1e-8 * R).value.to_double();
        c.expect(std::fabs(v - R) < 1e-6 * R, "disk of radius " + std::to_string(R));
    }
    const double sq = siegel::conformal_radius(
                          siegel::JordanDomain::polygon({{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}), 1e-6)
                          .value.to_double();
    c.expect(std::fabs(sq - square_oracle()) < 1e-3, "square");
    return c;
}

Check siegel_radius() {
    Check c;
    const auto run = siegel::siegel_radius_run(CFNumber::noble(), 1e-3);
    const double r = run.best.value.to_double();
    for (std::size_t i = 1; i < run.levels.size(); ++i) {
        const auto& a = run.levels[i - 1];
        const auto& b = run.levels[i];
        c.expect(std::fabs(a.r - b.r) < a.certified_error + b.certified_error, "levels " + std::to_string(a.level) + "," + std::to_string(b.level));
    }
    c.expect(run.levels.size() >= 2, "too few levels");
    c.expect(r < 2, "r >= 2");
    c.expect(run.min_orbit_modulus >= r / 4 - 1e-3, "Koebe check");
    c.detail = c.ok ? "r = " + std::to_string(r) : c.detail;
    return c;
}

Check continuity_probe() {
    Check c;
    const CFNumber g = CFNumber::noble();
    const double base = siegel::phi_logr(g, 1e-3).value.to_double();
    std::mt19937_64 rng(8);
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
        const std::size_t pos = 12 + rng() % 8;
        const Digit N = 2 + rng() % 49;
        const double v = siegel::phi_logr(cf::digit_bump(g, pos, N), 1e-3).value.to_double();
        worst = std::max(worst, std::fabs(v - base));
    }
    c.expect(worst <= 0.1, "deviation " + std::to_string(worst));
    if (c.ok) c.detail = "max deviation " + std::to_string(worst);
    return c;
}

Check radius_bump() {
    Check c;
    const CFNumber g = CFNumber::noble();
    const double r = siegel::siegel_radius(g, 1e-3).value.to_double();
    const double eps = r / 8;
    const auto res = siegel::radius_bump_search({1}, 0, eps);
    // recomputed from the digits with other settings
    siegel::RadiusConfig cfg;
    cfg.bits = 96;
    const CFNumber beta = cf::digit_bump(g, res.position, res.N);
    const double rw = siegel::siegel_radius(g, 1e-4, cfg).value.to_double();
    const double rb = siegel::siegel_radius(beta, 1e-4, cfg).value.to_double();
    const double slack = 1e-4;
    c.expect(rb > rw - 2 * eps - slack && rb < rw - eps + slack, "radius window");
    c.expect(beta == res.beta, "reported beta");
    c.expect(numerics::certainly_less(cf::yoccoz_phi(g, 1e-10).enclosure(), cf::yoccoz_phi(beta, 1e-10).enclosure()),
             "Phi");
    if (c.ok) c.detail = "beta = " + beta.to_literal();
    return c;
}

Check rendering() {
    Check c;
    const CFNumber g = CFNumber::noble();
    const julia::Parameter p = julia::exact_parameter(g);
    const julia::Cplx fixed = julia::repelling_fixed_point(p);
    std::vector<julia::Rendering> rs;
    for (std::size_t m = 4; m <= 9; ++m) {
        rs.push_back(julia::render(cf::cf_oracle(g), m, std::uint64_t{1} << 44));
        const auto& r = rs.back();
        const std::string tag = "m = " + std::to_string(m);
        c.expect(!r.stats.incomplete, tag + " incomplete");
        bool covers = false, inside = true;
        const double bound = 2 + std::ldexp(1.0, -static_cast<int>(m));
        for (const auto& b : r.balls.balls()) {
            const julia::Cplx z(b.center.x.to_double(), b.center.y.to_double());
            const double rad = b.radius.to_double();
            if (std::abs(z - fixed) <= rad) covers = true;
            if (std::abs(z) + rad > bound) inside = false;
        }
        c.expect(covers, tag + " misses 1 - lambda");
        c.expect(inside, tag + " leaves the ball");
    }
    std::string dh;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
        const double bound = 3 * std::ldexp(1.0, -static_cast<int>(rs[i].m));
        const auto d = numerics::hausdorff_distance(rs[i].balls, rs[i + 1].balls, bound / 8);
        c.expect(d.upper().to_double() <= bound, "d_H at m = " + std::to_string(rs[i].m));
        dh += (dh.empty() ? "" : " ") + std::to_string(d.to_double()).substr(0, 6);
    }
    const auto again = julia::render(cf::cf_oracle(g), 6, std::uint64_t{1} << 44);
    c.expect(again.balls.serialize() == rs[2].balls.serialize(), "replay differs");
    if (c.ok) c.detail = "d_H " + dh;
    return c;
}

Check adversary_run() {
    Check c;
    std::vector<std::unique_ptr<adversary::Strategy>> roster;
    roster.push_back(adversary::honest_bounded_renderer());
    roster.push_back(adversary::constant_output());
    roster.push_back(adversary::always_timeout());
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = adversary::run_construction(roster, 3, adversary::HardnessSchedule::parse("k^2"));
    const double dt = seconds_since(t0);
    c.expect(dt < 900, "over 15 minutes");
    const auto& cert = run.certificate;
    c.expect(adversary::verify_certificate(cert).ok, "verification");

    const double ell0 = cert["initial"]["ell"].get<double>();
    double l = cert["initial"]["l"].get<double>(), r = cert["initial"]["r"].get<double>();
    double phi = cert["initial"]["phi"].get<double>();
    int i = 0;
    std::string cases;
    for (const auto& e : cert["steps"]) {
        ++i;
        const std::string tag = "step " + std::to_string(i) + " ";
        const double ell = e["ell"].get<double>(), l1 = e["l"].get<double>(), r1 = e["r"].get<double>();
        c.expect(l1 >= l && r1 <= r && l1 < r1, tag + "nesting");
        c.expect(std::fabs(ell - ell0 / std::pow(20.0, i)) <= 1e-14 * ell, tag + "ell schedule");
        c.expect(e["phi"].get<double>() - phi >= -std::ldexp(1.0, -(i - 1)), tag + "cond3 slack");
        const std::string kase = e["case"].get<std::string>();
        cases += kase + " ";
        if (kase == "2b") {
            const double rS = e["r_S"].get<double>();
            c.expect(r1 < rS - 8 * ell || l1 > rS + 8 * ell, tag + "separation");
        }
        c.expect(e["fooling"]["answers_valid"].get<bool>() && e["fooling"]["replay_identical"].get<bool>(),
                 tag + "fooling");
        if (!e["r_S"].is_null()) c.expect(e["separation"].get<double>() > ell, tag + "radius separation");
        l = l1;
        r = r1;
        phi = e["phi"].get<double>();
    }
    auto bad = cert;
    bad["steps"][0]["r"] = bad["steps"][0]["r"].get<double>() * (1 + 1e-6);
    c.expect(!adversary::verify_certificate(bad).ok, "mutated certificate verified");
    if (c.ok) c.detail = "cases " + cases + "in " + std::to_string(dt).substr(0, 5) + " s";
    return c;
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"Phi closed forms", phi_closed_forms},
        {"4lems suite", [] { return suite("4lems", 1, 30); }},
        {"smlchg search", [] { return suite("smlchg", 1, 600); }},
        {"notdeclem tails", [] { return suite("notdeclem", 1, 600); }},
        {"circle dynamics", circle_dynamics},
        {"conformal radius", conformal_radius},
        {"noble Siegel radius", siegel_radius},
        {"Phi + log r continuity", continuity_probe},
        {"radius bump", radius_bump},
        {"rendering", rendering},
        {"adversary end-to-end", adversary_run},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = criteria[k].second();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double dt = seconds_since(t0);
        if (!c.ok) ++failed;
        std::printf("%s %2zu %s (%.1f s)%s%s\n", c.ok ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), dt,
                    c.detail.empty() ? "" : ": ", c.detail.c_str());
    }
    return failed ? 1 : 0;
}
