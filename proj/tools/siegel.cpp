#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sj/adversary/adversary.hpp"
#include "sj/cf/cf.hpp"
#include "sj/circle/circle.hpp"
#include "sj/cli/suites.hpp"
#include "sj/error.hpp"
#include "sj/julia/julia.hpp"
#include "sj/siegel/siegel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using sj::cf::CFNumber;
using sj::cf::Digit;

namespace {

// Raised after a well-formed run whose result is negative (failed suite,
// rejected certificate).
struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json provenance(const std::string& command, const json& config) {
    return {{"tool", "siegel"}, {"version", SJ_VERSION}, {"command", command}, {"config", config}};
}

// "# siegel <version> <command> <config>"
std::string comment_line(const std::string& command, const json& config) {
    return "# siegel " + std::string(SJ_VERSION) + " " + command + " " + config.dump() + "\n";
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw sj::DomainError("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw sj::ResourceExhausted("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path);
}

// stdout when path is empty
void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content << std::flush;
    } else {
        write_atomic(path, content);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw sj::DomainError("cannot read " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw sj::DomainError(what + ": " + e.what());
    }
}

std::vector<Digit> parse_digits(const std::string& s) {
    std::vector<Digit> out;
    std::string tok;
    std::istringstream is(s);
    while (std::getline(is, tok, ',')) {
        const auto a = tok.find_first_not_of(" []");
        const auto b = tok.find_last_not_of(" []");
        if (a == std::string::npos) continue;
        const std::string t = tok.substr(a, b - a + 1);
        if (t.find_first_not_of("0123456789") != std::string::npos || t.size() > 18)
            throw sj::DomainError("prefix: '" + t + "' is not a digit");
        const Digit d = std::stoull(t);
        if (d < 1) throw sj::DomainError("prefix: digits must be >= 1");
        out.push_back(d);
    }
    if (out.empty()) throw sj::DomainError("prefix: empty");
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string phi_row(const CFNumber& c, const sj::cf::PhiValue& v) {
    return "\"" + c.to_literal() + "\"," + num(v.value()) + "," + num(v.tail_bound.upper().to_double()) + "," +
           std::to_string(v.terms_used) + "\n";
}

struct Options {
    std::string cf, theta, out, pgm, config, out_dir = ".", suite, certificate, prefix = "1", kind = "radius";
    double tol = 1e-8;
    double eps = 0.1;
    std::size_t terms = 40, level = 6, m = 6, m0 = 0;
    std::uint64_t budget = 1000000, seed = 0;
};

int run_phi(const Options& o) {
    const json cfg = {{"cf", o.cf}, {"tol", o.tol}};
    const CFNumber c = CFNumber::parse(o.cf);
    const auto v = sj::cf::yoccoz_phi(c, o.tol);
    emit(o.out, comment_line("phi", cfg) + "theta,phi,tail_bound,terms\n" + phi_row(c, v));
    return 0;
}

int run_brjuno(const Options& o) {
    const json cfg = {{"cf", o.cf}, {"terms", o.terms}};
    const CFNumber c = CFNumber::parse(o.cf);
    const auto v = sj::cf::brjuno_B(c, o.terms);
    emit(o.out, comment_line("brjuno", cfg) + "theta,B,tail_bound,terms\n" + phi_row(c, v));
    return 0;
}

int run_tau(const Options& o) {
    const json cfg = {{"cf", o.cf}, {"tol", o.tol}};
    const auto s = sj::circle::solve_tau(CFNumber::parse(o.cf), o.tol);
    const double err = std::max(s.hi - s.tau, s.tau - s.lo);
    emit(o.out, comment_line("tau", cfg) + num(s.tau) + " +/- " + num(err) + "\n");
    return 0;
}

int run_partition(const Options& o) {
    const json cfg = {{"cf", o.cf}, {"level", o.level}, {"tol", o.tol}};
    const CFNumber c = CFNumber::parse(o.cf);
    const auto s = sj::circle::solve_tau(c, o.tol);
    const sj::circle::BlaschkeMap f(s.tau);
    std::string out = comment_line("partition", cfg) + "level,index,angle\n";
    for (std::size_t n = 0; n <= o.level; ++n) {
        const auto p = sj::circle::dynamical_partition(f, c, n);
        for (std::size_t k = 0; k < p.points.size(); ++k) {
            out += std::to_string(n) + "," + std::to_string(p.orbit_index[k]) + "," + num(p.points[k]) + "\n";
        }
    }
    emit(o.out, out);
    return 0;
}

int run_radius(const Options& o) {
    const json cfg = {{"cf", o.cf}, {"tol", o.tol}};
    const auto run = sj::siegel::siegel_radius_run(CFNumber::parse(o.cf), o.tol);
    std::string out = comment_line("radius", cfg) + "level,r_n,eps_n,certified_error\n";
    for (const auto& l : run.levels) {
        out += std::to_string(l.level) + "," + num(l.r) + "," + num(l.eps) + "," + num(l.certified_error) + "\n";
    }
    emit(o.out, out);
    std::cerr << "r = " << num(run.best.value.to_double()) << " +/- " << num(run.best.certified_error.to_double())
              << (run.best.certified ? "" : " (uncertified)") << "\n";
    return 0;
}

json phi_json(const sj::cf::PhiValue& v) {
    return {{"value", v.value()}, {"error", v.error()}, {"terms", v.terms_used}};
}

int run_bump(const Options& o) {
    const std::vector<Digit> prefix = parse_digits(o.prefix);
    const json cfg = {{"kind", o.kind}, {"prefix", prefix}, {"eps", o.eps}, {"m0", o.m0}};
    json out = provenance("bump-search", cfg);
    if (o.kind == "phi") {
        const auto r = sj::cf::phi_bump_search(prefix, o.eps, std::max<std::size_t>(o.m0, 1));
        out["result"] = {{"m", r.m}, {"N", r.N}, {"position", r.position}, {"beta", r.beta.to_literal()},
                         {"phi_omega", phi_json(r.phi_omega)}, {"phi_beta", phi_json(r.phi_beta)}};
    } else if (o.kind == "radius") {
        const auto r = sj::siegel::radius_bump_search(prefix, o.m0, o.eps);
        auto est = [](const sj::siegel::RadiusEstimate& e) {
            return json{{"value", e.value.to_double()}, {"error", e.certified_error.to_double()},
                        {"certified", e.certified}};
        };
        out["result"] = {{"m", r.m}, {"N", r.N}, {"position", r.position}, {"beta", r.beta.to_literal()},
                         {"r_omega", est(r.r_omega)}, {"r_beta", est(r.r_beta)},
                         {"phi_omega", phi_json(r.phi_omega)}, {"phi_beta", phi_json(r.phi_beta)}};
    } else {
        throw sj::DomainError("bump-search: --kind must be phi or radius");
    }
    emit(o.out, out.dump(2) + "\n");
    return 0;
}

int run_render(const Options& o) {
    const json cfg = {{"theta", o.theta}, {"m", o.m}, {"budget", o.budget}, {"out", o.out}, {"pgm", o.pgm}};
    const CFNumber theta = CFNumber::parse(o.theta);
    const auto r = sj::julia::render(sj::cf::cf_oracle(theta), o.m, o.budget);
    const auto& s = r.stats;
    json stats = provenance("render", cfg);
    stats["stats"] = {{"work_used", s.work_used}, {"budget", s.budget},
                      {"oracle_reads", s.oracle_reads}, {"max_oracle_position", s.max_oracle_position},
                      {"pixels", s.pixels}, {"bit_one", s.bit_one},
                      {"far", s.far}, {"near", s.near},
                      {"in_between", s.in_between}, {"filled_interior", s.filled_interior},
                      {"julia_points", s.julia_points}, {"balls", r.balls.size()},
                      {"incomplete", s.incomplete}};
    std::cout << stats.dump(2) << "\n";
    std::cerr << "render took " << s.seconds << " s\n";
    // a partial rendering is still written, marked in its header
    const std::string head = comment_line("render", cfg) + (s.incomplete ? "# incomplete\n" : "");
    write_atomic(o.out, head + r.balls.serialize());
    if (!o.pgm.empty()) {
        std::string pgm = sj::julia::to_pgm(r);
        pgm.insert(3, head);
        write_atomic(o.pgm, pgm);
    }
    if (s.incomplete) throw sj::ResourceExhausted("render: budget exhausted before the lattice was classified");
    return 0;
}

int run_adversary(const Options& o) {
    const json cfg = parse_json(read_file(o.config), "adversary config");
    if (!cfg.contains("roster") || !cfg.contains("steps") || !cfg.contains("h"))
        throw sj::DomainError("adversary config needs roster, steps and h");
    std::vector<std::unique_ptr<sj::adversary::Strategy>> roster;
    for (const auto& s : cfg.at("roster")) roster.push_back(sj::adversary::make_strategy(s));
    const auto h = sj::adversary::HardnessSchedule::parse(cfg.at("h"));
    sj::adversary::ConstructionConfig cc;
    if (cfg.contains("radius_tol")) cc.radius_tol = cfg.at("radius_tol").get<double>();
    if (cfg.contains("max_points")) cc.radius.max_points = cfg.at("max_points").get<std::size_t>();
    const auto c = sj::adversary::run_construction(roster, cfg.at("steps").get<std::size_t>(), h, cc);

    const fs::path dir(o.out_dir);
    json gp = provenance("adversary", cfg);
    gp["prefix"] = c.state.prefix;
    gp["gamma"] = c.gamma.to_literal();
    gp["l"] = c.state.l;
    gp["r"] = c.state.r;
    gp["ell"] = c.state.ell;
    gp["phi"] = c.state.phi;
    json cert = c.certificate;
    cert["run"] = provenance("adversary", cfg);
    write_atomic(dir / "gamma_prefix.json", gp.dump(2) + "\n");
    write_atomic(dir / "certificates.json", cert.dump(2) + "\n");
    write_atomic(dir / "timeline.csv", comment_line("adversary", cfg) + sj::adversary::timeline_csv(c.timeline));
    std::cout << c.gamma.to_literal() << "\n";
    return 0;
}

int run_verify(const Options& o) {
    if (!o.certificate.empty()) {
        const json cert = parse_json(read_file(o.certificate), "certificate");
        const auto v = sj::adversary::verify_certificate(cert);
        json out = provenance("verify", {{"certificate", o.certificate}});
        out["ok"] = v.ok;
        out["failures"] = v.failures;
        emit(o.out, out.dump(2) + "\n");
        if (!v.ok) throw CheckFailed("certificate rejected");
        return 0;
    }
    if (o.suite.empty()) throw sj::DomainError("verify: give --suite or --certificate");
    const auto results = sj::cli::run_suite(o.suite, o.seed);
    json out = provenance("verify", {{"suite", o.suite}, {"seed", o.seed}});
    out["suites"] = json::array();
    bool ok = true;
    for (const auto& r : results) {
        json j = r.to_json();
        j.erase("seconds");
        out["suites"].push_back(j);
        ok = ok && r.ok();
        std::cerr << r.name << ": " << r.instances << " instances, " << r.failures << " failures, " << r.seconds
                  << " s\n";
    }
    out["ok"] = ok;
    emit(o.out, out.dump(2) + "\n");
    if (!ok) throw CheckFailed("suite failures");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Siegel disks, Brjuno function, Julia set rendering and the hard-parameter construction", "siegel"};
    app.set_version_flag("--version", std::string(SJ_VERSION));
    app.require_subcommand(1);
    Options o;

    auto* phi = app.add_subcommand("phi", "Yoccoz-Brjuno function of a continued fraction");
    phi->add_option("--cf", o.cf, "continued fraction literal, e.g. [1;1*]")->required();
    phi->add_option("--tol", o.tol, "tolerance");
    phi->add_option("--out", o.out, "CSV output (default standard output)");

    auto* brj = app.add_subcommand("brjuno", "Brjuno sum over the convergent denominators");
    brj->add_option("--cf", o.cf, "continued fraction literal")->required();
    brj->add_option("--terms", o.terms, "number of terms");
    brj->add_option("--out", o.out, "CSV output");

    auto* tau = app.add_subcommand("tau", "Blaschke parameter with the given rotation number");
    tau->add_option("--cf", o.cf, "rotation number")->required();
    tau->add_option("--tol", o.tol, "rotation number tolerance");
    tau->add_option("--out", o.out, "output");

    auto* part = app.add_subcommand("partition", "dynamical partitions up to a level");
    part->add_option("--cf", o.cf, "rotation number")->required();
    part->add_option("--level", o.level, "deepest level n");
    part->add_option("--tol", o.tol, "tolerance for tau");
    part->add_option("--out", o.out, "CSV output");

    auto* rad = app.add_subcommand("radius", "conformal radius of the Siegel disk of a noble number");
    rad->add_option("--cf", o.cf, "noble rotation number")->required();
    rad->add_option("--tol", o.tol, "tolerance");
    rad->add_option("--out", o.out, "CSV output");

    auto* bump = app.add_subcommand("bump-search", "digit bump moving Phi or the radius into a window");
    bump->add_option("--kind", o.kind, "phi or radius")->check(CLI::IsMember({"phi", "radius"}));
    bump->add_option("--prefix", o.prefix, "digit prefix, e.g. 1,2,3");
    bump->add_option("--eps", o.eps, "window scale")->required();
    bump->add_option("--m0", o.m0, "smallest offset (phi) or offsets to skip (radius)");
    bump->add_option("--out", o.out, "JSON output");

    auto* ren = app.add_subcommand("render", "ball-union rendering of the Julia set");
    ren->add_option("--theta", o.theta, "rotation number")->required();
    ren->add_option("--m", o.m, "precision 2^-m")->required();
    ren->add_option("--budget", o.budget, "work budget")->required();
    ren->add_option("--out", o.out, "ball-union file")->required();
    ren->add_option("--pgm", o.pgm, "PGM raster");

    auto* adv = app.add_subcommand("adversary", "run the inductive construction against a roster");
    adv->add_option("--config", o.config, "JSON config {roster, steps, h}")->required();
    adv->add_option("--out-dir", o.out_dir, "directory for the artifacts");

    auto* ver = app.add_subcommand("verify", "randomized lemma suites or a construction certificate");
    ver->add_option("--suite", o.suite, "lemmas, 4lems, smlchg or notdeclem");
    ver->add_option("--seed", o.seed, "seed");
    ver->add_option("--certificate", o.certificate, "certificates.json to recheck");
    ver->add_option("--out", o.out, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*phi) return run_phi(o);
        if (*brj) return run_brjuno(o);
        if (*tau) return run_tau(o);
        if (*part) return run_partition(o);
        if (*rad) return run_radius(o);
        if (*bump) return run_bump(o);
        if (*ren) return run_render(o);
        if (*adv) return run_adversary(o);
        if (*ver) return run_verify(o);
    } catch (const sj::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sj::ResourceExhausted& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const CheckFailed& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
