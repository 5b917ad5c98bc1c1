// Command-line front end: analyze / map / verify.

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <boost/version.hpp>
#include <Eigen/Core>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "dnmap/config.hpp"
#include "dnmap/general_map.hpp"
#include "dnmap/geometry.hpp"
#include "dnmap/monomial_map.hpp"
#include "dnmap/roots.hpp"
#include "dnmap/verify.hpp"

namespace fs = std::filesystem;
using namespace dnmap;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_validation = 3;
constexpr int exit_numerical = 4;

constexpr const char* tool_version = "1.0.0";

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 || EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw NumericalError("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    std::string out;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        out += buf;
    }
    return out;
}

// shortest round-trip representation keeps the CSVs byte-stable
std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string angle(double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f (%.6f pi)", a, a / pi);
    return buf;
}

std::string cnum(cplx z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
    return buf;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw ConfigError("write failed for '" + p.string() + "'");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("output directory '" + dir + "' is not writable");
}

struct Options {
    std::string problem;
    std::string out;
    std::string mode = "auto";
    bool general = false;
    int steps = 0;
    double tmin = 0.0;
    int jobs = 1;
    double tol = 1e-8;
};

void require_valid_or_throw(const BoundaryValueProblem& p) {
    const auto v = validate_problem(p);
    if (v.empty()) return;
    std::string msg;
    for (const auto& x : v) msg += "[" + x.code + "] " + x.message + "; ";
    throw ValidationError(msg);
}

int run_analyze(const Options& o) {
    const std::string text = read_text(o.problem);
    const ProblemConfig cfg = parse_config_text(text);
    const BoundaryValueProblem p = build_problem(cfg);
    require_valid_or_throw(p);
    const auto& d = p.dispersion;
    const auto s = sector_decomposition(d);
    std::ostringstream os;
    os << "degree n: " << s.n << "\n";
    os << "unknown count N: " << s.N << "\n";
    os << "monomial: " << (d.is_monomial() ? "yes" : "no") << "\n";
    os << "given orders:";
    for (int u : p.given_orders) os << ' ' << u;
    os << "\nunknown orders:";
    for (int v : p.unknown_orders()) os << ' ' << v;
    os << "\n\nupper sectors (k, theta1, theta2, alpha, beta, wedge low, wedge high)\n";
    for (int k = 1; k <= s.upper_count(); ++k)
        os << k << ", " << angle(s.theta1(k)) << ", " << angle(s.theta2(k)) << ", " << angle(s.alpha(k)) << ", " << angle(s.beta(k))
           << ", " << angle(s.wedge_low(k)) << ", " << angle(s.wedge_high(k)) << "\n";
    os << "\nlower sectors (theta1, theta2)\n";
    for (const auto& l : s.lower) os << angle(l.theta1) << ", " << angle(l.theta2) << "\n";
    const auto zs = zeros_of_omega(d, s.upper_count());
    os << "\nzeros of omega (value, multiplicity, placement per wedge)\n";
    for (const auto& z : zs.zeros) {
        os << cnum(z.value) << ", " << z.multiplicity << ",";
        for (auto pl : z.placement)
            os << ' ' << (pl == ZeroPlacement::Interior ? "interior" : pl == ZeroPlacement::Boundary ? "boundary" : "outside");
        os << "\n";
    }
    const auto sp = singular_points(d);
    os << "\nbranch points of the spectral roots:";
    for (const cplx& b : sp.branch) os << ' ' << cnum(b);
    os << "\nsingular radius: " << num(sp.radius) << "\n";
    if (!d.is_monomial()) os << "seeding radius: " << num(seeding_radius(d, s)) << "\n";
    std::cout << os.str();
    if (!o.out.empty()) {
        ensure_dir(o.out);
        write_file(fs::path(o.out) / "analysis.txt", os.str());
    }
    return exit_ok;
}

int run_map(const Options& o) {
    const std::string text = read_text(o.problem);
    ProblemConfig cfg = parse_config_text(text);
    if (o.steps != 0) cfg.time.steps = o.steps;
    if (o.tmin != 0.0) cfg.time.t_min = o.tmin;
    if (cfg.time.steps < 8) throw ConfigError("grid resolution must be at least 8 steps");
    if (!(o.tol > 0.0)) throw ConfigError("--tol must be positive");
    if (o.out.empty()) throw ConfigError("map needs --out");
    std::string mode = o.general ? "general" : o.mode;
    if (mode != "auto" && mode != "monomial" && mode != "general") throw ConfigError("--mode must be auto, monomial or general");

    const BoundaryValueProblem p = build_problem(cfg);
    require_valid_or_throw(p);
    if (mode == "auto") mode = p.dispersion.is_monomial() ? "monomial" : "general";
    const TimeGrid grid = build_grid(cfg);

    MapOptions opt;
    opt.jobs = o.jobs <= 0 ? hardware_jobs() : o.jobs;
    opt.tol = o.tol;
    const DNMapResult r = mode == "monomial" ? monomial_dn_map(p, grid, opt) : general_dn_map(p, grid, opt);

    ensure_dir(o.out);
    std::string csv = "t";
    for (int v : r.orders) csv += ",re_d" + std::to_string(v) + "q,im_d" + std::to_string(v) + "q";
    csv += "\n";
    for (std::size_t m = 0; m < r.times.size(); ++m) {
        csv += num(r.times[m]);
        for (std::size_t j = 0; j < r.orders.size(); ++j) csv += "," + num(r.values[j][m].real()) + "," + num(r.values[j][m].imag());
        csv += "\n";
    }
    write_file(fs::path(o.out) / "dn_map.csv", csv);

    std::string diag = "t,order,q0_term,pv_term,residue_term,origin_term\n";
    for (std::size_t j = 0; j < r.orders.size(); ++j)
        for (std::size_t m = 0; m < r.times.size(); ++m) {
            const auto& tb = r.terms[j][m];
            diag += num(r.times[m]) + "," + std::to_string(r.orders[j]) + "," + num(std::abs(tb.q0_term)) + "," + num(std::abs(tb.pv_term)) +
                    "," + num(std::abs(tb.residue_term)) + "," + num(std::abs(tb.origin_term)) + "\n";
        }
    write_file(fs::path(o.out) / "diagnostics.csv", diag);

    json man;
    man["tool"] = "dnmap";
    man["version"] = tool_version;
    std::ostringstream hashed;
    hashed << text << "\nmode=" << mode << "\nsteps=" << cfg.time.steps << "\nt_min=" << num(cfg.time.t_min) << "\ntol=" << num(o.tol);
    man["inputs_sha256"] = sha256_hex(hashed.str());
    man["mode"] = mode;
    man["problem"] = to_json(cfg);
    man["grid"] = {{"T", cfg.time.T},
                   {"t_min", cfg.time.t_min},
                   {"steps", cfg.time.steps},
                   {"nodes", grid.size()},
                   {"first_output", grid.first_output}};
    json params = json::object();
    for (const auto& [k, v] : r.parameters) params[k] = v;
    man["parameters"] = params;
    man["quad_error"] = r.quad_error;
    man["tol"] = o.tol;
    man["versions"] = {{"compiler", __VERSION__},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                     std::to_string(EIGEN_MINOR_VERSION)},
                       {"boost", BOOST_LIB_VERSION},
                       {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                             "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    write_file(fs::path(o.out) / "manifest.json", man.dump(2) + "\n");
    std::cout << "wrote " << r.times.size() << " rows for orders";
    for (int v : r.orders) std::cout << ' ' << v;
    std::cout << " (" << mode << " map) to " << o.out << "\n";
    return exit_ok;
}

int run_verify(const Options& o) {
    const auto res = run_oracle_suite(o.jobs <= 0 ? hardware_jobs() : o.jobs);
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-46s %12s %10s %8s  %s\n", "check", "max error", "tolerance", "seconds", "result");
    os << line;
    int failed = 0;
    for (const auto& c : res) {
        std::snprintf(line, sizeof line, "%-46s %12.3e %10.1e %8.2f  %s\n", c.name.c_str(), c.error, c.tolerance, c.seconds,
                      c.pass ? "PASS" : "FAIL");
        os << line;
        if (!c.note.empty()) os << "    " << c.note << "\n";
        failed += !c.pass;
    }
    os << res.size() - std::size_t(failed) << "/" << res.size() << " checks passed\n";
    std::cout << os.str();
    if (!o.out.empty()) {
        ensure_dir(o.out);
        write_file(fs::path(o.out) / "verify.txt", os.str());
    }
    return failed == 0 ? exit_ok : exit_validation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet-to-Neumann maps for linear evolution equations on the half-line"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub, bool needs_problem) {
        auto* opt = sub->add_option("--problem", o.problem, "problem file (JSON)");
        if (needs_problem) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
    };
    auto* analyze = app.add_subcommand("analyze", "sector and zero tables");
    common(analyze, true);
    auto* map = app.add_subcommand("map", "evaluate the map and write CSVs and a manifest");
    common(map, true);
    map->add_option("--mode", o.mode, "auto | monomial | general");
    map->add_flag("--general", o.general, "same as --mode general");
    map->add_option("--steps", o.steps, "output grid steps (overrides the file)");
    map->add_option("--tmin", o.tmin, "first output time (overrides the file)");
    map->add_option("--tol", o.tol, "quadrature tolerance");
    auto* verify = app.add_subcommand("verify", "run the oracle suite");
    common(verify, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        if (analyze->parsed()) return run_analyze(o);
        if (map->parsed()) return run_map(o);
        return run_verify(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return exit_config;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return exit_validation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: NumericalError: " << e.what() << "\n";
        return exit_numerical;
    }
}
