#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "alternant.hpp"
#include "general_map.hpp"
#include "geometry.hpp"
#include "monomial_map.hpp"
#include "oracle.hpp"
#include "roots.hpp"

namespace dnmap {

struct CheckResult {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double seconds = 0.0;
    std::string note; ///< exception text when the check threw
};

namespace suite {

inline double max_rel(const DNMapResult& r, const std::function<cplx(int, double)>& exact) {
    double e = 0.0;
    for (std::size_t j = 0; j < r.orders.size(); ++j)
        for (std::size_t m = 0; m < r.times.size(); ++m) {
            const cplx ex = exact(r.orders[j], r.times[m]);
            e = std::max(e, std::abs(r.values[j][m] - ex) / std::abs(ex));
        }
    return e;
}

inline double exponential_error(const DispersionPolynomial& d, cplx k, const std::vector<int>& U, bool general, int steps, int jobs) {
    const auto ep = exponential_problem(d, k, U);
    const auto grid = TimeGrid::make(1.0, 0.1, steps);
    MapOptions opt;
    opt.jobs = jobs;
    const auto r = general ? general_dn_map(ep.problem, grid, opt) : monomial_dn_map(ep.problem, grid, opt);
    return max_rel(r, [&](int v, double t) { return ep.expected(v, t); });
}

inline Signal ramp() {
    return Signal::closed_form([](double t) { return cplx(t); }, Signal::Fn([](double) { return cplx(1.0); }), 1.0);
}

inline BoundaryValueProblem heat_dirichlet(const Signal& g) {
    BoundaryValueProblem p;
    p.dispersion = DispersionPolynomial({0.0, 0.0, 1.0});
    p.given_orders = {0};
    p.boundary_signals = {g};
    p.initial = InitialData::zero();
    return p;
}

inline double global_relation_sweep(unsigned seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(-3.0, 0.0), tt(0.0, 1.0);
    const std::vector<std::pair<cvec, cplx>> cases = {{{0.0, 0.0, 1.0}, cplx(0.5, 1.0)},
                                                      {{0.0, 0.0, 0.0, -I}, cplx(0.3, 1.2)},
                                                      {{0.0, 0.0, 0.0, I}, cplx(-0.4, 0.9)},
                                                      {{0.0, I, 0.0, -I}, cplx(0.0, 2.0)},
                                                      {{0.0, I, 0.0, I}, cplx(0.7, 1.5)}};
    double worst = 0.0;
    for (const auto& c : cases) {
        ExponentialSolution sol(DispersionPolynomial(c.first), c.second);
        for (int i = 0; i < count; ++i) {
            const cplx xi(re(rng), im(rng));
            const double t = tt(rng);
            const double scale = std::abs(sol.initial_transform(xi)) * std::max(1.0, std::abs(std::exp(sol.dispersion()(xi) * t)));
            worst = std::max(worst, std::abs(global_relation_residual(sol, xi, t)) / scale);
        }
    }
    return worst;
}

} // namespace suite

/// The oracle checks behind the `verify` subcommand.
inline std::vector<CheckResult> run_oracle_suite(int jobs = 1) {
    using Fn = std::function<double()>;
    std::vector<std::tuple<std::string, double, Fn>> checks;
    const DispersionPolynomial heat({0.0, 0.0, 1.0}), airy_m({0.0, 0.0, 0.0, -I}), airy_p({0.0, 0.0, 0.0, I}),
        stokes1({0.0, I, 0.0, -I}), stokes2({0.0, I, 0.0, I});

    checks.push_back({"unknown count table n=2..8", 0.0, [] {
                          double bad = 0.0;
                          for (int n = 2; n <= 8; ++n) {
                              if (n % 2 == 0) bad += count_unknowns(n, 1.0) != n / 2;
                              else {
                                  bad += count_unknowns(n, I) != (n - 1) / 2;
                                  bad += count_unknowns(n, -I) != (n + 1) / 2;
                              }
                          }
                          return bad;
                      }});
    checks.push_back({"heat sector rays", 1e-15, [&] {
                          const auto s = sector_decomposition(heat);
                          return std::max(std::abs(s.theta1(1) - pi / 4), std::abs(s.theta2(1) - 3 * pi / 4));
                      }});
    checks.push_back({"heat Lambda = -2", 1e-12, [&] { return std::abs(lambda_table(heat, {0}, {1}).values[0][0] + 2.0); }});
    checks.push_back({"Airy Lambda (a3 = -i, U = {0})", 1e-12, [&] {
                          const auto t = lambda_table(airy_m, {0}, {1, 2});
                          return std::max(std::abs(t.values[0][0] + std::sqrt(3.0)), std::abs(t.values[1][0] + I * std::sqrt(3.0)));
                      }});
    checks.push_back({"global relation residual (5 equations)", 1e-8, [] { return suite::global_relation_sweep(7, 20); }});
    checks.push_back({"exponential PDE residual", 1e-10, [&] {
                          double e = 0.0;
                          for (const auto* d : {&heat, &airy_m, &airy_p, &stokes1, &stokes2}) {
                              ExponentialSolution sol(*d, cplx(0.3, 1.1));
                              e = std::max(e, std::abs(sol.pde_residual(0.4, 0.9)) / std::abs(sol.value(0.4, 0.9)));
                          }
                          return e;
                      }});
    checks.push_back({"heat D->N, g = t, closed form", 1e-6, [&] {
                          const auto r = monomial_dn_map(suite::heat_dirichlet(suite::ramp()), TimeGrid::make(1.0, 0.1, 1024));
                          return suite::max_rel(r, [](int, double t) { return cplx(-2.0 * std::sqrt(t / pi)); });
                      }});
    checks.push_back({"heat D->N vs Crank-Nicolson", 3e-3, [&] {
                          const auto cn = heat_reference_solver(suite::ramp(), 1.0, 12.0, 2000, 2000);
                          const auto r = monomial_dn_map(suite::heat_dirichlet(suite::ramp()), TimeGrid::make(1.0, 0.2, 800));
                          double e = 0.0;
                          for (std::size_t m = 0; m < r.times.size(); ++m) {
                              const std::size_t i = std::size_t(std::lround(r.times[m] * 2000));
                              e = std::max(e, std::abs(r.values[0][m].real() - cn.neumann[i]));
                          }
                          return e;
                      }});
    checks.push_back({"heat exponential k = 2i (monomial)", 1e-4,
                      [&] { return suite::exponential_error(heat, cplx(0, 2), {0}, false, 512, jobs); }});
    checks.push_back({"Airy a3 = -i exponential k = 1+2i", 1e-4,
                      [&] { return suite::exponential_error(airy_m, cplx(1, 2), {0}, false, 512, jobs); }});
    checks.push_back({"Airy a3 = +i exponential k = i", 1e-4,
                      [&] { return suite::exponential_error(airy_p, cplx(0, 1), {0, 1}, false, 512, jobs); }});
    checks.push_back({"Stokes I exponential k = 2i (general)", 5e-4,
                      [&] { return suite::exponential_error(stokes1, cplx(0, 2), {0}, true, 256, jobs); }});
    checks.push_back({"Stokes II exponential k = 2i (general)", 5e-4,
                      [&] { return suite::exponential_error(stokes2, cplx(0, 2), {0, 1}, true, 256, jobs); }});
    checks.push_back({"heat through the general map vs closed form", 1e-4, [&] {
                          MapOptions opt;
                          opt.jobs = jobs;
                          const auto r = general_dn_map(suite::heat_dirichlet(suite::ramp()), TimeGrid::make(1.0, 0.1, 256), opt);
                          return suite::max_rel(r, [](int, double t) { return cplx(-2.0 * std::sqrt(t / pi)); });
                      }});
    checks.push_back({"Stokes I level-set invariant", 1e-9, [&] {
                          std::mt19937_64 rng(11);
                          std::uniform_real_distribution<double> u(-4.0, 4.0);
                          double e = 0.0;
                          for (int i = 0; i < 500; ++i) {
                              const cplx xi(u(rng), u(rng));
                              for (const cplx& z : solve_roots(quotient_polynomial(stokes1, xi)))
                                  e = std::max(e, std::abs(stokes1(z) - stokes1(xi)) / std::max(1.0, std::abs(stokes1(xi))));
                          }
                          return e;
                      }});

    std::vector<CheckResult> out;
    for (auto& [name, tol, fn] : checks) {
        CheckResult c;
        c.name = name;
        c.tolerance = tol;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.error = fn();
            c.pass = c.error <= tol;
        } catch (const Error& e) {
            c.error = std::numeric_limits<double>::infinity();
            c.note = std::string(e.name()) + ": " + e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace dnmap
