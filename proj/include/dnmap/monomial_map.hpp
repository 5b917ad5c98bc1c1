#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "alternant.hpp"
#include "core.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "problem.hpp"
#include "quadrature.hpp"

namespace dnmap {

/// Numerical knobs shared by both map assemblers.
struct MapOptions {
    int jobs = 1;
    double tol = 1e-8; ///< target for the quadrature error estimate
    int density = 1;   ///< panel multiplier for the contour rules
};

inline void require_valid(const BoundaryValueProblem& p) {
    const auto v = validate_problem(p);
    if (v.empty()) return;
    std::string msg = "problem fails validation:";
    for (const auto& x : v) msg += " [" + x.code + "] " + x.message + ";";
    throw ValidationError(msg);
}

/// V(rho^p): rows i = 1..N, columns j with entries (rho^p)^{i(n-v_j-1)}.
struct VandermondeSystem {
    int n = 0, N = 0, p = 1;
    std::vector<int> V;
    CMatrix M;
    CMatrix inverse;
    cplx det = 0.0;

    static VandermondeSystem make(int n, int N, std::vector<int> V, int p) {
        VandermondeSystem s;
        s.n = n;
        s.N = N;
        s.p = p;
        s.V = std::move(V);
        s.M.resize(N, N);
        for (int i = 1; i <= N; ++i)
            for (int j = 0; j < N; ++j) s.M(i - 1, j) = s.node(i, n - s.V[std::size_t(j)] - 1);
        Eigen::PartialPivLU<CMatrix> lu(s.M);
        s.det = lu.determinant();
        if (!(std::abs(s.det) > 1e-13)) throw StructuralError("vandermonde: singular matrix");
        s.inverse = lu.inverse();
        return s;
    }

    /// (rho^p)^{i e}, exact-phase evaluation.
    cplx node(int i, int e) const { return polar1(2.0 * pi * double((long(p) * i * e) % n) / n); }

    /// det V_ji / det V: minor with row i and column j deleted (zero-based).
    cplx minor_quotient(std::size_t j, std::size_t i) const {
        const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        return sign * inverse(Eigen::Index(j), Eigen::Index(i));
    }

    /// det V^{jl} / det V: column j replaced by (rho^p)^{i(n-u-1)}.
    cplx column_quotient(std::size_t j, int u) const {
        CVector b(N);
        for (int i = 1; i <= N; ++i) b(i - 1) = node(i, n - u - 1);
        return (inverse * b)(Eigen::Index(j));
    }
};

/// Lambda_jl = (V^{jl}/V)(rho) [rho^{m(n-N-1)} e^{i m (theta^1_1 - pi/2n)} - e^{i m (theta^2_{n-N} + pi/2n)}],
/// m = v_j - u_l.
inline cplx lambda_coefficient(const VandermondeSystem& sys, const SectorDecomposition& s, std::size_t j, int u) {
    const int m = sys.V[j] - u;
    const int n = s.n, N = s.N;
    const cplx ratio = sys.column_quotient(j, u);
    const double ang_out = m * s.alpha(1) + 2.0 * pi * double(m * (n - N - 1)) / n;
    const double ang_in = m * s.beta(n - N);
    return ratio * (polar1(ang_out) - polar1(ang_in));
}

struct LambdaTable {
    std::vector<cvec> values; ///< values[j][l]
    double theta1_first = 0.0;
    double theta2_last = 0.0;
};

inline LambdaTable lambda_table(const DispersionPolynomial& d, const std::vector<int>& U, const std::vector<int>& V) {
    const SectorDecomposition s = sector_decomposition(d);
    const auto sys = VandermondeSystem::make(s.n, s.N, V, 1);
    LambdaTable t;
    t.theta1_first = s.theta1(1);
    t.theta2_last = s.theta2(s.upper_count());
    t.values.assign(V.size(), cvec(U.size()));
    for (std::size_t j = 0; j < V.size(); ++j)
        for (std::size_t l = 0; l < U.size(); ++l) t.values[j][l] = lambda_coefficient(sys, s, j, U[l]);
    return t;
}

namespace detail {

/// Refuses exponential data whose transform pole is crossed when the sector
/// boundary rays are rotated onto alpha_k, beta_k.
inline void check_rotation_poles(const BoundaryValueProblem& p, const SectorDecomposition& s) {
    if (p.initial.kind() != InitialData::Kind::Exponential) return;
    const int n = s.n, N = s.N;
    const cplx k0 = p.initial.k();
    for (int k = 1; k <= n - N; ++k) {
        for (int i = 1; i <= N; ++i) {
            const double ang = wrap_angle(std::arg(k0) - 2.0 * pi * (i + n - N - k) / n);
            auto within = [&](double a, double b) {
                const double lo = wrap_angle(a), w = b - a;
                return wrap_angle(ang - lo) <= w + 1e-12;
            };
            if (within(s.alpha(k), s.theta1(k)) || within(s.theta2(k), s.beta(k)))
                throw UnsupportedConfiguration("q0 transform pole lies between a sector boundary and its rotated ray");
        }
    }
}

/// Ray nodes on [0, s_max], quadratically clustered towards the origin.
inline void ray_nodes(double s_max, int density, std::vector<double>& xs, std::vector<double>& ws) {
    const int P = 48 * density;
    for (int j = 0; j < P; ++j) {
        const double a = s_max * double(j) * j / (double(P) * P);
        const double b = s_max * double(j + 1) * (j + 1) / (double(P) * P);
        quad::panel(a, b, 16, xs, ws);
    }
}

/// One node of the rotated-ray q0 integral: weight already includes the
/// direction, orientation and quadrature weight.
struct RayNode {
    cplx xi;
    cplx omega;
    cvec G; ///< per unknown order: x_j(xi) omega'(xi) dxi
};

inline std::vector<RayNode> monomial_q0_nodes(const BoundaryValueProblem& p, const SectorDecomposition& s, double s_max,
                                              int density) {
    const auto& d = p.dispersion;
    const int n = s.n, N = s.N;
    const auto V = p.unknown_orders();
    const cplx rho = polar1(2.0 * pi / n);
    std::vector<double> xs, ws;
    ray_nodes(s_max, density, xs, ws);
    std::vector<RayNode> out;
    const auto sys = VandermondeSystem::make(n, N, V, 1);
    for (int k = 1; k <= n - N; ++k) {
        for (int side = 0; side < 2; ++side) {
            const double ang = side == 0 ? s.alpha(k) : s.beta(k);
            const double orient = side == 0 ? 1.0 : -1.0; // out along alpha, in along beta
            const cplx dir = polar1(ang);
            for (std::size_t q = 0; q < xs.size(); ++q) {
                RayNode nd;
                nd.xi = xs[q] * dir;
                nd.omega = d(nd.xi);
                const cplx c = std::pow(rho, n - N - k) * nd.xi;
                cvec b(static_cast<std::size_t>(N));
                for (int i = 1; i <= N; ++i) b[std::size_t(i - 1)] = half_line_transform(p.initial, std::pow(rho, i) * c);
                const cplx dw = d.derivative(nd.xi);
                nd.G.assign(V.size(), 0.0);
                for (std::size_t j = 0; j < V.size(); ++j) {
                    cplx x = 0.0;
                    for (int i = 0; i < N; ++i) x += sys.inverse(Eigen::Index(j), i) * b[std::size_t(i)];
                    // x_j = a_n^{-1} c^{-(n-v_j-1)} (V^{-1} b)_j; omega' = n a_n xi^{n-1}
                    const int e = n - V[j] - 1;
                    const cplx scale = e == 0 ? dw / d.leading() : dw / (d.leading() * std::pow(c, e));
                    nd.G[j] = x * scale * dir * (orient * ws[q]);
                }
                out.push_back(std::move(nd));
            }
        }
    }
    return out;
}

/// Sum over nodes of G_j e^{-omega t} for the given times; chunked so the
/// result is independent of the thread count.
inline std::vector<cvec> contour_sum(const std::vector<RayNode>& nodes, std::size_t orders, const std::vector<double>& times,
                                     int jobs) {
    constexpr std::size_t chunk = 64;
    const std::size_t chunks = (nodes.size() + chunk - 1) / chunk;
    std::vector<std::vector<cvec>> part(chunks, std::vector<cvec>(orders, cvec(times.size(), 0.0)));
    parallel_for_chunks(chunks, jobs, [&](std::size_t c) {
        auto& acc = part[c];
        const std::size_t end = std::min(nodes.size(), (c + 1) * chunk);
        for (std::size_t q = c * chunk; q < end; ++q) {
            const auto& nd = nodes[q];
            for (std::size_t m = 0; m < times.size(); ++m) {
                const cplx e = std::exp(-nd.omega * times[m]);
                for (std::size_t j = 0; j < orders; ++j) acc[j][m] += nd.G[j] * e;
            }
        }
    });
    std::vector<cvec> total(orders, cvec(times.size(), 0.0));
    for (const auto& pc : part)
        for (std::size_t j = 0; j < orders; ++j)
            for (std::size_t m = 0; m < times.size(); ++m) total[j][m] += pc[j][m];
    return total;
}

/// Ray length with e^{-s^n t_min} below e^{-50} and room for algebraic growth.
inline double monomial_ray_length(int n, double t_min) { return std::pow((50.0 + n * std::log(10.0)) / t_min, 1.0 / n); }

} // namespace detail

/// q0 part of the monomial map at one time (2 pi d^{v_j} q scale), summed
/// over the rotated boundary rays of every upper sector.
inline cplx q0_contour_term(const BoundaryValueProblem& p, const SectorDecomposition& s, std::size_t j, double t, int density = 1) {
    if (p.initial.kind() == InitialData::Kind::Zero) return 0.0;
    detail::check_rotation_poles(p, s);
    const auto V = p.unknown_orders();
    const auto nodes = detail::monomial_q0_nodes(p, s, detail::monomial_ray_length(s.n, t), density);
    const auto sum = detail::contour_sum(nodes, V.size(), {t}, 1);
    return -ipow(V[j]) / double(s.n - s.N) * sum[j][0];
}

/// Boundary values d^{v_j} q(t, 0) for a monomial symbol.
inline DNMapResult monomial_dn_map(const BoundaryValueProblem& p, const TimeGrid& grid, const MapOptions& opt = {}) {
    if (!p.dispersion.is_monomial()) throw ModeError("monomial_dn_map: dispersion is not a monomial; use the general map");
    require_valid(p);
    const auto& d = p.dispersion;
    const SectorDecomposition s = sector_decomposition(d);
    const int n = s.n;
    const auto V = p.unknown_orders();
    const auto& U = p.given_orders;
    const LambdaTable lam = lambda_table(d, U, V);

    DNMapResult r;
    r.orders = V;
    const std::size_t M = grid.output_count();
    for (std::size_t m = 0; m < M; ++m) r.times.push_back(grid.output_time(m));
    r.values.assign(V.size(), cvec(M, 0.0));
    r.terms.assign(V.size(), std::vector<TermBreakdown>(M));
    r.quad_error.assign(V.size(), 0.0);

    // boundary data on the full grid
    const std::size_t K = grid.size();
    std::vector<cvec> g(U.size(), cvec(K)), gd(U.size(), cvec(K));
    for (std::size_t l = 0; l < U.size(); ++l)
        for (std::size_t i = 0; i < K; ++i) {
            g[l][i] = p.boundary_signals[l].value(grid.nodes[i]);
            gd[l][i] = p.boundary_signals[l].derivative(grid.nodes[i]);
        }

    // Gamma-kernel terms, parallel over fixed blocks of output times
    constexpr std::size_t block = 32;
    const std::size_t blocks = (M + block - 1) / block;
    for (std::size_t j = 0; j < V.size(); ++j) {
        for (std::size_t l = 0; l < U.size(); ++l) {
            const int mdiff = V[j] - U[l];
            const bool above = U[l] > V[j];
            const double beta = above ? double(mdiff + n) / n : double(mdiff) / n;
            const AbelKernel ker(beta, grid.nodes);
            const cplx coef = (above ? 1.0 : -1.0) * ipow(mdiff + 1) * lam.values[j][l] * gamma_fn(beta);
            const cvec& f = above ? g[l] : gd[l];
            cvec vals(M);
            parallel_for_chunks(blocks, opt.jobs, [&](std::size_t b) {
                for (std::size_t m = b * block; m < std::min(M, (b + 1) * block); ++m)
                    vals[m] = ker.apply(f, grid.first_output + m);
            });
            for (std::size_t m = 0; m < M; ++m) r.terms[j][m].pv_term += coef * vals[m] / (2.0 * pi);
            if (!above) {
                // g_l(0) t^{-m/n} term
                const cplx c0 = -ipow(mdiff + 1) * g[l][0] * lam.values[j][l] * gamma_fn(beta);
                for (std::size_t m = 0; m < M; ++m) r.terms[j][m].q0_term += c0 * std::pow(r.times[m], -beta) / (2.0 * pi);
            }
        }
    }

    double s_max = 0.0;
    if (p.initial.kind() != InitialData::Kind::Zero) {
        detail::check_rotation_poles(p, s);
        s_max = detail::monomial_ray_length(n, r.times.front());
        auto run = [&](int density, const std::vector<double>& times) {
            const auto nodes = detail::monomial_q0_nodes(p, s, s_max, density);
            auto sum = detail::contour_sum(nodes, V.size(), times, opt.jobs);
            for (std::size_t j = 0; j < V.size(); ++j)
                for (auto& x : sum[j]) x *= -ipow(V[j]) / double(n - s.N) / (2.0 * pi);
            return sum;
        };
        const std::vector<double> probes = {r.times.front(), r.times[M / 2], r.times.back()};
        int density = std::max(1, opt.density);
        std::vector<double> err(V.size(), 0.0);
        for (int attempt = 0; attempt < 3; ++attempt) {
            const auto a = run(density, probes), b = run(2 * density, probes);
            double worst = 0.0;
            for (std::size_t j = 0; j < V.size(); ++j) {
                err[j] = 0.0;
                for (std::size_t q = 0; q < probes.size(); ++q) err[j] = std::max(err[j], std::abs(a[j][q] - b[j][q]));
                worst = std::max(worst, err[j]);
            }
            if (worst <= opt.tol) break;
            density *= 2;
        }
        const auto L1 = run(density, r.times);
        for (std::size_t j = 0; j < V.size(); ++j) {
            r.quad_error[j] = err[j];
            for (std::size_t m = 0; m < M; ++m) r.terms[j][m].q0_term += L1[j][m];
        }
        r.parameters.push_back({"q0_panel_density", double(density)});
    }

    for (std::size_t j = 0; j < V.size(); ++j)
        for (std::size_t m = 0; m < M; ++m) {
            const auto& tb = r.terms[j][m];
            r.values[j][m] = tb.q0_term + tb.pv_term + tb.residue_term + tb.origin_term;
        }
    r.parameters.insert(r.parameters.begin(), {{"L", 0.0}, {"R_max", s_max}, {"delta0", 0.0}});
    return r;
}

} // namespace dnmap
