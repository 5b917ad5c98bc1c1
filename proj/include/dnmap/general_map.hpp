#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "alternant.hpp"
#include "core.hpp"
#include "geometry.hpp"
#include "monomial_map.hpp"
#include "parallel.hpp"
#include "problem.hpp"
#include "quadrature.hpp"
#include "roots.hpp"

namespace dnmap {

/// One quadrature node of a deformed contour. `track` is where the branches
/// are continued (nudged off rays carrying branch points); `xi` is where the
/// integrand is evaluated; `dxi` is weight times direction and orientation.
struct ContourPoint {
    cplx xi;
    cplx track;
    cplx dxi;
};

/// Node sets of sector k.
///   q0_path: in along beta_k from R_max to L, arc |xi| = L to alpha_k, out
///            along alpha_k to R_max (decaying factor e^{-omega t}).
///   pv_out:  alpha_k tail (infinity to L), arc L to the low wedge ray, the
///            low wedge ray from L to 0.
///   pv_in:   same for beta_k and the high wedge ray, with reversed sign.
struct ContourSpec {
    int k = 1;
    double L = 0.0;
    double R_max = 0.0;
    double delta0 = 0.0;
    std::vector<ContourPoint> q0_path;
    std::vector<ContourPoint> pv_out;
    std::vector<ContourPoint> pv_in;
};

namespace detail {

constexpr double ray_nudge = 1e-9;

inline bool on_ray(cplx z, double ang) { return std::abs(z) > 0.0 && angular_distance(std::arg(z), ang) < 1e-9; }

/// Panels on [a, b] graded geometrically towards `a` (towards_a) or `b`.
inline void graded(double a, double b, bool towards_a, int levels, int m, std::vector<double>& xs, std::vector<double>& ws) {
    const double len = b - a;
    double hi = len;
    for (int j = 0; j < levels; ++j) {
        const double lo = 0.5 * hi;
        if (towards_a) quad::panel(a + lo, a + hi, m, xs, ws);
        else quad::panel(b - hi, b - lo, m, xs, ws);
        hi = lo;
    }
    if (towards_a) quad::panel(a, a + hi, m, xs, ws);
    else quad::panel(b - hi, b, m, xs, ws);
}

inline void uniform(double a, double b, double hmax, int m, std::vector<double>& xs, std::vector<double>& ws) {
    const int P = std::max(1, int(std::ceil((b - a) / hmax - 1e-12)));
    for (int j = 0; j < P; ++j) quad::panel(a + (b - a) * j / P, j + 1 == P ? b : a + (b - a) * (j + 1) / P, m, xs, ws);
}

/// Nodes on [0, R] for a wedge ray: a common graded corner panel [0, c0],
/// symmetric folds (s0 - delta, s0 + delta) around zeros, and grading into
/// branch points lying on the ray.
inline void wedge_ray_nodes(double R, double c0, const std::vector<double>& zeros, const std::vector<double>& branch, double delta,
                            int density, std::vector<double>& xs, std::vector<double>& ws) {
    std::vector<double> cuts = {0.0, c0, R};
    for (double z : zeros) {
        cuts.push_back(z - delta);
        cuts.push_back(z + delta);
    }
    for (double b : branch) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), cuts.end());
    auto is_branch = [&](double s) {
        for (double b : branch)
            if (std::abs(s - b) < 1e-14) return true;
        return false;
    };
    const double hmax = R / (12.0 * density);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        bool fold = false;
        for (double z : zeros)
            if (std::abs(a - (z - delta)) < 1e-14 && std::abs(b - (z + delta)) < 1e-14) fold = true;
        if (fold) {
            const double s0 = 0.5 * (a + b);
            std::vector<double> ux, uw;
            uniform(0.0, 0.5 * (b - a), 0.5 * (b - a) / density, 16, ux, uw);
            for (std::size_t q = 0; q < ux.size(); ++q) {
                xs.push_back(s0 + ux[q]);
                ws.push_back(uw[q]);
                xs.push_back(s0 - ux[q]);
                ws.push_back(uw[q]);
            }
            continue;
        }
        if (a == 0.0) {
            graded(a, b, true, 44, 8 + 8 * (density > 1), xs, ws);
            continue;
        }
        const bool ga = is_branch(a), gb = is_branch(b);
        if (ga && gb) {
            const double mid = 0.5 * (a + b);
            graded(a, mid, true, 30, 12, xs, ws);
            graded(mid, b, false, 30, 12, xs, ws);
        } else if (ga) {
            graded(a, b, true, 30, 12, xs, ws);
        } else if (gb) {
            graded(a, b, false, 30, 12, xs, ws);
        } else {
            uniform(a, b, hmax, 16, xs, ws);
        }
    }
}

inline void push_arc(std::vector<ContourPoint>& out, double R, double a0, double a1, int density) {
    std::vector<double> xs, ws;
    const int P = std::max(2, int(std::ceil(std::abs(a1 - a0) / (pi / 24.0)))) * density;
    for (int j = 0; j < P; ++j) quad::panel(a0 + (a1 - a0) * j / P, a0 + (a1 - a0) * (j + 1) / P, 16, xs, ws);
    for (std::size_t q = 0; q < xs.size(); ++q) {
        const cplx xi = R * polar1(xs[q]);
        out.push_back({xi, xi, I * xi * ws[q]});
    }
}

} // namespace detail

/// Sector-k contours. `zeros` are the nonzero omega-zeros, `branch` the branch
/// points (both used only when they lie on the wedge rays).
inline ContourSpec make_contour(const SectorDecomposition& s, int k, double L, double R_max, double delta0, const cvec& zeros,
                                const cvec& branch, double corner, int density) {
    ContourSpec c;
    c.k = k;
    c.L = L;
    c.R_max = R_max;
    c.delta0 = delta0;
    const double a = s.alpha(k), b = s.beta(k);
    const double lo = s.wedge_low(k), hi = s.wedge_high(k);

    // q0 contour
    if (R_max > L) {
        std::vector<double> xs, ws;
        const int P = 24 * density;
        for (int j = 0; j < P; ++j) {
            const double r0 = L * std::pow(R_max / L, double(j) / P), r1 = L * std::pow(R_max / L, double(j + 1) / P);
            quad::panel(r0, r1, 16, xs, ws);
        }
        for (std::size_t q = xs.size(); q-- > 0;) {
            const cplx xi = xs[q] * polar1(b);
            c.q0_path.push_back({xi, xi, -polar1(b) * ws[q]});
        }
        detail::push_arc(c.q0_path, L, b, a, density);
        for (std::size_t q = 0; q < xs.size(); ++q) {
            const cplx xi = xs[q] * polar1(a);
            c.q0_path.push_back({xi, xi, polar1(a) * ws[q]});
        }
    }

    // principal-value contours
    auto side = [&](double tail_ang, double ray_ang, double nudge, double sign, std::vector<ContourPoint>& out) {
        std::vector<double> ux, uw;
        detail::uniform(0.0, 1.0, 1.0 / (12.0 * density), 16, ux, uw);
        // tail: s = L / u, far end first
        for (std::size_t q = 0; q < ux.size(); ++q) {
            const double sv = L / ux[q];
            const cplx xi = sv * polar1(tail_ang);
            out.push_back({xi, xi, sign * polar1(tail_ang) * (uw[q] * L / (ux[q] * ux[q]))});
        }
        // the path runs tail -> wedge ray; the outgoing side is oriented the other way
        std::vector<ContourPoint> arc;
        detail::push_arc(arc, L, tail_ang, ray_ang, density);
        for (auto& p : arc) {
            p.dxi *= -sign;
            out.push_back(p);
        }
        std::vector<double> zs, bs;
        for (const cplx& z : zeros)
            if (detail::on_ray(z, ray_ang)) zs.push_back(std::abs(z));
        for (const cplx& z : branch)
            if (detail::on_ray(z, ray_ang) && std::abs(z) < L) bs.push_back(std::abs(z));
        std::vector<double> xs, ws;
        detail::wedge_ray_nodes(L, corner, zs, bs, delta0, density, xs, ws);
        std::vector<std::size_t> order(xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] > xs[j]; });
        for (std::size_t i : order) {
            const cplx xi = xs[i] * polar1(ray_ang);
            const cplx tr = xs[i] * polar1(ray_ang + nudge);
            out.push_back({xi, tr, sign * polar1(ray_ang) * ws[i]});
        }
    };
    side(a, lo, +detail::ray_nudge, 1.0, c.pv_out);
    side(b, hi, -detail::ray_nudge, -1.0, c.pv_in);
    return c;
}

/// Nearest-match labelled roots at `xi`, given a state continued nearby.
inline cvec snap_branches(const BranchTracker& tr, const BranchTracker::State& st, cplx xi) {
    const cvec r = tr.roots_at(xi);
    const auto p = detail::best_matching(st, st.size(), r);
    cvec out(static_cast<std::size_t>(tr.N()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[p[i]];
    return out;
}

/// Labelled branches at each contour point, continued along the path.
inline std::vector<cvec> branches_along(const BranchTracker& tr, int k, const std::vector<ContourPoint>& path) {
    std::vector<cvec> out;
    if (path.empty()) return out;
    out.reserve(path.size());
    BranchTracker::State st = tr.at(k, path.front().track);
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) st = tr.step(st, path[i - 1].track, path[i].track);
        out.push_back(path[i].xi == path[i].track ? cvec(st.begin(), st.begin() + tr.N()) : snap_branches(tr, st, path[i].xi));
    }
    return out;
}

/// PV integral of F(xi) = Qdiff(xi) omega'(xi)/omega(xi) f-transform(xi, t)
/// along a wedge ray [0, R] with symmetric folds around on-ray zeros.
template <class Qfun>
cplx pv_ray_integral(Qfun&& Qdiff, const DispersionPolynomial& d, const Signal& f, double t, double ray_angle, double R,
                     double delta, int density = 1) {
    std::vector<double> zs;
    for (const cplx& z : poly::roots(d.coeffs()))
        if (detail::on_ray(z, ray_angle) && std::abs(z) < R) zs.push_back(std::abs(z));
    if (!zs.empty()) {
        for (double z : zs)
            if (z - delta <= 0.0 || z + delta >= R) throw DomainError("pv_ray_integral: exclusion window overlaps the ray ends; shrink delta");
    }
    std::vector<double> xs, ws;
    detail::wedge_ray_nodes(R, std::min(0.25 * R, zs.empty() ? 0.25 * R : 0.5 * (*std::min_element(zs.begin(), zs.end()) - delta)), zs,
                            {}, delta, density, xs, ws);
    const int cells = 2048;
    std::vector<double> nodes(std::size_t(cells) + 1);
    cvec fd(nodes.size());
    for (int i = 0; i <= cells; ++i) {
        nodes[std::size_t(i)] = t * i / cells;
        fd[std::size_t(i)] = f.derivative(nodes[std::size_t(i)]);
    }
    cplx acc = 0.0;
    cvec E;
    const cplx dir = polar1(ray_angle);
    for (std::size_t q = 0; q < xs.size(); ++q) {
        const cplx xi = xs[q] * dir;
        const cplx w = d(xi);
        TimeTransform::run(w, nodes, fd, E);
        acc += Qdiff(xi) * d.derivative(xi) / w * E.back() * dir * ws[q];
    }
    return acc;
}

/// Residue bookkeeping of the general map, per (j, l), to be multiplied by
/// g_l(t) - g_l(0). Interior zeros weigh 2 pi i, boundary zeros pi i, the
/// origin (pi i/(n-N)) times its multiplicity.
struct ResidueTable {
    std::vector<cvec> interior; ///< [j][l], summed over sectors
    std::vector<cvec> origin;   ///< [j][l]
};

inline ResidueTable residue_corrections(const DispersionPolynomial& d, const OmegaZeroSet& zeros, const BranchTracker& tr,
                                        const std::vector<int>& V, const std::vector<int>& U) {
    const auto& s = tr.sectors();
    const int nN = s.upper_count();
    ResidueTable out;
    out.interior.assign(V.size(), cvec(U.size(), 0.0));
    out.origin.assign(V.size(), cvec(U.size(), 0.0));
    for (int k = 1; k <= nN; ++k) {
        for (const auto& z : zeros.zeros) {
            const auto place = z.placement[std::size_t(k - 1)];
            if (place == ZeroPlacement::Outside) continue;
            if (z.value == cplx(0.0)) {
                // roots may collide at the origin; extrapolate Q from the mid ray
                const double eps = 1e-4;
                std::vector<cvec> qs;
                for (double f : {1.0, 2.0, 4.0}) {
                    const auto st = tr.at(k, f * eps * polar1(s.mid(k)));
                    const cvec b(st.begin(), st.begin() + tr.N());
                    try {
                        qs.push_back(cvec());
                        const auto aq = alternant_quotients(d, b, V, U);
                        for (std::size_t j = 0; j < V.size(); ++j)
                            for (std::size_t l = 0; l < U.size(); ++l) qs.back().push_back(aq.Q[j][l]);
                    } catch (const StructuralError&) {
                        throw UnsupportedConfiguration("residue_corrections: quotient undefined near the origin");
                    }
                }
                for (std::size_t j = 0; j < V.size(); ++j)
                    for (std::size_t l = 0; l < U.size(); ++l) {
                        const std::size_t i = j * U.size() + l;
                        const cplx q = (8.0 * qs[0][i] - 6.0 * qs[1][i] + qs[2][i]) / 3.0;
                        out.origin[j][l] += ipow(V[j] - U[l] + 1) * q * (pi * I / double(nN)) * double(z.multiplicity);
                    }
                continue;
            }
            cvec br;
            if (place == ZeroPlacement::Interior) {
                const auto st = tr.at(k, z.value);
                br.assign(st.begin(), st.begin() + tr.N());
            } else {
                const double ang = std::arg(z.value);
                const double into = angular_distance(ang, s.wedge_low(k)) < 1e-9 ? detail::ray_nudge : -detail::ray_nudge;
                br = snap_branches(tr, tr.at(k, std::abs(z.value) * polar1(ang + into)), z.value);
            }
            AlternantQuotients aq;
            try {
                aq = alternant_quotients(d, br, V, U);
            } catch (const StructuralError&) {
                throw UnsupportedConfiguration("residue_corrections: quotient undefined at an omega-zero (root collision)");
            }
            for (std::size_t j = 0; j < V.size(); ++j)
                for (std::size_t l = 0; l < U.size(); ++l) {
                    const cplx c = ipow(V[j] - U[l] + 1) * aq.Q[j][l];
                    if (z.value == cplx(0.0)) out.origin[j][l] += c * (pi * I / double(nN)) * double(z.multiplicity);
                    else if (place == ZeroPlacement::Interior) out.interior[j][l] += c * 2.0 * pi * I;
                    else out.interior[j][l] += c * pi * I;
                }
        }
    }
    return out;
}

namespace detail {

struct PVNode {
    cplx omega;
    std::vector<cvec> H; ///< [j][l], multiplies the g-dot time transform
};

/// Refusals specific to the general map.
inline void check_general_support(const BoundaryValueProblem& p, const SectorDecomposition& s, const OmegaZeroSet& zs,
                                  const SingularPoints& sp) {
    for (const auto& z : zs.zeros)
        if (z.value != cplx(0.0) && z.multiplicity > 1)
            throw UnsupportedConfiguration("omega has a multiple zero away from the origin");
    if (s.N < s.n - 1) {
        for (const cplx& b : sp.branch)
            for (int k = 1; k <= s.upper_count(); ++k)
                if (classify_angle(std::arg(b), k, s.upper_count()) == ZeroPlacement::Interior && std::abs(b) > 1e-12)
                    throw UnsupportedConfiguration("a branch point of the spectral roots lies inside a sector wedge");
    }
    (void)p;
}

/// Exponential data whose transform pole is crossed by the q0 contour
/// deformation are refused.
inline void check_q0_poles(const BoundaryValueProblem& p, const BranchTracker& tr, double L) {
    if (p.initial.kind() != InitialData::Kind::Exponential) return;
    const auto& s = tr.sectors();
    const cplx k0 = p.initial.k();
    const cvec cand = solve_roots(quotient_polynomial(p.dispersion, k0));
    for (int k = 1; k <= s.upper_count(); ++k)
        for (const cplx& xs : cand) {
            if (std::abs(xs) < L) continue;
            const double ang = std::arg(xs);
            const double rel = wrap_angle(ang - s.alpha(k));
            if (rel > s.beta(k) - s.alpha(k) + 1e-12) continue;
            const auto st = tr.at(k, xs);
            for (int i = 0; i < tr.N(); ++i)
                if (std::abs(st[std::size_t(i)] - k0) < 1e-8 * std::max(1.0, std::abs(k0)))
                    throw UnsupportedConfiguration("q0 transform pole is crossed by the contour deformation");
        }
}

/// Radius beyond which e^{-omega t_min} is negligible on both rotated rays.
inline double q0_ray_length(const DispersionPolynomial& d, const SectorDecomposition& s, double L, double t_min) {
    double R = std::max(2.0 * L, 1.0);
    for (int it = 0; it < 200; ++it) {
        bool ok = true;
        for (int k = 1; k <= s.upper_count(); ++k)
            for (double ang : {s.alpha(k), s.beta(k)})
                if (d(R * polar1(ang)).real() * t_min < 60.0 + s.n * std::log(R)) ok = false;
        if (ok) return R;
        R *= 1.25;
    }
    throw ConvergenceError("q0 ray truncation radius not found");
}

} // namespace detail

/// Boundary values d^{v_j} q(t, 0) for a general symbol (n <= 5, canonical
/// given orders).
inline DNMapResult general_dn_map(const BoundaryValueProblem& p, const TimeGrid& grid, const MapOptions& opt = {}) {
    require_valid(p);
    {
        const auto v = validate_general(p);
        if (!v.empty()) {
            std::string msg = "problem fails validation:";
            for (const auto& x : v) msg += " [" + x.code + "] " + x.message + ";";
            throw ValidationError(msg);
        }
    }
    const auto& d = p.dispersion;
    const SectorDecomposition s = sector_decomposition(d);
    const int nN = s.upper_count();
    const auto V = p.unknown_orders();
    const auto& U = p.given_orders;
    const OmegaZeroSet zs = zeros_of_omega(d, nN);
    const SingularPoints sp = singular_points(d);
    detail::check_general_support(p, s, zs, sp);

    const double L = std::max(0.5, 1.25 * sp.radius);
    const BranchTracker tr(d, s, seeding_radius(d, s));
    detail::check_q0_poles(p, tr, L);

    cvec nonzero;
    for (const auto& z : zs.zeros)
        if (z.value != cplx(0.0)) nonzero.push_back(z.value);

    // PV half-window and common corner panel
    double delta0 = 0.0, corner = 0.25 * L;
    {
        std::vector<double> onray;
        for (const cplx& z : nonzero)
            for (int k = 1; k <= nN; ++k)
                if (detail::on_ray(z, s.wedge_low(k)) || detail::on_ray(z, s.wedge_high(k))) onray.push_back(std::abs(z));
        if (!onray.empty()) {
            delta0 = 0.25;
            for (const cplx& z : nonzero) {
                const double r = std::abs(z);
                delta0 = std::min({delta0, 0.25 * r, 0.25 * (L - r)});
                for (const cplx& b : sp.branch)
                    if (std::abs(b - z) > 1e-12) delta0 = std::min(delta0, 0.4 * std::abs(b - z));
                for (const cplx& w : nonzero)
                    if (w != z) delta0 = std::min(delta0, 0.4 * std::abs(w - z));
            }
        }
        double first = L;
        for (const cplx& z : nonzero) first = std::min(first, std::abs(z) - delta0);
        for (const cplx& b : sp.branch)
            if (std::abs(b) > 1e-12) first = std::min(first, std::abs(b));
        corner = std::min(corner, 0.5 * first);
    }

    DNMapResult r;
    r.orders = V;
    const std::size_t M = grid.output_count();
    for (std::size_t m = 0; m < M; ++m) r.times.push_back(grid.output_time(m));
    r.values.assign(V.size(), cvec(M, 0.0));
    r.terms.assign(V.size(), std::vector<TermBreakdown>(M));
    r.quad_error.assign(V.size(), 0.0);

    const std::size_t K = grid.size();
    std::vector<cvec> g(U.size(), cvec(K)), gd(U.size(), cvec(K));
    for (std::size_t l = 0; l < U.size(); ++l)
        for (std::size_t i = 0; i < K; ++i) {
            g[l][i] = p.boundary_signals[l].value(grid.nodes[i]);
            gd[l][i] = p.boundary_signals[l].derivative(grid.nodes[i]);
        }
    bool need_q0_path = p.initial.kind() != InitialData::Kind::Zero;
    for (std::size_t l = 0; l < U.size(); ++l)
        if (g[l][0] != cplx(0.0)) need_q0_path = true;
    const double R_max = need_q0_path ? detail::q0_ray_length(d, s, L, r.times.front()) : L;

    const double scale = 1.0 / (2.0 * pi * nN);

    // assembles node data for one density
    auto build = [&](int density, std::vector<detail::RayNode>& qn, std::vector<detail::PVNode>& pn) {
        qn.clear();
        pn.clear();
        for (int k = 1; k <= nN; ++k) {
            const ContourSpec c = make_contour(s, k, L, R_max, delta0, nonzero, sp.branch, corner, density);
            if (need_q0_path) {
                const auto br = branches_along(tr, k, c.q0_path);
                for (std::size_t q = 0; q < c.q0_path.size(); ++q) {
                    const auto& pt = c.q0_path[q];
                    const auto aq = alternant_quotients(d, br[q], V, U);
                    const cplx w = d(pt.xi), dw = d.derivative(pt.xi);
                    detail::RayNode nd;
                    nd.xi = pt.xi;
                    nd.omega = w;
                    nd.G.assign(V.size(), 0.0);
                    cvec qh(br[q].size(), 0.0);
                    if (p.initial.kind() != InitialData::Kind::Zero)
                        for (std::size_t i = 0; i < qh.size(); ++i) qh[i] = half_line_transform(p.initial, br[q][i]);
                    for (std::size_t j = 0; j < V.size(); ++j) {
                        cplx x = 0.0;
                        for (std::size_t i = 0; i < qh.size(); ++i) x += aq.system.minor_quotient(j, i) * qh[i];
                        cplx acc = -ipow(V[j]) * x * dw;
                        for (std::size_t l = 0; l < U.size(); ++l)
                            acc -= ipow(V[j] - U[l] + 1) * g[l][0] * aq.Q[j][l] * dw / w;
                        nd.G[j] = acc * pt.dxi * scale;
                    }
                    qn.push_back(std::move(nd));
                }
            }
            for (const auto* path : {&c.pv_out, &c.pv_in}) {
                const auto br = branches_along(tr, k, *path);
                for (std::size_t q = 0; q < path->size(); ++q) {
                    const auto& pt = (*path)[q];
                    const auto aq = alternant_quotients(d, br[q], V, U);
                    const cplx w = d(pt.xi), dw = d.derivative(pt.xi);
                    detail::PVNode nd;
                    nd.omega = w;
                    nd.H.assign(V.size(), cvec(U.size(), 0.0));
                    for (std::size_t j = 0; j < V.size(); ++j)
                        for (std::size_t l = 0; l < U.size(); ++l)
                            nd.H[j][l] = -ipow(V[j] - U[l] + 1) * aq.Q[j][l] * dw / w * pt.dxi * scale;
                    pn.push_back(std::move(nd));
                }
            }
        }
    };

    // PV sums at the requested output indices, chunked for determinism
    auto pv_sum = [&](const std::vector<detail::PVNode>& pn, const std::vector<std::size_t>& outs) {
        constexpr std::size_t chunk = 32;
        const std::size_t chunks = (pn.size() + chunk - 1) / chunk;
        std::vector<std::vector<cvec>> part(chunks, std::vector<cvec>(V.size(), cvec(outs.size(), 0.0)));
        parallel_for_chunks(chunks, opt.jobs, [&](std::size_t c) {
            cvec E;
            auto& acc = part[c];
            const std::size_t end = std::min(pn.size(), (c + 1) * chunk);
            for (std::size_t q = c * chunk; q < end; ++q) {
                for (std::size_t l = 0; l < U.size(); ++l) {
                    TimeTransform::run(pn[q].omega, grid.nodes, gd[l], E);
                    for (std::size_t j = 0; j < V.size(); ++j) {
                        const cplx h = pn[q].H[j][l];
                        for (std::size_t m = 0; m < outs.size(); ++m) acc[j][m] += h * E[grid.first_output + outs[m]];
                    }
                }
            }
        });
        std::vector<cvec> total(V.size(), cvec(outs.size(), 0.0));
        for (const auto& pc : part)
            for (std::size_t j = 0; j < V.size(); ++j)
                for (std::size_t m = 0; m < outs.size(); ++m) total[j][m] += pc[j][m];
        return total;
    };

    std::vector<double> probe_t;
    const std::vector<std::size_t> probe_i = {0, M / 2, M - 1};
    for (std::size_t i : probe_i) probe_t.push_back(r.times[i]);

    int density = std::max(1, opt.density);
    std::vector<detail::RayNode> qn, qn2;
    std::vector<detail::PVNode> pn, pn2;
    build(density, qn, pn);
    for (int attempt = 0; attempt < 2; ++attempt) {
        build(2 * density, qn2, pn2);
        const auto a1 = pv_sum(pn, probe_i), a2 = pv_sum(pn2, probe_i);
        std::vector<cvec> b1(V.size(), cvec(probe_t.size(), 0.0)), b2 = b1;
        if (need_q0_path) {
            b1 = detail::contour_sum(qn, V.size(), probe_t, opt.jobs);
            b2 = detail::contour_sum(qn2, V.size(), probe_t, opt.jobs);
        }
        double worst = 0.0;
        for (std::size_t j = 0; j < V.size(); ++j) {
            r.quad_error[j] = 0.0;
            for (std::size_t m = 0; m < probe_t.size(); ++m)
                r.quad_error[j] = std::max(r.quad_error[j], std::abs(a1[j][m] + b1[j][m] - a2[j][m] - b2[j][m]));
            worst = std::max(worst, r.quad_error[j]);
        }
        if (worst <= opt.tol) break;
        density *= 2;
        std::swap(qn, qn2);
        std::swap(pn, pn2);
    }

    std::vector<std::size_t> all(M);
    for (std::size_t m = 0; m < M; ++m) all[m] = m;
    const auto pv = pv_sum(pn, all);
    std::vector<cvec> q0(V.size(), cvec(M, 0.0));
    if (need_q0_path) q0 = detail::contour_sum(qn, V.size(), r.times, opt.jobs);

    const ResidueTable res = residue_corrections(d, zs, tr, V, U);
    for (std::size_t j = 0; j < V.size(); ++j)
        for (std::size_t m = 0; m < M; ++m) {
            auto& tb = r.terms[j][m];
            tb.q0_term = q0[j][m];
            tb.pv_term = pv[j][m];
            for (std::size_t l = 0; l < U.size(); ++l) {
                const cplx jump = g[l][grid.first_output + m] - g[l][0];
                tb.residue_term += res.interior[j][l] * jump * scale;
                tb.origin_term += res.origin[j][l] * jump * scale;
            }
            r.values[j][m] = tb.q0_term + tb.pv_term + tb.residue_term + tb.origin_term;
        }
    r.parameters = {{"L", L},
                    {"R_max", R_max},
                    {"delta0", delta0},
                    {"seed_radius", tr.seed_radius()},
                    {"corner_panel", corner},
                    {"panel_density", double(density)}};
    return r;
}

} // namespace dnmap
