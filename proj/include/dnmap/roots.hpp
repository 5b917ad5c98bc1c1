#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"
#include "poly.hpp"
#include "problem.hpp"

namespace dnmap {

/// (omega(z) - omega(xi)) / (z - xi) as a polynomial in z of degree n - 1.
struct QuotientPolynomial {
    cplx xi;
    cvec coeffs; ///< low-to-high

    cplx operator()(cplx z) const { return poly::eval(coeffs, z); }
};

inline QuotientPolynomial quotient_polynomial(const DispersionPolynomial& d, cplx xi) {
    return {xi, poly::deflate(d.coeffs(), xi)};
}

inline cvec solve_roots(const QuotientPolynomial& q) {
    if (q.coeffs.size() < 2) throw StructuralError("solve_roots: quotient has degree 0");
    if (q.coeffs.back() == cplx(0.0)) throw StructuralError("solve_roots: degenerate leading coefficient");
    return poly::roots(q.coeffs);
}

namespace detail {

/// Permutation p minimising sum |a[i] - b[p[i]]| over the first `count`
/// entries of a; b may be longer. Also reports the runner-up cost.
inline std::vector<std::size_t> best_matching(const cvec& a, std::size_t count, const cvec& b, double* best_cost = nullptr,
                                              double* second_cost = nullptr) {
    std::vector<std::size_t> idx(b.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::size_t> best;
    double c1 = std::numeric_limits<double>::infinity(), c2 = c1;
    // permutations of b restricted to the first `count` slots; duplicates of
    // the same prefix are skipped by sorting the tail
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < count; ++i) c += std::abs(a[i] - b[idx[i]]);
        if (c < c1) {
            c2 = c1;
            c1 = c;
            best.assign(idx.begin(), idx.begin() + long(count));
        } else if (c < c2 && !std::equal(best.begin(), best.end(), idx.begin())) {
            c2 = c;
        }
        std::reverse(idx.begin() + long(count), idx.end());
    } while (std::next_permutation(idx.begin(), idx.end()));
    if (best_cost) *best_cost = c1;
    if (second_cost) *second_cost = c2;
    return best;
}

inline double min_separation(const cvec& r) {
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j) s = std::min(s, std::abs(r[i] - r[j]));
    return s;
}

} // namespace detail

/// Picks the N roots below the real axis and labels them by the monomial
/// asymptotes rho^{i+n-N-k} xi, i = 1..N.
inline cvec select_lower_branches(const cvec& roots, cplx xi, int k, const SectorDecomposition& s) {
    cvec lower;
    for (const cplx& z : roots)
        if (z.imag() < 0.0) lower.push_back(z);
    if (int(lower.size()) != s.N)
        throw GeometryError("select_lower_branches: " + std::to_string(lower.size()) + " roots below the real axis, expected " +
                            std::to_string(s.N) + " (seeding radius too small)");
    const int n = s.n;
    cvec asym(std::size_t(s.N));
    for (int i = 1; i <= s.N; ++i) asym[std::size_t(i - 1)] = polar1(2.0 * pi * (i + n - s.N - k) / n) * xi;
    const auto p = detail::best_matching(asym, asym.size(), lower);
    cvec out(asym.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lower[p[i]];
    return out;
}

/// Branch values z_1^k..z_N^k sampled along a contour.
struct RootBranchSet {
    int k = 1;
    cvec samples;             ///< xi values
    std::vector<cvec> branches; ///< branches[s][i] = z_{i+1}^k(samples[s])
};

/// Continuation of the spectral roots. A state holds all n - 1 roots; the
/// first N are the labelled lower branches of the current sector.
class BranchTracker {
public:
    using State = cvec;

    BranchTracker(DispersionPolynomial d, SectorDecomposition s, double seed_radius)
        : d_(std::move(d)), s_(std::move(s)), R_(seed_radius) {}

    const SectorDecomposition& sectors() const { return s_; }
    double seed_radius() const { return R_; }
    int N() const { return s_.N; }

    cvec roots_at(cplx xi) const { return solve_roots(quotient_polynomial(d_, xi)); }

    /// Labelled state at the seeding point R e^{i mid_k}.
    State seed(int k) const {
        const cplx xi = R_ * polar1(s_.mid(k));
        const cvec all = roots_at(xi);
        const cvec lab = select_lower_branches(all, xi, k, s_);
        State st = lab;
        for (const cplx& z : all) {
            bool used = false;
            for (const cplx& w : lab)
                if (z == w) used = true;
            if (!used) st.push_back(z);
        }
        return st;
    }

    /// Continues `st` (valid at `from`) to `to` along the segment.
    State step(const State& st, cplx from, cplx to, int depth = 0) const {
        if (st.size() <= 1) return roots_at(to);
        const cvec r = roots_at(to);
        double c1 = 0.0, c2 = 0.0;
        const auto p = detail::best_matching(st, st.size(), r, &c1, &c2);
        State nx(st.size());
        double disp = 0.0;
        for (std::size_t i = 0; i < st.size(); ++i) {
            nx[i] = r[p[i]];
            disp = std::max(disp, std::abs(nx[i] - st[i]));
        }
        const double sep = std::min(detail::min_separation(r), detail::min_separation(st));
        const bool ambiguous = c2 - c1 <= 1e-12 * c2;
        if (disp < 0.25 * sep && !ambiguous) return nx;
        if (depth >= 48)
            throw RefinementError("branch tracking: ambiguous root matching near xi = (" + std::to_string(to.real()) + ", " +
                                  std::to_string(to.imag()) + "); sample the contour more densely or move it off the root collision");
        const cplx mid = 0.5 * (from + to);
        return step(step(st, from, mid, depth + 1), mid, to, depth + 1);
    }

    /// Straight segment in `pieces` equal steps.
    State walk_segment(State st, cplx from, cplx to, int pieces = 16) const {
        for (int i = 0; i < pieces; ++i) {
            const cplx a = from + (to - from) * (double(i) / pieces);
            const cplx b = i + 1 == pieces ? to : from + (to - from) * (double(i + 1) / pieces);
            st = step(st, a, b);
        }
        return st;
    }

    /// Arc |xi| = r from angle a0 to a1 (signed sweep, no wrapping).
    State walk_arc(State st, double r, double a0, double a1) const {
        const int pieces = std::max(4, int(std::ceil(std::abs(a1 - a0) / (pi / 48.0))));
        for (int i = 0; i < pieces; ++i) {
            const double t0 = a0 + (a1 - a0) * i / pieces;
            const double t1 = i + 1 == pieces ? a1 : a0 + (a1 - a0) * (i + 1) / pieces;
            st = step(st, r * polar1(t0), r * polar1(t1));
        }
        return st;
    }

    /// State at an arbitrary target: seed, radial along the sector mid-ray,
    /// then along |xi| = |target| to its argument (via the shorter sweep).
    State at(int k, cplx target) const {
        State st = seed(k);
        const double mid = s_.mid(k);
        const double r = std::abs(target);
        const cplx on_mid = r * polar1(mid);
        st = walk_segment(st, R_ * polar1(mid), on_mid, 32);
        if (r == 0.0) return st;
        double sweep = wrap_angle(std::arg(target) - mid);
        if (sweep > pi) sweep -= 2.0 * pi;
        st = walk_arc(st, r, mid, mid + sweep);
        return step(st, r * polar1(mid + sweep), target);
    }

    /// Labelled branches along an ordered path starting from `st` at path[0].
    std::vector<cvec> along(State st, const cvec& path) const {
        std::vector<cvec> out;
        out.reserve(path.size());
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (i > 0) st = step(st, path[i - 1], path[i]);
            out.emplace_back(st.begin(), st.begin() + s_.N);
        }
        return out;
    }

private:
    DispersionPolynomial d_;
    SectorDecomposition s_;
    double R_;
};

/// Seeding radius 10 (1 + sum_{j<n} |a_j|), doubled (at most six times) until
/// every upper sector shows exactly N lower roots, well separated, at 64 probe
/// angles.
inline double seeding_radius(const DispersionPolynomial& d, const SectorDecomposition& s) {
    double R = 10.0 * (1.0 + d.lower_norm());
    for (int attempt = 0; attempt <= 6; ++attempt, R *= 2.0) {
        bool ok = true;
        for (int k = 1; k <= s.upper_count() && ok; ++k) {
            for (int j = 0; j < 64 && ok; ++j) {
                const double ang = s.theta1(k) + (j + 0.5) / 64.0 * (s.theta2(k) - s.theta1(k));
                const cvec r = solve_roots(quotient_polynomial(d, R * polar1(ang)));
                int below = 0;
                for (const cplx& z : r) below += z.imag() < 0.0;
                if (below != s.N) ok = false;
                if (r.size() > 1 && detail::min_separation(r) < 1e-3 * R) ok = false;
            }
        }
        if (ok) return R;
    }
    throw GeometryError("seeding_radius: no radius with the asymptotic root count found");
}

/// Branches along a sampled contour, seeded from the largest-|xi| sample.
inline RootBranchSet track_branches(const DispersionPolynomial& d, const cvec& contour, int k) {
    const SectorDecomposition s = sector_decomposition(d);
    BranchTracker tr(d, s, seeding_radius(d, s));
    RootBranchSet out;
    out.k = k;
    out.samples = contour;
    out.branches.resize(contour.size());
    if (contour.empty()) return out;
    std::size_t top = 0;
    for (std::size_t i = 1; i < contour.size(); ++i)
        if (std::abs(contour[i]) > std::abs(contour[top])) top = i;
    const auto st0 = tr.at(k, contour[top]);
    auto st = st0;
    out.branches[top].assign(st.begin(), st.begin() + s.N);
    for (std::size_t i = top + 1; i < contour.size(); ++i) {
        st = tr.step(st, contour[i - 1], contour[i]);
        out.branches[i].assign(st.begin(), st.begin() + s.N);
    }
    st = st0;
    for (std::size_t i = top; i-- > 0;) {
        st = tr.step(st, contour[i + 1], contour[i]);
        out.branches[i].assign(st.begin(), st.begin() + s.N);
    }
    return out;
}

} // namespace dnmap
