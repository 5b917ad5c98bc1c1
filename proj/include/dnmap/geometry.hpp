#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"
#include "poly.hpp"
#include "problem.hpp"

namespace dnmap {

/// Angular interval (theta1, theta2) of one sector of the principal domain,
/// theta1 in [0, 2pi), theta2 = theta1 + pi/n (may exceed 2pi).
struct Sector {
    double theta1;
    double theta2;
    bool upper; ///< lies in the upper half-plane
};

/// The n sectors of {Re a_n xi^n < 0}. Upper sectors are numbered k = 1..n-N
/// by increasing angle.
struct SectorDecomposition {
    int n = 0;
    double phi = 0.0; ///< arg a_n in [-pi/2, pi/2]
    int N = 0;
    std::vector<Sector> upper; ///< n - N sectors
    std::vector<Sector> lower; ///< N sectors

    double theta1(int k) const { return upper[std::size_t(k - 1)].theta1; }
    double theta2(int k) const { return upper[std::size_t(k - 1)].theta2; }
    /// Rays rotated by pi/(2n) away from sector k; a_n xi^n > 0 on them.
    double alpha(int k) const { return theta1(k) - pi / (2.0 * n); }
    double beta(int k) const { return theta2(k) + pi / (2.0 * n); }
    /// Mid-angle of upper sector k.
    double mid(int k) const { return 0.5 * (theta1(k) + theta2(k)); }
    int upper_count() const { return n - N; }
    /// Wedge bounding angles (k-1)pi/(n-N) and k pi/(n-N).
    double wedge_low(int k) const { return (k - 1) * pi / (n - N); }
    double wedge_high(int k) const { return k * pi / (n - N); }
};

inline SectorDecomposition sector_decomposition(const DispersionPolynomial& d) {
    SectorDecomposition s;
    s.n = d.degree();
    const cplx an = d.leading();
    s.N = count_unknowns(s.n, an);
    s.phi = std::arg(an);
    const int n = s.n;
    for (int m = 1; m <= n; ++m) {
        double t1 = wrap_angle(pi / (2.0 * n) - (s.phi - 2.0 * (m - 1) * pi) / n);
        // snap to exact multiples of pi/(2n) to keep table values exact
        const double unit = pi / (2.0 * n);
        const double q = std::round(t1 / unit);
        if (std::abs(t1 - q * unit) < 1e-13) t1 = q * unit;
        if (t1 >= 2.0 * pi - 1e-13) t1 = 0.0;
        Sector sec{t1, t1 + pi / n, false};
        const double centre = wrap_angle(t1 + pi / (2.0 * n));
        sec.upper = centre > 0.0 && centre < pi;
        (sec.upper ? s.upper : s.lower).push_back(sec);
    }
    auto by_angle = [](const Sector& a, const Sector& b) { return a.theta1 < b.theta1; };
    std::sort(s.upper.begin(), s.upper.end(), by_angle);
    std::sort(s.lower.begin(), s.lower.end(), by_angle);
    if (int(s.lower.size()) != s.N) throw GeometryError("sector_decomposition: lower sector count differs from N");
    return s;
}

/// Re omega(xi) < 0.
inline bool in_domain(const DispersionPolynomial& d, cplx xi) { return d(xi).real() < 0.0; }

/// Re a_n xi^n < 0.
inline bool in_principal_domain(const DispersionPolynomial& d, cplx xi) {
    return (d.leading() * std::pow(xi, d.degree())).real() < 0.0;
}

enum class ZeroPlacement { Interior, Boundary, Outside };

struct OmegaZero {
    cplx value;
    int multiplicity = 1;
    std::vector<ZeroPlacement> placement; ///< per upper wedge k = 1..n-N
};

struct OmegaZeroSet {
    std::vector<OmegaZero> zeros; ///< includes the origin when a_0 = 0
    bool zero_at_origin = false;
    bool clustered = false; ///< two zeros closer than 1e-8
};

/// Classifies arg(zeta) against the open wedge k and its two bounding rays.
inline ZeroPlacement classify_angle(double arg, int k, int n_minus_N, double tol = 1e-9) {
    const double lo = (k - 1) * pi / n_minus_N, hi = k * pi / n_minus_N;
    const double a = wrap_angle(arg);
    if (angular_distance(a, lo) <= tol || angular_distance(a, hi) <= tol) return ZeroPlacement::Boundary;
    if (a > lo && a < hi) return ZeroPlacement::Interior;
    return ZeroPlacement::Outside;
}

inline OmegaZeroSet zeros_of_omega(const DispersionPolynomial& d, int n_minus_N) {
    OmegaZeroSet s;
    s.zero_at_origin = d.coeff(0) == cplx(0.0);
    // exact origin zeros are split off before the numerical solve
    cvec c = d.coeffs();
    int origin_mult = 0;
    while (c.size() > 1 && c.front() == cplx(0.0)) {
        c.erase(c.begin());
        ++origin_mult;
    }
    const cvec r = c.size() > 1 ? poly::roots(c) : cvec{};
    if (origin_mult > 0) {
        OmegaZero z;
        z.value = 0.0;
        z.multiplicity = origin_mult;
        s.zeros.push_back(z);
    }
    for (const cplx& x : r) {
        bool merged = false;
        for (auto& z : s.zeros) {
            if (std::abs(z.value - x) < 1e-8 * std::max(1.0, std::abs(x))) {
                ++z.multiplicity;
                merged = true;
                s.clustered = true;
            }
        }
        if (!merged) s.zeros.push_back({x, 1, {}});
    }
    for (auto& z : s.zeros) {
        for (int k = 1; k <= n_minus_N; ++k) {
            if (z.value == cplx(0.0)) {
                z.placement.push_back(ZeroPlacement::Boundary);
                continue;
            }
            z.placement.push_back(classify_angle(std::arg(z.value), k, n_minus_N));
        }
    }
    return s;
}

/// Points where the spectral-root picture changes: zeros of omega, critical
/// points of omega, and the branch points xi != c with omega(xi) = omega(c).
struct SingularPoints {
    cvec zeros;
    cvec critical;
    cvec branch;
    double radius = 0.0; ///< max modulus over all of the above
};

inline SingularPoints singular_points(const DispersionPolynomial& d) {
    SingularPoints s;
    s.zeros = poly::roots(d.coeffs());
    if (d.degree() >= 2) s.critical = poly::roots(d.derivative_coeffs());
    for (const cplx& c : s.critical) {
        cvec p = d.coeffs();
        p[0] -= d(c);
        for (const cplx& b : poly::roots(p)) {
            bool is_crit = false;
            for (const cplx& c2 : s.critical)
                if (std::abs(b - c2) < 1e-6 * std::max(1.0, std::abs(c2))) is_crit = true;
            if (!is_crit) s.branch.push_back(b);
        }
    }
    // a repeated critical point is itself a collision of two spectral roots
    for (std::size_t i = 0; i < s.critical.size(); ++i)
        for (std::size_t j = i + 1; j < s.critical.size(); ++j)
            if (std::abs(s.critical[i] - s.critical[j]) < 1e-6 * std::max(1.0, std::abs(s.critical[i])))
                s.branch.push_back(s.critical[i]);
    for (const auto* v : {&s.zeros, &s.critical, &s.branch})
        for (const cplx& z : *v) s.radius = std::max(s.radius, std::abs(z));
    return s;
}

} // namespace dnmap
